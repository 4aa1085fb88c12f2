#ifndef ANATRA_TRACE_HPP
#define ANATRA_TRACE_HPP

#include "anatra/core.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace anatra {

enum class EvalEvent { kCenter, kGeometry, kTrial };

inline const char* to_string(EvalEvent e) {
  switch (e) {
    case EvalEvent::kCenter:
      return "center";
    case EvalEvent::kGeometry:
      return "geometry";
    case EvalEvent::kTrial:
      return "trial";
  }
  return "unknown";
}

struct EvaluationRecord {
  long eval_index = 0;
  Vector point;
  double noisy_value = 0.0;
  std::optional<double> true_value;  // filled in by the benchmark harness
  long iteration = 0;
  EvalEvent event = EvalEvent::kCenter;
};

struct IterationRecord {
  long k = 0;
  std::optional<double> rho;
  bool accepted = false;
  double delta_before = 0.0;
  double delta_after = 0.0;
  double sampling_radius = 0.0;
  double noise_estimate = 0.0;
  double lipschitz = 0.0;
  double gradient_norm = 0.0;
  double step_norm = 0.0;
  double lambda = 0.0;  // poisedness certificate of the model set
  bool valid = false;
  long evaluations = 0;  // oracle calls so far, at the end of the iteration
  bool rebuilt_affine = false;
  bool reset_to_best = false;
  double center_value = 0.0;  // f~(theta_{k+1})
  double best_value = 0.0;    // f~_best at the end of the iteration
  std::string skip_reason;    // empty when a trial point was evaluated
};

struct RunTrace {
  std::string solver;
  std::vector<EvaluationRecord> evaluations;
  std::vector<IterationRecord> iterations;
};

/// Oracle threw or returned a non-finite value. Carries the trace so far.
class OracleFailure : public std::runtime_error {
 public:
  OracleFailure(const std::string& what, RunTrace partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const RunTrace& partial_trace() const { return partial_; }

 private:
  RunTrace partial_;
};

}  // namespace anatra

#endif  // ANATRA_TRACE_HPP
