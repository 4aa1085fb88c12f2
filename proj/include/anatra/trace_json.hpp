#ifndef ANATRA_TRACE_JSON_HPP
#define ANATRA_TRACE_JSON_HPP

// JSON-lines serialization of run traces: one object per evaluation
// ("record": "evaluation") followed by one per iteration ("record": "iteration").

#include "anatra/trace.hpp"

#include <json.hpp>

#include <istream>
#include <ostream>
#include <string>

namespace anatra {

inline nlohmann::json to_json(const EvaluationRecord& r) {
  nlohmann::json j;
  j["record"] = "evaluation";
  j["eval_index"] = r.eval_index;
  j["point"] = std::vector<double>(r.point.data(), r.point.data() + r.point.size());
  j["noisy_value"] = r.noisy_value;
  if (r.true_value) j["true_value"] = *r.true_value;
  j["iteration"] = r.iteration;
  j["event"] = to_string(r.event);
  return j;
}

inline nlohmann::json to_json(const IterationRecord& r) {
  nlohmann::json j;
  j["record"] = "iteration";
  j["k"] = r.k;
  j["rho"] = r.rho ? nlohmann::json(*r.rho) : nlohmann::json(nullptr);
  j["accepted"] = r.accepted;
  j["delta_before"] = r.delta_before;
  j["delta_after"] = r.delta_after;
  j["sampling_radius"] = r.sampling_radius;
  j["noise_estimate"] = r.noise_estimate;
  j["lipschitz"] = r.lipschitz;
  j["gradient_norm"] = r.gradient_norm;
  j["step_norm"] = r.step_norm;
  j["lambda"] = r.lambda;
  j["valid"] = r.valid;
  j["evaluations"] = r.evaluations;
  j["rebuilt_affine"] = r.rebuilt_affine;
  j["reset_to_best"] = r.reset_to_best;
  j["center_value"] = r.center_value;
  j["best_value"] = r.best_value;
  j["skip_reason"] = r.skip_reason;
  return j;
}

inline void write_jsonl(std::ostream& os, const RunTrace& trace) {
  for (const auto& e : trace.evaluations) os << to_json(e).dump() << '\n';
  for (const auto& it : trace.iterations) os << to_json(it).dump() << '\n';
}

inline EvalEvent parse_event(const std::string& s) {
  if (s == "center") return EvalEvent::kCenter;
  if (s == "geometry") return EvalEvent::kGeometry;
  if (s == "trial") return EvalEvent::kTrial;
  throw std::invalid_argument("unknown evaluation event: " + s);
}

/// Reads evaluation records back; iteration records are kept as well. Lines
/// without a "record" field are treated as evaluations, which lets traces from
/// external solvers be imported with just eval_index/point/noisy_value/true_value.
inline RunTrace read_jsonl(std::istream& is) {
  RunTrace trace;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    const std::string kind = j.value("record", std::string("evaluation"));
    if (kind == "evaluation") {
      EvaluationRecord r;
      r.eval_index = j.at("eval_index").get<long>();
      const auto p = j.at("point").get<std::vector<double>>();
      r.point = Eigen::Map<const Vector>(p.data(), static_cast<Eigen::Index>(p.size()));
      r.noisy_value = j.at("noisy_value").get<double>();
      if (j.contains("true_value") && !j["true_value"].is_null()) r.true_value = j["true_value"].get<double>();
      r.iteration = j.value("iteration", 0L);
      r.event = parse_event(j.value("event", std::string("trial")));
      trace.evaluations.push_back(std::move(r));
    } else if (kind == "iteration") {
      IterationRecord r;
      r.k = j.at("k").get<long>();
      if (!j["rho"].is_null()) r.rho = j["rho"].get<double>();
      r.accepted = j.at("accepted").get<bool>();
      r.delta_before = j.at("delta_before").get<double>();
      r.delta_after = j.at("delta_after").get<double>();
      r.sampling_radius = j.at("sampling_radius").get<double>();
      r.noise_estimate = j.at("noise_estimate").get<double>();
      r.lipschitz = j.at("lipschitz").get<double>();
      r.gradient_norm = j.at("gradient_norm").get<double>();
      r.step_norm = j.at("step_norm").get<double>();
      r.lambda = j.at("lambda").get<double>();
      r.valid = j.at("valid").get<bool>();
      r.evaluations = j.at("evaluations").get<long>();
      r.rebuilt_affine = j.at("rebuilt_affine").get<bool>();
      r.reset_to_best = j.at("reset_to_best").get<bool>();
      r.center_value = j.at("center_value").get<double>();
      r.best_value = j.at("best_value").get<double>();
      r.skip_reason = j.at("skip_reason").get<std::string>();
      trace.iterations.push_back(std::move(r));
    }
  }
  return trace;
}

}  // namespace anatra

#endif  // ANATRA_TRACE_JSON_HPP
