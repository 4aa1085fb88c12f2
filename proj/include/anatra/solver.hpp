#ifndef ANATRA_SOLVER_HPP
#define ANATRA_SOLVER_HPP

// Noise-aware model-based trust-region solver.
//
// Each iteration: estimate the noise level and a gradient Lipschitz constant,
// derive the sampling radius max{delta, sqrt(r eps / L)}, prune and repair the
// interpolation set, run one poisedness-improvement sweep, fit the MFN model,
// take a Cauchy-certified step, and judge it with the relaxed ratio
//
//   rho = (f~(theta) - f~(theta + s) + r eps) / (m(0) - m(s)).
//
// Practical rules on top of the textbook loop: the trial point is only
// evaluated when the geometry is certified or the step is not tiny; the radius
// grows only after an accepted long step and shrinks only on a rejection with
// certified geometry; the incumbent falls back to the best point seen whenever
// it is worse than that by r eps or more.

#include "anatra/core.hpp"
#include "anatra/geometry.hpp"
#include "anatra/interp_models.hpp"
#include "anatra/oracles.hpp"
#include "anatra/tr_subproblem.hpp"
#include "anatra/trace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace anatra {

enum class NoiseMode {
  kExact,          // eps is the configured noise_level
  kStandardError,  // eps is the standard error reported with the center's evaluation
};

struct SolverConfig {
  double eta1 = 0.25;
  double gamma = 0.5;
  std::optional<double> sampling_constant;  // c_s; sqrt(d) when unset
  std::optional<double> lambda_bar;         // sqrt(d) when unset (1.5 for d = 1)
  double r = 2.0;
  double delta0 = 1.0;
  double delta_max = 1e3;
  long budget = 0;
  double expand_step_fraction = 0.75;
  double skip_step_fraction = 0.01;
  NoiseMode noise_mode = NoiseMode::kExact;
  double noise_level = 0.0;
  bool noise_aware = true;  // false forces eps = 0 (deterministic ablation)
  double tau = 1e-5;
  double kappa_fcd = 1.0;
  int geometry_sweeps = 1;
  /// Stop once the sampling radius falls below this times max(1, ||theta||).
  double min_relative_radius = 1e-12;

  double resolved_sampling_constant(int d) const {
    return sampling_constant.value_or(std::sqrt(static_cast<double>(d)));
  }
  double resolved_lambda_bar(int d) const {
    if (lambda_bar) return *lambda_bar;
    return d == 1 ? 1.5 : std::sqrt(static_cast<double>(d));
  }

  void validate(int d) const {
    if (!(eta1 > 0.0 && eta1 < 1.0)) throw std::invalid_argument("eta1 must lie in (0, 1)");
    if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in (0, 1)");
    if (!(r >= 2.0)) throw std::invalid_argument("r must be >= 2");
    if (!(delta0 > 0.0 && delta_max >= delta0)) {
      throw std::invalid_argument("require delta_max >= delta0 > 0");
    }
    if (!(resolved_sampling_constant(d) >= 1.0)) throw std::invalid_argument("c_s must be >= 1");
    if (!(resolved_lambda_bar(d) > 1.0)) throw std::invalid_argument("lambda_bar must exceed 1");
    if (noise_mode == NoiseMode::kExact && !(noise_level >= 0.0)) {
      throw std::invalid_argument("noise level must be nonnegative");
    }
    if (budget < d + 2) throw BudgetTooSmall("budget must be at least d + 2 evaluations");
  }
};

/// Noise level used in one iteration.
inline double estimate_noise(const SolverConfig& config, std::optional<double> center_std_error) {
  if (!config.noise_aware) return 0.0;
  if (config.noise_mode == NoiseMode::kExact) return config.noise_level;
  if (!center_std_error) {
    throw MissingNoiseInfo("standard-error noise mode needs an oracle that reports its spread");
  }
  return std::max(0.0, *center_std_error);
}

/// Lipschitz estimate for the gradient: 1 on the first iteration, the largest
/// eigenvalue magnitude of the previous model Hessian when the geometry was
/// certified, otherwise unchanged. Always floored at max(1e-8, r eps).
inline double update_lipschitz(long k, double previous, bool valid,
                               const std::optional<Matrix>& previous_hessian, double r, double eps) {
  double L = previous;
  if (k == 0) {
    L = 1.0;
  } else if (valid && previous_hessian) {
    L = SpectralHessian(*previous_hessian).spectral_norm();
  }
  return std::max({L, 1e-8, r * eps});
}

inline double relaxed_rho(double f_center, double f_trial, double eps, double r,
                          double predicted_decrease) {
  if (predicted_decrease <= 1e-16 * std::max(1.0, std::abs(f_center))) {
    throw DegeneratePrediction("predicted decrease is not positive");
  }
  return (f_center - f_trial + r * eps) / predicted_decrease;
}

struct SolveResult {
  Vector theta_best;
  double f_best = 0.0;
  RunTrace trace;
};

namespace detail {

struct BudgetExhausted {};

struct HistoryEntry {
  Vector x;
  double value;
  std::optional<double> std_error;
};

class TrustRegionRun {
 public:
  TrustRegionRun(ZerothOrderOracle& oracle, const Vector& theta0, const SolverConfig& config,
                 std::string solver_name)
      : oracle_(oracle), config_(config), d_(oracle.dimension()) {
    if (theta0.size() != d_) throw std::invalid_argument("theta0 has the wrong dimension");
    config_.validate(d_);
    cs_ = config_.resolved_sampling_constant(d_);
    lambda_bar_ = config_.resolved_lambda_bar(d_);
    trace_.solver = std::move(solver_name);
    theta_ = theta0;
  }

  SolveResult run() {
    long k = 0;
    IterationRecord rec;
    try {
      const NoisyEvaluation e0 = evaluate(theta_, EvalEvent::kCenter, 0);
      f_theta_ = e0.value;
      se_theta_ = e0.std_error;
      set_.emplace(theta_, f_theta_);
      delta_ = config_.delta0;

      while (evals_ < config_.budget) {
        rec = IterationRecord{};
        rec.k = k;
        rec.delta_before = delta_;
        if (!iterate(k, rec)) break;
        ++k;
      }
    } catch (const BudgetExhausted&) {
      rec.skip_reason = "budget_exhausted";
      finish_record(rec);
    }
    return {best_x_, best_f_, std::move(trace_)};
  }

 private:
  // Returns false when the run should stop.
  bool iterate(long k, IterationRecord& rec) {
    const long evals_at_start = evals_;
    // noise and curvature estimates
    eps_ = estimate_noise(config_, se_theta_);
    L_ = update_lipschitz(k, L_, valid_, last_hessian_, config_.r, eps_);
    rec.noise_estimate = eps_;
    rec.lipschitz = L_;

    const double delta_bar = std::max(delta_, std::sqrt(config_.r * eps_ / L_));
    rec.sampling_radius = delta_bar;
    if (delta_bar < config_.min_relative_radius * std::max(1.0, theta_.norm())) {
      rec.skip_reason = "radius_floor";
      finish_record(rec);
      return false;
    }

    InterpolationSet& set = *set_;
    // drop distant points, then the oldest beyond (d+1)(d+2)/2
    for (std::size_t i = set.size(); i-- > 1;) {
      if ((set.point(i) - theta_).norm() > cs_ * delta_bar) set.remove(i);
    }
    while (set.size() > set.max_size()) {
      std::size_t oldest = 1;
      for (std::size_t i = 2; i < set.size(); ++i) {
        if (set.age(i) < set.age(oldest)) oldest = i;
      }
      set.remove(oldest);
    }

    if (!full_rank(set, delta_bar)) {
      rebuild_affine(delta_bar);
      rec.rebuilt_affine = true;
    }

    GeometryReport geo = [&] {
      try {
        return improve_poisedness(*set_, theta_, delta_bar, lambda_bar_, config_.geometry_sweeps);
      } catch (const SingularGeometry&) {
      }
      rec.rebuilt_affine = true;
      try {
        rebuild_affine(delta_bar);
        return improve_poisedness(*set_, theta_, delta_bar, lambda_bar_, config_.geometry_sweeps);
      } catch (const SingularGeometry&) {
      }
      // nearly dependent history points: fall back to a fresh orthogonal stencil
      rebuild_affine(delta_bar, /*use_history=*/false);
      return improve_poisedness(*set_, theta_, delta_bar, lambda_bar_, config_.geometry_sweeps);
    }();
    set_.emplace(std::move(geo.set));
    valid_ = geo.valid;
    rec.valid = valid_;
    rec.lambda = geo.lambda;

    for (std::size_t i = 0; i < set_->size(); ++i) {
      if (!set_->value(i)) set_->set_value(i, evaluate(set_->point(i), EvalEvent::kGeometry, k).value);
    }

    const QuadraticModel model = build_mfn_model(*set_);
    last_hessian_ = model.H;
    const TrsSolution trs = solve_trs(model.g, model.H, delta_, config_.kappa_fcd);
    const double snorm = trs.step.norm();
    rec.gradient_norm = model.g.norm();
    rec.step_norm = snorm;

    // A skip with no geometry evaluations would repeat the same iteration
    // forever, so the trial is evaluated in that case.
    if (!(valid_ || snorm >= config_.skip_step_fraction * delta_) && evals_ > evals_at_start) {
      rec.skip_reason = "short_step_uncertified_geometry";
      finish_record(rec);
      return true;
    }

    const Vector trial = theta_ + trs.step;
    const NoisyEvaluation et = evaluate(trial, EvalEvent::kTrial, k);
    std::optional<std::size_t> trial_index = set_->find(trial);
    if (!trial_index) trial_index = set_->add(trial, et.value);

    bool accepted = false;
    try {
      rec.rho = relaxed_rho(f_theta_, et.value, eps_, config_.r, trs.predicted_decrease);
      accepted = *rec.rho >= config_.eta1;
    } catch (const DegeneratePrediction&) {
      rec.skip_reason = "degenerate_prediction";
    }
    rec.accepted = accepted;

    if (accepted) {
      if (*trial_index != 0) {
        set_->set_value(*trial_index, et.value);
        set_->make_center(*trial_index);
        theta_ = set_->center();
        f_theta_ = et.value;
        se_theta_ = et.std_error;
      }
      if (snorm > config_.expand_step_fraction * delta_) {
        delta_ = std::min(delta_ / config_.gamma, config_.delta_max);
      }
    } else if (valid_) {
      delta_ *= config_.gamma;
    }

    if (f_theta_ >= best_f_ + config_.r * eps_ && (best_x_ - theta_).norm() > 0.0) {
      reset_to_best();
      rec.reset_to_best = true;
    }
    finish_record(rec);
    return true;
  }

  bool full_rank(const InterpolationSet& set, double delta_bar) const {
    if (set.size() < static_cast<std::size_t>(d_) + 1) return false;
    const Matrix D = set.displacements();
    Eigen::JacobiSVD<Matrix> svd(D);
    return svd.singularValues()(d_ - 1) >= 1e-8 * cs_ * delta_bar;
  }

  void rebuild_affine(double delta_bar, bool use_history = true) {
    std::vector<EvaluatedPoint> recent;
    if (use_history) {
      recent.reserve(history_.size() + 1);
      for (auto it = history_.rbegin(); it != history_.rend(); ++it) recent.push_back({it->x, it->value});
    }
    // the cached center value is the one the model must interpolate
    recent.insert(recent.begin(), EvaluatedPoint{theta_, f_theta_});
    set_.emplace(affine_points(recent, theta_, cs_, delta_bar, config_.tau));
  }

  void reset_to_best() {
    theta_ = best_x_;
    f_theta_ = best_f_;
    se_theta_ = best_se_;
    InterpolationSet& set = *set_;
    std::optional<std::size_t> idx = set.find(best_x_);
    if (idx) {
      set.set_value(*idx, best_f_);
    } else {
      idx = set.add(best_x_, best_f_);
    }
    set.make_center(*idx);
    theta_ = set.center();
  }

  NoisyEvaluation evaluate(const Vector& x, EvalEvent event, long iteration) {
    if (evals_ >= config_.budget) throw BudgetExhausted{};
    NoisyEvaluation e;
    try {
      e = oracle_.evaluate(x);
    } catch (const std::exception& ex) {
      throw OracleFailure(std::string("oracle failed: ") + ex.what(), trace_);
    }
    if (!std::isfinite(e.value)) throw OracleFailure("oracle returned a non-finite value", trace_);
    trace_.evaluations.push_back({evals_, x, e.value, std::nullopt, iteration, event});
    ++evals_;
    history_.push_back({x, e.value, e.std_error});
    if (e.value < best_f_) {
      best_f_ = e.value;
      best_x_ = x;
      best_se_ = e.std_error;
    }
    return e;
  }

  void finish_record(IterationRecord& rec) {
    rec.delta_after = delta_;
    rec.evaluations = evals_;
    rec.center_value = f_theta_;
    rec.best_value = best_f_;
    trace_.iterations.push_back(rec);
  }

  ZerothOrderOracle& oracle_;
  SolverConfig config_;
  int d_;
  double cs_ = 1.0;
  double lambda_bar_ = 2.0;

  Vector theta_;
  double f_theta_ = 0.0;
  std::optional<double> se_theta_;
  std::optional<InterpolationSet> set_;
  double delta_ = 1.0;
  double eps_ = 0.0;
  double L_ = 1.0;
  bool valid_ = false;
  std::optional<Matrix> last_hessian_;

  Vector best_x_;
  double best_f_ = std::numeric_limits<double>::infinity();
  std::optional<double> best_se_;

  long evals_ = 0;
  std::vector<HistoryEntry> history_;
  RunTrace trace_;
};

}  // namespace detail

/// Minimizes the oracle from theta0 until the evaluation budget is spent.
/// Returns the point with the lowest noisy value seen and the full trace.
inline SolveResult solve(ZerothOrderOracle& oracle, const Vector& theta0, const SolverConfig& config) {
  return detail::TrustRegionRun(oracle, theta0, config, config.noise_aware ? "anatra" : "det-mbtr").run();
}

}  // namespace anatra

#endif  // ANATRA_SOLVER_HPP
