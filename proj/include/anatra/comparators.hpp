#ifndef ANATRA_COMPARATORS_HPP
#define ANATRA_COMPARATORS_HPP

#include "anatra/oracles.hpp"
#include "anatra/solver.hpp"
#include "anatra/trace.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

namespace anatra {

/// Spall's gain sequences a_k = a / (k + 1 + A)^alpha, c_k = c0 / (k + 1)^gamma.
struct SpsaConfig {
  double a = 0.1;
  double c0 = 0.1;
  double A = 0.0;
  double alpha = 0.602;
  double gamma = 0.101;
  long budget = 0;
  std::uint64_t seed = 0;

  double step_gain(long k) const { return a / std::pow(static_cast<double>(k) + 1.0 + A, alpha); }
  double perturbation(long k) const { return c0 / std::pow(static_cast<double>(k) + 1.0, gamma); }
};

/// Two-point simultaneous perturbation gradient estimate for fixed delta in
/// {-1, +1}^d: (f_plus - f_minus) / (2 c) * delta.
inline Vector spsa_gradient(double f_plus, double f_minus, double c, const Vector& delta) {
  return ((f_plus - f_minus) / (2.0 * c)) * delta;
}

/// Runs SPSA until fewer than two evaluations remain. theta0 itself is never
/// evaluated; the returned point is the lowest noisy value seen.
inline SolveResult spsa_solve(ZerothOrderOracle& oracle, const Vector& theta0, const SpsaConfig& config) {
  if (config.budget < 2) throw BudgetTooSmall("SPSA needs a budget of at least 2 evaluations");
  if (!(config.a > 0.0 && config.c0 > 0.0 && config.A >= 0.0 && config.alpha >= 0.0 && config.gamma >= 0.0)) {
    throw std::invalid_argument("SPSA gains must be positive and nonincreasing");
  }
  if (theta0.size() != oracle.dimension()) throw std::invalid_argument("theta0 has the wrong dimension");

  SolveResult result;
  result.trace.solver = "spsa";
  result.f_best = std::numeric_limits<double>::infinity();
  std::mt19937_64 rng(config.seed);
  std::bernoulli_distribution coin(0.5);

  Vector theta = theta0;
  const auto d = theta.size();
  auto evaluate = [&](const Vector& x, long k) {
    double value = 0.0;
    try {
      value = oracle.evaluate(x).value;
    } catch (const std::exception& e) {
      throw OracleFailure(std::string("oracle failed: ") + e.what(), result.trace);
    }
    if (!std::isfinite(value)) throw OracleFailure("oracle returned a non-finite value", result.trace);
    EvaluationRecord rec;
    rec.eval_index = static_cast<long>(result.trace.evaluations.size());
    rec.point = x;
    rec.noisy_value = value;
    rec.iteration = k;
    rec.event = EvalEvent::kTrial;
    result.trace.evaluations.push_back(std::move(rec));
    if (value < result.f_best) {
      result.f_best = value;
      result.theta_best = x;
    }
    return value;
  };

  for (long k = 0; static_cast<long>(result.trace.evaluations.size()) + 2 <= config.budget; ++k) {
    Vector delta(d);
    for (Eigen::Index i = 0; i < d; ++i) delta(i) = coin(rng) ? 1.0 : -1.0;
    const double ck = config.perturbation(k);
    const double f_plus = evaluate(theta + ck * delta, k);
    const double f_minus = evaluate(theta - ck * delta, k);
    const Vector g = spsa_gradient(f_plus, f_minus, ck, delta);
    const Vector step = config.step_gain(k) * g;
    theta -= step;

    IterationRecord it;
    it.k = k;
    it.accepted = true;
    it.step_norm = step.norm();
    it.gradient_norm = g.norm();
    it.evaluations = static_cast<long>(result.trace.evaluations.size());
    it.best_value = result.f_best;
    it.center_value = std::min(f_plus, f_minus);
    result.trace.iterations.push_back(it);
  }
  return result;
}

/// The noise-unaware ablation: the trust-region solver with eps forced to 0.
inline SolveResult deterministic_mbtr_solve(ZerothOrderOracle& oracle, const Vector& theta0,
                                            SolverConfig config) {
  config.noise_aware = false;
  return solve(oracle, theta0, config);
}

}  // namespace anatra

#endif  // ANATRA_COMPARATORS_HPP
