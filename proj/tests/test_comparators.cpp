#include "anatra/comparators.hpp"

#include <gtest/gtest.h>

using namespace anatra;

namespace {

/// Deterministic linear objective v'theta.
class LinearOracle : public ZerothOrderOracle {
 public:
  explicit LinearOracle(Vector v) : v_(std::move(v)) {}
  int dimension() const override { return static_cast<int>(v_.size()); }
  NoisyEvaluation evaluate(const Vector& theta) override { return {v_.dot(theta), std::nullopt}; }

 private:
  Vector v_;
};

bool traces_identical(const RunTrace& a, const RunTrace& b) {
  if (a.evaluations.size() != b.evaluations.size() || a.iterations.size() != b.iterations.size()) return false;
  for (std::size_t i = 0; i < a.evaluations.size(); ++i) {
    const auto &x = a.evaluations[i], &y = b.evaluations[i];
    if (x.point != y.point || x.noisy_value != y.noisy_value || x.event != y.event || x.iteration != y.iteration) {
      return false;
    }
  }
  for (std::size_t i = 0; i < a.iterations.size(); ++i) {
    const auto &x = a.iterations[i], &y = b.iterations[i];
    if (x.rho != y.rho || x.delta_after != y.delta_after || x.sampling_radius != y.sampling_radius ||
        x.accepted != y.accepted || x.valid != y.valid || x.lambda != y.lambda) {
      return false;
    }
  }
  return true;
}

}  // namespace

TEST(Spsa, SymmetricCancellationExample) {
  // f = theta'theta at (1, 1), delta = (1, -1), c = 0.1: both probes give 2.02
  const Vector theta = Vector::Ones(2);
  const Vector delta = (Vector(2) << 1.0, -1.0).finished();
  const double fp = (theta + 0.1 * delta).squaredNorm();
  const double fm = (theta - 0.1 * delta).squaredNorm();
  EXPECT_NEAR(fp, 1.1 * 1.1 + 0.9 * 0.9, 1e-15);
  EXPECT_LT(spsa_gradient(fp, fm, 0.1, delta).norm(), 1e-12);
}

TEST(Spsa, UnbiasedOnLinearFunctions) {
  // Average of (v'delta) delta over all 2^d sign patterns equals v exactly.
  const Vector v = (Vector(3) << 0.5, -2.0, 1.25).finished();
  Vector mean = Vector::Zero(3);
  for (int mask = 0; mask < 8; ++mask) {
    Vector delta(3);
    for (int i = 0; i < 3; ++i) delta(i) = (mask >> i) & 1 ? 1.0 : -1.0;
    const double c = 0.05;
    const Vector theta = Vector::Constant(3, 0.3);
    mean += spsa_gradient(v.dot(theta + c * delta), v.dot(theta - c * delta), c, delta);
  }
  EXPECT_LT((mean / 8.0 - v).norm(), 1e-12);
}

TEST(Spsa, GainsArePositiveAndNonincreasing) {
  const SpsaConfig c;
  for (long k = 0; k < 200; ++k) {
    EXPECT_GT(c.step_gain(k), 0.0);
    EXPECT_GT(c.perturbation(k), 0.0);
    EXPECT_LE(c.step_gain(k + 1), c.step_gain(k));
    EXPECT_LE(c.perturbation(k + 1), c.perturbation(k));
  }
  EXPECT_DOUBLE_EQ(c.step_gain(0), 0.1);
  EXPECT_DOUBLE_EQ(c.perturbation(0), 0.1);
}

TEST(Spsa, EvaluationAccounting) {
  for (long budget : {2L, 7L, 50L}) {
    auto o = noisy_quadratic(3, {NoiseKind::kUniform, 0.01}, 1);
    SpsaConfig c;
    c.budget = budget;
    c.seed = 4;
    const Vector theta0 = Vector::Ones(3);
    const SolveResult r = spsa_solve(o, theta0, c);
    EXPECT_EQ(static_cast<long>(r.trace.evaluations.size()), budget - budget % 2);
    EXPECT_EQ(r.trace.iterations.size() * 2, r.trace.evaluations.size());
    for (std::size_t i = 0; i < r.trace.evaluations.size(); ++i) {
      EXPECT_EQ(r.trace.evaluations[i].eval_index, static_cast<long>(i));
      EXPECT_EQ(r.trace.evaluations[i].iteration, static_cast<long>(i / 2));
      EXPECT_NE(r.trace.evaluations[i].point, theta0);
    }
  }
  auto o = noisy_quadratic(2, {}, 1);
  SpsaConfig c;
  c.budget = 1;
  EXPECT_THROW(spsa_solve(o, Vector::Ones(2), c), BudgetTooSmall);
}

TEST(Spsa, ProbesAreSymmetricAndStepsFollowDelta) {
  LinearOracle o((Vector(4) << 1.0, -1.0, 2.0, 0.5).finished());
  SpsaConfig c;
  c.budget = 40;
  c.seed = 9;
  const SolveResult r = spsa_solve(o, Vector::Zero(4), c);
  for (std::size_t k = 0; k + 1 < r.trace.evaluations.size(); k += 2) {
    const Vector& plus = r.trace.evaluations[k].point;
    const Vector& minus = r.trace.evaluations[k + 1].point;
    const Vector center = 0.5 * (plus + minus);
    const Vector scaled_delta = 0.5 * (plus - minus);
    const double ck = c.perturbation(static_cast<long>(k / 2));
    EXPECT_LT((scaled_delta.cwiseAbs() - Vector::Constant(4, ck)).norm(), 1e-12);
    if (k + 3 < r.trace.evaluations.size()) {
      // next center minus this one is -a_k ghat, with ghat proportional to delta
      const Vector next = 0.5 * (r.trace.evaluations[k + 2].point + r.trace.evaluations[k + 3].point);
      const Vector step = next - center;
      const Vector delta = scaled_delta / ck;
      const double fd = r.trace.evaluations[k].noisy_value - r.trace.evaluations[k + 1].noisy_value;
      if (std::abs(fd) > 1e-12) {
        for (int i = 0; i < 4; ++i) EXPECT_EQ(std::signbit(step(i)), std::signbit(-fd * delta(i)));
      }
    }
  }
}

TEST(Spsa, SeededReplayAndBestPoint) {
  auto run = [] {
    auto o = noisy_rosenbrock({NoiseKind::kGaussian, 0.1}, 5);
    SpsaConfig c;
    c.budget = 60;
    c.seed = 17;
    return spsa_solve(o, Vector::Zero(2), c);
  };
  const SolveResult a = run(), b = run();
  EXPECT_TRUE(traces_identical(a.trace, b.trace));
  double best = std::numeric_limits<double>::infinity();
  for (const auto& e : a.trace.evaluations) best = std::min(best, e.noisy_value);
  EXPECT_EQ(a.f_best, best);
}

TEST(DeterministicMbtr, IdenticalToNoiseAwareWithoutNoise) {
  SolverConfig c;
  c.budget = 60;
  auto o1 = noisy_quadratic(2, {}, 3);
  auto o2 = noisy_quadratic(2, {}, 3);
  const SolveResult a = solve(o1, Vector::Ones(2), c);
  const SolveResult b = deterministic_mbtr_solve(o2, Vector::Ones(2), c);
  EXPECT_EQ(b.trace.solver, "det-mbtr");
  EXPECT_TRUE(traces_identical(a.trace, b.trace));
  EXPECT_EQ(a.theta_best, b.theta_best);
}

TEST(DeterministicMbtr, EqualsForcedZeroNoiseUnderNoise) {
  SolverConfig c;
  c.budget = 75;
  c.noise_level = 0.1;
  auto o1 = noisy_quadratic(2, {NoiseKind::kUniform, 0.1}, 3);
  auto o2 = noisy_quadratic(2, {NoiseKind::kUniform, 0.1}, 3);
  SolverConfig zero = c;
  zero.noise_aware = false;
  const SolveResult a = solve(o1, Vector::Ones(2), zero);
  const SolveResult b = deterministic_mbtr_solve(o2, Vector::Ones(2), c);
  EXPECT_TRUE(traces_identical(a.trace, b.trace));
  for (const auto& it : b.trace.iterations) EXPECT_EQ(it.noise_estimate, 0.0);
}

TEST(DeterministicMbtr, BudgetExhaustionReturnsBestSeen) {
  SolverConfig c;
  c.budget = 10;
  auto o = noisy_rosenbrock({NoiseKind::kUniform, 0.1}, 2);
  const SolveResult r = deterministic_mbtr_solve(o, Vector::Zero(2), c);
  EXPECT_EQ(r.trace.evaluations.size(), 10u);
  double best = std::numeric_limits<double>::infinity();
  Vector arg;
  for (const auto& e : r.trace.evaluations) {
    if (e.noisy_value < best) {
      best = e.noisy_value;
      arg = e.point;
    }
  }
  EXPECT_EQ(r.f_best, best);
  EXPECT_EQ(r.theta_best, arg);
}
