#include "anatra/oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace anatra;

TEST(Oracles, ObjectivesAtKnownPoints) {
  EXPECT_EQ(SphereObjective{}(Vector::Ones(3)), 3.0);
  EXPECT_EQ(RosenbrockObjective{}(Vector::Zero(2)), 1.0);
  EXPECT_EQ(RosenbrockObjective{}(Vector::Ones(2)), 0.0);
  EXPECT_EQ(RosenbrockObjective{}((Vector(2) << -1.0, 1.0).finished()), 4.0);
}

TEST(Oracles, NoiselessOracleIsExact) {
  auto o = noisy_quadratic(4, {NoiseKind::kGaussian, 0.0}, 1);
  const Vector x = Vector::LinSpaced(4, -1.0, 2.0);
  EXPECT_EQ(o.evaluate(x).value, x.squaredNorm());
  EXPECT_FALSE(o.evaluate(x).std_error.has_value());
  EXPECT_EQ(*o.true_value(x), x.squaredNorm());
}

TEST(Oracles, UniformNoiseIsBoundedAndCentered) {
  auto o = noisy_quadratic(2, {NoiseKind::kUniform, 0.1}, 3);
  const Vector x = Vector::Ones(2);
  double sum = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double e = o.evaluate(x).value - 2.0;
    EXPECT_LE(std::abs(e), 0.1);
    sum += e;
  }
  // sd of U[-a, a] is a / sqrt(3)
  EXPECT_LT(std::abs(sum / n), 4.0 * 0.1 / std::sqrt(3.0 * n));
}

TEST(Oracles, GaussianNoiseHasRequestedSpread) {
  auto o = noisy_rosenbrock({NoiseKind::kGaussian, 0.5}, 4);
  const Vector x = Vector::Zero(2);
  double sum = 0.0, sum_sq = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double e = o.evaluate(x).value - 1.0;
    sum += e;
    sum_sq += e * e;
  }
  const double mean = sum / n;
  EXPECT_LT(std::abs(mean), 4.0 * 0.5 / std::sqrt(n));
  EXPECT_NEAR(std::sqrt(sum_sq / n - mean * mean), 0.5, 0.02);
}

TEST(Oracles, SeededReplay) {
  auto a = noisy_quadratic(3, {NoiseKind::kUniform, 1e-3}, 99);
  auto b = noisy_quadratic(3, {NoiseKind::kUniform, 1e-3}, 99);
  auto c = noisy_quadratic(3, {NoiseKind::kUniform, 1e-3}, 100);
  const Vector x = Vector::Constant(3, 0.25);
  bool differs = false;
  for (int i = 0; i < 50; ++i) {
    const double va = a.evaluate(x).value;
    EXPECT_EQ(va, b.evaluate(x).value);
    differs = differs || va != c.evaluate(x).value;
  }
  EXPECT_TRUE(differs);
}

TEST(Oracles, Validation) {
  EXPECT_THROW(noisy_quadratic(0, {}, 1), std::invalid_argument);
  EXPECT_THROW(noisy_quadratic(2, {NoiseKind::kUniform, -1.0}, 1), std::invalid_argument);
  auto o = noisy_quadratic(2, {}, 1);
  EXPECT_THROW(o.evaluate(Vector::Zero(3)), std::invalid_argument);
  EXPECT_EQ(to_string(NoiseKind::kGaussian), "gaussian");
}
