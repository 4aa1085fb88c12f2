#include "anatra/interp_models.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace anatra;
using namespace anatra::testing;

TEST(MonomialBasis, HessianRoundTripAndNorm) {
  std::mt19937_64 rng(1);
  for (int d = 1; d <= 6; ++d) {
    const MonomialBasis basis(d);
    const Matrix H = random_symmetric(rng, d);
    const Vector beta = basis.coefficients(H);
    EXPECT_LT((basis.hessian(beta) - H).norm(), 1e-12);
    EXPECT_NEAR(beta.norm(), H.norm() / std::sqrt(2.0), 1e-12);
    // beta' nu(y) = 0.5 y'Hy
    const Vector y = random_vector(rng, d);
    EXPECT_NEAR(beta.dot(basis.quadratic(y)), 0.5 * y.dot(H * y), 1e-12);
  }
}

TEST(InterpolationSet, RejectsDuplicatesAndProtectsCenter) {
  InterpolationSet set(Vector::Zero(2), 1.0);
  set.add(Vector::Ones(2));
  EXPECT_THROW(set.add(Vector::Ones(2)), std::invalid_argument);
  EXPECT_THROW(set.add(Vector::Zero(2)), std::invalid_argument);
  EXPECT_THROW(set.replace(0, Vector::Constant(2, 3.0)), std::invalid_argument);
  EXPECT_THROW(set.remove(0), std::invalid_argument);
  EXPECT_THROW(set.add(Vector::Zero(3)), std::invalid_argument);
  EXPECT_EQ(set.max_size(), 6u);
}

TEST(InterpolationSet, AgesIncreaseAndCenterSwaps) {
  InterpolationSet set(Vector::Zero(2));
  set.add(Vector::Ones(2), 2.0);
  set.add(-Vector::Ones(2), 3.0);
  EXPECT_LT(set.age(0), set.age(1));
  EXPECT_LT(set.age(1), set.age(2));
  set.make_center(2);
  EXPECT_EQ(set.center(), -Vector::Ones(2));
  EXPECT_EQ(*set.value(0), 3.0);
  EXPECT_FALSE(set.all_evaluated());
}

TEST(MfnModel, FullQuadraticRecoveredExactly) {
  std::mt19937_64 rng(7);
  for (int d : {1, 2, 3, 5}) {
    for (int trial = 0; trial < 10; ++trial) {
      const auto f = random_quadratic(rng, d);
      const Vector center = random_vector(rng, d);
      const std::size_t extra = static_cast<std::size_t>((d + 1) * (d + 2) / 2 - 1);
      const auto set = random_poised_set(rng, center, extra, 1.0);
      const auto values = sample_values(set, f);
      const QuadraticModel m = build_mfn_model(set, values);
      EXPECT_NEAR(m.c, f(center), 1e-8);
      EXPECT_LT((m.g - f.gradient(center)).norm(), 1e-8);
      EXPECT_LT((m.H - f.H).norm(), 1e-8);
    }
  }
}

TEST(MfnModel, LinearDataGivesZeroHessian) {
  std::mt19937_64 rng(2);
  const Vector slope = random_vector(rng, 4);
  const auto set = random_poised_set(rng, Vector::Zero(4), 7, 0.5);
  std::vector<double> values;
  for (std::size_t i = 0; i < set.size(); ++i) values.push_back(3.0 + slope.dot(set.point(i)));
  const QuadraticModel m = build_mfn_model(set, values);
  EXPECT_LT(m.H.norm(), 1e-9);
  EXPECT_LT((m.g - slope).norm(), 1e-9);
}

TEST(MfnModel, MatchesDirectLeastNormInterpolant) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const int d = 2 + trial % 4;
    const std::size_t full = static_cast<std::size_t>((d + 1) * (d + 2) / 2);
    const std::size_t extra = static_cast<std::size_t>(d) + static_cast<std::size_t>(trial) % (full - d - 1);
    const auto set = random_poised_set(rng, random_vector(rng, d), extra, 0.7);
    std::vector<double> values;
    std::normal_distribution<double> n;
    for (std::size_t i = 0; i < set.size(); ++i) values.push_back(n(rng));

    const QuadraticModel m = build_mfn_model(set, values);
    const DirectMfn oracle = direct_mfn(set, values);
    EXPECT_LE(m.H.norm(), oracle.H.norm() + 1e-8);
    EXPECT_LT((m.H - oracle.H).norm(), 1e-6 * (1.0 + oracle.H.norm()));
    for (std::size_t i = 0; i < set.size(); ++i) EXPECT_NEAR(m.value(set.point(i)), values[i], 1e-8);
  }
}

TEST(MfnModel, ScaleInvariantForTinySets) {
  std::mt19937_64 rng(4);
  const auto f = random_quadratic(rng, 3);
  const Vector center = Vector::Constant(3, 100.0);
  const auto set = random_poised_set(rng, center, 9, 1e-5);
  const auto values = sample_values(set, f);
  const QuadraticModel m = build_mfn_model(set, values);
  EXPECT_LT((m.g - f.gradient(center)).norm(), 1e-4 * f.gradient(center).norm());
}

TEST(MfnModel, CollinearSetIsSingular) {
  InterpolationSet set(Vector::Zero(2));
  for (int i = 1; i <= 3; ++i) set.add(Vector::Constant(2, 0.1 * i));
  EXPECT_THROW(assemble_kkt(set), SingularGeometry);
  InterpolationSet small(Vector::Zero(3));
  small.add(Vector::Ones(3));
  EXPECT_THROW(assemble_kkt(small), SingularGeometry);
}

TEST(LagrangePolynomials, DeltaPropertyAndPartitionOfUnity) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    const int d = 1 + trial % 5;
    const std::size_t full = static_cast<std::size_t>((d + 1) * (d + 2) / 2);
    const std::size_t extra = static_cast<std::size_t>(d) + static_cast<std::size_t>(trial) % (full - d);
    const auto set = random_poised_set(rng, random_vector(rng, d), extra, 1.0);
    const LagrangePolySet polys = lagrange_polynomials(set);
    ASSERT_EQ(polys.size(), set.size());
    for (std::size_t i = 0; i < set.size(); ++i) {
      for (std::size_t j = 0; j < set.size(); ++j) {
        EXPECT_NEAR(polys[i].value(set.point(j)), i == j ? 1.0 : 0.0, 1e-8);
      }
    }
    for (int k = 0; k < 5; ++k) {
      const Vector x = random_in_ball(rng, set.center(), 2.0);
      double sum = 0.0;
      Vector lin = Vector::Zero(d);
      for (std::size_t i = 0; i < set.size(); ++i) {
        sum += polys[i].value(x);
        lin += polys[i].value(x) * set.point(i);
      }
      EXPECT_NEAR(sum, 1.0, 1e-8);
      EXPECT_LT((lin - x).norm(), 1e-8 * (1.0 + x.norm()));
    }
  }
}

TEST(Poisedness, BallMaximumMatchesGridOracle) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    const QuadraticModel p{Vector::Zero(2), 0.3, random_vector(rng, 2), random_symmetric(rng, 2, 2.0)};
    const Vector center = random_vector(rng, 2, 0.3);
    const double radius = 0.8;
    const BallExtremum ext = max_abs_on_ball(p, center, radius);
    double grid = 0.0;
    const int n = 400;
    for (int i = 0; i <= n; ++i) {
      for (int j = 0; j <= n; ++j) {
        const Vector y = (Vector(2) << -1.0 + 2.0 * i / n, -1.0 + 2.0 * j / n).finished() * radius;
        if (y.norm() <= radius) grid = std::max(grid, std::abs(p.value(center + y)));
      }
    }
    for (int k = 0; k < 4000; ++k) {
      const double t = 2.0 * 3.14159265358979 * k / 4000.0;
      grid = std::max(grid, std::abs(p.value(center + radius * (Vector(2) << std::cos(t), std::sin(t)).finished())));
    }
    EXPECT_GE(ext.value, grid - 1e-9);
    EXPECT_LE(ext.value, grid + 1e-3);
    EXPECT_NEAR(std::abs(p.value(ext.point)), ext.value, 1e-9);
    EXPECT_LE((ext.point - center).norm(), radius * (1.0 + 1e-10));
  }
}

TEST(Poisedness, OneDimensionalClosedForm) {
  // p(x) = 1 - 4x + 2x^2 on [-1, 1]: |p| peaks at x = -1 with value 7.
  Matrix H(1, 1);
  H << 4.0;
  const QuadraticModel p{Vector::Zero(1), 1.0, Vector::Constant(1, -4.0), H};
  const BallExtremum e = max_abs_on_ball(p, Vector::Zero(1), 1.0);
  EXPECT_NEAR(e.value, 7.0, 1e-14);
  EXPECT_NEAR(e.point(0), -1.0, 1e-14);
}

TEST(Poisedness, LambdaAtLeastOne) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 1 + trial % 4;
    const auto set = random_poised_set(rng, Vector::Zero(d), static_cast<std::size_t>(d + 1), 1.0);
    EXPECT_GE(poisedness(set, set.center(), 1.0).lambda, 1.0 - 1e-12);
  }
}

TEST(ErrorBound, RadiusWeight) {
  EXPECT_EQ(radius_weight(0.5), 1.0);
  EXPECT_EQ(radius_weight(1.0), 1.0);
  EXPECT_DOUBLE_EQ(radius_weight(4.0), 1.0 / 16.0);
}

TEST(ErrorBound, CertificateCoversNoisyQuadratic) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> noise(-1e-2, 1e-2);
  for (int trial = 0; trial < 50; ++trial) {
    const int d = 2;
    const double radius = trial % 2 == 0 ? 0.1 : 1.0;
    const Vector center = random_vector(rng, d);
    const auto set = random_poised_set(rng, center, 4, radius);
    std::vector<double> values, errors;
    for (std::size_t i = 0; i < set.size(); ++i) {
      const double e = noise(rng);
      values.push_back(set.point(i).squaredNorm() + e);
      errors.push_back(std::abs(e));
    }
    const QuadraticModel m = build_mfn_model(set, values);
    const auto cert = gradient_error_bound(set, m, radius, 2.0, errors);
    for (int k = 0; k < 50; ++k) {
      const Vector x = random_in_ball(rng, center, radius);
      EXPECT_LE((2.0 * x - m.gradient(x)).norm(), cert.bound);
    }
    EXPECT_GE(cert.hessian_bound, 0.0);
  }
}
