#ifndef ANATRA_ORACLES_HPP
#define ANATRA_ORACLES_HPP

#include "anatra/core.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>

namespace anatra {

/// One oracle response. std_error is set by oracles that can estimate the
/// spread of their own noise (e.g. shot-based sampling).
struct NoisyEvaluation {
  double value = 0.0;
  std::optional<double> std_error;
};

/// Source of noisy function values f~(theta) = f(theta) + e(theta, xi).
/// Repeated calls at the same theta draw fresh noise.
class ZerothOrderOracle {
 public:
  virtual ~ZerothOrderOracle() = default;

  virtual int dimension() const = 0;
  virtual NoisyEvaluation evaluate(const Vector& theta) = 0;

  /// Noise-free objective; for benchmarking only, solvers never call it.
  virtual std::optional<double> true_value(const Vector& theta) const {
    (void)theta;
    return std::nullopt;
  }
};

enum class NoiseKind { kUniform, kGaussian };

inline std::string to_string(NoiseKind kind) {
  return kind == NoiseKind::kUniform ? "uniform" : "gaussian";
}

/// Uniform: xi ~ U[-level, level]. Gaussian: xi ~ N(0, level^2).
struct NoiseSpec {
  NoiseKind kind = NoiseKind::kUniform;
  double level = 0.0;
};

/// Additive noise on top of a deterministic objective, one RNG stream per
/// instance.
template <typename Objective>
class AdditiveNoiseOracle : public ZerothOrderOracle {
 public:
  AdditiveNoiseOracle(int dimension, Objective objective, NoiseSpec noise, std::uint64_t seed)
      : dim_(dimension), objective_(std::move(objective)), noise_(noise), rng_(seed) {
    if (dimension < 1) throw std::invalid_argument("dimension must be >= 1");
    if (!(noise.level >= 0.0)) throw std::invalid_argument("noise level must be nonnegative");
  }

  int dimension() const override { return dim_; }

  NoisyEvaluation evaluate(const Vector& theta) override {
    check(theta);
    return {objective_(theta) + draw(), std::nullopt};
  }

  std::optional<double> true_value(const Vector& theta) const override {
    check(theta);
    return objective_(theta);
  }

  const NoiseSpec& noise() const { return noise_; }

 private:
  void check(const Vector& theta) const {
    if (theta.size() != dim_) throw std::invalid_argument("oracle called with wrong dimension");
  }

  double draw() {
    if (noise_.level == 0.0) return 0.0;
    if (noise_.kind == NoiseKind::kUniform) {
      return std::uniform_real_distribution<double>(-noise_.level, noise_.level)(rng_);
    }
    return std::normal_distribution<double>(0.0, noise_.level)(rng_);
  }

  int dim_;
  Objective objective_;
  NoiseSpec noise_;
  std::mt19937_64 rng_;
};

struct SphereObjective {
  double operator()(const Vector& theta) const { return theta.squaredNorm(); }
};

struct RosenbrockObjective {
  double operator()(const Vector& theta) const {
    const double a = theta(1) - theta(0) * theta(0);
    const double b = 1.0 - theta(0);
    return 100.0 * a * a + b * b;
  }
};

using NoisyQuadratic = AdditiveNoiseOracle<SphereObjective>;
using NoisyRosenbrock = AdditiveNoiseOracle<RosenbrockObjective>;

/// theta't theta + xi
inline NoisyQuadratic noisy_quadratic(int dimension, NoiseSpec noise, std::uint64_t seed) {
  return NoisyQuadratic(dimension, SphereObjective{}, noise, seed);
}

/// 100 (theta_2 - theta_1^2)^2 + (1 - theta_1)^2 + xi, two-dimensional.
inline NoisyRosenbrock noisy_rosenbrock(NoiseSpec noise, std::uint64_t seed) {
  return NoisyRosenbrock(2, RosenbrockObjective{}, noise, seed);
}

}  // namespace anatra

#endif  // ANATRA_ORACLES_HPP
