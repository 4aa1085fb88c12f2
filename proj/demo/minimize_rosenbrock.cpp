// Minimizes a noisy Rosenbrock function and prints progress per iteration.

#include "anatra/oracles.hpp"
#include "anatra/solver.hpp"

#include <cstdio>

int main() {
  using namespace anatra;
  const double noise = 1e-3;
  auto oracle = noisy_rosenbrock({NoiseKind::kUniform, noise}, 7);

  SolverConfig config;
  config.budget = 200;
  config.noise_level = noise;

  const SolveResult result = solve(oracle, Vector::Zero(2), config);
  for (const auto& it : result.trace.iterations) {
    std::printf("k=%3ld evals=%3ld delta=%.3e f=%.6e %s\n", it.k, it.evaluations, it.delta_after,
                it.center_value, it.accepted ? "accepted" : "");
  }
  std::printf("best point (%.6f, %.6f), true value %.3e\n", result.theta_best(0), result.theta_best(1),
              *oracle.true_value(result.theta_best));
  return 0;
}
