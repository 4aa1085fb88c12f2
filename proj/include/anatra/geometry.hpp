#ifndef ANATRA_GEOMETRY_HPP
#define ANATRA_GEOMETRY_HPP

#include "anatra/core.hpp"
#include "anatra/interp_models.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace anatra {

struct PointSwap {
  std::size_t removed_index = 0;
  Vector inserted;
};

struct GeometryReport {
  InterpolationSet set;
  bool valid = false;  // certified Lambda <= Lambda_bar on `set`
  int iterations = 0;
  std::vector<PointSwap> swaps;
  double lambda = 0.0;  // certified poisedness of `set`
  std::vector<double> lambda_history;  // along `swaps`: before the first, then after each
};

/// Iteration cap that guarantees termination for a contraction factor of 0.99
/// per swap, limited to 100.
inline int poisedness_iteration_cap(double lambda_initial, double lambda_bar) {
  if (lambda_initial <= lambda_bar) return 0;
  const double n = std::ceil(std::log(lambda_initial / lambda_bar) / std::log(1.0 / 0.99));
  return static_cast<int>(std::min(100.0, std::max(1.0, n)));
}

/// Replaces the worst non-center point by the maximizer of its Lagrange
/// polynomial over B(center, radius) until the set is lambda_bar-poised or
/// max_iterations swaps were made. The center x0 is never swapped out.
/// An intermediate swap may raise Lambda (it changes every other Lagrange
/// polynomial); the search still follows it, but when it does not beat the
/// best Lambda so far, the other polynomials' maximizers and then the
/// opposite-sign extrema are tried from the same set. The returned set is the
/// best one seen.
inline GeometryReport improve_poisedness(InterpolationSet set, const Vector& center, double radius,
                                         double lambda_bar, int max_iterations) {
  if (!(lambda_bar > 1.0)) throw std::invalid_argument("lambda_bar must exceed 1");
  if (max_iterations < 0) throw std::invalid_argument("max_iterations must be nonnegative");
  max_iterations = std::min(max_iterations, 100);

  PoisednessResult current = poisedness(set, center, radius);
  GeometryReport report{set, false, 0, {}, current.lambda, {current.lambda}};
  std::vector<PointSwap> path;
  std::vector<double> path_lambda{current.lambda};

  auto try_swap = [&](std::size_t index, const Vector& inserted)
      -> std::optional<std::pair<InterpolationSet, PoisednessResult>> {
    if (set.find(inserted)) return std::nullopt;
    InterpolationSet candidate = set;
    candidate.replace(index, inserted);
    try {
      PoisednessResult next = poisedness(candidate, center, radius);
      return std::make_pair(std::move(candidate), std::move(next));
    } catch (const SingularGeometry&) {
      return std::nullopt;
    }
  };
  auto record_best = [&](InterpolationSet candidate, double lambda, std::vector<PointSwap> swaps,
                         std::vector<double> history) {
    report.set = std::move(candidate);
    report.lambda = lambda;
    report.swaps = std::move(swaps);
    report.lambda_history = std::move(history);
  };

  while (current.lambda > lambda_bar && report.iterations < max_iterations) {
    std::vector<std::size_t> order;
    for (std::size_t i = 1; i < current.per_polynomial.size(); ++i) {
      if (current.per_polynomial[i].value > 1.0) order.push_back(i);
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return current.per_polynomial[a].value > current.per_polynomial[b].value;
    });

    // The worst usable polynomial drives the search.
    std::vector<PointSwap> moves;
    for (std::size_t i : order) moves.push_back({i, current.per_polynomial[i].point});
    for (std::size_t i : order) moves.push_back({i, current.per_polynomial[i].opposite_point});

    std::size_t k = 0;
    std::optional<std::pair<InterpolationSet, PoisednessResult>> step;
    for (; k < order.size() && !step; ++k) step = try_swap(moves[k].removed_index, moves[k].inserted);
    if (!step) break;
    const PointSwap step_swap = moves[k - 1];

    if (step->second.lambda >= report.lambda) {
      for (; k < moves.size(); ++k) {
        auto alt = try_swap(moves[k].removed_index, moves[k].inserted);
        if (!alt || alt->second.lambda >= report.lambda) continue;
        auto swaps = path;
        swaps.push_back(moves[k]);
        auto history = path_lambda;
        history.push_back(alt->second.lambda);
        record_best(std::move(alt->first), alt->second.lambda, std::move(swaps), std::move(history));
        break;
      }
    }

    set = std::move(step->first);
    current = std::move(step->second);
    path.push_back(step_swap);
    path_lambda.push_back(current.lambda);
    ++report.iterations;
    if (current.lambda < report.lambda) record_best(set, current.lambda, path, path_lambda);
  }
  report.valid = report.lambda <= lambda_bar;
  return report;
}

struct EvaluatedPoint {
  Vector x;
  double value = 0.0;
};

/// Builds {x0} + accepted history points + x0 + (cs*radius)*basis(Z), exactly
/// d+1 points with an affinely independent displacement set. History points
/// farther than cs*radius from the center are not considered; the rest are
/// scanned in the given order (callers pass most recent first).
inline InterpolationSet affine_points(std::span<const EvaluatedPoint> history, const Vector& center,
                                      double cs, double radius, double tau) {
  if (!(cs >= 1.0)) throw std::invalid_argument("cs must be >= 1");
  if (!(radius > 0.0)) throw std::invalid_argument("radius must be positive");
  if (!(tau > 0.0 && tau <= 1.0 / cs)) throw std::invalid_argument("tau must lie in (0, 1/cs]");

  const auto d = center.size();
  const double tol = 1e-12 * std::max(1.0, center.norm());
  const EvaluatedPoint* center_entry = nullptr;
  for (const auto& h : history) {
    if ((h.x - center).norm() <= tol) {
      center_entry = &h;
      break;
    }
  }
  if (center_entry == nullptr) throw std::invalid_argument("history must contain the center");

  InterpolationSet out(center, center_entry->value);
  const double reach = cs * radius;
  Matrix accepted(d, 0);
  Matrix null_basis = Matrix::Identity(d, d);

  for (const auto& h : history) {
    if (null_basis.cols() == 0) break;
    const Vector disp = h.x - center;
    const double len = disp.norm();
    if (len <= tol || len > reach) continue;
    if ((null_basis.transpose() * (disp / reach)).norm() < tau) continue;

    out.add(h.x, h.value);
    accepted.conservativeResize(Eigen::NoChange, accepted.cols() + 1);
    accepted.col(accepted.cols() - 1) = disp;
    Eigen::HouseholderQR<Matrix> qr(accepted);
    const Matrix q = qr.householderQ() * Matrix::Identity(d, d);
    null_basis = q.rightCols(d - accepted.cols());
  }
  for (Eigen::Index j = 0; j < null_basis.cols(); ++j) {
    out.add(center + reach * null_basis.col(j));
  }
  return out;
}

}  // namespace anatra

#endif  // ANATRA_GEOMETRY_HPP
