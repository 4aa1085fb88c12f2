#ifndef ANATRA_TR_SUBPROBLEM_HPP
#define ANATRA_TR_SUBPROBLEM_HPP

// Trust-region subproblem:  min_s  g's + 0.5 s'Hs   subject to  ||s|| <= radius.
//
// solve_trs() always computes the Cauchy point first, so the fraction of
// Cauchy decrease
//
//   m(0) - m(s) >= (kappa/2) ||g|| min(||g|| / ||H||, radius)
//
// holds with kappa = 1 whatever happens in the exact solve. The exact solve
// works in the eigenbasis of H and finds the multiplier of the boundary
// constraint from the secular equation 1/||s(sigma)|| = 1/radius.

#include "anatra/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace anatra {

struct TrsSolution {
  Vector step;
  double predicted_decrease = 0.0;  // m(0) - m(step)
  bool on_boundary = false;
};

/// Eigendecomposition of a symmetric Hessian, ascending eigenvalues.
struct SpectralHessian {
  Vector eigenvalues;
  Matrix eigenvectors;

  explicit SpectralHessian(const Matrix& hessian) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(hessian);
    if (eig.info() != Eigen::Success) {
      throw std::runtime_error("eigendecomposition of model Hessian failed");
    }
    eigenvalues = eig.eigenvalues();
    eigenvectors = eig.eigenvectors();
  }

  double spectral_norm() const {
    if (eigenvalues.size() == 0) return 0.0;
    return std::max(std::abs(eigenvalues(0)), std::abs(eigenvalues(eigenvalues.size() - 1)));
  }
};

inline double model_decrease(const Vector& g, const Matrix& H, const Vector& s) {
  return -(g.dot(s) + 0.5 * s.dot(H * s));
}

/// Right-hand side of the Cauchy decrease condition. ||H|| = 0 is read as
/// min(inf, radius) = radius.
inline double cauchy_decrease_bound(const Vector& g, double hessian_norm, double radius,
                                    double kappa_fcd = 1.0) {
  const double gnorm = g.norm();
  const double reach = hessian_norm > 0.0 ? std::min(gnorm / hessian_norm, radius) : radius;
  return 0.5 * kappa_fcd * gnorm * reach;
}

inline Vector cauchy_step(const Vector& g, const Matrix& H, double radius) {
  const double gnorm = g.norm();
  if (gnorm == 0.0) return Vector::Zero(g.size());
  const double curvature = g.dot(H * g);
  double t = radius / gnorm;
  if (curvature > 0.0) t = std::min(t, gnorm * gnorm / curvature);
  return -t * g;
}

namespace detail {

inline double secular_norm(const Vector& a, const Vector& lam, double sigma) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double den = lam(i) + sigma;
    if (a(i) == 0.0) continue;
    if (den <= 0.0) return std::numeric_limits<double>::infinity();
    acc += (a(i) / den) * (a(i) / den);
  }
  return std::sqrt(acc);
}

inline Vector secular_step(const Vector& a, const Vector& lam, double sigma) {
  Vector s(a.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double den = lam(i) + sigma;
    s(i) = (a(i) == 0.0) ? 0.0 : -a(i) / den;
  }
  return s;
}

// Pushes an interior step y (eigen coordinates) out to the boundary along the
// leftmost eigenvector, picking the sign with the lower model value.
inline Vector extend_along_leftmost(const Vector& a, const Vector& lam, const Vector& y,
                                    double radius) {
  const double slack = radius * radius - y.squaredNorm();
  if (slack <= 0.0) return y;
  const double tau = std::sqrt(slack);
  auto value = [&](const Vector& z) { return a.dot(z) + 0.5 * z.dot(lam.cwiseProduct(z)); };
  Vector plus = y, minus = y;
  plus(0) += tau;
  minus(0) -= tau;
  return value(plus) <= value(minus) ? plus : minus;
}

}  // namespace detail

/// Global minimizer of the quadratic over the ball, including the hard case.
/// Unlike solve_trs(), a zero gradient still yields the boundary step along a
/// direction of negative curvature; poisedness maximization relies on this.
inline TrsSolution minimize_on_ball(const Vector& g, const SpectralHessian& spectrum,
                                    double radius) {
  const Vector& lam = spectrum.eigenvalues;
  const Matrix& Q = spectrum.eigenvectors;
  const Eigen::Index n = g.size();
  const Vector a = Q.transpose() * g;
  const double lam_min = lam(0);
  const double lam_scale = std::max(1.0, spectrum.spectral_norm());

  auto finish = [&](const Vector& y) {
    TrsSolution out;
    out.step = Q * y;
    out.predicted_decrease = -(a.dot(y) + 0.5 * y.dot(lam.cwiseProduct(y)));
    out.on_boundary = std::abs(y.norm() - radius) <= 1e-8 * radius;
    return out;
  };

  if (lam_min > 0.0) {
    Vector y = detail::secular_step(a, lam, 0.0);
    if (y.norm() <= radius) return finish(y);
  } else if (lam_min == 0.0 && a.norm() == 0.0) {
    return finish(Vector::Zero(n));
  }

  const double lo_bound = std::max(0.0, -lam_min);

  // Hard case: no gradient component on the leftmost eigenspace.
  const double eig_tol = 1e-12 * lam_scale;
  double a_left = 0.0;
  for (Eigen::Index i = 0; i < n && lam(i) - lam_min <= eig_tol; ++i) a_left += a(i) * a(i);
  a_left = std::sqrt(a_left);
  // Negligible is measured against the curvature scale too, so a gradient at
  // rounding level (e.g. 1e-16 with H = -8I) does not reach the Newton loop.
  if (lam_min <= 0.0 && a_left <= 1e-14 * std::max({a.norm(), lam_scale * radius, 1e-300})) {
    Vector y = Vector::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (lam(i) - lam_min > eig_tol) y(i) = -a(i) / (lam(i) - lam_min);
    }
    if (y.norm() <= radius) return finish(detail::extend_along_leftmost(a, lam, y, radius));
  }

  // Safeguarded Newton on phi(sigma) = 1/||s(sigma)|| - 1/radius.
  double lo = lo_bound;
  double hi = lo_bound + a.norm() / radius;
  double sigma = hi;
  Vector y = detail::secular_step(a, lam, sigma);
  double ynorm = y.norm();
  bool converged = std::abs(ynorm - radius) <= 1e-10 * radius;
  for (int it = 0; it < 100 && !converged; ++it) {
    if (ynorm > radius) {
      lo = sigma;
    } else {
      hi = sigma;
    }
    double deriv = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double den = lam(i) + sigma;
      deriv += a(i) * a(i) / (den * den * den);
    }
    double next = sigma;
    if (std::isfinite(ynorm) && ynorm > 0.0 && deriv > 0.0) {
      const double phi = 1.0 / ynorm - 1.0 / radius;
      const double dphi = deriv / (ynorm * ynorm * ynorm);
      next = sigma - phi / dphi;
    }
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == sigma || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, hi)) {
      break;
    }
    sigma = next;
    y = detail::secular_step(a, lam, sigma);
    ynorm = detail::secular_norm(a, lam, sigma);
    converged = std::abs(ynorm - radius) <= 1e-10 * radius;
  }
  if (converged) return finish(y);

  // Bracket collapsed onto -lam_min (nearly hard case): take the feasible
  // side and complete along the leftmost eigenvector.
  Vector feasible = detail::secular_step(a, lam, hi);
  if (!feasible.allFinite()) feasible = Vector::Zero(n);
  if (feasible.norm() > radius) feasible *= radius / feasible.norm();
  if (lam_min <= 0.0) feasible = detail::extend_along_leftmost(a, lam, feasible, radius);
  return finish(feasible);
}

inline TrsSolution minimize_on_ball(const Vector& g, const Matrix& H, double radius) {
  return minimize_on_ball(g, SpectralHessian(H), radius);
}

/// Approximate trust-region step with certified Cauchy decrease. Returns the
/// better of the Cauchy point and the exact solution; g = 0 yields s = 0.
inline TrsSolution solve_trs(const Vector& g, const Matrix& H, double radius,
                             double kappa_fcd = 1.0) {
  if (!(radius > 0.0)) throw std::invalid_argument("trust-region radius must be positive");
  if (!(kappa_fcd > 0.0 && kappa_fcd <= 1.0)) throw std::invalid_argument("kappa_fcd must lie in (0, 1]");
  TrsSolution best;
  best.step = Vector::Zero(g.size());
  if (g.norm() == 0.0) return best;

  best.step = cauchy_step(g, H, radius);
  best.predicted_decrease = model_decrease(g, H, best.step);

  const TrsSolution exact = minimize_on_ball(g, H, radius);
  if (exact.step.allFinite() && exact.step.norm() <= radius * (1.0 + 1e-10) &&
      exact.predicted_decrease > best.predicted_decrease) {
    best = exact;
  }
  best.on_boundary = std::abs(best.step.norm() - radius) <= 1e-8 * radius;
  return best;
}

}  // namespace anatra

#endif  // ANATRA_TR_SUBPROBLEM_HPP
