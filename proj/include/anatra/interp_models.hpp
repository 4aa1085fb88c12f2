#ifndef ANATRA_INTERP_MODELS_HPP
#define ANATRA_INTERP_MODELS_HPP

// Minimum Frobenius norm (MFN) quadratic interpolation.
//
// Models are written about the set's center x0 with the 1/2 convention
//
//   m(x) = c + g'(x - x0) + 0.5 (x - x0)' H (x - x0).
//
// The quadratic monomials are ordered squares first, then cross terms in
// lexicographic order (x1x2, x1x3, ..., x_{d-1}x_d). Squares carry a 1/sqrt(2)
// weight so that the Euclidean norm of the quadratic coefficients equals
// ||H||_F / sqrt(2); minimizing it therefore minimizes the Frobenius norm of the
// model Hessian exactly. With this weighting the multipliers of the KKT system
// give H = sum_j lambda_j y_j y_j' for displacements y_j = x^j - x0.
//
// The KKT matrix is assembled on displacements divided by the largest
// displacement length; the MFN problem is invariant under that scaling and the
// condition estimate stays meaningful for tiny sampling radii.

#include "anatra/core.hpp"
#include "anatra/tr_subproblem.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace anatra {

inline constexpr double kSingularConditionLimit = 1e12;

class MonomialBasis {
 public:
  explicit MonomialBasis(int dimension) : dim_(dimension) {
    if (dimension < 1) throw std::invalid_argument("dimension must be positive");
  }

  int dimension() const { return dim_; }
  int linear_size() const { return dim_ + 1; }
  int quadratic_size() const { return dim_ * (dim_ + 1) / 2; }
  int full_size() const { return linear_size() + quadratic_size(); }

  /// [1, x_1, ..., x_d]
  Vector linear(const Vector& x) const {
    Vector mu(linear_size());
    mu(0) = 1.0;
    mu.tail(dim_) = x;
    return mu;
  }

  /// [x_1^2/sqrt2, ..., x_d^2/sqrt2, x_1x_2, x_1x_3, ..., x_{d-1}x_d]
  Vector quadratic(const Vector& x) const {
    Vector nu(quadratic_size());
    int k = 0;
    for (int i = 0; i < dim_; ++i) nu(k++) = x(i) * x(i) * kInvSqrt2;
    for (int i = 0; i < dim_; ++i) {
      for (int j = i + 1; j < dim_; ++j) nu(k++) = x(i) * x(j);
    }
    return nu;
  }

  /// Hessian of beta' nu(x).
  Matrix hessian(const Vector& beta) const {
    Matrix H = Matrix::Zero(dim_, dim_);
    int k = 0;
    for (int i = 0; i < dim_; ++i) H(i, i) = 2.0 * kInvSqrt2 * beta(k++);
    for (int i = 0; i < dim_; ++i) {
      for (int j = i + 1; j < dim_; ++j) {
        H(i, j) = beta(k);
        H(j, i) = beta(k);
        ++k;
      }
    }
    return H;
  }

  /// Inverse of hessian(): coefficients beta with hessian(beta) == H.
  Vector coefficients(const Matrix& H) const {
    Vector beta(quadratic_size());
    int k = 0;
    for (int i = 0; i < dim_; ++i) beta(k++) = H(i, i) / (2.0 * kInvSqrt2);
    for (int i = 0; i < dim_; ++i) {
      for (int j = i + 1; j < dim_; ++j) beta(k++) = 0.5 * (H(i, j) + H(j, i));
    }
    return beta;
  }

 private:
  static constexpr double kInvSqrt2 = 0.70710678118654752440;
  int dim_;
};

/// Points x^0..x^p with x^0 the center, per-point insertion ages and optional
/// cached oracle values.
class InterpolationSet {
 public:
  explicit InterpolationSet(Vector center, std::optional<double> center_value = std::nullopt) {
    if (center.size() < 1) throw std::invalid_argument("interpolation set needs a dimension >= 1");
    entries_.push_back({std::move(center), next_age_++, center_value});
  }

  int dimension() const { return static_cast<int>(entries_.front().x.size()); }
  std::size_t size() const { return entries_.size(); }
  std::size_t max_size() const {
    const auto d = static_cast<std::size_t>(dimension());
    return (d + 1) * (d + 2) / 2;
  }

  const Vector& center() const { return entries_.front().x; }
  const Vector& point(std::size_t i) const { return entries_.at(i).x; }
  long age(std::size_t i) const { return entries_.at(i).age; }
  std::optional<double> value(std::size_t i) const { return entries_.at(i).value; }
  void set_value(std::size_t i, double v) { entries_.at(i).value = v; }

  bool all_evaluated() const {
    return std::all_of(entries_.begin(), entries_.end(),
                       [](const Entry& e) { return e.value.has_value(); });
  }

  Vector values() const {
    Vector v(static_cast<Eigen::Index>(size()));
    for (std::size_t i = 0; i < size(); ++i) {
      if (!entries_[i].value) throw std::logic_error("interpolation point has no cached value");
      v(static_cast<Eigen::Index>(i)) = *entries_[i].value;
    }
    return v;
  }

  /// Two points closer than this are considered identical.
  double distinct_tolerance() const { return 1e-12 * std::max(1.0, center().norm()); }

  std::optional<std::size_t> find(const Vector& x) const {
    const double tol = distinct_tolerance();
    for (std::size_t i = 0; i < size(); ++i) {
      if ((entries_[i].x - x).norm() <= tol) return i;
    }
    return std::nullopt;
  }

  std::size_t add(Vector x, std::optional<double> value = std::nullopt) {
    check_new_point(x, size());
    entries_.push_back({std::move(x), next_age_++, value});
    return size() - 1;
  }

  void replace(std::size_t i, Vector x, std::optional<double> value = std::nullopt) {
    if (i == 0) throw std::invalid_argument("the center cannot be replaced");
    check_new_point(x, i);
    entries_.at(i) = {std::move(x), next_age_++, value};
  }

  void remove(std::size_t i) {
    if (i == 0) throw std::invalid_argument("the center cannot be removed");
    entries_.erase(entries_.begin() + static_cast<std::ptrdiff_t>(i));
  }

  /// Moves point i to index 0.
  void make_center(std::size_t i) { std::swap(entries_.at(0), entries_.at(i)); }

  /// d x p matrix of x^i - x^0, i = 1..p.
  Matrix displacements() const {
    Matrix D(dimension(), static_cast<Eigen::Index>(size()) - 1);
    for (std::size_t i = 1; i < size(); ++i) {
      D.col(static_cast<Eigen::Index>(i) - 1) = entries_[i].x - center();
    }
    return D;
  }

 private:
  struct Entry {
    Vector x;
    long age;
    std::optional<double> value;
  };

  void check_new_point(const Vector& x, std::size_t skip) const {
    if (x.size() != dimension()) throw std::invalid_argument("point dimension mismatch");
    const double tol = distinct_tolerance();
    for (std::size_t j = 0; j < size(); ++j) {
      if (j != skip && (entries_[j].x - x).norm() <= tol) {
        throw std::invalid_argument("interpolation points must be distinct");
      }
    }
  }

  std::vector<Entry> entries_;
  long next_age_ = 0;
};

struct QuadraticModel {
  Vector center;
  double c = 0.0;
  Vector g;
  Matrix H;

  double value_at_step(const Vector& s) const { return c + g.dot(s) + 0.5 * s.dot(H * s); }
  double value(const Vector& x) const { return value_at_step(x - center); }
  Vector gradient(const Vector& x) const { return g + H * (x - center); }

  /// Same polynomial expanded about another point.
  QuadraticModel recentered(const Vector& new_center) const {
    return {new_center, value(new_center), gradient(new_center), H};
  }
};

/// Saddle-point system [N'N M'; M 0] on scaled displacements (x^j - x0)/scale.
struct KktSystem {
  double scale = 1.0;
  Matrix M;
  Matrix N;
  Matrix W;
  Eigen::PartialPivLU<Matrix> lu;
  double condition_estimate = 0.0;

  Eigen::Index points() const { return M.cols(); }
  Eigen::Index linear_size() const { return M.rows(); }
};

inline KktSystem assemble_kkt(const InterpolationSet& set) {
  const int d = set.dimension();
  const auto n = static_cast<Eigen::Index>(set.size());
  if (set.size() < static_cast<std::size_t>(d) + 1) {
    throw SingularGeometry("fewer than d+1 interpolation points");
  }
  if (set.size() > set.max_size()) {
    throw std::invalid_argument("more than (d+1)(d+2)/2 interpolation points");
  }
  const MonomialBasis basis(d);
  KktSystem kkt;
  const Matrix D = set.displacements();
  kkt.scale = D.colwise().norm().maxCoeff();
  if (!(kkt.scale > 0.0)) throw SingularGeometry("degenerate interpolation set");

  kkt.M.resize(basis.linear_size(), n);
  kkt.N.resize(basis.quadratic_size(), n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Vector y = (set.point(static_cast<std::size_t>(j)) - set.center()) / kkt.scale;
    kkt.M.col(j) = basis.linear(y);
    kkt.N.col(j) = basis.quadratic(y);
  }
  const Eigen::Index m = basis.linear_size();
  kkt.W = Matrix::Zero(n + m, n + m);
  kkt.W.topLeftCorner(n, n) = kkt.N.transpose() * kkt.N;
  kkt.W.topRightCorner(n, m) = kkt.M.transpose();
  kkt.W.bottomLeftCorner(m, n) = kkt.M;
  kkt.lu.compute(kkt.W);
  const double rcond = kkt.lu.rcond();
  kkt.condition_estimate = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
  if (!std::isfinite(kkt.condition_estimate) || kkt.condition_estimate > kSingularConditionLimit) {
    throw SingularGeometry("interpolation set is not poised in the minimum Frobenius norm sense");
  }
  return kkt;
}

namespace detail {

inline QuadraticModel model_from_multipliers(const InterpolationSet& set, const KktSystem& kkt,
                                             const Vector& solution) {
  const int d = set.dimension();
  const Eigen::Index n = kkt.points();
  const MonomialBasis basis(d);
  const Vector lambda = solution.head(n);
  const Vector alpha = solution.tail(kkt.linear_size());
  QuadraticModel model;
  model.center = set.center();
  model.c = alpha(0);
  model.g = alpha.tail(d) / kkt.scale;
  model.H = basis.hessian(kkt.N * lambda) / (kkt.scale * kkt.scale);
  return model;
}

}  // namespace detail

inline QuadraticModel build_mfn_model(const InterpolationSet& set, const KktSystem& kkt,
                                      std::span<const double> values) {
  const Eigen::Index n = kkt.points();
  if (static_cast<Eigen::Index>(values.size()) != n) {
    throw std::invalid_argument("one value per interpolation point is required");
  }
  Vector rhs = Vector::Zero(n + kkt.linear_size());
  for (Eigen::Index i = 0; i < n; ++i) rhs(i) = values[static_cast<std::size_t>(i)];
  return detail::model_from_multipliers(set, kkt, kkt.lu.solve(rhs));
}

inline QuadraticModel build_mfn_model(const InterpolationSet& set, std::span<const double> values) {
  return build_mfn_model(set, assemble_kkt(set), values);
}

/// Uses the values cached in the set.
inline QuadraticModel build_mfn_model(const InterpolationSet& set) {
  const Vector v = set.values();
  return build_mfn_model(set, std::span<const double>(v.data(), static_cast<std::size_t>(v.size())));
}

struct LagrangePolySet {
  std::vector<QuadraticModel> polys;

  std::size_t size() const { return polys.size(); }
  const QuadraticModel& operator[](std::size_t i) const { return polys[i]; }

  /// sum_i values_i * l_i(x)
  double expand(std::span<const double> values, const Vector& x) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < polys.size(); ++i) acc += values[i] * polys[i].value(x);
    return acc;
  }
};

inline LagrangePolySet lagrange_polynomials(const InterpolationSet& set, const KktSystem& kkt) {
  const Eigen::Index n = kkt.points();
  Matrix rhs = Matrix::Zero(n + kkt.linear_size(), n);
  rhs.topRows(n).setIdentity();
  const Matrix cols = kkt.lu.solve(rhs);
  LagrangePolySet out;
  out.polys.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    out.polys.push_back(detail::model_from_multipliers(set, kkt, cols.col(i)));
  }
  return out;
}

inline LagrangePolySet lagrange_polynomials(const InterpolationSet& set) {
  return lagrange_polynomials(set, assemble_kkt(set));
}

struct BallExtremum {
  double value = 0.0;  // max |p(x)| over the ball
  Vector point;
  Vector opposite_point;  // extremum of p of the other sign
};

/// max_{||x - center|| <= radius} |p(x)| by minimizing p and -p over the ball.
inline BallExtremum max_abs_on_ball(const QuadraticModel& p, const Vector& center, double radius) {
  const QuadraticModel local = p.recentered(center);
  BallExtremum out;
  if (local.g.size() == 1) {
    // closed form on an interval: endpoints and the stationary point
    const double a = local.H(0, 0);
    const double b = local.g(0);
    auto eval = [&](double t) { return local.c + b * t + 0.5 * a * t * t; };
    std::vector<double> ts = {0.0, -radius, radius};
    if (a != 0.0 && std::abs(b / a) <= radius) ts.push_back(-b / a);
    double t_min = 0.0, t_max = 0.0;
    for (double t : ts) {
      if (eval(t) < eval(t_min)) t_min = t;
      if (eval(t) > eval(t_max)) t_max = t;
    }
    const bool max_wins = std::abs(eval(t_max)) >= std::abs(eval(t_min));
    out.value = std::max(std::abs(eval(t_max)), std::abs(eval(t_min)));
    out.point = center + Vector::Constant(1, max_wins ? t_max : t_min);
    out.opposite_point = center + Vector::Constant(1, max_wins ? t_min : t_max);
    return out;
  }
  const SpectralHessian spectrum(local.H);
  SpectralHessian negated = spectrum;
  negated.eigenvalues = -spectrum.eigenvalues.reverse();
  negated.eigenvectors = spectrum.eigenvectors.rowwise().reverse();

  const TrsSolution lowest = minimize_on_ball(local.g, spectrum, radius);
  const TrsSolution highest = minimize_on_ball(-local.g, negated, radius);
  const double min_value = local.c - lowest.predicted_decrease;
  const double max_value = local.c + highest.predicted_decrease;
  if (std::abs(max_value) >= std::abs(min_value)) {
    out.value = std::abs(max_value);
    out.point = center + highest.step;
    out.opposite_point = center + lowest.step;
  } else {
    out.value = std::abs(min_value);
    out.point = center + lowest.step;
    out.opposite_point = center + highest.step;
  }
  return out;
}

struct PoisednessResult {
  double lambda = 0.0;
  std::size_t worst_index = 0;
  Vector worst_point;
  std::vector<BallExtremum> per_polynomial;
};

inline PoisednessResult poisedness(const LagrangePolySet& polys, const Vector& center, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("poisedness radius must be positive");
  PoisednessResult out;
  out.per_polynomial.reserve(polys.size());
  for (std::size_t i = 0; i < polys.size(); ++i) {
    out.per_polynomial.push_back(max_abs_on_ball(polys[i], center, radius));
    if (i == 0 || out.per_polynomial[i].value > out.lambda) {
      out.lambda = out.per_polynomial[i].value;
      out.worst_index = i;
      out.worst_point = out.per_polynomial[i].point;
    }
  }
  return out;
}

inline PoisednessResult poisedness(const InterpolationSet& set, const Vector& center, double radius) {
  return poisedness(lagrange_polynomials(set), center, radius);
}

/// min{1, 1/radius, 1/radius^2}
inline double radius_weight(double radius) {
  return std::min({1.0, 1.0 / radius, 1.0 / (radius * radius)});
}

struct ErrorBoundCertificate {
  double lambda = 0.0;
  double pinv_norm = 0.0;
  double hessian_norm = 0.0;
  double radius = 0.0;
  double lipschitz = 0.0;
  double eps0 = 0.0;
  double eps_max = 0.0;
  double bound = 0.0;          // gradient error bound on B(x0, radius)
  double hessian_bound = 0.0;  // upper bound on ||H|| from Lambda, L and the point errors
};

/// Gradient-error certificate for an MFN model on B(x0, radius). point_errors[i]
/// is |f~(x^i) - f(x^i)| (or an upper bound on it), in set order.
inline ErrorBoundCertificate gradient_error_bound(const InterpolationSet& set,
                                                  const QuadraticModel& model, double radius,
                                                  double lipschitz,
                                                  std::span<const double> point_errors) {
  if (point_errors.size() != set.size()) {
    throw std::invalid_argument("one error bound per interpolation point is required");
  }
  const int d = set.dimension();
  const double p1 = static_cast<double>(set.size());
  ErrorBoundCertificate cert;
  cert.radius = radius;
  cert.lipschitz = lipschitz;
  cert.lambda = poisedness(set, set.center(), radius).lambda;

  const Matrix L = set.displacements().transpose() / radius;
  Eigen::JacobiSVD<Matrix> svd(L);
  const double smin = svd.singularValues().minCoeff();
  cert.pinv_norm = smin > 0.0 ? 1.0 / smin : std::numeric_limits<double>::infinity();
  cert.hessian_norm = SpectralHessian(model.H).spectral_norm();

  cert.eps0 = point_errors[0];
  double sum_eps = point_errors[0];
  for (std::size_t i = 1; i < point_errors.size(); ++i) {
    cert.eps_max = std::max(cert.eps_max, point_errors[i]);
    sum_eps += point_errors[i];
  }
  cert.bound = std::sqrt(p1) * cert.pinv_norm *
               ((lipschitz + cert.hessian_norm) * radius + (cert.eps0 + cert.eps_max) / radius);

  // Summed per-point form: (p+1) copies of the Lipschitz term plus the error sum.
  const double root = std::sqrt(static_cast<double>((d + 1) * (d + 2)));
  const double w = radius_weight(radius);
  cert.hessian_bound = p1 * 4.0 * cert.lambda * lipschitz * root / w +
                       8.0 * cert.lambda * root * sum_eps / (radius * radius * w);
  return cert;
}

}  // namespace anatra

#endif  // ANATRA_INTERP_MODELS_HPP
