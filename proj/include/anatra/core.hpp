#ifndef ANATRA_CORE_HPP
#define ANATRA_CORE_HPP

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace anatra {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Raised when the interpolation KKT matrix cannot be factored reliably.
/// Callers are expected to rebuild the set with affine_points().
class SingularGeometry : public std::runtime_error {
 public:
  explicit SingularGeometry(const std::string& what) : std::runtime_error(what) {}
};

class DegeneratePrediction : public std::runtime_error {
 public:
  explicit DegeneratePrediction(const std::string& what) : std::runtime_error(what) {}
};

class MissingNoiseInfo : public std::runtime_error {
 public:
  explicit MissingNoiseInfo(const std::string& what) : std::runtime_error(what) {}
};

class BudgetTooSmall : public std::invalid_argument {
 public:
  explicit BudgetTooSmall(const std::string& what) : std::invalid_argument(what) {}
};

class InvalidShots : public std::invalid_argument {
 public:
  explicit InvalidShots(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace anatra

#endif  // ANATRA_CORE_HPP
