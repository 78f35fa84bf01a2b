#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Core>

namespace vbakf {

/// Covariance argument that is not symmetric positive definite.
class InvalidCovariance : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Operation requested for an integration scheme that does not support it.
class UnsupportedScheme : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Belief parameters outside their valid range (e.g. nu <= d + 1).
class InvalidBelief : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A propagated function returned non-finite values. Carries the input point.
class PropagationError : public std::runtime_error {
 public:
  PropagationError(const std::string& what, Eigen::VectorXd point)
      : std::runtime_error(what), point_(std::move(point)) {}

  const Eigen::VectorXd& point() const noexcept { return point_; }

 private:
  Eigen::VectorXd point_;
};

/// Covariance that could not be repaired to SPD, singular innovation covariance.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A recursion step failed; `step()` is the zero-based measurement index.
class FilterRunError : public std::runtime_error {
 public:
  FilterRunError(std::size_t step, const std::string& cause)
      : std::runtime_error("filter step " + std::to_string(step) + ": " + cause),
        step_(step) {}

  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

}  // namespace vbakf
