#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace noetherlab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand dimensions do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A precondition on the inputs does not hold (missing sampler, step out of
/// range, flat measure without a box, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The map x -> F_{Z,1}(z)(x, g(x), g'(x)) is not invertible on the probes.
class GraphConditionError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// A non-finite value or a failed iteration was encountered while evaluating
/// at a specific point. The point is kept for diagnostics.
class NumericFault : public Error {
 public:
  NumericFault(const std::string& what, Eigen::VectorXd probe)
      : Error(what), probe_(std::move(probe)) {}

  const Eigen::VectorXd& probe() const { return probe_; }

 private:
  Eigen::VectorXd probe_;
};

std::string format_point(const Eigen::VectorXd& x);

}  // namespace noetherlab
