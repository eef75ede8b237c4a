#pragma once

#include <functional>
#include <span>

#include "noetherlab/linalg.hpp"

namespace noetherlab {

/// Default step for first-derivative central differences.
inline constexpr double kDefaultFdStep = 1e-5;

/// Default tolerance for analytic-vs-FD derivative validation.
inline constexpr double kDerivativeCheckTol = 1e-6;

Vector fd_gradient(const std::function<double(const Vector&)>& f, const Vector& x,
                   double step = kDefaultFdStep);

CVector fd_gradient(const std::function<Complex(const Vector&)>& f, const Vector& x,
                    double step = kDefaultFdStep);

/// Central-difference Jacobian of f: R^n -> R^m, returned as m x n.
Matrix fd_jacobian(const std::function<Vector(const Vector&)>& f, const Vector& x,
                   double step = kDefaultFdStep);

/// Mixed error |a - b| / max(1, |a|) in the sup norm. This is the relative
/// error used throughout for derivative checks: relative for large values,
/// absolute near zero.
double scaled_error(const Matrix& analytic, const Matrix& numeric);
double scaled_error(const CMatrix& analytic, const CMatrix& numeric);
double scaled_error(Complex analytic, Complex numeric);

/// Result of comparing an analytic derivative with central differences over a
/// set of probe points.
struct DerivativeCheck {
  double max_error = 0.0;
  Vector worst_point;
  bool passed(double tol = kDerivativeCheckTol) const { return max_error <= tol; }
};

DerivativeCheck check_gradient(const std::function<double(const Vector&)>& f,
                               const std::function<Vector(const Vector&)>& grad,
                               std::span<const Vector> probes, double step = kDefaultFdStep);

DerivativeCheck check_gradient(const std::function<Complex(const Vector&)>& f,
                               const std::function<CVector(const Vector&)>& grad,
                               std::span<const Vector> probes, double step = kDefaultFdStep);

DerivativeCheck check_jacobian(const std::function<Vector(const Vector&)>& f,
                               const std::function<Matrix(const Vector&)>& jac,
                               std::span<const Vector> probes, double step = kDefaultFdStep);

/// Small deterministic probe set in R^dim: the origin, +-0.5 along each axis
/// and four fixed off-axis points in [-1, 1]^dim.
std::vector<Vector> default_probes(int dim);

}  // namespace noetherlab
