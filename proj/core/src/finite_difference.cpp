#include "noetherlab/finite_difference.hpp"

#include <cmath>
#include <sstream>

#include "noetherlab/error.hpp"

namespace noetherlab {

std::string format_point(const Eigen::VectorXd& x) {
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (i) os << ", ";
    os << x[i];
  }
  os << ')';
  return os.str();
}

Vector fd_gradient(const std::function<double(const Vector&)>& f, const Vector& x,
                   double step) {
  Vector g(x.size());
  Vector xp = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    xp[i] = x[i] + step;
    const double fp = f(xp);
    xp[i] = x[i] - step;
    const double fm = f(xp);
    xp[i] = x[i];
    g[i] = (fp - fm) / (2.0 * step);
  }
  return g;
}

CVector fd_gradient(const std::function<Complex(const Vector&)>& f, const Vector& x,
                    double step) {
  CVector g(x.size());
  Vector xp = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    xp[i] = x[i] + step;
    const Complex fp = f(xp);
    xp[i] = x[i] - step;
    const Complex fm = f(xp);
    xp[i] = x[i];
    g[i] = (fp - fm) / (2.0 * step);
  }
  return g;
}

Matrix fd_jacobian(const std::function<Vector(const Vector&)>& f, const Vector& x,
                   double step) {
  const Vector f0 = f(x);
  Matrix jac(f0.size(), x.size());
  Vector xp = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    xp[i] = x[i] + step;
    const Vector fp = f(xp);
    xp[i] = x[i] - step;
    const Vector fm = f(xp);
    xp[i] = x[i];
    jac.col(i) = (fp - fm) / (2.0 * step);
  }
  return jac;
}

double scaled_error(const Matrix& analytic, const Matrix& numeric) {
  if (analytic.rows() != numeric.rows() || analytic.cols() != numeric.cols()) {
    throw DimensionError("scaled_error: shape mismatch");
  }
  if (analytic.size() == 0) return 0.0;
  const double diff = (analytic - numeric).cwiseAbs().maxCoeff();
  return diff / std::max(1.0, analytic.cwiseAbs().maxCoeff());
}

double scaled_error(const CMatrix& analytic, const CMatrix& numeric) {
  if (analytic.rows() != numeric.rows() || analytic.cols() != numeric.cols()) {
    throw DimensionError("scaled_error: shape mismatch");
  }
  if (analytic.size() == 0) return 0.0;
  const double diff = (analytic - numeric).cwiseAbs().maxCoeff();
  return diff / std::max(1.0, analytic.cwiseAbs().maxCoeff());
}

double scaled_error(Complex analytic, Complex numeric) {
  return std::abs(analytic - numeric) / std::max(1.0, std::abs(analytic));
}

namespace {

template <typename Err>
DerivativeCheck check_points(std::span<const Vector> probes, Err&& err) {
  DerivativeCheck out;
  for (const Vector& x : probes) {
    const double e = err(x);
    if (!std::isfinite(e)) continue;
    if (out.worst_point.size() == 0 || e > out.max_error) {
      out.max_error = e;
      out.worst_point = x;
    }
  }
  return out;
}

}  // namespace

DerivativeCheck check_gradient(const std::function<double(const Vector&)>& f,
                               const std::function<Vector(const Vector&)>& grad,
                               std::span<const Vector> probes, double step) {
  return check_points(probes, [&](const Vector& x) {
    if (!std::isfinite(f(x))) return std::numeric_limits<double>::quiet_NaN();
    return scaled_error(Matrix(grad(x)), Matrix(fd_gradient(f, x, step)));
  });
}

DerivativeCheck check_gradient(const std::function<Complex(const Vector&)>& f,
                               const std::function<CVector(const Vector&)>& grad,
                               std::span<const Vector> probes, double step) {
  return check_points(probes, [&](const Vector& x) {
    const Complex v = f(x);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      return std::numeric_limits<double>::quiet_NaN();
    }
    return scaled_error(CMatrix(grad(x)), CMatrix(fd_gradient(f, x, step)));
  });
}

DerivativeCheck check_jacobian(const std::function<Vector(const Vector&)>& f,
                               const std::function<Matrix(const Vector&)>& jac,
                               std::span<const Vector> probes, double step) {
  return check_points(probes, [&](const Vector& x) {
    return scaled_error(jac(x), fd_jacobian(f, x, step));
  });
}

std::vector<Vector> default_probes(int dim) {
  std::vector<Vector> probes;
  probes.push_back(Vector::Zero(dim));
  for (int i = 0; i < dim; ++i) {
    Vector e = Vector::Zero(dim);
    e[i] = 0.5;
    probes.push_back(e);
    probes.push_back(-e);
  }
  // Fixed off-axis points; coordinates cycle through a short table.
  static constexpr double kTable[] = {0.37, -0.81, 0.64, -0.23, 0.92, -0.55, 0.11, 0.78};
  for (int k = 0; k < 4; ++k) {
    Vector x(dim);
    for (int i = 0; i < dim; ++i) x[i] = kTable[(3 * k + 5 * i) % 8];
    probes.push_back(x);
  }
  return probes;
}

}  // namespace noetherlab
