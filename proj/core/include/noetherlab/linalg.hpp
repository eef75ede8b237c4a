#pragma once

#include <complex>

#include <Eigen/Dense>

namespace noetherlab {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

/// sum_i a_i b_i without conjugation (Eigen's dot conjugates complex lhs).
inline Complex bilinear(const CVector& a, const Vector& b) {
  return (a.array() * b.array().cast<Complex>()).sum();
}

/// sum_ij a_ij b_ij, the pairing of a linear functional on matrices with a
/// matrix.
inline Complex bilinear(const CMatrix& a, const Matrix& b) {
  return (a.array() * b.array().cast<Complex>()).sum();
}

}  // namespace noetherlab
