#pragma once

// Small seeded generators for property tests.

#include <cstdint>
#include <functional>
#include <random>

#include "noetherlab/measure.hpp"

namespace noetherlab::proptest {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  Vector vector(int n, double lo = -1.0, double hi = 1.0) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v[i] = uniform(lo, hi);
    return v;
  }

  Matrix matrix(int rows, int cols, double scale = 1.0) {
    Matrix a(rows, cols);
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < cols; ++j) a(i, j) = uniform(-scale, scale);
    }
    return a;
  }

  /// Symmetric positive definite with eigenvalues in [0.5, 2].
  Matrix spd(int n) {
    const Eigen::HouseholderQR<Matrix> qr(matrix(n, n));
    const Matrix q = qr.householderQ();
    const Vector ev = vector(n, 0.5, 2.0);
    return q * ev.asDiagonal() * q.transpose();
  }

  DensityMeasure gaussian(int n) { return DensityMeasure::gaussian(vector(n, -0.5, 0.5), spd(n)); }

  TestFunction test_function(int n) {
    switch (integer(0, 2)) {
      case 0: {
        std::vector<Monomial> terms{{uniform(0.5, 1.5), std::vector<int>(n, 0)}};
        std::vector<int> p(n, 0);
        p[integer(0, n - 1)] = integer(1, 2);
        terms.push_back({uniform(-1.0, 1.0), p});
        return TestFunction::polynomial_times_gaussian(terms, vector(n, -0.5, 0.5), uniform(0.8, 1.5));
      }
      case 1:
        return TestFunction::plane_wave(vector(n, -1.0, 1.0));
      default:
        return TestFunction::compact_bump(vector(n, -0.3, 0.3), uniform(1.0, 2.0));
    }
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

/// Runs `body` on `cases` independently seeded generators.
inline void for_all(int cases, std::uint64_t seed, const std::function<void(Gen&, int)>& body) {
  for (int i = 0; i < cases; ++i) {
    Gen g(seed * 1000003ULL + static_cast<std::uint64_t>(i));
    body(g, i);
  }
}

}  // namespace noetherlab::proptest
