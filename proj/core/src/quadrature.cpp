#include "noetherlab/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#include "noetherlab/error.hpp"
#include "noetherlab/linalg.hpp"

namespace noetherlab {
namespace {

constexpr int kMaxNewton = 100;

// Orthonormal Hermite recurrence evaluated at x. Returns p_n(x) and writes
// p_{n-1}(x) into prev.
double hermite_orthonormal(int n, double x, double& prev) {
  double p0 = std::pow(kPi, -0.25);
  double p1 = 0.0;
  for (int j = 1; j <= n; ++j) {
    const double p2 = p1;
    p1 = p0;
    p0 = x * std::sqrt(2.0 / j) * p1 - std::sqrt((j - 1.0) / j) * p2;
  }
  prev = p1;
  return p0;
}

}  // namespace

static Rule1D build_gauss_hermite(int order) {
  if (order < 1) throw DomainError("gauss_hermite: order must be positive");
  const int n = order;
  const int half = (n + 1) / 2;
  std::vector<double> pos(half);
  std::vector<double> wpos(half);

  // Initial roots are the eigenvalues of the Jacobi matrix (Golub-Welsch);
  // each is polished by Newton on the orthonormal recurrence, which also gives
  // weights with full relative accuracy in the tails.
  Vector diag = Vector::Zero(n);
  Vector sub(std::max(n - 1, 0));
  for (int j = 1; j < n; ++j) sub[j - 1] = std::sqrt(0.5 * j);
  Eigen::SelfAdjointEigenSolver<Matrix> jacobi;
  jacobi.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  const Vector roots = jacobi.eigenvalues();  // ascending
  for (int i = 0; i < half; ++i) {
    double z = -roots[i];
    double pp = 0.0;
    for (int it = 0; it < kMaxNewton; ++it) {
      double prev = 0.0;
      const double p = hermite_orthonormal(n, z, prev);
      pp = std::sqrt(2.0 * n) * prev;
      const double z1 = z;
      z = z1 - p / pp;
      if (std::abs(z - z1) <= 1e-15 * std::max(1.0, std::abs(z))) break;
    }
    double prev = 0.0;
    hermite_orthonormal(n, z, prev);
    pp = std::sqrt(2.0 * n) * prev;
    pos[i] = z;
    wpos[i] = 2.0 / (pp * pp);
  }
  if (n % 2 == 1) pos[half - 1] = 0.0;

  Rule1D rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < half; ++i) {
    rule.nodes[i] = -pos[i];
    rule.nodes[n - 1 - i] = pos[i];
    rule.weights[i] = wpos[i];
    rule.weights[n - 1 - i] = wpos[i];
  }
  return rule;
}

static Rule1D build_gauss_legendre(int order) {
  if (order < 1) throw DomainError("gauss_legendre: order must be positive");
  const int n = order;
  const int half = (n + 1) / 2;
  Rule1D rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < half; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < kMaxNewton; ++it) {
      double p1 = 1.0;
      double p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-16) break;
    }
    if (n % 2 == 1 && i == half - 1) z = 0.0;
    // Recompute the derivative at the converged root for the weight.
    double p1 = 1.0;
    double p2 = 0.0;
    for (int j = 1; j <= n; ++j) {
      const double p3 = p2;
      p2 = p1;
      p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
    }
    pp = n * (z * p1 - p2) / (z * z - 1.0);
    const double w = 2.0 / ((1.0 - z * z) * pp * pp);
    rule.nodes[i] = -z;
    rule.nodes[n - 1 - i] = z;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

Rule1D composite_gauss_legendre(double lo, double hi, int panels, int order) {
  if (!(hi > lo)) throw DomainError("composite_gauss_legendre: empty interval");
  if (panels < 1) throw DomainError("composite_gauss_legendre: panels must be positive");
  const Rule1D base = gauss_legendre(order);
  const double width = (hi - lo) / panels;
  Rule1D rule;
  rule.nodes.reserve(static_cast<std::size_t>(panels) * order);
  rule.weights.reserve(static_cast<std::size_t>(panels) * order);
  for (int k = 0; k < panels; ++k) {
    const double mid = lo + (k + 0.5) * width;
    for (int i = 0; i < order; ++i) {
      rule.nodes.push_back(mid + 0.5 * width * base.nodes[i]);
      rule.weights.push_back(0.5 * width * base.weights[i]);
    }
  }
  return rule;
}

namespace {

// Rules are rebuilt often (every pairing asks for one), and building a
// high-order Hermite rule costs far more than the pairing itself.
Rule1D cached(int order, Rule1D (*build)(int), std::map<int, Rule1D>& cache, std::mutex& mu) {
  {
    const std::lock_guard<std::mutex> lock(mu);
    if (auto it = cache.find(order); it != cache.end()) return it->second;
  }
  Rule1D rule = build(order);
  const std::lock_guard<std::mutex> lock(mu);
  return cache.emplace(order, std::move(rule)).first->second;
}

}  // namespace

Rule1D gauss_hermite(int order) {
  static std::map<int, Rule1D> cache;
  static std::mutex mu;
  return cached(order, build_gauss_hermite, cache, mu);
}

Rule1D gauss_legendre(int order) {
  static std::map<int, Rule1D> cache;
  static std::mutex mu;
  return cached(order, build_gauss_legendre, cache, mu);
}

}  // namespace noetherlab
