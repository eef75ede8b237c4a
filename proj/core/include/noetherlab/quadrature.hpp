#pragma once

#include <vector>

namespace noetherlab {

/// One-dimensional quadrature rule: nodes and weights.
struct Rule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Hermite rule for the physicists' weight exp(-u^2) on the real line.
/// Nodes are returned in increasing order and are exactly antisymmetric
/// (node[i] == -node[n-1-i]), weights exactly symmetric.
Rule1D gauss_hermite(int order);

/// Gauss-Legendre rule on [-1, 1], same symmetry guarantees.
Rule1D gauss_legendre(int order);

/// Composite Gauss-Legendre rule on [lo, hi] with `panels` equal panels.
Rule1D composite_gauss_legendre(double lo, double hi, int panels, int order);

}  // namespace noetherlab
