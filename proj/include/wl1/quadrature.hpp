#pragma once

#include <vector>

namespace wl1 {

/// Nodes and weights of a 1-D rule; weights sum to the measure's mass.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule for the probability measure dt/2 on [-1, 1]
/// (exact for polynomials of degree <= 2n - 1).
QuadratureRule gauss_legendre(int n);

/// n-point Gauss-Chebyshev rule for dt / (pi sqrt(1 - t^2)).
QuadratureRule gauss_chebyshev(int n);

}  // namespace wl1
