#include "wl1/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "wl1/errors.hpp"

namespace wl1 {

QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw UsageError("quadrature order must be positive");
  QuadratureRule rule;
  rule.nodes.assign(n, 0.0);
  rule.weights.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Newton from the asymptotic guess; the roots are symmetric.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged root.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 1.0 / ((1.0 - x * x) * dp * dp);  // 2/(..) halved for dt/2
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

QuadratureRule gauss_chebyshev(int n) {
  if (n < 1) throw UsageError("quadrature order must be positive");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.assign(n, 1.0 / n);
  for (int i = 0; i < n; ++i) rule.nodes[n - 1 - i] = std::cos((2.0 * i + 1.0) * std::numbers::pi / (2.0 * n));
  return rule;
}

}  // namespace wl1
