#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include "json.hpp"

namespace wl1 {

/// ||x||_{w,p} = (sum w_j^(2-p) |x_j|^p)^(1/p), p in (0, 2].
double weighted_norm(const Eigen::VectorXd& x, const Eigen::VectorXd& w, double p);

/// Sum of w_j^2 over the exact nonzeros of x.
double weighted_l0(const Eigen::VectorXd& x, const Eigen::VectorXd& w);

enum class ApproxFlavor { quasi_best, exact_best };

struct ApproxResult {
  std::vector<std::size_t> support;  // ascending canonical positions
  double error = 0.0;                // ||x - x_S||_{w,p}
  double p = 1.0;
  double budget = 0.0;
  ApproxFlavor flavor = ApproxFlavor::quasi_best;
};

/// x with every entry outside `support` zeroed.
Eigen::VectorXd restrict_to(const Eigen::VectorXd& x, const std::vector<std::size_t>& support);

/// Greedy prefix of the |x_j|/w_j rearrangement (ties: smaller position
/// first), stopping at the first entry that would overflow the budget s.
ApproxResult quasi_best_approx(const Eigen::VectorXd& x, const Eigen::VectorXd& w, double s, double p);

inline constexpr std::size_t kExactBestMaxSize = 24;

/// Exact minimizer of ||x - x_S||_{w,p} over w(S) <= s by exhaustive search;
/// ties resolve to the lexicographically smallest support.
ApproxResult best_approx_oracle(const Eigen::VectorXd& x, const Eigen::VectorXd& w, double s, double p,
                                std::size_t max_size = kExactBestMaxSize);

/// (s - ||w||_inf^2)^(1/q - 1/p) ||x||_{w,p}; requires 0 < p < q <= 2 and
/// s > ||w||_inf^2 (PreconditionError otherwise).
double stechkin_bound(const Eigen::VectorXd& x, const Eigen::VectorXd& w, double s, double p, double q);

/// (||x||_{w^alpha,1}, ||x||_{w,p}) with alpha = 2/p - 1, 0 < p < 1.
std::pair<double, double> lp_norm_domination(const Eigen::VectorXd& x, const Eigen::VectorXd& w, double p);

nlohmann::json to_json(const ApproxResult& r);

}  // namespace wl1
