#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include "json.hpp"

#include "wl1/random.hpp"

namespace wl1 {

inline constexpr std::size_t kRipSupportCap = 1'000'000;

struct RipExhaustive {
  std::size_t cap = kRipSupportCap;  // budget-feasible supports visited
};
struct RipSampled {
  std::size_t n_supports = 1000;
  RandomStream stream;
};
using RipMode = std::variant<RipExhaustive, RipSampled>;

struct RipReport {
  double budget = 0.0;
  double delta = 0.0;
  std::vector<std::size_t> argmax_support;
  std::size_t supports_scanned = 0;  // maximal supports whose spectrum was computed
  bool exhaustive = true;            // false: delta is a lower bound
};

/// delta_{w,s} = max over w(S) <= s of ||A_S^T A_S - I||_2 for the
/// (normalized) matrix A. Only inclusion-maximal supports are scanned, which
/// is exact because the deviation of a principal submatrix never exceeds
/// that of the enclosing block. Exhaustive mode throws BudgetExceeded when
/// more than `cap` feasible supports would be visited.
RipReport wrip_constant(const Eigen::MatrixXd& A, const Eigen::VectorXd& w, double s, const RipMode& mode);

/// Spectral deviation ||A_S^T A_S - I||_2 of one support.
double support_deviation(const Eigen::MatrixXd& A, const std::vector<std::size_t>& support);

struct NspConstants {
  double rho = 0.0;
  double tau = 1.0;
  bool valid = false;  // delta < 1/3
};

/// rho = 2 delta / (1 - delta), tau = sqrt(1 + delta) / (1 - delta).
NspConstants rip_to_nsp_constants(double delta_3s);

enum class SupportMode { exhaustive, quasi_best };

struct NspViolation {
  Eigen::VectorXd v;
  std::vector<std::size_t> support;
  double lhs = 0.0;
  double rhs = 0.0;
};

struct NspReport {
  double rho = 0.0;
  double tau = 0.0;
  double budget = 0.0;
  std::vector<NspViolation> violations;
  std::size_t trials = 0;  // vectors tested
  std::size_t supports_checked = 0;
  SupportMode mode = SupportMode::exhaustive;
  double worst_ratio = 0.0;  // max lhs / rhs seen
};

inline constexpr std::size_t kNspExhaustiveMaxN = 20;

/// Tests ||v_S||_2 <= rho/sqrt(s) ||v_{S^c}||_{w,1} + tau ||A v||_2 on
/// Gaussian vectors and on adversarial vectors from the (near) kernel of A.
/// Exhaustive mode checks every maximal feasible S; quasi_best checks the
/// greedy maximizer of ||v_S||_2 only and is a lower-bound surrogate.
NspReport check_nsp_empirical(const Eigen::MatrixXd& A, const Eigen::VectorXd& w, double s, double rho, double tau,
                              std::size_t trials, const RandomStream& stream, SupportMode mode);

struct ErrorBoundReport {
  double sigma_s = 0.0;
  bool sigma_exact = true;  // false: quasi-best value used (upper bound)
  double l1_lhs = 0.0;
  double l1_rhs = 0.0;
  bool l2_applicable = false;  // s >= 2 ||w||_inf^2
  double l2_lhs = 0.0;
  double l2_rhs = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;

  bool holds(double rel_tol = 1e-12) const;
};

/// Evaluates both null-space-property error bounds for the pair (x, z):
///   ||z - x||_{w,1} <= (1+rho)/(1-rho) D + 2 tau sqrt(s)/(1-rho) ||A(z-x)||
///   ||z - x||_2     <= C1/sqrt(s) D + C2 ||A(z-x)||     (s >= 2 ||w||_inf^2)
/// with D = ||z||_{w,1} - ||x||_{w,1} + 2 sigma_s(x)_{w,1},
/// C1 = 2 sqrt2 (1+rho)^2/(1-rho), C2 = tau + 2 sqrt2 tau (1+rho)/(1-rho).
ErrorBoundReport error_bound_check(const Eigen::MatrixXd& A, const Eigen::VectorXd& w, double s,
                                   const Eigen::VectorXd& x, const Eigen::VectorXd& z, double rho, double tau);

nlohmann::json to_json(const RipReport& r);
nlohmann::json to_json(const NspConstants& c);
nlohmann::json to_json(const NspReport& r);
nlohmann::json to_json(const ErrorBoundReport& r);

}  // namespace wl1
