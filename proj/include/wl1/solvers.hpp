#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include "json.hpp"

namespace wl1 {

/// A z = y, or ||A z - y||_2 <= eta.
struct Constraint {
  enum class Kind { equality, ball };
  Kind kind = Kind::equality;
  double eta = 0.0;

  static Constraint equality() { return {}; }
  static Constraint ball(double eta);
  double radius() const { return kind == Kind::ball ? eta : 0.0; }
};

struct SolverOptions {
  int max_iter = 50000;
  double tol_feas = 1e-9;
  double tol_gap = 1e-8;
  /// Entries below this fraction of ||z||_2 are not reported as support.
  double support_threshold = 1e-8;
  /// Iterations between attempts to finish exactly on the current support.
  int polish_every = 25;
};

enum class SolverStatus { converged, max_iter, infeasible };
std::string to_string(SolverStatus status);

struct SolverResult {
  Eigen::VectorXd coefficients;
  int iterations = 0;
  double objective = 0.0;        // sum w_j |z_j|
  double primal_residual = 0.0;  // constraint violation max(0, ||Az - y|| - eta)
  double dual_residual = 0.0;    // last splitting dual residual
  double duality_gap = 0.0;
  SolverStatus status = SolverStatus::max_iter;
  bool polished = false;
  /// Dual vector u with |A^T u| <= w and sum w|z| - (<u, y> - eta ||u||) = gap.
  std::optional<Eigen::VectorXd> certificate;
};

/// Weighted basis pursuit (denoising): min sum w_j |z_j| subject to the
/// constraint. Works on the rescaled unweighted problem with columns
/// a_j / w_j using a Douglas-Rachford (ADMM) splitting whose constraint step
/// is an exact projection through a thin SVD; a support-restricted
/// refinement finishes the solve exactly when the support is identified.
SolverResult solve_wl1(const Eigen::MatrixXd& A, const Eigen::VectorXd& y, const Eigen::VectorXd& w,
                       const Constraint& constraint, const SolverOptions& options = {});

/// Positions with |z_j| > threshold * ||z||_2.
std::vector<std::size_t> reported_support(const Eigen::VectorXd& z, double threshold = 1e-8);

struct LpOracleResult {
  Eigen::VectorXd z;
  Eigen::VectorXd dual;  // u with |A^T u| <= w and <u, y> = objective
  double objective = 0.0;
  std::vector<std::size_t> basis;  // columns of [A, -A]
  bool feasible = true;
};

inline constexpr int kLpOracleMaxRows = 6;
inline constexpr int kLpOracleMaxCols = 10;

/// Exact equality-constrained weighted l1 minimizer by enumeration of the
/// basic feasible solutions of [A -A] w = y, w >= 0, in lexicographic basis
/// order (first optimal basis wins).
LpOracleResult lp_oracle_wl1(const Eigen::MatrixXd& A, const Eigen::VectorXd& y, const Eigen::VectorXd& w);

struct Certificate {
  bool ok = false;
  double max_dual_violation = 0.0;      // max_j (|A^T u|_j / w_j - 1)_+
  double support_sign_violation = 0.0;  // max_{j in S} |(A^T u)_j - w_j sign z_j| / w_j
  double gap = 0.0;                     // relative duality gap
  double feasibility = 0.0;             // relative constraint violation
};

/// KKT check of z. Without `dual`, a multiplier is fitted to the reported
/// support of z.
Certificate certify_optimality(const Eigen::MatrixXd& A, const Eigen::VectorXd& y, const Eigen::VectorXd& w,
                               const Eigen::VectorXd& z, const Constraint& constraint, double tol,
                               const std::optional<Eigen::VectorXd>& dual = std::nullopt,
                               double support_threshold = 1e-8);

struct LinearSolveResult {
  Eigen::VectorXd z;
  bool rank_deficient = false;
  bool ill_conditioned = false;
  double condition = 1.0;
};

/// min sum alpha_j^2 z_j^2 subject to A z = y.
LinearSolveResult solve_wl2(const Eigen::MatrixXd& A, const Eigen::VectorXd& y, const Eigen::VectorXd& alpha);

/// Least squares on the first d columns, zero-padded to N.
LinearSolveResult solve_least_squares(const Eigen::MatrixXd& A, const Eigen::VectorXd& y, int d);

inline constexpr double kIllConditioned = 1e12;

/// Square solve on the first m columns, zero-padded to N; falls back to a
/// minimum-norm least-squares solution when the condition estimate exceeds
/// kIllConditioned.
LinearSolveResult solve_exact(const Eigen::MatrixXd& A, const Eigen::VectorXd& y);

nlohmann::json to_json(const SolverOptions& o);
nlohmann::json to_json(const SolverResult& r);

}  // namespace wl1
