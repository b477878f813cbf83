#include <cmath>
#include <functional>
#include <limits>

#include "wl1/errors.hpp"
#include "wl1/solvers.hpp"

namespace wl1 {

LpOracleResult lp_oracle_wl1(const Eigen::MatrixXd& A, const Eigen::VectorXd& y, const Eigen::VectorXd& w) {
  const auto m = A.rows();
  const auto n = A.cols();
  if (y.size() != m || w.size() != n) throw UsageError("lp oracle dimensions do not match");
  if (m > kLpOracleMaxRows || n > kLpOracleMaxCols)
    throw BudgetExceeded("lp oracle limited to m <= 6, N <= 10");

  LpOracleResult out;
  out.z = Eigen::VectorXd::Zero(n);
  out.dual = Eigen::VectorXd::Zero(m);

  // Keep a maximal set of independent rows; the others must be consistent.
  const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
  const double tol = 1e-10 * scale;
  std::vector<Eigen::Index> rows;
  {
    Eigen::MatrixXd kept(0, n);
    for (Eigen::Index i = 0; i < m; ++i) {
      Eigen::MatrixXd trial(kept.rows() + 1, n);
      trial << kept, A.row(i);
      Eigen::FullPivLU<Eigen::MatrixXd> lu(trial);
      lu.setThreshold(1e-10);
      if (lu.rank() == trial.rows()) {
        kept = trial;
        rows.push_back(i);
      }
    }
  }
  const auto r = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd ar(r, n);
  Eigen::VectorXd yr(r);
  for (Eigen::Index i = 0; i < r; ++i) {
    ar.row(i) = A.row(rows[i]);
    yr(i) = y(rows[i]);
  }
  if (r == 0) {
    out.feasible = y.isZero(tol);
    return out;
  }

  // Columns of [A, -A]; cost [w; w].
  auto column = [&](Eigen::Index c) -> Eigen::VectorXd { return c < n ? ar.col(c) : Eigen::VectorXd(-ar.col(c - n)); };
  auto cost = [&](Eigen::Index c) { return w(c < n ? c : c - n); };

  struct Vertex {
    std::vector<std::size_t> basis;
    Eigen::VectorXd wb;
    double objective;
    Eigen::VectorXd dual;
    bool dual_feasible;
  };
  std::vector<Vertex> vertices;
  std::vector<std::size_t> basis;
  std::function<void(Eigen::Index)> rec = [&](Eigen::Index start) {
    if (static_cast<Eigen::Index>(basis.size()) == r) {
      Eigen::MatrixXd bm(r, r);
      Eigen::VectorXd cb(r);
      for (Eigen::Index i = 0; i < r; ++i) {
        bm.col(i) = column(static_cast<Eigen::Index>(basis[i]));
        cb(i) = cost(static_cast<Eigen::Index>(basis[i]));
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(bm);
      lu.setThreshold(1e-10);
      if (!lu.isInvertible()) return;
      const Eigen::VectorXd wb = lu.solve(yr);
      for (Eigen::Index i = 0; i < r; ++i)
        if (wb(i) < -1e-10 * std::max(1.0, yr.cwiseAbs().maxCoeff())) return;
      const Eigen::VectorXd dual = lu.transpose().solve(cb);
      const Eigen::VectorXd atu = ar.transpose() * dual;
      bool dual_ok = true;
      for (Eigen::Index j = 0; j < n; ++j)
        if (std::abs(atu(j)) > w(j) * (1.0 + 1e-10)) dual_ok = false;
      vertices.push_back({basis, wb, cb.dot(wb.cwiseMax(0.0)), dual, dual_ok});
      return;
    }
    for (Eigen::Index c = start; c < 2 * n; ++c) {
      basis.push_back(static_cast<std::size_t>(c));
      rec(c + 1);
      basis.pop_back();
    }
  };
  rec(0);

  if (vertices.empty()) {
    out.feasible = false;
    return out;
  }
  double best = std::numeric_limits<double>::infinity();
  for (const auto& v : vertices) best = std::min(best, v.objective);
  const double tie = 1e-10 * std::max(1.0, best);
  const Vertex* chosen = nullptr;
  const Vertex* certified = nullptr;
  for (const auto& v : vertices) {
    if (v.objective > best + tie) continue;
    if (chosen == nullptr) chosen = &v;
    if (certified == nullptr && v.dual_feasible) certified = &v;
  }
  for (Eigen::Index i = 0; i < r; ++i) {
    const auto c = static_cast<Eigen::Index>(chosen->basis[i]);
    const double val = std::max(0.0, chosen->wb(i));
    if (c < n) out.z(c) += val; else out.z(c - n) -= val;
  }
  out.basis = chosen->basis;
  out.objective = w.cwiseProduct(out.z).lpNorm<1>();
  out.feasible = (A * out.z - y).norm() <= 1e-8 * (1.0 + y.norm());
  if (certified != nullptr) {
    for (Eigen::Index i = 0; i < r; ++i) out.dual(rows[i]) = certified->dual(i);
  }
  return out;
}

}  // namespace wl1
