#include "wl1/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "wl1/errors.hpp"

namespace wl1 {

Constraint Constraint::ball(double eta) {
  if (!(eta >= 0.0) || !std::isfinite(eta)) throw UsageError("ball radius must be finite and nonnegative");
  return {Kind::ball, eta};
}

std::string to_string(SolverStatus status) {
  switch (status) {
    case SolverStatus::converged: return "converged";
    case SolverStatus::max_iter: return "max_iter";
    case SolverStatus::infeasible: return "infeasible";
  }
  return "?";
}

std::vector<std::size_t> reported_support(const Eigen::VectorXd& z, double threshold) {
  std::vector<std::size_t> s;
  const double cut = threshold * z.norm();
  for (Eigen::Index i = 0; i < z.size(); ++i)
    if (std::abs(z(i)) > cut) s.push_back(static_cast<std::size_t>(i));
  return s;
}

namespace {

void check_problem(const Eigen::MatrixXd& A, const Eigen::VectorXd& y, const Eigen::VectorXd& w) {
  if (y.size() != A.rows()) throw UsageError("sample vector length differs from matrix rows");
  if (w.size() != A.cols()) throw UsageError("weight vector length differs from matrix columns");
  if (!A.allFinite() || !y.allFinite()) throw UsageError("matrix and samples must be finite");
  for (Eigen::Index j = 0; j < w.size(); ++j)
    if (!(w(j) > 0.0) || !std::isfinite(w(j))) throw UsageError("weights must be positive and finite");
}

constexpr double kRankCut = 1e-10;

// Euclidean projection onto {x : ||B x - y|| <= eta} through the thin SVD
// B = U diag(sigma) V^T.
class BallProjector {
 public:
  BallProjector(const Eigen::MatrixXd& B, const Eigen::VectorXd& y, double eta, bool equality)
      : eta_(eta), equality_(equality) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(B, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& sv = svd.singularValues();
    // Relative cut 1e-10: nearly dependent sample rows would otherwise make
    // beta / sigma amplify rounding; feasibility is always rechecked on B.
    const double cut = sv.size() > 0 ? sv(0) * kRankCut : 0.0;
    rank_ = 0;
    while (rank_ < sv.size() && sv(rank_) > cut) ++rank_;
    U_ = svd.matrixU().leftCols(rank_);
    V_ = svd.matrixV().leftCols(rank_);
    sigma_ = sv.head(rank_);
    beta_ = U_.transpose() * y;
    y_perp_ = (y - U_ * beta_).norm();
  }

  Eigen::Index rank() const { return rank_; }
  double y_perp() const { return y_perp_; }
  const Eigen::MatrixXd& U() const { return U_; }
  const Eigen::MatrixXd& V() const { return V_; }
  const Eigen::VectorXd& sigma() const { return sigma_; }
  const Eigen::VectorXd& beta() const { return beta_; }

  Eigen::VectorXd project(const Eigen::VectorXd& v) const {
    const Eigen::VectorXd c0 = V_.transpose() * v;
    Eigen::VectorXd out = v - V_ * c0;
    const double slack2 = eta_ * eta_ - y_perp_ * y_perp_;
    Eigen::VectorXd c;
    if (equality_ || slack2 <= 0.0) {
      c = beta_.cwiseQuotient(sigma_);
    } else {
      const Eigen::VectorXd r = sigma_.cwiseProduct(c0) - beta_;
      if (r.squaredNorm() <= slack2) {
        c = c0;
      } else {
        const double mu = solve_multiplier(r, slack2);
        const Eigen::VectorXd d = (1.0 + mu * sigma_.array().square()).matrix();
        c = (c0 + mu * sigma_.cwiseProduct(beta_)).cwiseQuotient(d);
      }
    }
    out.noalias() += V_ * c;
    return out;
  }

 private:
  // Root of sum r_i^2 / (1 + mu s_i^2)^2 = target on mu > 0.
  double solve_multiplier(const Eigen::VectorXd& r, double target) const {
    const Eigen::ArrayXd s2 = sigma_.array().square();
    const Eigen::ArrayXd r2 = r.array().square();
    auto f = [&](double mu) { return (r2 / (1.0 + mu * s2).square()).sum(); };
    double lo = 0.0;
    double hi = 1.0 / s2.maxCoeff();
    while (f(hi) > target) {
      lo = hi;
      hi *= 2.0;
      if (!std::isfinite(hi)) break;
    }
    double mu = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
      const Eigen::ArrayXd den = 1.0 + mu * s2;
      const double fv = (r2 / den.square()).sum();
      const double df = (-2.0 * r2 * s2 / den.cube()).sum();
      if (fv > target) lo = mu; else hi = mu;
      double next = mu - (fv - target) / df;
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::abs(next - mu) <= 1e-16 * std::max(1.0, mu)) {
        mu = next;
        break;
      }
      mu = next;
    }
    return mu;
  }

  double eta_;
  bool equality_;
  Eigen::Index rank_ = 0;
  Eigen::MatrixXd U_;
  Eigen::MatrixXd V_;
  Eigen::VectorXd sigma_;
  Eigen::VectorXd beta_;
  double y_perp_ = 0.0;
};

Eigen::VectorXd soft_threshold(const Eigen::VectorXd& v, double t) {
  return v.unaryExpr([t](double a) { return a > t ? a - t : (a < -t ? a + t : 0.0); });
}

struct DualValue {
  double value = -std::numeric_limits<double>::infinity();
  Eigen::VectorXd nu;
};

// Scales nu into {||B^T nu||_inf <= 1} and returns <nu, y> - eta ||nu||.
DualValue dual_value(const Eigen::MatrixXd& B, const Eigen::VectorXd& y, double eta, Eigen::VectorXd nu) {
  const double inf = (B.transpose() * nu).cwiseAbs().maxCoeff();
  if (inf > 1.0) nu /= inf;
  return {nu.dot(y) - eta * nu.norm(), std::move(nu)};
}

struct Candidate {
  Eigen::VectorXd x;
  DualValue dual;
  double objective = 0.0;
  double feasibility = 0.0;
  bool valid = false;
};

class Wl1Solver {
 public:
  Wl1Solver(const Eigen::MatrixXd& B, const Eigen::VectorXd& y, const Constraint& c, const SolverOptions& o)
      : B_(B), y_(y), eta_(c.radius()), equality_(c.kind == Constraint::Kind::equality), opt_(o),
        proj_(B, y, eta_, equality_), feas_tol_(o.tol_feas * (1.0 + y.norm())) {}

  const BallProjector& projector() const { return proj_; }
  double feas_tol() const { return feas_tol_; }

  double violation(const Eigen::VectorXd& x) const { return std::max(0.0, (B_ * x - y_).norm() - eta_); }

  bool accept(const Candidate& c) const {
    return c.valid && c.feasibility <= feas_tol_ && c.objective - c.dual.value <= opt_.tol_gap * (1.0 + c.objective);
  }

  Candidate assess(Eigen::VectorXd x, const std::vector<Eigen::VectorXd>& duals) const {
    Candidate c;
    c.objective = x.lpNorm<1>();
    c.feasibility = violation(x);
    for (const auto& nu : duals) {
      DualValue d = dual_value(B_, y_, eta_, nu);
      if (d.value > c.dual.value) c.dual = std::move(d);
    }
    c.x = std::move(x);
    c.valid = true;
    return c;
  }

  // Exact solution on the sign pattern of z, if one exists.
  Candidate polish(const Eigen::VectorXd& z, const Eigen::VectorXd& nu_hint) const {
    std::vector<Eigen::Index> s;
    for (Eigen::Index i = 0; i < z.size(); ++i)
      if (z(i) != 0.0) s.push_back(i);
    const auto k = static_cast<Eigen::Index>(s.size());
    if (k == 0 || k > proj_.rank()) return {};
    Eigen::MatrixXd bs(B_.rows(), k);
    Eigen::VectorXd sign(k);
    for (Eigen::Index i = 0; i < k; ++i) {
      bs.col(i) = B_.col(s[i]);
      sign(i) = z(s[i]) > 0.0 ? 1.0 : -1.0;
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(bs);
    if (qr.rank() < k) return {};
    const Eigen::VectorXd xls = qr.solve(y_);
    const Eigen::VectorXd rls = y_ - bs * xls;
    const Eigen::LDLT<Eigen::MatrixXd> gram(bs.transpose() * bs);
    const Eigen::VectorXd g = gram.solve(sign);

    Eigen::VectorXd xs;
    std::vector<Eigen::VectorXd> duals;
    if (equality_) {
      if (rls.norm() > feas_tol_) return {};
      xs = xls;
      duals.push_back(bs * g);
      duals.push_back(nu_hint + bs * gram.solve(sign - bs.transpose() * nu_hint));
    } else {
      const double slack = eta_ * eta_ - rls.squaredNorm();
      const double q = sign.dot(g);
      if (slack <= 0.0 || q <= 0.0) return {};
      const double t = std::sqrt(slack / q);
      xs = xls - t * g;
      duals.push_back((y_ - bs * xs) / t);
    }
    for (Eigen::Index i = 0; i < k; ++i)
      if (xs(i) * sign(i) <= 0.0) return {};
    Eigen::VectorXd x = Eigen::VectorXd::Zero(B_.cols());
    for (Eigen::Index i = 0; i < k; ++i) x(s[i]) = xs(i);
    return assess(std::move(x), duals);
  }

  // Exact finish for the equality case: primal simplex on the reduced
  // system diag(sigma) V^T x = beta, warm-started from the columns that the
  // dual estimate scores highest. Any invertible basis is primal feasible
  // once basic signs follow the basic values.
  Candidate crossover(const Eigen::VectorXd& nu_est) const {
    const Eigen::Index n = B_.cols();
    const Eigen::Index r = proj_.rank();
    if (!equality_ || r == 0) return {};
    const Eigen::MatrixXd bt = proj_.sigma().asDiagonal() * proj_.V().transpose();
    const Eigen::VectorXd& yt = proj_.beta();

    const Eigen::VectorXd score = (B_.transpose() * nu_est).cwiseAbs();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return score(a) > score(b); });
    std::vector<Eigen::Index> basis;
    Eigen::MatrixXd q(r, r);
    for (Eigen::Index j : order) {
      Eigen::VectorXd v = bt.col(j);
      const double len = v.norm();
      if (len == 0.0) continue;
      for (int pass = 0; pass < 2; ++pass)
        for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(basis.size()); ++k) v -= q.col(k).dot(v) * q.col(k);
      if (v.norm() <= 1e-8 * len) continue;
      q.col(static_cast<Eigen::Index>(basis.size())) = v.normalized();
      basis.push_back(j);
      if (static_cast<Eigen::Index>(basis.size()) == r) break;
    }
    while (static_cast<Eigen::Index>(basis.size()) < r) {
      // Pivoted fill: the column least explained by the current basis.
      Eigen::Index pick = -1;
      double best_ratio = 0.0;
      Eigen::VectorXd best_v;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (std::find(basis.begin(), basis.end(), j) != basis.end()) continue;
        Eigen::VectorXd v = bt.col(j);
        const double len = v.norm();
        if (len == 0.0) continue;
        for (int pass = 0; pass < 2; ++pass)
          for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(basis.size()); ++k) v -= q.col(k).dot(v) * q.col(k);
        if (v.norm() / len > best_ratio) {
          best_ratio = v.norm() / len;
          pick = j;
          best_v = v;
        }
      }
      if (pick < 0 || best_ratio <= 1e-13) return {};
      q.col(static_cast<Eigen::Index>(basis.size())) = best_v.normalized();
      basis.push_back(pick);
    }

    std::vector<char> in_basis(static_cast<std::size_t>(n), 0);
    for (auto j : basis) in_basis[static_cast<std::size_t>(j)] = 1;
    auto refactor = [&](Eigen::MatrixXd& inv) {
      Eigen::MatrixXd bs(r, r);
      for (Eigen::Index k = 0; k < r; ++k) bs.col(k) = bt.col(basis[static_cast<std::size_t>(k)]);
      inv = bs.partialPivLu().inverse();
    };
    Eigen::MatrixXd inv;
    refactor(inv);
    Eigen::VectorXd xs = inv * yt;
    const Eigen::VectorXd g0 = B_.transpose() * nu_est;
    Eigen::VectorXd c(r);
    for (Eigen::Index k = 0; k < r; ++k) {
      const auto j = basis[static_cast<std::size_t>(k)];
      c(k) = xs(k) > 0.0 ? 1.0 : xs(k) < 0.0 ? -1.0 : (g0(j) < 0.0 ? -1.0 : 1.0);
    }

    constexpr double kOptTol = 1e-11;
    const int max_pivots = static_cast<int>(20 * (n + r));
    int degenerate_run = 0;
    for (int pivot = 0; pivot <= max_pivots; ++pivot) {
      const Eigen::VectorXd nu = inv.transpose() * c;
      const Eigen::VectorXd g = bt.transpose() * nu;
      const bool bland = degenerate_run > 50;
      Eigen::Index enter = -1;
      double best = 1.0 + kOptTol;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (in_basis[static_cast<std::size_t>(j)]) continue;
        const double a = std::abs(g(j));
        if (a > best) {
          enter = j;
          if (bland) break;
          best = a;
        }
      }
      if (enter < 0) {
        Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
        for (Eigen::Index k = 0; k < r; ++k) x(basis[static_cast<std::size_t>(k)]) = xs(k);
        return assess(std::move(x), {Eigen::VectorXd(proj_.U() * nu)});
      }
      const double dir = g(enter) > 0.0 ? 1.0 : -1.0;
      const Eigen::VectorXd d = inv * bt.col(enter);
      Eigen::Index leave = -1;
      double theta = std::numeric_limits<double>::infinity();
      double pivot_mag = 0.0;
      for (Eigen::Index k = 0; k < r; ++k) {
        const double rate = dir * c(k) * d(k);
        if (rate <= 1e-12 * (1.0 + d.lpNorm<Eigen::Infinity>())) continue;
        const double t = std::max(0.0, c(k) * xs(k)) / rate;
        const bool tie = leave >= 0 && std::abs(t - theta) <= 1e-14 * (1.0 + theta);
        if (leave < 0 || (t < theta && !tie)) {
          theta = t;
          leave = k;
          pivot_mag = std::abs(d(k));
        } else if (tie && (bland ? basis[static_cast<std::size_t>(k)] < basis[static_cast<std::size_t>(leave)]
                                 : std::abs(d(k)) > pivot_mag)) {
          leave = k;
          pivot_mag = std::abs(d(k));
        }
      }
      if (leave < 0) return {};
      degenerate_run = theta <= 1e-15 ? degenerate_run + 1 : 0;

      in_basis[static_cast<std::size_t>(basis[static_cast<std::size_t>(leave)])] = 0;
      in_basis[static_cast<std::size_t>(enter)] = 1;
      basis[static_cast<std::size_t>(leave)] = enter;
      c(leave) = dir;
      if ((pivot + 1) % 64 == 0) {
        refactor(inv);
      } else {
        const double dp = d(leave);
        inv.row(leave) /= dp;
        for (Eigen::Index k = 0; k < r; ++k)
          if (k != leave && d(k) != 0.0) inv.row(k) -= d(k) * inv.row(leave);
      }
      xs = inv * yt;
    }
    return {};
  }

  SolverResult run() {
    SolverResult res;
    const auto n = B_.cols();
    const Eigen::VectorXd x0 = proj_.project(Eigen::VectorXd::Zero(n));
    const double l1 = x0.lpNorm<1>();
    double rho = l1 > 0.0 ? static_cast<double>(n) / l1 : 1.0;
    Eigen::VectorXd z = x0;
    Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd x = x0;
    const auto& U = proj_.U();
    const auto& V = proj_.V();
    const auto& sigma = proj_.sigma();
    auto admm_dual = [&] {
      return Eigen::VectorXd(U * (V.transpose() * (rho * u)).cwiseQuotient(sigma));
    };

    Candidate best;
    int next_crossover = 8 * opt_.polish_every;
    int it = 0;
    double r_norm = 0.0;
    double s_norm = 0.0;
    for (it = 1; it <= opt_.max_iter; ++it) {
      x = proj_.project(z - u);
      const Eigen::VectorXd z_old = z;
      z = soft_threshold(x + u, 1.0 / rho);
      u += x - z;
      r_norm = (x - z).norm();
      s_norm = rho * (z - z_old).norm();

      if (it % 10 == 0) {
        Candidate c = assess(x, {admm_dual()});
        if (accept(c)) {
          // The splitting iterate carries ~tol-sized entries off the support;
          // replace it by an exact finish when one certifies.
          Candidate p = polish(z, admm_dual());
          if (!accept(p) && equality_) p = crossover(admm_dual());
          if (accept(p)) {
            c = std::move(p);
            res.polished = true;
          }
          best = std::move(c);
          break;
        }
        if (r_norm > 10.0 * s_norm) {
          rho *= 2.0;
          u /= 2.0;
        } else if (s_norm > 10.0 * r_norm) {
          rho /= 2.0;
          u *= 2.0;
        }
      }
      if (it % opt_.polish_every == 0) {
        Candidate c = polish(z, admm_dual());
        if (accept(c)) {
          best = std::move(c);
          res.polished = true;
          break;
        }
        if (equality_ && it >= next_crossover) {
          next_crossover *= 4;
          c = crossover(admm_dual());
          if (accept(c)) {
            best = std::move(c);
            res.polished = true;
            break;
          }
        }
      }
    }
    if (!best.valid) {
      Candidate c = polish(z, admm_dual());
      if (!accept(c) && equality_) c = crossover(admm_dual());
      if (accept(c)) {
        best = std::move(c);
        res.polished = true;
        res.status = SolverStatus::converged;
      } else {
        best = assess(x, {admm_dual()});
        res.status = SolverStatus::max_iter;
      }
      it = std::min(it, opt_.max_iter);
    } else {
      res.status = SolverStatus::converged;
    }
    res.iterations = it;
    res.coefficients = best.x;
    res.objective = best.objective;
    res.primal_residual = best.feasibility;
    res.dual_residual = s_norm;
    res.duality_gap = best.objective - best.dual.value;
    res.certificate = best.dual.nu;
    return res;
  }

 private:
  const Eigen::MatrixXd& B_;
  const Eigen::VectorXd& y_;
  double eta_;
  bool equality_;
  SolverOptions opt_;
  BallProjector proj_;
  double feas_tol_;
};

}  // namespace

SolverResult solve_wl1(const Eigen::MatrixXd& A, const Eigen::VectorXd& y, const Eigen::VectorXd& w,
                       const Constraint& constraint, const SolverOptions& options) {
  check_problem(A, y, w);
  if (options.max_iter < 1 || options.polish_every < 1 || !(options.tol_feas > 0.0) || !(options.tol_gap > 0.0))
    throw UsageError("solver options must be positive");
  const auto n = A.cols();
  const double eta = constraint.radius();

  SolverResult res;
  if (y.norm() <= eta || y.isZero(0.0)) {
    res.coefficients = Eigen::VectorXd::Zero(n);
    res.status = SolverStatus::converged;
    res.certificate = Eigen::VectorXd::Zero(A.rows());
    return res;
  }

  const Eigen::MatrixXd B = A * w.cwiseInverse().asDiagonal();
  Wl1Solver solver(B, y, constraint, options);
  const auto& proj = solver.projector();
  if (proj.rank() == 0 || proj.y_perp() > eta + solver.feas_tol()) {
    res.status = SolverStatus::infeasible;
    res.coefficients = proj.rank() == 0 ? Eigen::VectorXd::Zero(n)
                                        : Eigen::VectorXd(proj.project(Eigen::VectorXd::Zero(n)).cwiseQuotient(w));
    res.primal_residual = proj.y_perp() - eta;
    return res;
  }
  res = solver.run();
  res.coefficients = res.coefficients.cwiseQuotient(w);
  return res;
}

// ---------------------------------------------------------------------------

Certificate certify_optimality(const Eigen::MatrixXd& A, const Eigen::VectorXd& y, const Eigen::VectorXd& w,
                               const Eigen::VectorXd& z, const Constraint& constraint, double tol,
                               const std::optional<Eigen::VectorXd>& dual, double support_threshold) {
  check_problem(A, y, w);
  if (z.size() != A.cols()) throw UsageError("coefficient vector length differs from matrix columns");
  const double eta = constraint.radius();
  const Eigen::VectorXd resid = y - A * z;
  const auto support = reported_support(z, support_threshold);

  Eigen::VectorXd u;
  if (dual) {
    if (dual->size() != A.rows()) throw UsageError("dual vector length differs from matrix rows");
    u = *dual;
  } else if (support.empty()) {
    u = Eigen::VectorXd::Zero(A.rows());
  } else {
    Eigen::MatrixXd as(A.rows(), static_cast<Eigen::Index>(support.size()));
    Eigen::VectorXd target(as.cols());
    for (Eigen::Index i = 0; i < as.cols(); ++i) {
      const auto j = static_cast<Eigen::Index>(support[i]);
      as.col(i) = A.col(j);
      target(i) = w(j) * (z(j) > 0.0 ? 1.0 : -1.0);
    }
    const bool on_boundary = eta > 0.0 && resid.norm() > 0.5 * eta;
    if (on_boundary) {
      // Multiplier direction is fixed by the residual; fit its length.
      const Eigen::VectorXd g = as.transpose() * resid;
      const double lambda = g.squaredNorm() > 0.0 ? g.dot(target) / g.squaredNorm() : 0.0;
      u = lambda * resid;
    } else {
      u = Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(as.transpose()).solve(target);
    }
  }

  Certificate cert;
  const Eigen::VectorXd atu = A.transpose() * u;
  double scale = 1.0;
  for (Eigen::Index j = 0; j < w.size(); ++j) {
    const double ratio = std::abs(atu(j)) / w(j);
    cert.max_dual_violation = std::max(cert.max_dual_violation, ratio - 1.0);
    scale = std::max(scale, ratio);
  }
  for (std::size_t j : support) {
    const auto i = static_cast<Eigen::Index>(j);
    const double target = w(i) * (z(i) > 0.0 ? 1.0 : -1.0);
    cert.support_sign_violation = std::max(cert.support_sign_violation, std::abs(atu(i) - target) / w(i));
  }
  const double objective = w.cwiseProduct(z).lpNorm<1>();
  const Eigen::VectorXd us = u / scale;
  const double dual_obj = us.dot(y) - eta * us.norm();
  cert.gap = (objective - dual_obj) / (1.0 + objective);
  cert.feasibility = std::max(0.0, resid.norm() - eta) / (1.0 + y.norm());
  cert.ok = cert.max_dual_violation <= tol && cert.support_sign_violation <= tol && std::abs(cert.gap) <= tol &&
            cert.feasibility <= tol;
  return cert;
}

// ---------------------------------------------------------------------------

LinearSolveResult solve_wl2(const Eigen::MatrixXd& A, const Eigen::VectorXd& y, const Eigen::VectorXd& alpha) {
  if (y.size() != A.rows() || alpha.size() != A.cols()) throw UsageError("wl2 dimensions do not match");
  for (Eigen::Index j = 0; j < alpha.size(); ++j)
    if (!(alpha(j) > 0.0)) throw UsageError("wl2 weights must be positive");
  const Eigen::MatrixXd c = A * alpha.cwiseInverse().asDiagonal();
  const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(c);
  LinearSolveResult r;
  r.rank_deficient = cod.rank() < A.rows();
  r.z = Eigen::VectorXd(cod.solve(y)).cwiseQuotient(alpha);
  return r;
}

LinearSolveResult solve_least_squares(const Eigen::MatrixXd& A, const Eigen::VectorXd& y, int d) {
  if (y.size() != A.rows()) throw UsageError("sample vector length differs from matrix rows");
  if (d < 1 || d > A.cols()) throw UsageError("least squares needs 1 <= d <= N");
  if (d > A.rows()) throw UsageError("least squares needs d <= m");
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A.leftCols(d));
  LinearSolveResult r;
  r.rank_deficient = qr.rank() < d;
  r.z = Eigen::VectorXd::Zero(A.cols());
  r.z.head(d) = qr.solve(y);
  return r;
}

LinearSolveResult solve_exact(const Eigen::MatrixXd& A, const Eigen::VectorXd& y) {
  const auto m = A.rows();
  if (y.size() != m) throw UsageError("sample vector length differs from matrix rows");
  if (A.cols() < m) throw UsageError("exact inversion needs at least m columns");
  const Eigen::MatrixXd sq = A.leftCols(m);
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(sq);
  const auto& sv = svd.singularValues();
  LinearSolveResult r;
  r.condition = sv(m - 1) > 0.0 ? sv(0) / sv(m - 1) : std::numeric_limits<double>::infinity();
  r.z = Eigen::VectorXd::Zero(A.cols());
  if (r.condition > kIllConditioned) {
    r.ill_conditioned = true;
    r.rank_deficient = sv(m - 1) == 0.0;
    r.z.head(m) = Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(sq).solve(y);
  } else {
    r.z.head(m) = Eigen::ColPivHouseholderQR<Eigen::MatrixXd>(sq).solve(y);
  }
  return r;
}

nlohmann::json to_json(const SolverOptions& o) {
  return {{"max_iter", o.max_iter},
          {"tol_feas", o.tol_feas},
          {"tol_gap", o.tol_gap},
          {"support_threshold", o.support_threshold},
          {"polish_every", o.polish_every}};
}

nlohmann::json to_json(const SolverResult& r) {
  return {{"status", to_string(r.status)},
          {"iterations", r.iterations},
          {"objective", r.objective},
          {"primal_residual", r.primal_residual},
          {"dual_residual", r.dual_residual},
          {"duality_gap", r.duality_gap},
          {"polished", r.polished},
          {"coefficients", std::vector<double>(r.coefficients.data(), r.coefficients.data() + r.coefficients.size())}};
}

}  // namespace wl1
