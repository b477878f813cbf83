#include "wl1/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <numeric>

#include "wl1/errors.hpp"
#include "wl1/wsparse.hpp"

namespace wl1 {

namespace {

void check_weights(const Eigen::MatrixXd& A, const Eigen::VectorXd& w, double s) {
  if (w.size() != A.cols()) throw UsageError("weight vector length differs from matrix columns");
  for (Eigen::Index j = 0; j < w.size(); ++j)
    if (!(w(j) > 0.0)) throw UsageError("weights must be positive");
  if (!(s >= 0.0)) throw UsageError("budget s must be nonnegative");
}

// Depth-first walk over budget-feasible supports in canonical (lexicographic)
// order, reporting the inclusion-maximal ones.
void for_each_maximal_support(const Eigen::VectorXd& w, double s, std::size_t cap,
                              const std::function<void(const std::vector<std::size_t>&)>& visit) {
  const auto n = static_cast<std::size_t>(w.size());
  std::vector<double> w2(n);
  for (std::size_t j = 0; j < n; ++j) w2[j] = w(static_cast<Eigen::Index>(j)) * w(static_cast<Eigen::Index>(j));
  std::vector<std::size_t> current;
  std::vector<char> in(n, 0);
  std::size_t visited = 0;
  std::function<void(std::size_t, double)> rec = [&](std::size_t start, double used) {
    if (++visited > cap)
      throw BudgetExceeded("more than " + std::to_string(cap) +
                           " budget-feasible supports; use sampled mode instead");
    bool extended = false;
    for (std::size_t j = start; j < n; ++j) {
      if (used + w2[j] > s) continue;
      extended = true;
      current.push_back(j);
      in[j] = 1;
      rec(j + 1, used + w2[j]);
      in[j] = 0;
      current.pop_back();
    }
    if (extended) return;
    for (std::size_t j = 0; j < n; ++j)
      if (!in[j] && used + w2[j] <= s) return;  // not maximal
    visit(current);
  };
  rec(0, 0.0);
}

double block_deviation(const Eigen::MatrixXd& gram, const std::vector<std::size_t>& support) {
  if (support.empty()) return 0.0;
  const auto k = static_cast<Eigen::Index>(support.size());
  Eigen::MatrixXd g(k, k);
  for (Eigen::Index a = 0; a < k; ++a)
    for (Eigen::Index b = 0; b < k; ++b)
      g(a, b) = gram(static_cast<Eigen::Index>(support[a]), static_cast<Eigen::Index>(support[b]));
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return std::max(std::abs(ev(k - 1) - 1.0), std::abs(1.0 - ev(0)));
}

std::vector<std::size_t> random_maximal_support(const Eigen::VectorXd& w, double s, Philox& rng) {
  const auto n = static_cast<std::size_t>(w.size());
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
  std::vector<std::size_t> support;
  double used = 0.0;
  for (std::size_t j : perm) {
    const double w2 = w(static_cast<Eigen::Index>(j)) * w(static_cast<Eigen::Index>(j));
    if (used + w2 <= s) {
      used += w2;
      support.push_back(j);
    }
  }
  std::sort(support.begin(), support.end());
  return support;
}

double weighted_l1_complement(const Eigen::VectorXd& v, const Eigen::VectorXd& w, const std::vector<char>& in) {
  double sum = 0.0;
  for (Eigen::Index j = 0; j < v.size(); ++j)
    if (!in[static_cast<std::size_t>(j)]) sum += w(j) * std::abs(v(j));
  return sum;
}

}  // namespace

double support_deviation(const Eigen::MatrixXd& A, const std::vector<std::size_t>& support) {
  if (support.empty()) return 0.0;
  Eigen::MatrixXd as(A.rows(), static_cast<Eigen::Index>(support.size()));
  for (Eigen::Index i = 0; i < as.cols(); ++i) as.col(i) = A.col(static_cast<Eigen::Index>(support[i]));
  const Eigen::MatrixXd g = as.transpose() * as;
  std::vector<std::size_t> all(support.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return block_deviation(g, all);
}

RipReport wrip_constant(const Eigen::MatrixXd& A, const Eigen::VectorXd& w, double s, const RipMode& mode) {
  check_weights(A, w, s);
  const Eigen::MatrixXd gram = A.transpose() * A;
  RipReport rep;
  rep.budget = s;
  auto consider = [&](const std::vector<std::size_t>& support) {
    ++rep.supports_scanned;
    const double d = block_deviation(gram, support);
    if (rep.supports_scanned == 1 || d > rep.delta) {
      rep.delta = d;
      rep.argmax_support = support;
    }
  };
  if (const auto* ex = std::get_if<RipExhaustive>(&mode)) {
    rep.exhaustive = true;
    for_each_maximal_support(w, s, ex->cap, consider);
  } else {
    const auto& sm = std::get<RipSampled>(mode);
    rep.exhaustive = false;
    Philox rng(sm.stream);
    for (std::size_t t = 0; t < sm.n_supports; ++t) consider(random_maximal_support(w, s, rng));
  }
  return rep;
}

NspConstants rip_to_nsp_constants(double delta) {
  if (!(delta >= 0.0 && delta < 1.0)) throw UsageError("RIP constant must lie in [0, 1)");
  NspConstants c;
  c.rho = 2.0 * delta / (1.0 - delta);
  c.tau = std::sqrt(1.0 + delta) / (1.0 - delta);
  c.valid = delta < 1.0 / 3.0;
  return c;
}

NspReport check_nsp_empirical(const Eigen::MatrixXd& A, const Eigen::VectorXd& w, double s, double rho, double tau,
                              std::size_t trials, const RandomStream& stream, SupportMode mode) {
  check_weights(A, w, s);
  if (!(s > 0.0)) throw UsageError("NSP check needs s > 0");
  const auto n = A.cols();
  if (mode == SupportMode::exhaustive && static_cast<std::size_t>(n) > kNspExhaustiveMaxN)
    throw BudgetExceeded("exhaustive NSP check limited to N <= 20");

  NspReport rep;
  rep.rho = rho;
  rep.tau = tau;
  rep.budget = s;
  rep.mode = mode;

  // Candidate vectors: Gaussian, kernel basis, random kernel combinations.
  std::vector<Eigen::VectorXd> candidates;
  Philox rng(stream);
  for (std::size_t t = 0; t < trials; ++t) {
    Eigen::VectorXd v(n);
    for (Eigen::Index j = 0; j < n; ++j) v(j) = rng.normal();
    candidates.push_back(std::move(v));
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cut = sv.size() > 0 ? sv(0) * static_cast<double>(std::max(A.rows(), n)) * 1e-15 : 0.0;
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv(rank) > cut) ++rank;
  Eigen::MatrixXd kernel = svd.matrixV().rightCols(n - rank);
  if (kernel.cols() == 0) kernel = svd.matrixV().rightCols(1);  // least-amplified direction
  for (Eigen::Index c = 0; c < kernel.cols(); ++c) candidates.emplace_back(kernel.col(c));
  if (kernel.cols() > 1) {
    for (std::size_t t = 0; t < trials; ++t) {
      Eigen::VectorXd coef(kernel.cols());
      for (Eigen::Index c = 0; c < coef.size(); ++c) coef(c) = rng.normal();
      candidates.emplace_back(kernel * coef);
    }
  }

  std::vector<std::vector<std::size_t>> supports;
  if (mode == SupportMode::exhaustive)
    for_each_maximal_support(w, s, kRipSupportCap, [&](const std::vector<std::size_t>& S) { supports.push_back(S); });

  const double root_s = std::sqrt(s);
  auto check = [&](const Eigen::VectorXd& v, const std::vector<std::size_t>& S, double av) {
    std::vector<char> in(static_cast<std::size_t>(n), 0);
    double vs2 = 0.0;
    for (std::size_t j : S) {
      in[j] = 1;
      vs2 += v(static_cast<Eigen::Index>(j)) * v(static_cast<Eigen::Index>(j));
    }
    const double lhs = std::sqrt(vs2);
    const double rhs = rho / root_s * weighted_l1_complement(v, w, in) + tau * av;
    ++rep.supports_checked;
    if (rhs > 0.0) rep.worst_ratio = std::max(rep.worst_ratio, lhs / rhs);
    if (lhs - rhs > 1e-12 * std::max({lhs, rhs, 1e-300})) rep.violations.push_back({v, S, lhs, rhs});
  };

  for (const auto& v : candidates) {
    ++rep.trials;
    const double av = (A * v).norm();
    if (mode == SupportMode::exhaustive) {
      for (const auto& S : supports) check(v, S, av);
    } else {
      // Greedy on |v_j|^2 / w_j^2, skipping entries that do not fit.
      std::vector<std::size_t> order(static_cast<std::size_t>(n));
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto ia = static_cast<Eigen::Index>(a);
        const auto ib = static_cast<Eigen::Index>(b);
        return std::abs(v(ia)) / w(ia) > std::abs(v(ib)) / w(ib);
      });
      std::vector<std::size_t> S;
      double used = 0.0;
      for (std::size_t j : order) {
        const double w2 = w(static_cast<Eigen::Index>(j)) * w(static_cast<Eigen::Index>(j));
        if (used + w2 <= s) {
          used += w2;
          S.push_back(j);
        }
      }
      std::sort(S.begin(), S.end());
      check(v, S, av);
    }
  }
  return rep;
}

bool ErrorBoundReport::holds(double rel_tol) const {
  const bool l1 = l1_lhs <= l1_rhs + rel_tol * std::max(1.0, l1_rhs);
  const bool l2 = !l2_applicable || l2_lhs <= l2_rhs + rel_tol * std::max(1.0, l2_rhs);
  return l1 && l2;
}

ErrorBoundReport error_bound_check(const Eigen::MatrixXd& A, const Eigen::VectorXd& w, double s,
                                   const Eigen::VectorXd& x, const Eigen::VectorXd& z, double rho, double tau) {
  check_weights(A, w, s);
  if (!(rho >= 0.0 && rho < 1.0) || !(tau >= 0.0)) throw UsageError("error bounds need 0 <= rho < 1, tau >= 0");
  if (x.size() != A.cols() || z.size() != A.cols()) throw UsageError("vector lengths differ from matrix columns");
  if (!(s > 0.0)) throw UsageError("error bounds need s > 0");
  ErrorBoundReport r;
  if (static_cast<std::size_t>(x.size()) <= kExactBestMaxSize) {
    r.sigma_s = best_approx_oracle(x, w, s, 1.0).error;
    r.sigma_exact = true;
  } else {
    r.sigma_s = quasi_best_approx(x, w, s, 1.0).error;
    r.sigma_exact = false;
  }
  const double d = weighted_norm(z, w, 1.0) - weighted_norm(x, w, 1.0) + 2.0 * r.sigma_s;
  const double adiff = (A * (z - x)).norm();
  r.l1_lhs = weighted_norm(z - x, w, 1.0);
  r.l1_rhs = (1.0 + rho) / (1.0 - rho) * d + 2.0 * tau * std::sqrt(s) / (1.0 - rho) * adiff;
  const double winf = w.size() > 0 ? w.maxCoeff() : 1.0;
  r.c1 = 2.0 * std::numbers::sqrt2 * (1.0 + rho) * (1.0 + rho) / (1.0 - rho);
  r.c2 = tau + 2.0 * std::numbers::sqrt2 * tau * (1.0 + rho) / (1.0 - rho);
  r.l2_applicable = s >= 2.0 * winf * winf;
  r.l2_lhs = (z - x).norm();
  r.l2_rhs = r.c1 / std::sqrt(s) * d + r.c2 * adiff;
  return r;
}

nlohmann::json to_json(const RipReport& r) {
  return {{"s", r.budget},
          {"delta", r.delta},
          {"argmax_support", r.argmax_support},
          {"supports_scanned", r.supports_scanned},
          {"method", r.exhaustive ? "exhaustive" : "sampled"},
          {"lower_bound", !r.exhaustive}};
}

nlohmann::json to_json(const NspConstants& c) { return {{"rho", c.rho}, {"tau", c.tau}, {"valid", c.valid}}; }

nlohmann::json to_json(const NspReport& r) {
  nlohmann::json v = nlohmann::json::array();
  for (const auto& x : r.violations)
    v.push_back({{"support", x.support}, {"lhs", x.lhs}, {"rhs", x.rhs}});
  return {{"rho", r.rho},
          {"tau", r.tau},
          {"s", r.budget},
          {"trials", r.trials},
          {"supports_checked", r.supports_checked},
          {"support_mode", r.mode == SupportMode::exhaustive ? "exhaustive" : "quasi_best (lower bound)"},
          {"worst_ratio", r.worst_ratio},
          {"violations", v}};
}

nlohmann::json to_json(const ErrorBoundReport& r) {
  return {{"sigma_s", r.sigma_s},
          {"sigma_exact", r.sigma_exact},
          {"l1", {{"lhs", r.l1_lhs}, {"rhs", r.l1_rhs}}},
          {"l2", r.l2_applicable ? nlohmann::json{{"lhs", r.l2_lhs}, {"rhs", r.l2_rhs}} : nlohmann::json("not applicable")},
          {"C1", r.c1},
          {"C2", r.c2},
          {"holds", r.holds()}};
}

}  // namespace wl1
