#include "wl1/wsparse.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "wl1/errors.hpp"

namespace wl1 {

namespace {

void check_pair(const Eigen::VectorXd& x, const Eigen::VectorXd& w) {
  if (x.size() != w.size()) throw UsageError("coefficient and weight vectors differ in length");
  if (!x.allFinite()) throw UsageError("coefficient vector has non-finite entries");
  for (Eigen::Index i = 0; i < w.size(); ++i)
    if (!(w(i) > 0.0) || !std::isfinite(w(i))) throw UsageError("weights must be positive and finite");
}

void check_p(double p) {
  if (!(p > 0.0 && p <= 2.0)) throw UsageError("p must lie in (0, 2]");
}

double term(double xj, double wj, double p) { return std::pow(wj, 2.0 - p) * std::pow(std::abs(xj), p); }

}  // namespace

double weighted_norm(const Eigen::VectorXd& x, const Eigen::VectorXd& w, double p) {
  check_p(p);
  check_pair(x, w);
  if (p == 2.0) return x.norm();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) sum += term(x(i), w(i), p);
  return std::pow(sum, 1.0 / p);
}

double weighted_l0(const Eigen::VectorXd& x, const Eigen::VectorXd& w) {
  check_pair(x, w);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (x(i) != 0.0) sum += w(i) * w(i);
  return sum;
}

Eigen::VectorXd restrict_to(const Eigen::VectorXd& x, const std::vector<std::size_t>& support) {
  Eigen::VectorXd r = Eigen::VectorXd::Zero(x.size());
  for (std::size_t j : support) r(static_cast<Eigen::Index>(j)) = x(static_cast<Eigen::Index>(j));
  return r;
}

namespace {
double tail_error(const Eigen::VectorXd& x, const Eigen::VectorXd& w, const std::vector<std::size_t>& support,
                  double p) {
  return weighted_norm(x - restrict_to(x, support), w, p);
}
}  // namespace

ApproxResult quasi_best_approx(const Eigen::VectorXd& x, const Eigen::VectorXd& w, double s, double p) {
  check_p(p);
  check_pair(x, w);
  if (!(s >= 0.0)) throw UsageError("budget s must be nonnegative");
  std::vector<std::size_t> order(static_cast<std::size_t>(x.size()));
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto ia = static_cast<Eigen::Index>(a);
    const auto ib = static_cast<Eigen::Index>(b);
    return std::abs(x(ia)) / w(ia) > std::abs(x(ib)) / w(ib);
  });
  ApproxResult r;
  r.p = p;
  r.budget = s;
  r.flavor = ApproxFlavor::quasi_best;
  double used = 0.0;
  for (std::size_t j : order) {
    const double wj = w(static_cast<Eigen::Index>(j));
    if (used + wj * wj > s) break;
    used += wj * wj;
    r.support.push_back(j);
  }
  std::sort(r.support.begin(), r.support.end());
  r.error = tail_error(x, w, r.support, p);
  return r;
}

ApproxResult best_approx_oracle(const Eigen::VectorXd& x, const Eigen::VectorXd& w, double s, double p,
                                std::size_t max_size) {
  check_p(p);
  check_pair(x, w);
  if (!(s >= 0.0)) throw UsageError("budget s must be nonnegative");
  const auto n = static_cast<std::size_t>(x.size());
  if (n > max_size) throw BudgetExceeded("exact best approximation limited to " + std::to_string(max_size) + " entries");

  // Maximizing the captured mass sum_{S} w^(2-p)|x|^p minimizes the error.
  std::vector<double> mass(n);
  std::vector<double> w2(n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto i = static_cast<Eigen::Index>(j);
    mass[j] = term(x(i), w(i), p);
    w2[j] = w(i) * w(i);
  }
  std::vector<std::size_t> current;
  std::vector<std::size_t> best;
  double best_mass = -1.0;
  // Depth-first search visits supports in lexicographic order, so only a
  // strict improvement replaces the incumbent.
  std::function<void(std::size_t, double, double)> rec = [&](std::size_t start, double used, double captured) {
    if (captured > best_mass * (1.0 + 1e-13) + 1e-300 || best_mass < 0.0) {
      best_mass = captured;
      best = current;
    }
    for (std::size_t j = start; j < n; ++j) {
      if (used + w2[j] > s) continue;
      current.push_back(j);
      rec(j + 1, used + w2[j], captured + mass[j]);
      current.pop_back();
    }
  };
  rec(0, 0.0, 0.0);

  ApproxResult r;
  r.p = p;
  r.budget = s;
  r.flavor = ApproxFlavor::exact_best;
  r.support = best;
  r.error = tail_error(x, w, r.support, p);
  return r;
}

double stechkin_bound(const Eigen::VectorXd& x, const Eigen::VectorXd& w, double s, double p, double q) {
  if (!(p > 0.0 && p < q && q <= 2.0)) throw UsageError("stechkin bound requires 0 < p < q <= 2");
  check_pair(x, w);
  const double winf2 = w.size() == 0 ? 0.0 : w.maxCoeff() * w.maxCoeff();
  if (!(s > winf2))
    throw PreconditionError("stechkin bound requires s > ||w||_inf^2 = " + std::to_string(winf2));
  return std::pow(s - winf2, 1.0 / q - 1.0 / p) * weighted_norm(x, w, p);
}

std::pair<double, double> lp_norm_domination(const Eigen::VectorXd& x, const Eigen::VectorXd& w, double p) {
  if (!(p > 0.0 && p < 1.0)) throw UsageError("norm domination requires 0 < p < 1");
  check_pair(x, w);
  const double alpha = 2.0 / p - 1.0;
  const Eigen::VectorXd wa = w.array().pow(alpha).matrix();
  return {weighted_norm(x, wa, 1.0), weighted_norm(x, w, p)};
}

nlohmann::json to_json(const ApproxResult& r) {
  return {{"support", r.support},
          {"error", r.error},
          {"p", r.p},
          {"s", r.budget},
          {"flavor", r.flavor == ApproxFlavor::quasi_best ? "quasi_best" : "exact_best"}};
}

}  // namespace wl1
