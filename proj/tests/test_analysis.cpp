#include "doctest.h"

#include <cmath>

#include "wl1/analysis.hpp"
#include "wl1/bases.hpp"
#include "wl1/errors.hpp"
#include "wl1/solvers.hpp"
#include "wl1/wsparse.hpp"

using namespace wl1;

namespace {

Eigen::MatrixXd gaussian(Philox& rng, int m, int n) {
  Eigen::MatrixXd a(m, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < m; ++i) a(i, j) = rng.normal();
  return a;
}

// Dense reference: every subset of size <= k (unit weights), full eigen
// decomposition of each Gram block.
double classical_rip(const Eigen::MatrixXd& A, int k) {
  const int n = static_cast<int>(A.cols());
  double best = 0.0;
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    if (__builtin_popcount(mask) > k) continue;
    std::vector<Eigen::Index> cols;
    for (int j = 0; j < n; ++j)
      if (mask & (1u << j)) cols.push_back(j);
    Eigen::MatrixXd as(A.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < cols.size(); ++i) as.col(static_cast<Eigen::Index>(i)) = A.col(cols[i]);
    const Eigen::MatrixXd g = as.transpose() * as - Eigen::MatrixXd::Identity(as.cols(), as.cols());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
    best = std::max(best, es.eigenvalues().cwiseAbs().maxCoeff());
  }
  return best;
}

// Chebyshev sampled, normalized, N = 16 columns; exhaustive delta_6 is 0.30
// for seed 2 at m = 400.
Eigen::MatrixXd certified_chebyshev() {
  const OrthonormalSystem sys{Family::chebyshev, 1};
  const auto pts = draw_points(sys.measure(), 400, RandomStream{2, 0});
  return sampling_matrix(sys, build_index_set(TensorBox{1, 16}), pts, true);
}

}  // namespace

TEST_CASE("orthonormal columns have zero RIP constant") {
  Philox rng(RandomStream{61, 0});
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(gaussian(rng, 12, 8));
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(12, 8);
  Eigen::VectorXd w(8);
  for (int j = 0; j < 8; ++j) w(j) = 1.0 + 0.3 * j;
  for (double s : {1.0, 4.0, 20.0}) CHECK(wrip_constant(q, w, s, RipExhaustive{}).delta <= 1e-14);
}

TEST_CASE("all-ones row") {
  const Eigen::MatrixXd a = Eigen::MatrixXd::Ones(1, 2);
  const Eigen::VectorXd w = Eigen::VectorXd::Ones(2);
  CHECK(wrip_constant(a, w, 1.0, RipExhaustive{}).delta == doctest::Approx(0.0).epsilon(1e-15));
  const auto r = wrip_constant(a, w, 2.0, RipExhaustive{});
  CHECK(r.delta == doctest::Approx(1.0));
  CHECK(r.argmax_support == std::vector<std::size_t>{0, 1});
}

TEST_CASE("RIP constant is monotone in the budget") {
  Philox rng(RandomStream{62, 0});
  for (int t = 0; t < 20; ++t) {
    const Eigen::MatrixXd a = gaussian(rng, 8, 20) / std::sqrt(8.0);
    Eigen::VectorXd w(20);
    for (int j = 0; j < 20; ++j) w(j) = 1.0 + rng.uniform();
    double prev = 0.0;
    for (double s : {1.0, 2.0, 4.0, 6.0, 9.0}) {
      const double d = wrip_constant(a, w, s, RipExhaustive{}).delta;
      CHECK(d >= prev);
      prev = d;
    }
  }
}

TEST_CASE("unit weights reproduce the classical RIP constant") {
  Philox rng(RandomStream{63, 0});
  for (int t = 0; t < 10; ++t) {
    const Eigen::MatrixXd a = gaussian(rng, 6, 10) / std::sqrt(6.0);
    for (int k = 1; k <= 4; ++k)
      CHECK(wrip_constant(a, Eigen::VectorXd::Ones(10), k, RipExhaustive{}).delta ==
            doctest::Approx(classical_rip(a, k)).epsilon(1e-12));
  }
}

TEST_CASE("sampled mode is a lower bound") {
  Philox rng(RandomStream{64, 0});
  for (int t = 0; t < 5; ++t) {
    const Eigen::MatrixXd a = gaussian(rng, 8, 14) / std::sqrt(8.0);
    const Eigen::VectorXd w = Eigen::VectorXd::Constant(14, 1.2);
    const auto ex = wrip_constant(a, w, 5.0, RipExhaustive{});
    const auto sa = wrip_constant(a, w, 5.0, RipSampled{200, RandomStream{7, static_cast<std::uint64_t>(t)}});
    CHECK(ex.exhaustive);
    CHECK_FALSE(sa.exhaustive);
    CHECK(sa.delta <= ex.delta + 1e-15);
  }
}

TEST_CASE("exhaustive cap") {
  Philox rng(RandomStream{65, 0});
  const Eigen::MatrixXd a = gaussian(rng, 10, 40);
  CHECK_THROWS_AS(wrip_constant(a, Eigen::VectorXd::Ones(40), 10.0, RipExhaustive{1000}), BudgetExceeded);
}

TEST_CASE("support deviation") {
  Eigen::MatrixXd a(2, 3);
  a << 1, 0, 1, 0, 1, 1;
  CHECK(support_deviation(a, {0, 1}) == doctest::Approx(0.0));
  CHECK(support_deviation(a, {2}) == doctest::Approx(1.0));
}

TEST_CASE("RIP to NSP constants") {
  auto c = rip_to_nsp_constants(0.25);
  CHECK(c.rho == doctest::Approx(2.0 / 3.0));
  CHECK(c.tau == doctest::Approx(std::sqrt(1.25) / 0.75));
  CHECK(c.valid);
  c = rip_to_nsp_constants(0.0);
  CHECK(c.rho == 0.0);
  CHECK(c.tau == 1.0);
  CHECK(c.valid);
  CHECK_FALSE(rip_to_nsp_constants(1.0 / 3.0).valid);
  CHECK_THROWS(rip_to_nsp_constants(1.0));
  CHECK_THROWS(rip_to_nsp_constants(-0.1));
  double prev = -1.0;
  for (double d = 0.0; d < 0.99; d += 0.01) {
    const double r = rip_to_nsp_constants(d).rho;
    CHECK(r > prev);
    prev = r;
  }
}

TEST_CASE("NSP check: orthonormal columns and the zero vector") {
  Philox rng(RandomStream{66, 0});
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(gaussian(rng, 14, 10));
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(14, 10);
  const auto r = check_nsp_empirical(q, Eigen::VectorXd::Ones(10), 3.0, 0.0, 1.0, 200, RandomStream{1, 0},
                                     SupportMode::exhaustive);
  CHECK(r.violations.empty());
  CHECK(r.trials >= 200);

  // a matrix with a kernel and tau = 0, rho = 0 must be flagged
  const Eigen::MatrixXd wide = gaussian(rng, 3, 8);
  const auto bad = check_nsp_empirical(wide, Eigen::VectorXd::Ones(8), 2.0, 0.0, 0.0, 20, RandomStream{2, 0},
                                       SupportMode::quasi_best);
  CHECK_FALSE(bad.violations.empty());
  for (const auto& v : bad.violations) CHECK(v.lhs > v.rhs * (1 + 1e-12));
}

TEST_CASE("NSP holds where the RIP certificate applies") {
  const auto a = certified_chebyshev();
  const Eigen::VectorXd w = Eigen::VectorXd::Ones(16);
  const double s = 2.0;
  const auto rip = wrip_constant(a, w, 3 * s, RipExhaustive{});
  REQUIRE(rip.delta < 1.0 / 3.0);
  const auto c = rip_to_nsp_constants(rip.delta);
  const auto r = check_nsp_empirical(a, w, s, c.rho, c.tau, 1000, RandomStream{3, 0}, SupportMode::exhaustive);
  CHECK(r.violations.empty());
  CHECK(r.worst_ratio <= 1.0);
  const auto q = check_nsp_empirical(a, w, s, c.rho, c.tau, 300, RandomStream{4, 0}, SupportMode::quasi_best);
  CHECK(q.violations.empty());
}

TEST_CASE("disjoint-support inner products") {
  const auto a = certified_chebyshev();
  const double delta = wrip_constant(a, Eigen::VectorXd::Ones(16), 4.0, RipExhaustive{}).delta;
  Philox rng(RandomStream{67, 0});
  int violations = 0;
  for (int t = 0; t < 1000; ++t) {
    // random disjoint supports of sizes 1..2 and 1..2 (unit weights, s + t <= 4)
    std::vector<int> perm(16);
    for (int j = 0; j < 16; ++j) perm[j] = j;
    for (int j = 15; j > 0; --j) std::swap(perm[j], perm[rng.below(j + 1)]);
    const int ks = 1 + static_cast<int>(rng.below(2)), kt = 1 + static_cast<int>(rng.below(2));
    Eigen::VectorXd u = Eigen::VectorXd::Zero(16), v = Eigen::VectorXd::Zero(16);
    for (int i = 0; i < ks; ++i) u(perm[i]) = rng.normal();
    for (int i = 0; i < kt; ++i) v(perm[ks + i]) = rng.normal();
    const double lhs = std::abs((a * u).dot(a * v));
    if (lhs > delta * u.norm() * v.norm() * (1 + 1e-12)) ++violations;
  }
  CHECK(violations == 0);
}

TEST_CASE("error bound check") {
  const auto a = certified_chebyshev();
  const Eigen::VectorXd w = Eigen::VectorXd::Ones(16);
  const double s = 2.0;
  const auto c = rip_to_nsp_constants(wrip_constant(a, w, 3 * s, RipExhaustive{}).delta);
  Philox rng(RandomStream{68, 0});

  Eigen::VectorXd x(16);
  for (int j = 0; j < 16; ++j) x(j) = rng.normal();
  const auto same = error_bound_check(a, w, s, x, x, c.rho, c.tau);
  CHECK(same.l1_lhs == 0.0);
  CHECK(same.holds());
  CHECK(same.l2_applicable);

  // sparse x recovered by the solver: both sides vanish to solver accuracy
  Eigen::VectorXd xs = Eigen::VectorXd::Zero(16);
  xs(3) = 1.5;
  xs(11) = -0.7;
  const auto sol = solve_wl1(a, a * xs, w, Constraint::equality());
  REQUIRE(sol.status == SolverStatus::converged);
  const auto rec = error_bound_check(a, w, s, xs, sol.coefficients, c.rho, c.tau);
  CHECK(rec.holds(1e-9));
  CHECK(rec.l1_lhs <= 1e-8);

  int violations = 0;
  for (int t = 0; t < 1000; ++t) {
    Eigen::VectorXd xx(16), z(16);
    for (int j = 0; j < 16; ++j) {
      xx(j) = rng.normal() / (1 + j);
      z(j) = xx(j) + 0.1 * rng.normal();
    }
    if (!error_bound_check(a, w, s, xx, z, c.rho, c.tau).holds()) ++violations;
  }
  CHECK(violations == 0);

  // l2 bound not applicable when s < 2 ||w||_inf^2
  const auto na = error_bound_check(a, Eigen::VectorXd::Constant(16, 1.2), 2.0, x, x, c.rho, c.tau);
  CHECK_FALSE(na.l2_applicable);
}

TEST_CASE("report serialization") {
  const Eigen::MatrixXd a = Eigen::MatrixXd::Ones(1, 2);
  const auto j = to_json(wrip_constant(a, Eigen::VectorXd::Ones(2), 2.0, RipExhaustive{}));
  CHECK(j.at("delta").get<double>() == doctest::Approx(1.0));
  CHECK(j.contains("argmax_support"));
  CHECK(to_json(rip_to_nsp_constants(0.25)).at("valid") == true);
}
