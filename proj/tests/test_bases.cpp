#include "doctest.h"

#include <cmath>
#include <numbers>

#include "wl1/bases.hpp"
#include "wl1/errors.hpp"
#include "wl1/quadrature.hpp"

using namespace wl1;
using std::numbers::pi;

namespace {

double eval1(Family f, int k, double t, IndexBase base = IndexBase::degree) {
  return evaluate(OrthonormalSystem{f, 1}, {k}, std::span(&t, 1), base);
}

// Independent closed forms / library special functions.
double cheb_ref(int k, double t) { return k == 0 ? 1.0 : std::sqrt(2.0) * std::cos(k * std::acos(t)); }
double leg_ref(int k, double t) { return std::sqrt(2.0 * k + 1.0) * std::legendre(k, t); }
double trig_ref(int j, double t) {
  if (j == 1) return 1.0;
  const int k = j / 2;
  return j % 2 == 0 ? std::sqrt(2.0) * std::cos(k * pi * t) : std::sqrt(2.0) * std::sin(k * pi * t);
}
// Real harmonic normalized against the surface measure divided by 4 pi.
double sph_ref_abs(int l, int k, double phi, double theta) {
  const double y = std::sqrt(4.0 * pi) * std::sph_legendre(l, std::abs(k), theta);
  if (k == 0) return std::abs(y);
  return std::abs(std::sqrt(2.0) * y * (k > 0 ? std::cos(k * phi) : std::sin(-k * phi)));
}

}  // namespace

TEST_CASE("evaluation examples") {
  CHECK(eval1(Family::chebyshev, 1, 0.5) == doctest::Approx(std::sqrt(2.0) / 2).epsilon(1e-14));
  // Oracle: int_{-1}^{1} t^2 dt/2 = 1/3, so the unit-norm degree-1 Legendre is sqrt(3) t.
  const QuadratureRule gl = gauss_legendre(4);
  double m2 = 0.0;
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) m2 += gl.weights[i] * gl.nodes[i] * gl.nodes[i];
  CHECK(eval1(Family::legendre, 1, 1.0) == doctest::Approx(1.0 / std::sqrt(m2)).epsilon(1e-13));
  CHECK(eval1(Family::chebyshev, 3, 1.0) == doctest::Approx(std::sqrt(2.0)));
  CHECK(eval1(Family::chebyshev, 3, -1.0) == doctest::Approx(-std::sqrt(2.0)));
  CHECK(eval1(Family::legendre_preconditioned, 5, 1.0) == 0.0);
}

TEST_CASE("preconditioned Legendre grid max stays below sqrt(3)") {
  const int n = 100000;
  for (int j = 1; j <= 30; ++j) {
    double mx = 0.0;
    for (int i = 0; i <= n; ++i) mx = std::max(mx, std::abs(eval1(Family::legendre_preconditioned, j, -1.0 + 2.0 * i / n)));
    CHECK(mx <= std::sqrt(3.0));
  }
}

TEST_CASE("recurrences agree with closed forms up to degree 50") {
  for (int i = 0; i <= 1000; ++i) {
    const double t = -1.0 + 2.0 * i / 1000;
    for (int k = 0; k <= 50; ++k) {
      const double c = cheb_ref(k, t), l = leg_ref(k, t);
      CHECK(std::abs(eval1(Family::chebyshev, k, t) - c) <= 1e-12 * std::max(1.0, std::abs(c)));
      CHECK(std::abs(eval1(Family::legendre, k, t) - l) <= 1e-12 * std::max(1.0, std::abs(l)));
      const double v = std::sqrt(pi / 2) * std::pow(1.0 - t * t, 0.25);
      CHECK(std::abs(eval1(Family::legendre_preconditioned, k, t) - v * l) <= 1e-12 * std::max(1.0, std::abs(l)));
    }
    for (int j = 1; j <= 101; ++j)
      CHECK(std::abs(eval1(Family::real_trigonometric, j, t, IndexBase::position) - trig_ref(j, t)) <= 1e-12);
  }
}

TEST_CASE("real spherical harmonics agree with the library up to degree 50") {
  const OrthonormalSystem sys{Family::spherical_harmonics_real, 1};
  const auto band = build_index_set(SphericalBand{50});
  std::vector<double> row(band.size());
  for (int i = 0; i < 40; ++i) {
    const double pt[2] = {0.37 + 0.15 * i, pi * (i + 0.5) / 40};
    evaluate_row(sys, band, pt, row);
    for (std::size_t c = 0; c < band.size(); ++c) {
      const int l = band[c][0], k = band[c][1];
      const double ref = sph_ref_abs(l, k, pt[0], pt[1]);
      CHECK(std::abs(std::abs(row[c]) - ref) <= 1e-12 * std::max(1.0, ref));
      CHECK(row[c] == evaluate(sys, band[c], pt, IndexBase::spherical));
    }
  }
}

TEST_CASE("sup-norm bounds dominate grid maxima up to degree 50") {
  const int n = 100000;
  for (auto f : {Family::chebyshev, Family::legendre, Family::legendre_preconditioned}) {
    const OrthonormalSystem sys{f, 1};
    const auto set = build_index_set(TensorBox{1, 51});
    std::vector<double> mx(set.size(), 0.0), row(set.size());
    for (int i = 0; i <= n; ++i) {
      const double t = -1.0 + 2.0 * i / n;
      evaluate_row(sys, set, std::span(&t, 1), row);
      for (std::size_t c = 0; c < row.size(); ++c) mx[c] = std::max(mx[c], std::abs(row[c]));
    }
    for (std::size_t c = 0; c < row.size(); ++c) CHECK(mx[c] <= sup_norm_bound(sys, set[c]) * (1 + 1e-12));
  }
  {
    const OrthonormalSystem sys{Family::real_trigonometric, 1};
    const auto set = build_index_set(Range1d{101});
    for (std::size_t c = 0; c < set.size(); ++c) {
      double mx = 0.0;
      for (int i = 0; i <= 2000; ++i) mx = std::max(mx, std::abs(eval1(sys.family, set[c][0], -1.0 + i / 1000.0, IndexBase::position)));
      CHECK(mx <= sup_norm_bound(sys, set[c], IndexBase::position) * (1 + 1e-12));
    }
  }
  // Sphere: |psi| is maximal over phi at phi = 0 for cosine members, and the
  // sine member of the same (l, |k|) has the same maximum.
  for (auto f : {Family::spherical_harmonics_real, Family::spherical_preconditioned}) {
    const OrthonormalSystem sys{f, 1};
    const auto band = build_index_set(SphericalBand{50});
    std::vector<double> mx(band.size(), 0.0), row(band.size());
    for (int i = 0; i < n; ++i) {
      const double pt[2] = {0.0, pi * (i + 0.5) / n};
      evaluate_row(sys, band, pt, row);
      for (std::size_t c = 0; c < row.size(); ++c) mx[c] = std::max(mx[c], std::abs(row[c]));
    }
    for (std::size_t c = 0; c < row.size(); ++c)
      if (band[c][1] >= 0) CHECK(mx[c] <= sup_norm_bound(sys, band[c]) * (1 + 1e-12));
  }
}

TEST_CASE("analytic sup-norm examples") {
  const auto cheb3 = OrthonormalSystem::tensor(Family::chebyshev, 3);
  CHECK(sup_norm_bound(cheb3, {3, 0, 2}) == doctest::Approx(2.0));
  CHECK(sup_norm_bound(OrthonormalSystem{Family::legendre, 1}, {4}) == doctest::Approx(3.0));
  CHECK(sup_norm_bound(OrthonormalSystem{Family::real_trigonometric, 1}, {1}, IndexBase::position) == 1.0);
  // L_4(1) = 3 is attained
  CHECK(eval1(Family::legendre, 4, 1.0) == doctest::Approx(3.0));
}

TEST_CASE("dominating weights bound sup norms") {
  for (auto f : {Family::chebyshev, Family::legendre, Family::legendre_preconditioned}) {
    const auto sys = OrthonormalSystem::tensor(f, 2);
    const auto set = build_index_set(HyperbolicCross{2, 30});
    const auto w = dominating_weights(sys);
    for (const auto& k : set.members()) CHECK(weight_of(w, k) >= sup_norm_bound(sys, k) * (1 - 1e-12));
  }
  const OrthonormalSystem sph{Family::spherical_preconditioned, 1};
  const auto band = build_index_set(SphericalBand{20});
  for (const auto& k : band.members())
    CHECK(weight_of(dominating_weights(sph), k, IndexBase::spherical) >= sup_norm_bound(sph, k));
}

TEST_CASE("tensor evaluation is the product of 1-D evaluations") {
  for (auto f : {Family::chebyshev, Family::legendre, Family::legendre_preconditioned})
    for (int d = 1; d <= 3; ++d) {
      const auto sys = OrthonormalSystem::tensor(f, d);
      const auto set = build_index_set(HyperbolicCross{d, 12});
      for (int i = 0; i < 20; ++i) {
        std::vector<double> t(d);
        for (int a = 0; a < d; ++a) t[a] = std::sin(1.3 * i + 0.7 * a);
        for (const auto& k : set.members()) {
          double prod = 1.0;
          for (int a = 0; a < d; ++a) prod *= eval1(f, k[a], t[a]);
          CHECK(evaluate(sys, k, t) == doctest::Approx(prod).epsilon(1e-13));
        }
      }
    }
}

TEST_CASE("odd symmetry flag matches evaluation") {
  for (auto f : {Family::chebyshev, Family::legendre, Family::legendre_preconditioned}) {
    const OrthonormalSystem sys{f, 1};
    for (int k = 0; k < 12; ++k) {
      const double a = eval1(f, k, 0.3), b = eval1(f, k, -0.3);
      CHECK(is_odd(sys, {k}, IndexBase::degree) == (std::abs(a + b) < 1e-12 && std::abs(a) > 1e-12));
    }
  }
  const OrthonormalSystem trig{Family::real_trigonometric, 1};
  for (int j = 1; j < 12; ++j)
    CHECK(is_odd(trig, {j}, IndexBase::position) == (j > 1 && j % 2 == 1));
}

TEST_CASE("domain errors") {
  const double bad = 1.01;
  CHECK_THROWS_AS(evaluate(OrthonormalSystem{Family::chebyshev, 1}, {2}, std::span(&bad, 1)), DomainError);
  const double sb[2] = {0.1, 3.5};
  CHECK_THROWS_AS(evaluate(OrthonormalSystem{Family::spherical_harmonics_real, 1}, {2, 1}, sb, IndexBase::spherical),
                  DomainError);
  Eigen::MatrixXd pts(2, 1);
  pts << 0.2, 1.5;
  CHECK_THROWS_AS(sampling_matrix(OrthonormalSystem{Family::legendre, 1}, build_index_set(TensorBox{1, 3}), pts, false),
                  DomainError);
}

TEST_CASE("sampling matrix basics") {
  Eigen::MatrixXd pts(4, 1);
  pts << -0.9, -0.1, 0.4, 0.77;
  const auto set = build_index_set(Range1d{7});
  const OrthonormalSystem trig{Family::real_trigonometric, 1};
  const auto a = sampling_matrix(trig, set, pts, false);
  CHECK(a.col(0) == Eigen::VectorXd::Ones(4));
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 7; ++c) {
      const double t = pts(r, 0);
      CHECK(a(r, c) == evaluate(trig, set[c], std::span(&t, 1), IndexBase::position));
    }
  const auto an = sampling_matrix(trig, set, pts, true);
  CHECK((an * 2.0 - a).cwiseAbs().maxCoeff() < 1e-15);

  Eigen::MatrixXd one(1, 1);
  one << 0.3;
  CHECK(sampling_matrix(OrthonormalSystem{Family::chebyshev, 1}, build_index_set(TensorBox{1, 1}), one, false) ==
        Eigen::MatrixXd::Ones(1, 1));
}

TEST_CASE("empirical Gram of Chebyshev samples approaches identity") {
  const OrthonormalSystem sys{Family::chebyshev, 1};
  const auto pts = draw_points(sys.measure(), 20000, RandomStream{21, 0});
  const auto a = sampling_matrix(sys, build_index_set(TensorBox{1, 10}), pts, true);
  const Eigen::MatrixXd g = a.transpose() * a - Eigen::MatrixXd::Identity(10, 10);
  CHECK(g.cwiseAbs().maxCoeff() <= 0.05);
}

TEST_CASE("gram_check under Gauss quadrature") {
  const auto deg30 = build_index_set(TensorBox{1, 31});
  for (auto f : {Family::chebyshev, Family::legendre, Family::legendre_preconditioned})
    CHECK(gram_check(OrthonormalSystem{f, 1}, deg30, GaussQuadrature{64}) <= 1e-10);
  CHECK(gram_check(OrthonormalSystem{Family::real_trigonometric, 1}, build_index_set(Range1d{61}), GaussQuadrature{64}) <=
        1e-10);
  CHECK(gram_check(OrthonormalSystem::tensor(Family::legendre, 2), build_index_set(HyperbolicCross{2, 10}),
                   GaussQuadrature{16}) <= 1e-10);
  CHECK(gram_check(OrthonormalSystem{Family::spherical_harmonics_real, 1}, build_index_set(SphericalBand{10}),
                   GaussQuadrature{16}) <= 1e-10);
}

TEST_CASE("chebyshev normalization: constant has unit norm") {
  const auto g = gram_matrix(OrthonormalSystem{Family::chebyshev, 1}, build_index_set(TensorBox{1, 3}), GaussQuadrature{8});
  CHECK(g(0, 0) == doctest::Approx(1.0));
  CHECK(g(1, 1) == doctest::Approx(1.0));
}

TEST_CASE("spherical preconditioned Gram under Monte Carlo") {
  const double dev = gram_check(OrthonormalSystem{Family::spherical_preconditioned, 1}, build_index_set(SphericalBand{8}),
                                MonteCarloQuadrature{1000000, 31});
  CHECK(dev <= 0.02);
}
