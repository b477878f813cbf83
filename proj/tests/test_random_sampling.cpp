#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "wl1/errors.hpp"
#include "wl1/random.hpp"
#include "wl1/sampling.hpp"

using namespace wl1;
using std::numbers::pi;

TEST_CASE("philox known-answer vectors") {
  // Reference values from the Random123 distribution (kat_vectors).
  auto r = philox4x32_10({0, 0, 0, 0}, {0, 0});
  CHECK(r == std::array<std::uint32_t, 4>{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  r = philox4x32_10({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
  CHECK(r == std::array<std::uint32_t, 4>{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  r = philox4x32_10({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u});
  CHECK(r == std::array<std::uint32_t, 4>{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("streams are deterministic and distinct") {
  Philox a(RandomStream{5, 3}), b(RandomStream{5, 3}), c(RandomStream{5, 4}), d(RandomStream{6, 3});
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    seen.insert(x);
    seen.insert(c.next_u64());
    seen.insert(d.next_u64());
  }
  CHECK(seen.size() == 300);
  CHECK(RandomStream{5, 3}.child(1) == RandomStream{5, 3}.child(1));
  CHECK_FALSE(RandomStream{5, 3}.child(1) == RandomStream{5, 3}.child(2));
}

TEST_CASE("uniform and below ranges") {
  Philox rng(RandomStream{1, 0});
  double mean = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    mean += u;
    REQUIRE(rng.below(7) < 7);
  }
  CHECK(std::abs(mean / 100000 - 0.5) < 5 * std::sqrt(1.0 / 12 / 100000));
}

TEST_CASE("chebyshev moments") {
  const auto p = draw_points({MeasureKind::chebyshev_1d, 1}, 100000, RandomStream{2, 0});
  REQUIRE(p.cols() == 1);
  const double m1 = p.col(0).mean();
  const double m2 = p.col(0).array().square().mean();
  CHECK(std::abs(m1) <= 0.01);
  CHECK(m2 >= 0.49);
  CHECK(m2 <= 0.51);
  CHECK(p.col(0).cwiseAbs().maxCoeff() <= 1.0);
}

TEST_CASE("uniform interval second moment") {
  const auto p = draw_points({MeasureKind::uniform_interval, 1}, 100000, RandomStream{3, 0});
  const double m2 = p.col(0).array().square().mean();
  CHECK(m2 >= 0.323);
  CHECK(m2 <= 0.343);
}

TEST_CASE("fixed stream replay") {
  for (auto kind : {MeasureKind::uniform_interval, MeasureKind::chebyshev_tensor, MeasureKind::sphere_tan13,
                    MeasureKind::sphere_uniform, MeasureKind::sphere_flat, MeasureKind::uniform_box}) {
    const SamplingMeasure m{kind, 3};
    const auto a = draw_points(m, 50, RandomStream{9, 2});
    const auto b = draw_points(m, 50, RandomStream{9, 2});
    CHECK(a == b);
    CHECK(a.cols() == m.point_dim());
    CHECK_FALSE(a == draw_points(m, 50, RandomStream{9, 3}));
  }
}

TEST_CASE("pdf examples") {
  const double t0 = 0.0;
  CHECK(measure_pdf({MeasureKind::chebyshev_1d, 1}, std::span(&t0, 1)) == doctest::Approx(1.0 / pi));
  const double t1 = 0.3;
  CHECK(measure_pdf({MeasureKind::uniform_interval, 1}, std::span(&t1, 1)) == 0.5);
  const double z = 2.0 * pi *
                   boost::math::quadrature::tanh_sinh<double>().integrate(
                       [](double th) { return std::cbrt(std::abs(std::tan(th))); }, 0.0, pi / 2) *
                   2.0;
  CHECK(tan13_normalizer() == doctest::Approx(z).epsilon(1e-9));
  const double sp[2] = {1.234, pi / 4};
  CHECK(measure_pdf({MeasureKind::sphere_tan13, 2}, sp) == doctest::Approx(1.0 / z).epsilon(1e-9));
}

TEST_CASE("pdf singular endpoints and domain errors") {
  const double e = 1.0;
  CHECK(std::isinf(measure_pdf({MeasureKind::chebyshev_1d, 1}, std::span(&e, 1))));
  const double eq[2] = {0.0, pi / 2};
  CHECK(std::isinf(measure_pdf({MeasureKind::sphere_tan13, 2}, eq)));
  const double out = 1.5;
  CHECK_THROWS_AS(measure_pdf({MeasureKind::chebyshev_1d, 1}, std::span(&out, 1)), DomainError);
}

TEST_CASE("densities integrate to one") {
  boost::math::quadrature::tanh_sinh<double> ts;
  auto cheb = [](double t) {
    const double x[1] = {t};
    return measure_pdf({MeasureKind::chebyshev_1d, 1}, x);
  };
  CHECK(ts.integrate(cheb, -1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-8));
  for (auto kind : {MeasureKind::sphere_uniform, MeasureKind::sphere_flat, MeasureKind::sphere_tan13}) {
    auto g = [kind](double th) {
      const double x[2] = {0.5, th};
      return 2.0 * pi * measure_pdf({kind, 2}, x);
    };
    const double total = ts.integrate(g, 0.0, pi / 2) + ts.integrate(g, pi / 2, pi);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("chebyshev KS distance") {
  const std::size_t n = 100000;
  const auto p = draw_points({MeasureKind::chebyshev_1d, 1}, n, RandomStream{4, 0});
  std::vector<double> t(p.data(), p.data() + n);
  std::sort(t.begin(), t.end());
  double ks = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double f = 1.0 - std::acos(t[i]) / pi;
    ks = std::max({ks, std::abs(f - static_cast<double>(i) / n), std::abs(f - static_cast<double>(i + 1) / n)});
  }
  CHECK(ks <= 0.01);
  CHECK(chebyshev_cdf(0.0) == doctest::Approx(0.5));
}

TEST_CASE("sphere_tan13 theta histogram chi-square") {
  const std::size_t n = 1000000;
  const int bins = 50;
  const auto p = draw_points({MeasureKind::sphere_tan13, 2}, n, RandomStream{5, 0});
  std::vector<double> count(bins, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double th = p(static_cast<Eigen::Index>(i), 1);
    REQUIRE(th >= 0.0);
    REQUIRE(th < pi);
    REQUIRE(p(static_cast<Eigen::Index>(i), 0) >= 0.0);
    REQUIRE(p(static_cast<Eigen::Index>(i), 0) < 2 * pi);
    count[std::min(bins - 1, static_cast<int>(th / pi * bins))] += 1.0;
  }
  boost::math::quadrature::tanh_sinh<double> ts;
  auto dens = [](double th) { return std::cbrt(std::abs(std::tan(th))); };
  std::vector<double> mass(bins);
  double total = 0.0;
  for (int b = 0; b < bins; ++b) {
    mass[b] = ts.integrate(dens, pi * b / bins, pi * (b + 1) / bins);
    total += mass[b];
  }
  double chi2 = 0.0;
  for (int b = 0; b < bins; ++b) {
    const double e = n * mass[b] / total;
    chi2 += (count[b] - e) * (count[b] - e) / e;
  }
  const double pvalue = boost::math::gamma_q((bins - 1) / 2.0, chi2 / 2.0);
  CHECK(pvalue > 0.001);
}

TEST_CASE("tensor coordinates are uncorrelated") {
  for (auto kind : {MeasureKind::chebyshev_tensor, MeasureKind::uniform_box}) {
    const auto p = draw_points({kind, 3}, 100000, RandomStream{6, 0});
    REQUIRE(p.cols() == 3);
    for (int a = 0; a < 3; ++a)
      for (int b = a + 1; b < 3; ++b) {
        const Eigen::VectorXd x = p.col(a).array() - p.col(a).mean();
        const Eigen::VectorXd y = p.col(b).array() - p.col(b).mean();
        CHECK(std::abs(x.dot(y) / (x.norm() * y.norm())) <= 0.02);
      }
  }
}
