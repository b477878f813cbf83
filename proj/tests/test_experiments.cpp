#include "doctest.h"

#include <cmath>

#include "wl1/errors.hpp"
#include "wl1/experiments.hpp"
#include "wl1/results_io.hpp"
#include "wl1/wsparse.hpp"

using namespace wl1;

namespace {

MethodSpec method(MethodKind kind, WeightScheme w = WeightScheme::constant(), nlohmann::json spec = "constant") {
  MethodSpec m;
  m.kind = kind;
  m.weights = std::move(w);
  m.weights_spec = std::move(spec);
  return m;
}

// Single trig basis function at position `pos` over Range1d{n}.
ExperimentConfig single_mode(int n, int pos, int m) {
  ExperimentConfig c;
  c.system = OrthonormalSystem{Family::real_trigonometric, 1};
  c.universe = Range1d{n};
  c.m = m;
  c.trials = 3;
  c.seed = 17;
  c.target.kind = TargetKind::coefficients;
  c.target.values.assign(static_cast<std::size_t>(n), 0.0);
  c.target.values[static_cast<std::size_t>(pos - 1)] = 1.0;
  c.grid = 401;
  c.l2_nodes = 120;
  return c;
}

}  // namespace

TEST_CASE("runge target") {
  const OrthonormalSystem sys{Family::real_trigonometric, 1};
  const auto u = build_index_set(Range1d{10});
  const auto t = target_function(TargetSpec{}, sys, u);
  const double t0 = 0.0, t1 = 1.0;
  CHECK(t.f(std::span(&t0, 1)) == 1.0);
  CHECK(t.f(std::span(&t1, 1)) == doctest::Approx(1.0 / 26.0));
  CHECK_FALSE(t.coefficients.has_value());
}

TEST_CASE("coefficient target equals the basis function") {
  const OrthonormalSystem sys{Family::legendre, 1};
  const auto u = build_index_set(Range1d{8});
  TargetSpec spec;
  spec.kind = TargetKind::coefficients;
  spec.values = {0, 0, 1, 0, 0, 0, 0, 0};
  const auto t = target_function(spec, sys, u);
  REQUIRE(t.coefficients.has_value());
  for (int i = 0; i <= 100; ++i) {
    const double x = -1.0 + i / 50.0;
    CHECK(std::abs(t.f(std::span(&x, 1)) - evaluate(sys, u[2], std::span(&x, 1), u.base())) <= 1e-12);
  }
  spec.values.resize(3);
  CHECK_THROWS(target_function(spec, sys, u));
}

TEST_CASE("tail eta") {
  const auto u = build_index_set(Range1d{2000});
  const auto w = WeightScheme::sqrt();
  const double s = 40.0;
  const auto l0 = truncation_set(u, w, s, HalfBudget{});
  CHECK(l0.size() == 20);
  Eigen::VectorXd x(2000);
  for (int j = 1; j <= 2000; ++j) x(j - 1) = std::pow(j, -3.0);
  double oracle = 0.0;
  for (int j = 21; j <= 2000; ++j) oracle += std::pow(j, -2.5);
  const auto te = tail_eta(x, u, l0, w, 80, s);
  CHECK(te.eta == doctest::Approx(oracle).epsilon(1e-12));
  CHECK(te.radius == doctest::Approx(std::sqrt(80.0 / 40.0) * oracle).epsilon(1e-12));
  CHECK(tail_eta(x, u, l0, w, 160, s).radius == doctest::Approx(std::sqrt(2.0) * te.radius).epsilon(1e-12));

  Eigen::VectorXd inside = Eigen::VectorXd::Zero(2000);
  inside(4) = 3.0;
  const auto z = tail_eta(inside, u, l0, w, 80, s);
  CHECK(z.eta == 0.0);
  CHECK(z.radius == 0.0);
}

TEST_CASE("single basis function is recovered by weighted l1") {
  auto c = single_mode(50, 5, 20);
  c.methods = {method(MethodKind::wl1, WeightScheme::linear(), "linear")};
  const InterpolationRunner runner(c);
  for (int t = 0; t < c.trials; ++t) {
    const auto r = runner.run_trial(t);
    REQUIRE(r.size() == 1);
    CHECK(r[0].status == "converged");
    CHECK(r[0].error_linf <= 1e-6);
    CHECK(r[0].extra.at("certificate_ok") == true);
  }
}

TEST_CASE("exact inversion with m = N interpolates the samples") {
  auto c = single_mode(12, 4, 12);
  c.target.kind = TargetKind::runge;
  c.methods = {method(MethodKind::exact_inversion)};
  const InterpolationRunner runner(c);
  const OrthonormalSystem sys = c.system;
  for (int t = 0; t < c.trials; ++t) {
    const auto r = runner.run_trial(t);
    const auto pts = draw_points(c.sampling_measure(), 12, RandomStream{c.seed, static_cast<std::uint64_t>(t)});
    const auto a = sampling_matrix(sys, runner.universe(), pts, false);
    Eigen::VectorXd y(12);
    for (int i = 0; i < 12; ++i) y(i) = 1.0 / (1.0 + 25.0 * pts(i, 0) * pts(i, 0));
    CHECK((a * r[0].coefficients - y).norm() <= 1e-8 * (1 + y.norm()));
  }
}

TEST_CASE("least squares reproduces a target in its span") {
  auto c = single_mode(40, 7, 30);
  auto ls = method(MethodKind::least_squares);
  ls.d = 15;
  c.methods = {ls};
  const auto r = InterpolationRunner(c).run_trial(0);
  CHECK(r[0].error_l2 <= 1e-8);
  CHECK(r[0].error_linf <= 1e-8);
}

TEST_CASE("errors are recomputable from the coefficients") {
  auto c = preset_config("runge-legendre");
  c.trials = 2;
  c.seed = 3;
  c.grid = 301;
  const InterpolationRunner runner(c);
  const auto res = runner.run_trial(1);
  const auto curves = runner.curves(res);
  REQUIRE(curves.cols() == 2 + static_cast<Eigen::Index>(res.size()));
  for (std::size_t k = 0; k < res.size(); ++k) {
    if (res[k].status.rfind("failed", 0) == 0) continue;
    const double linf = (curves.col(static_cast<Eigen::Index>(2 + k)) - curves.col(1)).cwiseAbs().maxCoeff();
    CHECK(std::abs(linf - res[k].error_linf) <= 1e-12 * std::max(1.0, linf));
    CHECK(res[k].error_linf >= 0.0);
    CHECK(res[k].error_l2 >= 0.0);
  }
}

TEST_CASE("runge presets") {
  for (const char* name : {"runge-trig", "runge-legendre"}) {
    const auto c = preset_config(name);
    CHECK(c.m == 30);
    CHECK(c.trials == 100);
    CHECK(std::get<Range1d>(c.universe).n == 100);
    REQUIRE(c.methods.size() == 6);
    CHECK(c.methods[0].kind == MethodKind::least_squares);
    CHECK(c.methods[0].d == 15);
    CHECK(c.methods[1].kind == MethodKind::wl2);
    CHECK(c.methods[2].kind == MethodKind::exact_inversion);
    CHECK(c.methods[3].kind == MethodKind::unweighted_l1);
    CHECK(c.methods[4].label() == "wl1(sqrt)");
    CHECK(c.methods[5].label() == "wl1(linear)");
  }
  CHECK(preset_config("runge-trig").sampling_measure().kind == MeasureKind::uniform_interval);
  CHECK(preset_config("runge-legendre").sampling_measure().kind == MeasureKind::chebyshev_1d);
  CHECK_THROWS(preset_config("nope"));
}

TEST_CASE("sup-norm domination of the grid error") {
  ExperimentConfig c;
  c.system = OrthonormalSystem{Family::legendre, 1};
  c.universe = Range1d{40};
  c.measure = SamplingMeasure{MeasureKind::chebyshev_1d, 1};
  c.m = 25;
  c.trials = 4;
  c.seed = 5;
  c.target.kind = TargetKind::power_decay;
  c.target.exponent = 2.0;
  c.grid = 501;
  c.methods = {method(MethodKind::wl1, WeightScheme::legendre_dominating(), "legendre_dominating")};
  const InterpolationRunner runner(c);
  for (int t = 0; t < c.trials; ++t) {
    const auto r = runner.run_trial(t);
    CHECK(r[0].status == "converged");
    CHECK(r[0].extra.at("linf_le_weighted_l1") == true);
  }
}

TEST_CASE("theorem12 records a finite ratio and direct tail agrees") {
  auto c = preset_config("theorem12-trig");
  c.trials = 2;
  c.seed = 9;
  c.grid = 501;
  const InterpolationRunner runner(c);
  const auto r = runner.run_trial(0);
  REQUIRE(r.size() == 1);
  const auto& e = r[0].extra;
  CHECK(r[0].status == "converged");
  CHECK(e.at("linf_le_weighted_l1") == true);
  CHECK(std::isfinite(e.at("ratio_to_quasi_sigma_s").get<double>()));
  // quasi sigma_s recomputed by direct tail summation: x_j / w_j = j^(-3.5)
  // is decreasing, so the greedy support is {1..k} with sum j <= s.
  double used = 0.0, tail = 0.0;
  int j = 1;
  while (used + j <= 40.0) used += j++;
  for (; j <= 2000; ++j) tail += std::pow(j, -2.5);
  CHECK(e.at("quasi_sigma_s").get<double>() == doctest::Approx(tail).epsilon(1e-10));
}

TEST_CASE("parallel trials are bit-identical to sequential") {
  auto c = preset_config("runge-trig");
  c.trials = 6;
  c.seed = 4;
  c.grid = 301;
  const auto a = run_experiment(c, 1);
  const auto b = run_experiment(c, 3);
  CHECK(trials_csv(a) == trials_csv(b));
  CHECK(summarize(a).dump() == summarize(b).dump());
}

TEST_CASE("median and quantile") {
  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
  CHECK(std::isnan(median({})));
  CHECK(median({NAN, 1.0, 5.0}) == 3.0);
  CHECK(quantile({0.0, 10.0}, 0.1) == doctest::Approx(1.0));
}

TEST_CASE("planted support respects the budget") {
  const auto u = build_index_set(Range1d{101});
  const Eigen::VectorXd w = weight_vector(WeightScheme::sqrt(), u);
  Philox rng(RandomStream{8, 0});
  for (int t = 0; t < 100; ++t) {
    const auto s = planted_support(w, 8.0, rng);
    CHECK(weighted_cardinality(s, w) <= 8.0);
    CHECK_FALSE(s.empty());
  }
}

TEST_CASE("phase diagram extremes") {
  PhaseConfig c;
  c.universe = Range1d{12};
  c.s_values = {4.0};
  c.m_values = {1, 12};
  c.trials = 10;
  c.seed = 2;
  const auto cells = run_phase_diagram(c, 1);
  REQUIRE(cells.size() == 2);
  CHECK(cells[0].m == 1);
  CHECK(cells[0].probability() <= 0.2);
  CHECK(cells[1].probability() == 1.0);
  CHECK(phase_monotonicity_sigma(cells) <= 0.0);
}

TEST_CASE("phase monotonicity statistic") {
  std::vector<PhaseCell> cells{{8, 10, 40, 50}, {8, 20, 10, 50}};
  CHECK(phase_monotonicity_sigma(cells) > 3.0);
  cells[1].successes = 45;
  CHECK(phase_monotonicity_sigma(cells) <= 0.0);
}

TEST_CASE("spherical demo recovers a planted target") {
  SphericalDemoConfig c;
  c.trials = 2;
  c.seed = 3;
  CHECK(c.l_max() == 8);
  CHECK_FALSE(c.l_max_overridden());
  const auto r = run_spherical_demo(c, 1);
  REQUIRE(r.size() == 2);
  for (const auto& t : r) {
    CHECK(t.status == "converged");
    CHECK(t.extra.at("relative_l2_coefficient_error").get<double>() <= 1e-4);
    CHECK(t.extra.at("theta_histogram_pvalue").get<double>() > 0.0);
  }
  c.zero_target = true;
  const auto z = run_spherical_demo(c, 1);
  for (const auto& t : z) CHECK(t.coefficients.isZero());

  SphericalDemoConfig big;
  big.s = 4.0;
  CHECK(big.l_max() == 30);
  CHECK(big.l_max_overridden());
}

TEST_CASE("oracle check harness") {
  OracleCheckConfig c;
  c.instances = 30;
  c.seed = 1;
  const auto r = run_oracle_check(c);
  CHECK(r.instances == 30);
  CHECK(r.passed());
  CHECK(r.rows.size() == 30);
}

TEST_CASE("summary structure") {
  auto c = single_mode(20, 3, 10);
  c.methods = {method(MethodKind::wl1, WeightScheme::sqrt(), "sqrt"), method(MethodKind::unweighted_l1)};
  const auto res = run_experiment(c, 1);
  const auto s = summarize(res);
  CHECK(s.at("trials") == 3);
  REQUIRE(s.at("methods").size() == 2);
  CHECK(s.at("methods")[0].at("method") == "wl1(sqrt)");
  CHECK(s.at("methods")[0].at("count") == 3);
  CHECK(s.at("methods")[0].contains("error_linf"));
  const auto empty = summarize({});
  CHECK(empty.at("trials") == 0);
  CHECK(empty.at("methods").empty());
}

TEST_CASE("parallel_for propagates exceptions") {
  CHECK_THROWS(parallel_for(8, 3, [](int i) {
    if (i == 5) throw std::runtime_error("boom");
  }));
  std::vector<int> hit(20, 0);
  parallel_for(20, 4, [&](int i) { hit[static_cast<std::size_t>(i)] = 1; });
  for (int h : hit) CHECK(h == 1);
}
