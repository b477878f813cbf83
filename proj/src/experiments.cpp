#include "wl1/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "wl1/errors.hpp"
#include "wl1/quadrature.hpp"
#include "wl1/wsparse.hpp"

namespace wl1 {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}
}  // namespace

void parallel_for(int n, int threads, const std::function<void(int)>& f) {
  if (n <= 0) return;
  const int workers = std::max(1, std::min(threads, n));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) {
        try {
          f(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::string to_string(MethodKind kind) {
  switch (kind) {
    case MethodKind::wl1: return "wl1";
    case MethodKind::unweighted_l1: return "unweighted_l1";
    case MethodKind::wl2: return "wl2";
    case MethodKind::least_squares: return "least_squares";
    case MethodKind::exact_inversion: return "exact_inversion";
    case MethodKind::theorem12: return "theorem12";
  }
  return "?";
}

std::string MethodSpec::label() const {
  switch (kind) {
    case MethodKind::wl1:
    case MethodKind::wl2:
      return to_string(kind) + "(" + weights.describe() + ")";
    case MethodKind::least_squares:
      return "least_squares(" + std::to_string(d) + ")";
    case MethodKind::theorem12:
      return "theorem12(" + weights.describe() + ";s=" + format_number(s) + ")";
    default:
      return to_string(kind);
  }
}

Target target_function(const TargetSpec& spec, const OrthonormalSystem& system, const IndexSet& universe) {
  Target t;
  switch (spec.kind) {
    case TargetKind::runge:
      if (system.point_dim() != 1) throw UsageError("the Runge target is defined on [-1, 1]");
      t.f = [](std::span<const double> p) { return 1.0 / (1.0 + 25.0 * p[0] * p[0]); };
      return t;
    case TargetKind::zero:
      t.f = [](std::span<const double>) { return 0.0; };
      t.coefficients = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(universe.size()));
      return t;
    case TargetKind::coefficients: {
      if (spec.values.size() != universe.size())
        throw UsageError("target has " + std::to_string(spec.values.size()) + " coefficients for a universe of " +
                         std::to_string(universe.size()));
      t.coefficients = Eigen::Map<const Eigen::VectorXd>(spec.values.data(), static_cast<Eigen::Index>(spec.values.size()));
      break;
    }
    case TargetKind::power_decay: {
      Eigen::VectorXd c(static_cast<Eigen::Index>(universe.size()));
      for (std::size_t j = 0; j < universe.size(); ++j) {
        // Position in canonical order, 1-based.
        c(static_cast<Eigen::Index>(j)) = std::pow(static_cast<double>(j + 1), -spec.exponent);
      }
      t.coefficients = c;
      break;
    }
  }
  auto coef = std::make_shared<const Eigen::VectorXd>(*t.coefficients);
  t.f = [system, universe, coef](std::span<const double> p) {
    std::vector<double> row(universe.size());
    evaluate_row(system, universe, p, row);
    return Eigen::Map<const Eigen::VectorXd>(row.data(), static_cast<Eigen::Index>(row.size())).dot(*coef);
  };
  return t;
}

TailEta tail_eta(const Eigen::VectorXd& x, const IndexSet& universe, const IndexSet& lambda0, const WeightScheme& w,
                 std::size_t m, double s) {
  if (static_cast<std::size_t>(x.size()) != universe.size()) throw UsageError("coefficients do not match universe");
  if (!(s > 0.0)) throw UsageError("tail radius needs s > 0");
  TailEta t;
  for (std::size_t j = 0; j < universe.size(); ++j) {
    if (lambda0.contains(universe[j])) continue;
    t.eta += weight_of(w, universe[j], universe.base()) * std::abs(x(static_cast<Eigen::Index>(j)));
  }
  t.radius = std::sqrt(static_cast<double>(m) / s) * t.eta;
  return t;
}

ExperimentConfig preset_config(const std::string& name) {
  ExperimentConfig c;
  c.preset = name;
  if (name == "runge-trig" || name == "runge-legendre") {
    if (name == "runge-trig") {
      c.system = OrthonormalSystem{Family::real_trigonometric, 1};
      c.measure = SamplingMeasure{MeasureKind::uniform_interval, 1};
    } else {
      c.system = OrthonormalSystem{Family::legendre, 1};
      c.measure = SamplingMeasure{MeasureKind::chebyshev_1d, 1};
    }
    c.universe = Range1d{100};
    c.m = 30;
    c.trials = 100;
    c.target.kind = TargetKind::runge;
    MethodSpec ls;
    ls.kind = MethodKind::least_squares;
    ls.d = 15;
    MethodSpec wl2;
    wl2.kind = MethodKind::wl2;
    wl2.weights = WeightScheme::linear();
    wl2.weights_spec = "linear";
    MethodSpec exact;
    exact.kind = MethodKind::exact_inversion;
    MethodSpec l1;
    l1.kind = MethodKind::unweighted_l1;
    MethodSpec wsqrt;
    wsqrt.kind = MethodKind::wl1;
    wsqrt.weights = WeightScheme::sqrt();
    wsqrt.weights_spec = "sqrt";
    MethodSpec wlin = wsqrt;
    wlin.weights = WeightScheme::linear();
    wlin.weights_spec = "linear";
    c.methods = {ls, wl2, exact, l1, wsqrt, wlin};
    return c;
  }
  if (name == "theorem12-trig") {
    c.system = OrthonormalSystem{Family::real_trigonometric, 1};
    c.measure = SamplingMeasure{MeasureKind::uniform_interval, 1};
    c.universe = Range1d{2000};
    c.m = 80;
    c.trials = 20;
    c.target.kind = TargetKind::power_decay;
    c.target.exponent = 3.0;
    MethodSpec t;
    t.kind = MethodKind::theorem12;
    t.s = 40.0;
    t.weights = WeightScheme::sqrt();
    t.weights_spec = "sqrt";
    c.methods = {t};
    return c;
  }
  throw UsageError("unknown preset '" + name + "'");
}

// ---------------------------------------------------------------------------

namespace {

// Tensor grid with about `total` points, `per_axis`^d.
Eigen::MatrixXd uniform_grid(int dim, int total) {
  const int per_axis = dim == 1 ? total : std::max(2, static_cast<int>(std::ceil(std::pow(total, 1.0 / dim))));
  const auto count = static_cast<Eigen::Index>(std::pow(per_axis, dim));
  Eigen::MatrixXd pts(count, dim);
  std::vector<int> idx(dim, 0);
  for (Eigen::Index r = 0; r < count; ++r) {
    for (int a = 0; a < dim; ++a) pts(r, a) = per_axis == 1 ? 0.0 : -1.0 + 2.0 * idx[a] / (per_axis - 1);
    for (int a = 0; a < dim && ++idx[a] == per_axis; ++a) idx[a] = 0;
  }
  return pts;
}

void l2_rule(const SamplingMeasure& nu, int dim, int nodes, Eigen::MatrixXd& pts, Eigen::VectorXd& w) {
  const bool cheb = nu.kind == MeasureKind::chebyshev_1d || nu.kind == MeasureKind::chebyshev_tensor;
  if (!cheb && nu.kind != MeasureKind::uniform_interval && nu.kind != MeasureKind::uniform_box)
    throw UsageError("L2 rule needs an interval measure");
  const QuadratureRule rule = cheb ? gauss_chebyshev(nodes) : gauss_legendre(nodes);
  const auto count = static_cast<Eigen::Index>(std::pow(nodes, dim));
  pts.resize(count, dim);
  w.resize(count);
  std::vector<int> idx(dim, 0);
  for (Eigen::Index r = 0; r < count; ++r) {
    double wr = 1.0;
    for (int a = 0; a < dim; ++a) {
      pts(r, a) = rule.nodes[idx[a]];
      wr *= rule.weights[idx[a]];
    }
    w(r) = wr;
    for (int a = 0; a < dim && ++idx[a] == nodes; ++a) idx[a] = 0;
  }
}

Eigen::VectorXd eval_target(const Target& t, const Eigen::MatrixXd& pts) {
  Eigen::VectorXd v(pts.rows());
  std::vector<double> p(pts.cols());
  for (Eigen::Index i = 0; i < pts.rows(); ++i) {
    for (Eigen::Index a = 0; a < pts.cols(); ++a) p[a] = pts(i, a);
    v(i) = t.f(p);
  }
  return v;
}

}  // namespace

InterpolationRunner::InterpolationRunner(ExperimentConfig config) : config_(std::move(config)) {
  config_.system.validate();
  if (config_.system.spherical()) throw UsageError("use the spherical demo for spherical systems");
  if (config_.m < 1 || config_.trials < 0) throw UsageError("m must be positive and trials nonnegative");
  if (config_.grid < 2 || config_.l2_nodes < 1) throw UsageError("error grids must be nonempty");
  universe_ = build_index_set(config_.universe);
  target_ = target_function(config_.target, config_.system, universe_);
  const int dim = config_.system.point_dim();
  const SamplingMeasure nu = config_.system.measure();
  grid_points_ = uniform_grid(dim, config_.grid);
  grid_target_ = eval_target(target_, grid_points_);
  l2_rule(nu, dim, config_.l2_nodes, l2_points_, l2_weights_);
  l2_target_ = eval_target(target_, l2_points_);

  for (const auto& method : config_.methods) {
    MethodContext ctx;
    ctx.set = universe_;
    if (method.kind == MethodKind::theorem12) {
      if (!target_.coefficients) throw UsageError("theorem12 needs a coefficient-specified target");
      ctx.set = truncation_set(universe_, method.weights, method.s, HalfBudget{});
      if (ctx.set.empty()) throw UsageError("theorem12 truncation set is empty; increase s");
      ctx.tail = tail_eta(*target_.coefficients, universe_, ctx.set, method.weights,
                          static_cast<std::size_t>(config_.m), method.s);
    }
    if (method.kind == MethodKind::least_squares && (method.d < 1 || method.d > static_cast<int>(ctx.set.size())))
      throw UsageError("least_squares d must lie in [1, N]");
    const WeightScheme w = method.kind == MethodKind::unweighted_l1 || method.kind == MethodKind::least_squares ||
                                   method.kind == MethodKind::exact_inversion
                               ? WeightScheme::constant()
                               : method.weights;
    ctx.weights = weight_vector(w, ctx.set);
    ctx.grid_matrix = sampling_matrix(config_.system, ctx.set, grid_points_, false);
    ctx.l2_matrix = sampling_matrix(config_.system, ctx.set, l2_points_, false);
    ctx.odd.resize(ctx.set.size());
    for (std::size_t j = 0; j < ctx.set.size(); ++j) ctx.odd[j] = is_odd(config_.system, ctx.set[j], ctx.set.base());
    if (target_.coefficients) {
      Eigen::VectorXd truth(static_cast<Eigen::Index>(ctx.set.size()));
      for (std::size_t j = 0; j < ctx.set.size(); ++j)
        truth(static_cast<Eigen::Index>(j)) = (*target_.coefficients)(static_cast<Eigen::Index>(*universe_.find(ctx.set[j])));
      ctx.truth = truth;
    }
    contexts_.push_back(std::move(ctx));
  }
}

const InterpolationRunner::MethodContext& InterpolationRunner::context_for(const MethodSpec& method) const {
  const auto i = static_cast<std::size_t>(&method - config_.methods.data());
  return contexts_.at(i);
}

TrialResult InterpolationRunner::run_method(const MethodSpec& method, const MethodContext& ctx,
                                            const Eigen::MatrixXd& points, const Eigen::VectorXd& y,
                                            int trial) const {
  TrialResult r;
  r.trial = trial;
  r.method = method.label();
  const auto start = std::chrono::steady_clock::now();
  try {
    const Eigen::MatrixXd a = sampling_matrix(config_.system, ctx.set, points, false);
    switch (method.kind) {
      case MethodKind::wl1:
      case MethodKind::unweighted_l1:
      case MethodKind::theorem12: {
        Constraint c = Constraint::equality();
        if (method.kind == MethodKind::theorem12 && ctx.tail.radius > 0.0) c = Constraint::ball(ctx.tail.radius);
        const SolverResult sr = solve_wl1(a, y, ctx.weights, c, config_.solver);
        r.coefficients = sr.coefficients;
        r.iterations = sr.iterations;
        r.status = to_string(sr.status);
        r.extra["objective"] = sr.objective;
        r.extra["duality_gap"] = sr.duality_gap;
        if (sr.status == SolverStatus::converged) {
          const Certificate cert =
              certify_optimality(a, y, ctx.weights, sr.coefficients, c, 100.0 * config_.solver.tol_gap, sr.certificate);
          r.extra["certificate_ok"] = cert.ok;
        }
        break;
      }
      case MethodKind::wl2: {
        const LinearSolveResult lr = solve_wl2(a, y, ctx.weights);
        r.coefficients = lr.z;
        r.status = lr.rank_deficient ? "rank_deficient" : "ok";
        break;
      }
      case MethodKind::least_squares: {
        const LinearSolveResult lr = solve_least_squares(a, y, method.d);
        r.coefficients = lr.z;
        r.status = lr.rank_deficient ? "rank_deficient" : "ok";
        break;
      }
      case MethodKind::exact_inversion: {
        const LinearSolveResult lr = solve_exact(a, y);
        r.coefficients = lr.z;
        r.status = lr.ill_conditioned ? "ill_conditioned" : "ok";
        r.extra["condition"] = lr.condition;
        break;
      }
    }
  } catch (const std::exception& e) {
    r.status = std::string("failed: ") + e.what();
    r.error_linf = r.error_l2 = r.odd_mass = r.even_mass = kNaN;
    r.wall_ms = elapsed_ms(start);
    return r;
  }
  r.wall_ms = elapsed_ms(start);

  const Eigen::VectorXd grid_diff = grid_target_ - ctx.grid_matrix * r.coefficients;
  r.error_linf = grid_diff.cwiseAbs().maxCoeff();
  const Eigen::VectorXd l2_diff = l2_target_ - ctx.l2_matrix * r.coefficients;
  r.error_l2 = std::sqrt(l2_weights_.dot(l2_diff.cwiseAbs2()));
  for (std::size_t j = 0; j < ctx.set.size(); ++j) {
    const double v = std::abs(r.coefficients(static_cast<Eigen::Index>(j)));
    (ctx.odd[j] ? r.odd_mass : r.even_mass) += v;
  }

  if (ctx.truth) {
    // Weighted l1 distance over the whole universe: on-set part plus tail.
    const double on_set = weighted_norm(*ctx.truth - r.coefficients, ctx.weights, 1.0);
    double tail = 0.0;
    if (method.kind == MethodKind::theorem12) {
      tail = ctx.tail.eta;
    } else {
      const WeightScheme w = method.kind == MethodKind::wl1 || method.kind == MethodKind::wl2 ? method.weights
                                                                                              : WeightScheme::constant();
      for (std::size_t j = 0; j < universe_.size(); ++j)
        if (!ctx.set.contains(universe_[j]))
          tail += weight_of(w, universe_[j], universe_.base()) *
                  std::abs((*target_.coefficients)(static_cast<Eigen::Index>(j)));
    }
    r.extra["weighted_l1_error"] = on_set + tail;
    r.extra["linf_le_weighted_l1"] = r.error_linf <= (on_set + tail) * (1.0 + 1e-12) + 1e-15;
  }
  if (method.kind == MethodKind::theorem12) {
    const Eigen::VectorXd wu = weight_vector(method.weights, universe_);
    const double s_tilde = quasi_best_approx(*target_.coefficients, wu, method.s, 1.0).error;
    const double s3_tilde = quasi_best_approx(*target_.coefficients, wu, 3.0 * method.s, 1.0).error;
    const double err = r.extra["weighted_l1_error"].get<double>();
    r.extra["eta"] = ctx.tail.eta;
    r.extra["radius"] = ctx.tail.radius;
    r.extra["lambda0_size"] = ctx.set.size();
    r.extra["quasi_sigma_s"] = s_tilde;
    r.extra["quasi_sigma_3s"] = s3_tilde;
    r.extra["ratio_to_quasi_sigma_s"] = err / s_tilde;
    r.extra["ratio_to_quasi_sigma_3s"] = err / s3_tilde;
  }
  return r;
}

std::vector<TrialResult> InterpolationRunner::run_trial(int trial) const {
  const Eigen::MatrixXd points = draw_points(config_.sampling_measure(), static_cast<std::size_t>(config_.m),
                                             RandomStream{config_.seed, static_cast<std::uint64_t>(trial)});
  const Eigen::VectorXd y = eval_target(target_, points);
  std::vector<TrialResult> out;
  for (const auto& method : config_.methods) out.push_back(run_method(method, context_for(method), points, y, trial));
  return out;
}

Eigen::MatrixXd InterpolationRunner::curves(const std::vector<TrialResult>& trial_results) const {
  Eigen::MatrixXd c(grid_points_.rows(), 2 + static_cast<Eigen::Index>(trial_results.size()));
  c.col(0) = grid_points_.col(0);
  c.col(1) = grid_target_;
  for (std::size_t k = 0; k < trial_results.size(); ++k) {
    const auto& r = trial_results[k];
    const auto& ctx = contexts_.at(k % contexts_.size());
    const auto col = static_cast<Eigen::Index>(2 + k);
    if (r.coefficients.size() == static_cast<Eigen::Index>(ctx.set.size()))
      c.col(col) = ctx.grid_matrix * r.coefficients;
    else
      c.col(col).setConstant(kNaN);
  }
  return c;
}

std::vector<TrialResult> run_experiment(const ExperimentConfig& config, int threads) {
  const InterpolationRunner runner(config);
  std::vector<std::vector<TrialResult>> per_trial(static_cast<std::size_t>(config.trials));
  parallel_for(config.trials, threads, [&](int t) { per_trial[static_cast<std::size_t>(t)] = runner.run_trial(t); });
  std::vector<TrialResult> out;
  for (auto& v : per_trial)
    for (auto& r : v) out.push_back(std::move(r));
  return out;
}

double quantile(std::vector<double> v, double q) {
  v.erase(std::remove_if(v.begin(), v.end(), [](double x) { return std::isnan(x); }), v.end());
  if (v.empty()) return kNaN;
  std::sort(v.begin(), v.end());
  const double h = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, v.size() - 1);
  const double frac = h - static_cast<double>(lo);
  return frac == 0.0 ? v[lo] : v[lo] + frac * (v[hi] - v[lo]);
}

double median(std::vector<double> v) {
  v.erase(std::remove_if(v.begin(), v.end(), [](double x) { return std::isnan(x); }), v.end());
  if (v.empty()) return kNaN;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

nlohmann::json summarize(const std::vector<TrialResult>& results, bool include_timing) {
  std::vector<std::string> order;
  for (const auto& r : results)
    if (std::find(order.begin(), order.end(), r.method) == order.end()) order.push_back(r.method);
  nlohmann::json methods = nlohmann::json::array();
  std::vector<int> trial_ids;
  for (const auto& method : order) {
    std::vector<double> linf, l2, odd, even, iters, wall;
    std::map<std::string, int> statuses;
    for (const auto& r : results) {
      if (r.method != method) continue;
      linf.push_back(r.error_linf);
      l2.push_back(r.error_l2);
      odd.push_back(r.odd_mass);
      even.push_back(r.even_mass);
      iters.push_back(r.iterations);
      wall.push_back(r.wall_ms);
      ++statuses[r.status];
    }
    auto stats = [](const std::vector<double>& v) {
      return nlohmann::json{{"median", median(v)}, {"q10", quantile(v, 0.1)}, {"q90", quantile(v, 0.9)}};
    };
    nlohmann::json entry{{"method", method},
                         {"count", linf.size()},
                         {"error_linf", stats(linf)},
                         {"error_l2", stats(l2)},
                         {"odd_mass", stats(odd)},
                         {"even_mass", stats(even)},
                         {"iterations", stats(iters)},
                         {"status", statuses}};
    if (include_timing) entry["wall_ms"] = stats(wall);
    methods.push_back(std::move(entry));
  }
  for (const auto& r : results)
    if (std::find(trial_ids.begin(), trial_ids.end(), r.trial) == trial_ids.end()) trial_ids.push_back(r.trial);
  return {{"trials", trial_ids.size()}, {"methods", methods}};
}

// ---------------------------------------------------------------------------

std::vector<std::size_t> planted_support(const Eigen::VectorXd& w, double s, Philox& rng) {
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

std::vector<PhaseCell> run_phase_diagram(const PhaseConfig& config, int threads) {
  config.system.validate();
  if (config.trials < 1) throw UsageError("phase diagram needs trials >= 1");
  const IndexSet universe = build_index_set(config.universe);
  const Eigen::VectorXd w = weight_vector(config.weights, universe);
  const SamplingMeasure nu = config.system.measure();
  std::vector<PhaseCell> cells;
  for (double s : config.s_values)
    for (int m : config.m_values) {
      if (m < 1) throw UsageError("phase diagram m values must be positive");
      cells.push_back({s, m, 0, config.trials});
    }
  const int jobs = static_cast<int>(cells.size()) * config.trials;
  std::vector<char> success(static_cast<std::size_t>(jobs), 0);
  parallel_for(jobs, threads, [&](int job) {
    const auto& cell = cells[static_cast<std::size_t>(job / config.trials)];
    const int trial = job % config.trials;
    const auto s_index = static_cast<std::uint64_t>(
        std::find(config.s_values.begin(), config.s_values.end(), cell.s) - config.s_values.begin());
    const RandomStream base{config.seed, static_cast<std::uint64_t>(trial)};
    // The planted vector depends on (trial, s) only, so curves over m share it.
    Philox rng(base.child(s_index));
    const auto support = planted_support(w, cell.s, rng);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(w.size());
    for (std::size_t j : support) x(static_cast<Eigen::Index>(j)) = rng.normal();
    const Eigen::MatrixXd pts = draw_points(nu, static_cast<std::size_t>(cell.m),
                                            base.child(0x10000 * (s_index + 1) + static_cast<std::uint64_t>(cell.m)));
    const Eigen::MatrixXd a = sampling_matrix(config.system, universe, pts, false);
    const SolverResult r = solve_wl1(a, a * x, w, Constraint::equality(), config.solver);
    const double rel = x.norm() > 0.0 ? (r.coefficients - x).norm() / x.norm() : r.coefficients.norm();
    success[static_cast<std::size_t>(job)] = r.status != SolverStatus::infeasible && rel <= config.success_tol;
  });
  for (int job = 0; job < jobs; ++job)
    if (success[static_cast<std::size_t>(job)]) ++cells[static_cast<std::size_t>(job / config.trials)].successes;
  return cells;
}

double phase_monotonicity_sigma(const std::vector<PhaseCell>& cells) {
  double worst = 0.0;
  for (std::size_t i = 0; i < cells.size(); ++i)
    for (std::size_t j = 0; j < cells.size(); ++j) {
      const auto& a = cells[i];
      const auto& b = cells[j];
      if (a.s != b.s || a.m >= b.m) continue;
      const double drop = a.probability() - b.probability();
      if (drop <= 0.0) continue;
      const double pooled = static_cast<double>(a.successes + b.successes) / (a.trials + b.trials);
      const double sd = std::sqrt(pooled * (1.0 - pooled) * (1.0 / a.trials + 1.0 / b.trials));
      worst = std::max(worst, sd > 0.0 ? drop / sd : std::numeric_limits<double>::infinity());
    }
  return worst;
}

// ---------------------------------------------------------------------------

int SphericalDemoConfig::l_max() const {
  const double full = std::floor(s * s * s + 1e-9);
  return static_cast<int>(std::min<double>(full, l_cap));
}

bool SphericalDemoConfig::l_max_overridden() const { return std::floor(s * s * s + 1e-9) > l_cap; }

namespace {

// Chi-square p-value of theta against the tan13 density in equal-probability bins.
double theta_histogram_pvalue(const Eigen::MatrixXd& pts, int bins) {
  // sin^2(theta) ~ Beta(2/3, 1/3) on each hemisphere, so the folded variable
  // u = sin^2(theta) has CDF ibeta(2/3, 1/3, u).
  std::vector<int> counts(static_cast<std::size_t>(bins), 0);
  for (Eigen::Index i = 0; i < pts.rows(); ++i) {
    const double sn = std::sin(pts(i, 1));
    const double cdf = boost::math::ibeta(2.0 / 3.0, 1.0 / 3.0, std::min(1.0, sn * sn));
    const int b = std::min(bins - 1, static_cast<int>(cdf * bins));
    ++counts[static_cast<std::size_t>(b)];
  }
  const double expected = static_cast<double>(pts.rows()) / bins;
  double chi2 = 0.0;
  for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
  return boost::math::gamma_q((bins - 1) / 2.0, chi2 / 2.0);
}

}  // namespace

std::vector<TrialResult> run_spherical_demo(const SphericalDemoConfig& config, int threads) {
  if (!(config.s >= 1.0) || config.m < 1 || config.trials < 0 || config.active < 0 || config.l_cap < 0)
    throw UsageError("spherical demo parameters out of range");
  OrthonormalSystem system{Family::spherical_preconditioned, 1, config.spherical_c};
  system.validate();
  const IndexSet set = build_index_set(SphericalBand{config.l_max()});
  if (static_cast<std::size_t>(config.active) > set.size()) throw UsageError("more active terms than the band holds");
  const Eigen::VectorXd w = weight_vector(WeightScheme::spherical(config.spherical_c), set);

  // Error grid over (phi, theta).
  constexpr int kTheta = 41;
  constexpr int kPhi = 80;
  Eigen::MatrixXd grid(kTheta * kPhi, 2);
  for (int i = 0; i < kTheta; ++i)
    for (int j = 0; j < kPhi; ++j) {
      grid(i * kPhi + j, 0) = 2.0 * std::numbers::pi * j / kPhi;
      grid(i * kPhi + j, 1) = std::numbers::pi * i / (kTheta - 1);
    }
  const Eigen::MatrixXd grid_matrix = sampling_matrix(system, set, grid, false);

  std::vector<TrialResult> out(static_cast<std::size_t>(config.trials));
  parallel_for(config.trials, threads, [&](int trial) {
    const RandomStream base{config.seed, static_cast<std::uint64_t>(trial)};
    Philox rng(base.child(1));
    Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(set.size()));
    if (!config.zero_target) {
      std::vector<std::size_t> perm(set.size());
      std::iota(perm.begin(), perm.end(), std::size_t{0});
      for (int k = 0; k < config.active; ++k) {
        const auto pick = static_cast<std::size_t>(k) + rng.below(perm.size() - static_cast<std::size_t>(k));
        std::swap(perm[static_cast<std::size_t>(k)], perm[pick]);
        x(static_cast<Eigen::Index>(perm[static_cast<std::size_t>(k)])) = rng.normal();
      }
    }
    const Eigen::MatrixXd pts = draw_points(system.measure(), static_cast<std::size_t>(config.m), base);
    const Eigen::MatrixXd a = sampling_matrix(system, set, pts, false);
    const Eigen::VectorXd y = a * x;

    TrialResult r;
    r.trial = trial;
    r.method = "wl1(" + WeightScheme::spherical(config.spherical_c).describe() + ")";
    const auto start = std::chrono::steady_clock::now();
    // The target lies inside the band, so the tail radius is zero.
    const SolverResult sr = solve_wl1(a, y, w, Constraint::equality(), config.solver);
    r.wall_ms = elapsed_ms(start);
    r.coefficients = sr.coefficients;
    r.iterations = sr.iterations;
    r.status = to_string(sr.status);
    const Eigen::VectorXd diff = x - sr.coefficients;
    r.error_linf = (grid_matrix * diff).cwiseAbs().maxCoeff();
    r.error_l2 = diff.norm();  // Parseval
    r.even_mass = sr.coefficients.lpNorm<1>();
    const double rel = x.norm() > 0.0 ? diff.norm() / x.norm() : sr.coefficients.norm();
    r.extra["relative_l2_coefficient_error"] = rel;
    r.extra["l_max"] = config.l_max();
    r.extra["l_max_overridden"] = config.l_max_overridden();
    r.extra["N"] = set.size();
    r.extra["theta_histogram_pvalue"] = theta_histogram_pvalue(pts, 10);
    if (sr.status == SolverStatus::converged) {
      const Certificate cert = certify_optimality(a, y, w, sr.coefficients, Constraint::equality(),
                                                  100.0 * config.solver.tol_gap, sr.certificate);
      r.extra["certificate_ok"] = cert.ok;
    }
    out[static_cast<std::size_t>(trial)] = std::move(r);
  });
  return out;
}

// ---------------------------------------------------------------------------

OracleCheckReport run_oracle_check(const OracleCheckConfig& config) {
  if (config.m_max < 1 || config.m_max > kLpOracleMaxRows || config.n_max <= config.m_max ||
      config.n_max > kLpOracleMaxCols || !(config.w_min >= 1.0) || !(config.w_max >= config.w_min))
    throw UsageError("oracle check sizes out of range");
  OracleCheckReport rep;
  rep.instances = config.instances;
  for (int i = 0; i < config.instances; ++i) {
    Philox rng(RandomStream{config.seed, static_cast<std::uint64_t>(i)});
    const int m = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(config.m_max)));
    const int n = m + 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(config.n_max - m)));
    Eigen::MatrixXd a(m, n);
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < n; ++c) a(r, c) = rng.normal();
    Eigen::VectorXd w(n);
    for (int c = 0; c < n; ++c) w(c) = config.w_min + (config.w_max - config.w_min) * rng.uniform();
    Eigen::VectorXd y(m);
    if (i % 2 == 0) {
      // Sparse planted vector.
      Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
      const int k = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(std::min(m, 2))));
      for (int t = 0; t < k; ++t) x(static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)))) = rng.normal();
      y = a * x;
      if (y.norm() == 0.0) y(0) = 1.0;
    } else {
      for (int r = 0; r < m; ++r) y(r) = rng.normal();
    }
    const LpOracleResult lp = lp_oracle_wl1(a, y, w);
    const SolverResult sr = solve_wl1(a, y, w, Constraint::equality(), config.solver);
    const double obj = w.dot(sr.coefficients.cwiseAbs());
    const double rel = std::abs(obj - lp.objective) / std::max(std::abs(lp.objective), 1e-300);
    const Certificate cert =
        certify_optimality(a, y, w, sr.coefficients, Constraint::equality(), config.tol, sr.certificate);
    const bool obj_ok = lp.feasible && rel <= config.tol;
    if (!obj_ok) ++rep.objective_failures;
    if (!cert.ok) ++rep.certificate_failures;
    rep.max_relative_gap = std::max(rep.max_relative_gap, rel);
    rep.rows.push_back({{"instance", i},
                        {"m", m},
                        {"N", n},
                        {"oracle_objective", lp.objective},
                        {"solver_objective", obj},
                        {"relative_gap", rel},
                        {"status", to_string(sr.status)},
                        {"iterations", sr.iterations},
                        {"certificate_ok", cert.ok},
                        {"certificate_gap", cert.gap},
                        {"max_dual_violation", cert.max_dual_violation}});
  }
  return rep;
}

}  // namespace wl1
