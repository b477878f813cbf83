#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include "json.hpp"

#include "wl1/bases.hpp"
#include "wl1/index_model.hpp"
#include "wl1/random.hpp"
#include "wl1/sampling.hpp"
#include "wl1/solvers.hpp"

namespace wl1 {

enum class MethodKind { wl1, unweighted_l1, wl2, least_squares, exact_inversion, theorem12 };
std::string to_string(MethodKind kind);

struct MethodSpec {
  MethodKind kind = MethodKind::wl1;
  WeightScheme weights = WeightScheme::constant();  // omega for wl1/theorem12, alpha for wl2
  nlohmann::json weights_spec = "constant";         // as written in the config
  int d = 15;                                       // least_squares
  double s = 0.0;                                   // theorem12 budget

  std::string label() const;
};

enum class TargetKind { runge, zero, coefficients, power_decay };

struct TargetSpec {
  TargetKind kind = TargetKind::runge;
  std::vector<double> values;  // coefficients, canonical order of the universe
  double exponent = 3.0;       // power_decay: x_j = j^(-exponent)
};

/// Pointwise target plus, for coefficient-specified targets, the exact
/// coefficient vector over the universe.
struct Target {
  std::function<double(std::span<const double>)> f;
  std::optional<Eigen::VectorXd> coefficients;
};

/// runge: 1/(1 + 25 t^2) (1-D); zero; coefficients or power_decay expand in
/// the system over `universe`.
Target target_function(const TargetSpec& spec, const OrthonormalSystem& system, const IndexSet& universe);

struct TailEta {
  double eta = 0.0;
  double radius = 0.0;  // sqrt(m/s) eta
};

/// eta = sum over j outside lambda0 of w_j |x_j| (the universe's weights).
TailEta tail_eta(const Eigen::VectorXd& x, const IndexSet& universe, const IndexSet& lambda0,
                 const WeightScheme& w, std::size_t m, double s);

struct ExperimentConfig {
  std::string preset;
  OrthonormalSystem system;
  IndexSetSpec universe = Range1d{100};
  std::optional<SamplingMeasure> measure;  // defaults to the system's
  int m = 30;
  int trials = 100;
  std::uint64_t seed = 0;
  std::vector<MethodSpec> methods;
  TargetSpec target;
  int grid = 2001;
  int l2_nodes = 200;
  SolverOptions solver;
  bool record_timing = false;

  SamplingMeasure sampling_measure() const { return measure.value_or(system.measure()); }
};

/// Named presets: "runge-trig", "runge-legendre", "theorem12-trig".
ExperimentConfig preset_config(const std::string& name);

struct TrialResult {
  int trial = 0;
  std::string method;
  Eigen::VectorXd coefficients;  // over the method's index set
  double error_linf = 0.0;
  double error_l2 = 0.0;
  double odd_mass = 0.0;
  double even_mass = 0.0;
  int iterations = 0;
  std::string status = "ok";
  double wall_ms = 0.0;
  nlohmann::json extra = nlohmann::json::object();
};

/// Shared per-config state (grids, target values) reused by every trial.
class InterpolationRunner {
 public:
  explicit InterpolationRunner(ExperimentConfig config);

  const ExperimentConfig& config() const { return config_; }
  const IndexSet& universe() const { return universe_; }
  const Target& target() const { return target_; }

  /// Points from substream (seed, trial), every method, errors on the grid.
  std::vector<TrialResult> run_trial(int trial) const;

  /// Values on the L-infinity grid: t, f(t), then one column per method for
  /// the given trial results.
  Eigen::MatrixXd curves(const std::vector<TrialResult>& trial_results) const;

 private:
  struct MethodContext {
    IndexSet set;
    Eigen::MatrixXd grid_matrix;
    Eigen::MatrixXd l2_matrix;
    Eigen::VectorXd weights;
    std::vector<char> odd;
    TailEta tail;
    std::optional<Eigen::VectorXd> truth;  // target coefficients on set
  };

  const MethodContext& context_for(const MethodSpec& method) const;
  TrialResult run_method(const MethodSpec& method, const MethodContext& ctx, const Eigen::MatrixXd& points,
                         const Eigen::VectorXd& y, int trial) const;

  ExperimentConfig config_;
  IndexSet universe_;
  Target target_;
  Eigen::MatrixXd grid_points_;
  Eigen::VectorXd grid_target_;
  Eigen::MatrixXd l2_points_;
  Eigen::VectorXd l2_weights_;
  Eigen::VectorXd l2_target_;
  std::vector<MethodContext> contexts_;
};

/// Runs trials [0, trials) on `threads` workers; results ordered by trial,
/// then by method as configured.
std::vector<TrialResult> run_experiment(const ExperimentConfig& config, int threads = 1);

/// Per-method medians and 10/90% quantiles of the error columns; wall time
/// only with `include_timing`, so summaries of reruns are byte-identical.
nlohmann::json summarize(const std::vector<TrialResult>& results, bool include_timing = false);

double median(std::vector<double> v);
double quantile(std::vector<double> v, double q);

// ---------------------------------------------------------------------------

struct PhaseConfig {
  OrthonormalSystem system{Family::real_trigonometric, 1};
  IndexSetSpec universe = Range1d{101};
  WeightScheme weights = WeightScheme::sqrt();
  nlohmann::json weights_spec = "sqrt";
  std::vector<double> s_values{8.0};
  std::vector<int> m_values{2, 4, 6, 8, 10, 12, 16, 20, 30, 40, 60, 80, 100};
  int trials = 50;
  std::uint64_t seed = 0;
  double success_tol = 1e-5;
  SolverOptions solver;
};

struct PhaseCell {
  double s = 0.0;
  int m = 0;
  int successes = 0;
  int trials = 0;
  double probability() const { return trials > 0 ? static_cast<double>(successes) / trials : 0.0; }
};

/// Planted support: random order, admit each index that still fits the
/// budget s.
std::vector<std::size_t> planted_support(const Eigen::VectorXd& w, double s, Philox& rng);

std::vector<PhaseCell> run_phase_diagram(const PhaseConfig& config, int threads = 1);

/// Largest drop p(m_i) - p(m_j), i < j at equal s, measured in pooled binomial
/// standard deviations; <= 3 means nondecreasing within 3 sigma bands.
double phase_monotonicity_sigma(const std::vector<PhaseCell>& cells);

// ---------------------------------------------------------------------------

struct SphericalDemoConfig {
  double s = 2.0;
  int l_cap = 30;
  int m = 400;
  int active = 5;
  int trials = 5;
  std::uint64_t seed = 0;
  double spherical_c = kSphericalPreconditionedC;
  bool zero_target = false;
  SolverOptions solver;

  int l_max() const;
  bool l_max_overridden() const;
};

/// Planted band-limited target, sphere_tan13 samples, preconditioned
/// matrix, weighted l1 with the tail radius (zero for in-band targets).
std::vector<TrialResult> run_spherical_demo(const SphericalDemoConfig& config, int threads = 1);

/// Random small instances: solve_wl1 against the LP oracle.
struct OracleCheckConfig {
  int instances = 100;
  int m_max = 5;
  int n_max = 8;
  double w_min = 1.0;
  double w_max = 3.0;
  double tol = 1e-6;
  std::uint64_t seed = 0;
  SolverOptions solver;
};

struct OracleCheckReport {
  int instances = 0;
  int objective_failures = 0;    // relative objective gap above tol
  int certificate_failures = 0;  // certify_optimality at tol
  double max_relative_gap = 0.0;
  nlohmann::json rows = nlohmann::json::array();  // per instance

  bool passed() const { return objective_failures == 0 && certificate_failures == 0; }
};

/// Random equality-constrained instances with m in [1, m_max], N in
/// [m + 1, n_max], Gaussian A, weights uniform in [w_min, w_max]; solve_wl1
/// against lp_oracle_wl1.
OracleCheckReport run_oracle_check(const OracleCheckConfig& config);

/// Runs f(i) for i in [0, n) on up to `threads` workers.
void parallel_for(int n, int threads, const std::function<void(int)>& f);

}  // namespace wl1
