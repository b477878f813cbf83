#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "wl1/analysis.hpp"
#include "wl1/experiments.hpp"

namespace wl1 {

/// Sampled matrix shared by the rip and nsp verbs.
struct MatrixSpec {
  OrthonormalSystem system;
  IndexSetSpec universe = Range1d{16};
  std::optional<SamplingMeasure> measure;
  int m = 40;
  std::uint64_t seed = 0;
  bool normalized = true;

  SamplingMeasure sampling_measure() const { return measure.value_or(system.measure()); }
};

struct RipConfig {
  MatrixSpec matrix;
  WeightScheme weights = WeightScheme::constant();
  double s = 2.0;
  bool sampled = false;
  std::size_t cap = kRipSupportCap;
  std::size_t n_supports = 1000;
};

struct NspConfig {
  MatrixSpec matrix;
  WeightScheme weights = WeightScheme::constant();
  double s = 2.0;
  std::optional<double> delta;  // delta_{w,3s}; computed exhaustively when absent
  std::size_t trials = 1000;
  SupportMode mode = SupportMode::exhaustive;
};

struct GramConfig {
  OrthonormalSystem system;
  IndexSetSpec universe = Range1d{31};
  GramQuadrature quadrature = GaussQuadrature{};
};

struct SampleConfig {
  SamplingMeasure measure;
  int m = 1000;
  std::uint64_t seed = 0;
};

/// Fully resolved configuration. `experiment` selects which member is live:
/// interpolation, phase_diagram, spherical_demo, rip, nsp, gram, sample,
/// oracle_check.
struct Config {
  std::string experiment = "interpolation";
  std::string preset;
  ExperimentConfig interpolation;
  PhaseConfig phase;
  SphericalDemoConfig spherical;
  RipConfig rip;
  NspConfig nsp;
  GramConfig gram;
  SampleConfig sample;
  OracleCheckConfig oracle;

  std::uint64_t seed() const;
  void set_seed(std::uint64_t seed);
};

const std::vector<std::string>& experiment_kinds();
const std::vector<std::string>& preset_names();

/// Sets `dotted` (e.g. "solver.tol_gap", "methods.0.d") inside doc,
/// creating intermediate objects.
void apply_override(nlohmann::json& doc, const std::string& dotted, const nlohmann::json& value);

/// "key=value"; value is parsed as JSON when possible, else kept as a string.
std::pair<std::string, nlohmann::json> parse_override(const std::string& assignment);

/// Preset expansion, user keys, then "overrides"; then strict validation.
/// Throws ConfigError with a path-qualified message.
Config parse_config(const nlohmann::json& doc, const std::string& default_experiment = "interpolation");
Config load_config(const std::filesystem::path& path, const std::string& default_experiment = "interpolation");

/// Resolved form; parse_config(to_json(c)) reproduces c.
nlohmann::json to_json(const Config& config);

nlohmann::json weights_to_json(const WeightScheme& w);
WeightScheme weights_from_json(const nlohmann::json& j, const std::string& path = "weights");
nlohmann::json universe_to_json(const IndexSetSpec& spec);

}  // namespace wl1
