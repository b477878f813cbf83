#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include "json.hpp"
#include "wl1/experiments.hpp"

namespace wl1 {

inline constexpr const char* kToolName = "wl1interp";
inline constexpr const char* kToolVersion = "0.1.0";

/// %.17g; "nan", "inf", "-inf" for non-finite values.
std::string format_double(double v);

/// Writes to a sibling temporary file and renames it over `path`. Throws
/// std::runtime_error on IO failure; the temporary is removed.
void write_atomic(const std::filesystem::path& path, const std::string& content);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

/// trial,method,error_linf,error_l2,odd_mass,iterations,status,wall_ms
/// Rows sorted by trial (stable within a trial). wall_ms is written as 0
/// unless `record_timing`, so reruns are byte-identical.
std::string trials_csv(const std::vector<TrialResult>& results, bool record_timing = false);

/// Header row then rows of `values`.
std::string matrix_csv(const std::vector<std::string>& header, const Eigen::MatrixXd& values);

std::string phase_csv(const std::vector<PhaseCell>& cells);

/// Run manifest: tool, version, verb, PRNG id, resolved config, outputs.
nlohmann::json make_manifest(const std::string& verb, const nlohmann::json& resolved_config,
                             const std::vector<std::string>& outputs);

/// manifest.json, trials.csv, summary.json, curves.csv. `curves` may have
/// zero rows; its columns are t, f(t) then one per entry of `curve_labels`.
void emit_results(const std::filesystem::path& out_dir, const nlohmann::json& resolved_config,
                  const std::vector<TrialResult>& results, const Eigen::MatrixXd& curves,
                  const std::vector<std::string>& curve_labels, bool record_timing = false,
                  const std::string& verb = "run", const nlohmann::json& manifest_extra = nlohmann::json::object());

/// Raw little-endian float64, column-major, plus a "<path>.json" sidecar with
/// rows, cols, dtype, order and `meta`.
void write_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& values, const nlohmann::json& meta);
Eigen::MatrixXd read_matrix(const std::filesystem::path& path);

/// Minimal CSV reader for files written above (no quoting).
std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path);

}  // namespace wl1
