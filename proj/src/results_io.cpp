#include "wl1/results_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <unistd.h>

#include "wl1/random.hpp"

namespace wl1 {

namespace fs = std::filesystem;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      out.close();
      std::error_code ec;
      fs::remove(tmp, ec);
      throw std::runtime_error("write failed for " + path.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignore;
    fs::remove(tmp, ignore);
    throw std::runtime_error("cannot rename into " + path.string() + ": " + ec.message());
  }
}

void write_json(const fs::path& path, const nlohmann::json& j) { write_atomic(path, j.dump(2) + "\n"); }

std::string trials_csv(const std::vector<TrialResult>& results, bool record_timing) {
  std::vector<const TrialResult*> rows;
  for (const auto& r : results) rows.push_back(&r);
  std::stable_sort(rows.begin(), rows.end(), [](auto* a, auto* b) { return a->trial < b->trial; });
  std::ostringstream os;
  os << "trial,method,error_linf,error_l2,odd_mass,iterations,status,wall_ms\n";
  for (const auto* r : rows) {
    std::string status = r->status;
    std::replace(status.begin(), status.end(), ',', ';');
    std::replace(status.begin(), status.end(), '\n', ' ');
    os << r->trial << ',' << r->method << ',' << format_double(r->error_linf) << ',' << format_double(r->error_l2)
       << ',' << format_double(r->odd_mass) << ',' << r->iterations << ',' << status << ','
       << format_double(record_timing ? r->wall_ms : 0.0) << '\n';
  }
  return os.str();
}

std::string matrix_csv(const std::vector<std::string>& header, const Eigen::MatrixXd& values) {
  std::ostringstream os;
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << '\n';
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    for (Eigen::Index c = 0; c < values.cols(); ++c) os << (c ? "," : "") << format_double(values(r, c));
    os << '\n';
  }
  return os.str();
}

std::string phase_csv(const std::vector<PhaseCell>& cells) {
  std::ostringstream os;
  os << "s,m,successes,trials,probability\n";
  for (const auto& c : cells)
    os << format_double(c.s) << ',' << c.m << ',' << c.successes << ',' << c.trials << ','
       << format_double(c.probability()) << '\n';
  return os.str();
}

nlohmann::json make_manifest(const std::string& verb, const nlohmann::json& resolved_config,
                             const std::vector<std::string>& outputs) {
  return {{"tool", kToolName},
          {"version", kToolVersion},
          {"verb", verb},
          {"prng", RandomStream::algorithm},
          {"config", resolved_config},
          {"outputs", outputs}};
}

void emit_results(const fs::path& out_dir, const nlohmann::json& resolved_config,
                  const std::vector<TrialResult>& results, const Eigen::MatrixXd& curves,
                  const std::vector<std::string>& curve_labels, bool record_timing, const std::string& verb,
                  const nlohmann::json& manifest_extra) {
  fs::create_directories(out_dir);
  write_atomic(out_dir / "trials.csv", trials_csv(results, record_timing));
  write_json(out_dir / "summary.json", summarize(results, record_timing));
  std::vector<std::string> header{"t", "f"};
  for (const auto& l : curve_labels) header.push_back(l);
  Eigen::MatrixXd c = curves;
  if (c.cols() != static_cast<Eigen::Index>(header.size())) c.resize(0, static_cast<Eigen::Index>(header.size()));
  write_atomic(out_dir / "curves.csv", matrix_csv(header, c));
  auto manifest = make_manifest(verb, resolved_config, {"trials.csv", "summary.json", "curves.csv"});
  manifest.update(manifest_extra);
  write_json(out_dir / "manifest.json", manifest);
}

void write_matrix(const fs::path& path, const Eigen::MatrixXd& values, const nlohmann::json& meta) {
  static_assert(std::endian::native == std::endian::little, "matrix export assumes a little-endian host");
  std::string bytes(static_cast<std::size_t>(values.size()) * sizeof(double), '\0');
  if (!bytes.empty()) std::memcpy(bytes.data(), values.data(), bytes.size());
  write_atomic(path, bytes);
  write_json(path.string() + ".json", {{"rows", values.rows()},
                                       {"cols", values.cols()},
                                       {"dtype", "float64"},
                                       {"endian", "little"},
                                       {"order", "column-major"},
                                       {"meta", meta}});
}

Eigen::MatrixXd read_matrix(const fs::path& path) {
  std::ifstream side(path.string() + ".json");
  if (!side) throw std::runtime_error("missing sidecar for " + path.string());
  const auto meta = nlohmann::json::parse(side);
  const auto rows = meta.at("rows").get<Eigen::Index>();
  const auto cols = meta.at("cols").get<Eigen::Index>();
  Eigen::MatrixXd rm(rows, cols);
  std::ifstream in(path, std::ios::binary);
  in.read(reinterpret_cast<char*>(rm.data()), static_cast<std::streamsize>(rm.size() * sizeof(double)));
  if (!in && rm.size() > 0) throw std::runtime_error("short read from " + path.string());
  return rm;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(std::move(cells));
  }
  return rows;
}

}  // namespace wl1
