// wl1interp: weighted l1 interpolation experiments and matrix diagnostics.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "wl1/analysis.hpp"
#include "wl1/config.hpp"
#include "wl1/errors.hpp"
#include "wl1/results_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace wl1;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct Options {
  std::string config_path;
  std::string preset;
  std::string out;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  bool strict = false;
};

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("-c,--config", o.config_path, "JSON config file")->check(CLI::ExistingFile);
  sub->add_option("-p,--preset", o.preset, "named preset (runge-trig, runge-legendre, theorem12-trig, phase-trig, spherical-demo)");
  sub->add_option("-o,--out", o.out, "output directory (default $WL1_OUTPUT_ROOT/<verb>-<name>-seed<seed>)");
  sub->add_option("--set", o.sets, "override, dotted key=value (JSON value), repeatable");
  sub->add_option("--seed", o.seed, "master seed");
  sub->add_option("--threads", o.threads, "worker threads for trials")->check(CLI::PositiveNumber);
  sub->add_flag("--strict", o.strict, "exit 3 when any trial or check fails");
}

Config resolve(const Options& o, const std::string& default_experiment) {
  json doc = json::object();
  if (!o.config_path.empty()) {
    std::ifstream in(o.config_path);
    std::stringstream buf;
    buf << in.rdbuf();
    doc = json::parse(buf.str(), nullptr, false);
    if (doc.is_discarded()) throw ConfigError("", "malformed JSON in " + o.config_path);
    if (!doc.is_object()) throw ConfigError("", "config must be a JSON object");
  }
  if (!o.preset.empty()) doc["preset"] = o.preset;
  if (!o.sets.empty() || o.seed) {
    if (!doc.contains("overrides")) doc["overrides"] = json::object();
    if (!doc["overrides"].is_object()) throw ConfigError("overrides", "expected an object");
    for (const auto& s : o.sets) {
      auto [key, value] = parse_override(s);
      doc["overrides"][key] = value;
    }
  }
  Config c = parse_config(doc, default_experiment);
  if (o.seed) c.set_seed(*o.seed);
  return c;
}

fs::path output_dir(const Options& o, const std::string& verb, const Config& c) {
  if (!o.out.empty()) return o.out;
  const char* root = std::getenv("WL1_OUTPUT_ROOT");
  const fs::path base = root && *root ? fs::path(root) : fs::path("wl1-output");
  const std::string name = c.preset.empty() ? c.experiment : c.preset;
  return base / (verb + "-" + name + "-seed" + std::to_string(c.seed()));
}

void require_experiment(const Config& c, std::initializer_list<const char*> allowed, const std::string& verb) {
  for (const char* a : allowed)
    if (c.experiment == a) return;
  throw ConfigError("experiment", "verb '" + verb + "' cannot run experiment '" + c.experiment + "'");
}

bool trial_failed(const TrialResult& r) {
  return r.status == "max_iter" || r.status == "infeasible" || r.status.rfind("failed", 0) == 0;
}

json status_extra(int failures, bool strict) { return {{"strict", strict}, {"failures", failures}}; }

int finish(const fs::path& dir, int failures, bool strict) {
  std::cout << "wrote " << dir.string() << "\n";
  if (failures > 0) {
    std::cerr << failures << " failure(s) recorded\n";
    if (strict) return kExitRuntime;
  }
  return 0;
}

Eigen::MatrixXd build_matrix(const MatrixSpec& spec, IndexSet& set, Eigen::MatrixXd* points = nullptr) {
  set = build_index_set(spec.universe);
  const Eigen::MatrixXd pts =
      draw_points(spec.sampling_measure(), static_cast<std::size_t>(spec.m), RandomStream{spec.seed, 0});
  if (points) *points = pts;
  return sampling_matrix(spec.system, set, pts, spec.normalized);
}

json matrix_meta(const MatrixSpec& spec, const IndexSet& set, const Eigen::MatrixXd& pts) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < pts.rows(); ++i) {
    json p = json::array();
    for (Eigen::Index k = 0; k < pts.cols(); ++k) p.push_back(pts(i, k));
    rows.push_back(std::move(p));
  }
  return {{"m", spec.m},
          {"N", set.size()},
          {"family", spec.system.describe()},
          {"normalized", spec.normalized},
          {"measure", describe(spec.sampling_measure())},
          {"points", rows}};
}

int run_phase(const Config& c, const Options& o, const std::string& verb) {
  const auto cells = run_phase_diagram(c.phase, o.threads);
  const fs::path dir = output_dir(o, verb, c);
  write_atomic(dir / "phase.csv", phase_csv(cells));
  const double sigma = phase_monotonicity_sigma(cells);
  json by_s = json::object();
  for (const auto& cell : cells) {
    auto& best = by_s[format_double(cell.s)];
    best = std::max(best.is_null() ? 0.0 : best.get<double>(), cell.probability());
  }
  write_json(dir / "summary.json", {{"monotonicity_sigma", sigma}, {"max_probability", by_s}});
  write_json(dir / "manifest.json", make_manifest(verb, to_json(c), {"phase.csv", "summary.json"}));
  return finish(dir, 0, o.strict);
}

int run_verb(const std::string& verb, const Options& o) {
  if (verb == "run") {
    const Config c = resolve(o, "interpolation");
    require_experiment(c, {"interpolation", "spherical_demo", "phase_diagram"}, verb);
    if (c.experiment == "phase_diagram") return run_phase(c, o, verb);
    const fs::path dir = output_dir(o, verb, c);
    std::vector<TrialResult> results;
    Eigen::MatrixXd curves;
    std::vector<std::string> labels;
    bool timing = false;
    if (c.experiment == "interpolation") {
      const InterpolationRunner runner(c.interpolation);
      std::vector<std::vector<TrialResult>> per_trial(static_cast<std::size_t>(c.interpolation.trials));
      parallel_for(c.interpolation.trials, o.threads,
                   [&](int t) { per_trial[static_cast<std::size_t>(t)] = runner.run_trial(t); });
      for (auto& v : per_trial) results.insert(results.end(), v.begin(), v.end());
      if (!per_trial.empty()) {
        curves = runner.curves(per_trial.front());
        for (const auto& r : per_trial.front()) labels.push_back(r.method);
      }
      timing = c.interpolation.record_timing;
    } else {
      results = run_spherical_demo(c.spherical, o.threads);
    }
    int failures = 0;
    for (const auto& r : results) failures += trial_failed(r);
    emit_results(dir, to_json(c), results, curves, labels, timing, verb, status_extra(failures, o.strict));
    return finish(dir, failures, o.strict);
  }
  if (verb == "phase") {
    const Config c = resolve(o, "phase_diagram");
    require_experiment(c, {"phase_diagram"}, verb);
    return run_phase(c, o, verb);
  }
  if (verb == "rip") {
    const Config c = resolve(o, "rip");
    require_experiment(c, {"rip"}, verb);
    IndexSet set;
    Eigen::MatrixXd pts;
    const Eigen::MatrixXd a = build_matrix(c.rip.matrix, set, &pts);
    const Eigen::VectorXd w = weight_vector(c.rip.weights, set);
    RipMode mode = RipExhaustive{c.rip.cap};
    if (c.rip.sampled) mode = RipSampled{c.rip.n_supports, RandomStream{c.rip.matrix.seed, 1}};
    const RipReport rep = wrip_constant(a, w, c.rip.s, mode);
    const fs::path dir = output_dir(o, verb, c);
    write_matrix(dir / "matrix.bin", a, matrix_meta(c.rip.matrix, set, pts));
    write_json(dir / "rip.json", {{"N", set.size()}, {"m", a.rows()}, {"report", to_json(rep)}});
    write_json(dir / "manifest.json", make_manifest(verb, to_json(c), {"rip.json", "matrix.bin"}));
    return finish(dir, 0, o.strict);
  }
  if (verb == "nsp") {
    const Config c = resolve(o, "nsp");
    require_experiment(c, {"nsp"}, verb);
    IndexSet set;
    const Eigen::MatrixXd a = build_matrix(c.nsp.matrix, set);
    const Eigen::VectorXd w = weight_vector(c.nsp.weights, set);
    json out{{"N", set.size()}, {"m", a.rows()}};
    double delta = 0.0;
    if (c.nsp.delta) {
      delta = *c.nsp.delta;
    } else {
      const RipReport rep = wrip_constant(a, w, 3.0 * c.nsp.s, RipExhaustive{});
      out["rip_3s"] = to_json(rep);
      delta = rep.delta;
    }
    if (!(delta < 1.0)) throw PreconditionError("delta_3s = " + format_double(delta) + " is not below 1");
    const NspConstants k = rip_to_nsp_constants(delta);
    out["constants"] = to_json(k);
    const NspReport rep = check_nsp_empirical(a, w, c.nsp.s, k.rho, k.tau, c.nsp.trials,
                                              RandomStream{c.nsp.matrix.seed, 1}, c.nsp.mode);
    out["report"] = to_json(rep);
    const int failures = k.valid ? static_cast<int>(rep.violations.size()) : 0;
    const fs::path dir = output_dir(o, verb, c);
    write_json(dir / "nsp.json", out);
    auto manifest = make_manifest(verb, to_json(c), {"nsp.json"});
    manifest.update(status_extra(failures, o.strict));
    write_json(dir / "manifest.json", manifest);
    return finish(dir, failures, o.strict);
  }
  if (verb == "gram") {
    const Config c = resolve(o, "gram");
    require_experiment(c, {"gram"}, verb);
    const IndexSet set = build_index_set(c.gram.universe);
    const Eigen::MatrixXd g = gram_matrix(c.gram.system, set, c.gram.quadrature);
    const double dev = (g - Eigen::MatrixXd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
    const fs::path dir = output_dir(o, verb, c);
    write_matrix(dir / "gram.bin", g, {{"system", c.gram.system.describe()}});
    write_json(dir / "gram.json", {{"N", set.size()}, {"max_deviation", dev}});
    write_json(dir / "manifest.json", make_manifest(verb, to_json(c), {"gram.json", "gram.bin"}));
    return finish(dir, 0, o.strict);
  }
  if (verb == "sample") {
    const Config c = resolve(o, "sample");
    require_experiment(c, {"sample"}, verb);
    const Eigen::MatrixXd pts =
        draw_points(c.sample.measure, static_cast<std::size_t>(c.sample.m), RandomStream{c.sample.seed, 0});
    std::vector<std::string> header;
    if (c.sample.measure.on_sphere()) {
      header = {"phi", "theta"};
    } else if (pts.cols() == 1) {
      header = {"t"};
    } else {
      for (Eigen::Index a = 0; a < pts.cols(); ++a) header.push_back("t" + std::to_string(a + 1));
    }
    const fs::path dir = output_dir(o, verb, c);
    write_atomic(dir / "points.csv", matrix_csv(header, pts));
    write_json(dir / "points.json", {{"measure", describe(c.sample.measure)},
                                     {"m", c.sample.m},
                                     {"seed", c.sample.seed},
                                     {"stream", 0},
                                     {"prng", RandomStream::algorithm},
                                     {"columns", header}});
    write_json(dir / "manifest.json", make_manifest(verb, to_json(c), {"points.csv", "points.json"}));
    return finish(dir, 0, o.strict);
  }
  if (verb == "oracle-check") {
    const Config c = resolve(o, "oracle_check");
    require_experiment(c, {"oracle_check"}, verb);
    const OracleCheckReport rep = run_oracle_check(c.oracle);
    const fs::path dir = output_dir(o, verb, c);
    write_json(dir / "oracle.json", {{"instances", rep.instances},
                                     {"objective_failures", rep.objective_failures},
                                     {"certificate_failures", rep.certificate_failures},
                                     {"max_relative_gap", rep.max_relative_gap},
                                     {"passed", rep.passed()},
                                     {"rows", rep.rows}});
    const int failures = rep.objective_failures + rep.certificate_failures;
    auto manifest = make_manifest(verb, to_json(c), {"oracle.json"});
    manifest.update(status_extra(failures, o.strict));
    write_json(dir / "manifest.json", manifest);
    return finish(dir, failures, o.strict);
  }
  throw UsageError("unknown verb " + verb);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted l1 interpolation: experiments, RIP/NSP diagnostics, sampling.\n"
               "Exit codes: 0 success, 2 configuration error, 3 runtime failure (with --strict).\n"
               "WL1_OUTPUT_ROOT sets the default output root."};
  app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);
  app.require_subcommand(1);
  Options opts;
  const std::vector<std::pair<std::string, std::string>> verbs{
      {"run", "interpolation trials, spherical demo or phase diagram from a config"},
      {"phase", "recovery-probability table over (s, m)"},
      {"rip", "weighted RIP constant of a sampled matrix"},
      {"nsp", "empirical weighted robust null space property check"},
      {"gram", "Gram matrix of a basis family under quadrature"},
      {"sample", "draw points from a sampling measure"},
      {"oracle-check", "compare the l1 solver with the exact LP oracle"}};
  for (const auto& [name, help] : verbs) add_common(app.add_subcommand(name, help), opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }
  const std::string verb = app.get_subcommands().front()->get_name();
  try {
    return run_verb(verb, opts);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const UsageError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
