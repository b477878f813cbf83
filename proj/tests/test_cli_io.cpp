#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

#include "wl1/config.hpp"
#include "wl1/errors.hpp"
#include "wl1/results_io.hpp"

using namespace wl1;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("wl1-cli-" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(WL1INTERP_PATH) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string config_error(const json& doc) {
  try {
    parse_config(doc);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("preset expansion echoes the published parameters") {
  const auto c = parse_config(json{{"preset", "runge-trig"}, {"seed", 7}});
  CHECK(c.experiment == "interpolation");
  CHECK(c.interpolation.m == 30);
  CHECK(c.interpolation.trials == 100);
  CHECK(std::get<Range1d>(c.interpolation.universe).n == 100);
  CHECK(c.interpolation.methods.at(0).d == 15);
  CHECK(c.seed() == 7);
  const auto j = to_json(c);
  CHECK(j.at("m") == 30);
  CHECK(j.at("trials") == 100);
}

TEST_CASE("overrides change only the named key") {
  const auto base = to_json(parse_config(json{{"preset", "runge-trig"}, {"seed", 7}}));
  auto over = to_json(parse_config(json{{"preset", "runge-trig"}, {"seed", 7}, {"overrides", {{"m", 60}}}}));
  CHECK(over.at("m") == 60);
  over["m"] = 30;
  CHECK(over == base);

  auto dotted = to_json(parse_config(json{{"preset", "runge-trig"}, {"overrides", {{"solver.tol_gap", 1e-9}}}}));
  CHECK(dotted.at("solver").at("tol_gap").get<double>() == 1e-9);
  auto indexed = to_json(parse_config(json{{"preset", "runge-trig"}, {"overrides", {{"methods.0.d", 10}}}}));
  CHECK(indexed.at("methods")[0].at("d") == 10);
}

TEST_CASE("strict validation names the offending key") {
  const auto msg = config_error(json{{"preset", "runge-trig"}, {"mm", 3}});
  CHECK(msg.find("mm") != std::string::npos);
  CHECK(config_error(json{{"preset", "runge-trig"}, {"m", "abc"}}).find("m") != std::string::npos);
  CHECK(config_error(json{{"preset", "runge-trig"}, {"solver", {{"tol_gapp", 1}}}}).find("solver.tol_gapp") !=
        std::string::npos);
  CHECK_FALSE(config_error(json{{"preset", "no-such-preset"}}).empty());
  CHECK_FALSE(config_error(json{{"preset", "runge-trig"}, {"m", 0}}).empty());
  CHECK_FALSE(config_error(json{{"preset", "runge-trig"}, {"solver", {{"polish_every", 0}}}}).empty());
  CHECK_FALSE(config_error(json{{"experiment", "interpolation"}, {"system", {{"family", "fourier"}}}}).empty());
}

TEST_CASE("override parsing") {
  auto [k, v] = parse_override("solver.tol_gap=1e-7");
  CHECK(k == "solver.tol_gap");
  CHECK(v.get<double>() == 1e-7);
  std::tie(k, v) = parse_override("preset=runge-trig");
  CHECK(v == "runge-trig");
  CHECK_THROWS(parse_override("novalue"));
  json doc = json::object();
  apply_override(doc, "a.b.c", 3);
  CHECK(doc.at("a").at("b").at("c") == 3);
}

TEST_CASE("resolved config round-trips for every preset and experiment kind") {
  for (const auto& p : preset_names()) {
    const auto c = parse_config(json{{"preset", p}, {"seed", 11}});
    const auto j = to_json(c);
    CHECK(to_json(parse_config(j)) == j);
  }
  for (const auto& kind : experiment_kinds()) {
    json doc{{"experiment", kind}, {"seed", 5}};
    if (kind == "interpolation") doc["methods"] = json::array({json{{"kind", "wl1"}, {"weights", "linear"}}});
    const auto c = parse_config(doc);
    const auto j = to_json(c);
    CHECK(j.at("experiment") == kind);
    CHECK(to_json(parse_config(j)) == j);
  }
  // weight schemes with parameters survive the trip
  for (const auto& w : {json("linear"), json{{"kind", "power"}, {"alpha", 1.5}}, json{{"kind", "sobolev"}, {"r", 0.5}},
                        json{{"kind", "constant"}, {"c", 2.0}}}) {
    const auto back = weights_to_json(weights_from_json(w));
    CHECK(weights_to_json(weights_from_json(back)) == back);
  }
}

TEST_CASE("manifest config parses back to the same run") {
  const auto c = parse_config(json{{"preset", "runge-legendre"}, {"seed", 2}, {"overrides", {{"trials", 2}}}});
  const auto dir = scratch("manifest");
  auto ec = c.interpolation;
  ec.grid = 101;
  const auto res = run_experiment(ec, 1);
  emit_results(dir, to_json(c), res, Eigen::MatrixXd(0, 0), {}, false);
  const auto manifest = json::parse(slurp(dir / "manifest.json"));
  CHECK(manifest.at("tool") == kToolName);
  CHECK(manifest.at("version") == kToolVersion);
  CHECK(manifest.at("prng") == "philox4x32-10");
  CHECK(to_json(parse_config(manifest.at("config"))) == to_json(c));
}

TEST_CASE("reruns are byte-identical") {
  auto c = parse_config(json{{"preset", "runge-trig"}, {"seed", 7}, {"overrides", {{"trials", 3}, {"grid", 201}}}});
  const auto a = scratch("rerun-a"), b = scratch("rerun-b");
  for (const auto& dir : {a, b}) {
    const auto res = run_experiment(c.interpolation, 2);
    emit_results(dir, to_json(c), res, Eigen::MatrixXd(0, 0), {}, false);
  }
  for (const char* f : {"trials.csv", "summary.json", "manifest.json", "curves.csv"}) CHECK(slurp(a / f) == slurp(b / f));
}

TEST_CASE("empty result set") {
  const auto dir = scratch("empty");
  emit_results(dir, json::object(), {}, Eigen::MatrixXd(0, 0), {"wl1(sqrt)"}, false);
  CHECK(slurp(dir / "trials.csv") == "trial,method,error_linf,error_l2,odd_mass,iterations,status,wall_ms\n");
  CHECK(slurp(dir / "curves.csv") == "t,f,wl1(sqrt)\n");
  const auto s = json::parse(slurp(dir / "summary.json"));
  CHECK(s.at("trials") == 0);
  CHECK(s.at("methods").empty());
}

TEST_CASE("summary medians are recomputable from trials.csv") {
  auto c = parse_config(json{{"preset", "runge-trig"}, {"seed", 1}, {"overrides", {{"trials", 7}, {"grid", 201}}}});
  const auto dir = scratch("medians");
  emit_results(dir, to_json(c), run_experiment(c.interpolation, 1), Eigen::MatrixXd(0, 0), {}, false);
  const auto rows = read_csv(dir / "trials.csv");
  const auto summary = json::parse(slurp(dir / "summary.json"));
  REQUIRE(rows.size() == 1 + 7 * 6);
  for (const auto& m : summary.at("methods")) {
    std::vector<double> linf, l2;
    for (std::size_t i = 1; i < rows.size(); ++i)
      if (rows[i][1] == m.at("method").get<std::string>()) {
        linf.push_back(std::strtod(rows[i][2].c_str(), nullptr));
        l2.push_back(std::strtod(rows[i][3].c_str(), nullptr));
      }
    REQUIRE(linf.size() == 7);
    CHECK(median(linf) == m.at("error_linf").at("median").get<double>());
    CHECK(median(l2) == m.at("error_l2").at("median").get<double>());
  }
}

TEST_CASE("number formatting round-trips") {
  for (double v : {0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-308, 0.0}) CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
  CHECK(format_double(NAN) == "nan");
  CHECK(format_double(INFINITY) == "inf");
  CHECK(format_double(-INFINITY) == "-inf");
}

TEST_CASE("atomic writes") {
  const auto dir = scratch("atomic");
  write_atomic(dir / "a.txt", "hello");
  CHECK(slurp(dir / "a.txt") == "hello");
  write_atomic(dir / "a.txt", "bye");
  CHECK(slurp(dir / "a.txt") == "bye");
  std::size_t n = 0;
  for (const auto& e : fs::directory_iterator(dir)) (void)e, ++n;
  CHECK(n == 1);
  CHECK_THROWS(write_atomic("/proc/wl1-no-such-dir/x.txt", "x"));
  CHECK_FALSE(fs::exists("/proc/wl1-no-such-dir/x.txt"));
}

TEST_CASE("matrix export round-trips") {
  const auto dir = scratch("matrix");
  Eigen::MatrixXd m(3, 2);
  m << 1, 2, 3, 4, 5, 6.5;
  write_matrix(dir / "m.bin", m, {{"family", "chebyshev"}});
  CHECK(fs::file_size(dir / "m.bin") == 6 * sizeof(double));
  CHECK(read_matrix(dir / "m.bin") == m);
  const auto side = json::parse(slurp(dir / "m.bin.json"));
  CHECK(side.at("rows") == 3);
  CHECK(side.at("meta").at("family") == "chebyshev");
}

TEST_CASE("trials.csv column layout") {
  TrialResult r;
  r.trial = 2;
  r.method = "wl1(sqrt)";
  r.error_linf = 0.5;
  r.status = "failed: a, b";
  r.wall_ms = 12.0;
  const auto csv = trials_csv({r}, false);
  CHECK(csv == "trial,method,error_linf,error_l2,odd_mass,iterations,status,wall_ms\n"
               "2,wl1(sqrt),0.5,0,0,0,failed: a; b,0\n");
  CHECK(trials_csv({r}, true).find(",12\n") != std::string::npos);
}

TEST_CASE("command-line exit codes") {
  const auto dir = scratch("cli");
  CHECK(run_cli("--version") == 0);
  CHECK(run_cli("") == 2);
  CHECK(run_cli("run -p runge-trig --set trials=1 --set grid=101 -o " + (dir / "ok").string()) == 0);
  CHECK(fs::exists(dir / "ok" / "manifest.json"));
  CHECK(run_cli("run -p runge-trig --set mm=1 -o " + (dir / "bad").string()) == 2);
  CHECK_FALSE(fs::exists(dir / "bad" / "trials.csv"));
  CHECK(run_cli("run -c " + (dir / "missing.json").string()) == 2);

  // Two iterations cannot finish a ball-constrained solve: failures are
  // recorded; strict mode turns them into exit code 3.
  const std::string starve = "run -p theorem12-trig --set trials=1 --set grid=101 --set solver.max_iter=2 "
                             "--set solver.polish_every=1000 -o ";
  CHECK(run_cli(starve + (dir / "lenient").string()) == 0);
  const auto manifest = json::parse(slurp(dir / "lenient" / "manifest.json"));
  CHECK(manifest.at("failures") == 1);
  CHECK(manifest.at("strict") == false);
  CHECK(run_cli(starve + (dir / "strict").string() + " --strict") == 3);

  CHECK(run_cli("oracle-check --set instances=5 -o " + (dir / "oracle").string()) == 0);
  CHECK(run_cli("rip --set m=30 --set s=2 -o " + (dir / "rip").string()) == 0);
  CHECK(fs::exists(dir / "rip" / "rip.json"));
  CHECK(run_cli("sample --set m=10 -o " + (dir / "sample").string()) == 0);
  CHECK(read_csv(dir / "sample" / "points.csv").size() == 11);
  CHECK(run_cli("gram --set universe={\\\"kind\\\":\\\"range_1d\\\",\\\"n\\\":5} -o " + (dir / "gram").string()) == 0);
}

TEST_CASE("default output root from the environment") {
  const auto dir = scratch("envroot");
  const std::string cmd = "WL1_OUTPUT_ROOT=" + dir.string() + " " + WL1INTERP_PATH +
                          " sample --seed 4 --set m=3 >/dev/null 2>&1";
  REQUIRE(std::system(cmd.c_str()) == 0);
  bool found = false;
  for (const auto& e : fs::directory_iterator(dir)) found = found || fs::exists(e.path() / "points.csv");
  CHECK(found);
}
