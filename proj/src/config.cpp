#include "wl1/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "wl1/errors.hpp"

namespace wl1 {

using nlohmann::json;

namespace {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

std::string type_name(const json& j) { return j.type_name(); }

/// Strict reader over one JSON object: every key must be consumed.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_, "expected an object, got " + type_name(j_));
  }

  bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }

  const json& raw(const std::string& key) {
    used_.insert(key);
    if (!has(key)) throw ConfigError(at(key), "missing required key");
    return j_.at(key);
  }

  std::string at(const std::string& key) const { return join(path_, key); }

  void skip(const std::string& key) { used_.insert(key); }

  template <class T>
  void get(const std::string& key, T& out) {
    used_.insert(key);
    if (has(key)) out = convert<T>(j_.at(key), at(key));
  }

  template <class T>
  T require(const std::string& key) {
    return convert<T>(raw(key), at(key));
  }

  void finish() const {
    for (const auto& [key, _] : j_.items())
      if (!used_.count(key)) throw ConfigError(join(path_, key), "unknown key '" + key + "'");
  }

  template <class T>
  static T convert(const json& v, const std::string& path) {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError(path, "expected a boolean, got " + type_name(v));
      return v.get<bool>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigError(path, "expected a string, got " + type_name(v));
      return v.get<std::string>();
    } else if constexpr (std::is_same_v<T, double>) {
      if (!v.is_number()) throw ConfigError(path, "expected a number, got " + type_name(v));
      return v.get<double>();
    } else if constexpr (std::is_same_v<T, std::uint64_t> || std::is_same_v<T, std::size_t>) {
      if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0))
        throw ConfigError(path, "expected a nonnegative integer, got " + v.dump());
      return static_cast<T>(v.get<std::uint64_t>());
    } else if constexpr (std::is_same_v<T, int>) {
      if (!v.is_number_integer()) throw ConfigError(path, "expected an integer, got " + v.dump());
      const auto x = v.get<std::int64_t>();
      if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
        throw ConfigError(path, "integer out of range");
      return static_cast<int>(x);
    } else if constexpr (std::is_same_v<T, std::vector<double>> || std::is_same_v<T, std::vector<int>>) {
      if (!v.is_array()) throw ConfigError(path, "expected an array, got " + type_name(v));
      T out;
      for (std::size_t i = 0; i < v.size(); ++i)
        out.push_back(convert<typename T::value_type>(v[i], path + "[" + std::to_string(i) + "]"));
      return out;
    } else {
      static_assert(sizeof(T) == 0, "unsupported config type");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

template <class F>
auto guarded(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(path, e.what());
  }
}

void positive(const std::string& path, double v) {
  if (!(v > 0.0)) throw ConfigError(path, "must be positive");
}

// --- leaf types -------------------------------------------------------------

OrthonormalSystem system_from_json(const json& j, const std::string& path) {
  Reader r(j, path);
  OrthonormalSystem s;
  const auto family = r.require<std::string>("family");
  s.family = guarded(r.at("family"), [&] { return family_from_string(family); });
  r.get("dim", s.dim);
  r.get("spherical_c", s.spherical_c);
  r.finish();
  guarded(path, [&] { s.validate(); });
  return s;
}

json system_to_json(const OrthonormalSystem& s) {
  return {{"family", to_string(s.family)}, {"dim", s.dim}, {"spherical_c", s.spherical_c}};
}

IndexSetSpec universe_from_json(const json& j, const std::string& path) {
  Reader r(j, path);
  const auto kind = r.require<std::string>("kind");
  IndexSetSpec out;
  if (kind == "range_1d") {
    Range1d v;
    v.n = r.require<int>("n");
    if (v.n < 1) throw ConfigError(r.at("n"), "must be >= 1");
    out = v;
  } else if (kind == "tensor_box") {
    TensorBox v;
    v.dim = r.require<int>("dim");
    v.n_per_axis = r.require<int>("n_per_axis");
    if (v.dim < 1 || v.n_per_axis < 1) throw ConfigError(path, "dim and n_per_axis must be >= 1");
    out = v;
  } else if (kind == "hyperbolic_cross") {
    HyperbolicCross v;
    v.dim = r.require<int>("dim");
    v.s = r.require<double>("s");
    if (v.dim < 1) throw ConfigError(r.at("dim"), "must be >= 1");
    out = v;
  } else if (kind == "spherical_band") {
    SphericalBand v;
    v.l_max = r.require<int>("l_max");
    if (v.l_max < 0) throw ConfigError(r.at("l_max"), "must be >= 0");
    out = v;
  } else {
    throw ConfigError(r.at("kind"), "unknown universe kind '" + kind + "'");
  }
  r.finish();
  return out;
}

SamplingMeasure measure_from_json(const json& j, const std::string& path) {
  SamplingMeasure m;
  if (j.is_string()) {
    m.kind = guarded(path, [&] { return measure_kind_from_string(j.get<std::string>()); });
    return m;
  }
  Reader r(j, path);
  const auto kind = r.require<std::string>("kind");
  m.kind = guarded(r.at("kind"), [&] { return measure_kind_from_string(kind); });
  r.get("dim", m.dim);
  if (m.dim < 1) throw ConfigError(r.at("dim"), "must be >= 1");
  r.finish();
  return m;
}

json measure_to_json(const SamplingMeasure& m) { return {{"kind", to_string(m.kind)}, {"dim", m.dim}}; }

SolverOptions solver_from_json(const json& j, const std::string& path) {
  Reader r(j, path);
  SolverOptions o;
  r.get("max_iter", o.max_iter);
  r.get("tol_feas", o.tol_feas);
  r.get("tol_gap", o.tol_gap);
  r.get("support_threshold", o.support_threshold);
  r.get("polish_every", o.polish_every);
  r.finish();
  if (o.max_iter < 1) throw ConfigError(r.at("max_iter"), "must be >= 1");
  if (o.polish_every < 1) throw ConfigError(r.at("polish_every"), "must be >= 1");
  positive(r.at("tol_feas"), o.tol_feas);
  positive(r.at("tol_gap"), o.tol_gap);
  return o;
}

TargetSpec target_from_json(const json& j, const std::string& path) {
  Reader r(j, path);
  TargetSpec t;
  const auto kind = r.require<std::string>("kind");
  if (kind == "runge") {
    t.kind = TargetKind::runge;
  } else if (kind == "zero") {
    t.kind = TargetKind::zero;
  } else if (kind == "coefficients") {
    t.kind = TargetKind::coefficients;
    t.values = r.require<std::vector<double>>("values");
  } else if (kind == "power_decay") {
    t.kind = TargetKind::power_decay;
    r.get("exponent", t.exponent);
  } else {
    throw ConfigError(r.at("kind"), "unknown target '" + kind + "'");
  }
  r.finish();
  return t;
}

json target_to_json(const TargetSpec& t) {
  switch (t.kind) {
    case TargetKind::runge: return {{"kind", "runge"}};
    case TargetKind::zero: return {{"kind", "zero"}};
    case TargetKind::coefficients: return {{"kind", "coefficients"}, {"values", t.values}};
    case TargetKind::power_decay: return {{"kind", "power_decay"}, {"exponent", t.exponent}};
  }
  return {};
}

MethodKind method_kind_from_string(const std::string& name, const std::string& path) {
  for (auto k : {MethodKind::wl1, MethodKind::unweighted_l1, MethodKind::wl2, MethodKind::least_squares,
                 MethodKind::exact_inversion, MethodKind::theorem12})
    if (to_string(k) == name) return k;
  throw ConfigError(path, "unknown method '" + name + "'");
}

MethodSpec method_from_json(const json& j, const std::string& path) {
  Reader r(j, path);
  MethodSpec m;
  m.kind = method_kind_from_string(r.require<std::string>("kind"), r.at("kind"));
  switch (m.kind) {
    case MethodKind::wl1:
    case MethodKind::wl2:
      m.weights = weights_from_json(r.raw("weights"), r.at("weights"));
      break;
    case MethodKind::theorem12:
      m.weights = weights_from_json(r.raw("weights"), r.at("weights"));
      m.s = r.require<double>("s");
      positive(r.at("s"), m.s);
      break;
    case MethodKind::least_squares:
      m.d = r.require<int>("d");
      if (m.d < 1) throw ConfigError(r.at("d"), "must be >= 1");
      break;
    default:
      break;
  }
  m.weights_spec = weights_to_json(m.weights);
  r.finish();
  return m;
}

json method_to_json(const MethodSpec& m) {
  json j{{"kind", to_string(m.kind)}};
  switch (m.kind) {
    case MethodKind::wl1:
    case MethodKind::wl2: j["weights"] = weights_to_json(m.weights); break;
    case MethodKind::theorem12:
      j["weights"] = weights_to_json(m.weights);
      j["s"] = m.s;
      break;
    case MethodKind::least_squares: j["d"] = m.d; break;
    default: break;
  }
  return j;
}

MatrixSpec matrix_from(Reader& r) {
  MatrixSpec m;
  if (r.has("system")) m.system = system_from_json(r.raw("system"), r.at("system"));
  else r.skip("system");
  if (r.has("universe")) m.universe = universe_from_json(r.raw("universe"), r.at("universe"));
  else r.skip("universe");
  if (r.has("measure")) m.measure = measure_from_json(r.raw("measure"), r.at("measure"));
  else r.skip("measure");
  r.get("m", m.m);
  r.get("seed", m.seed);
  r.get("normalized", m.normalized);
  if (m.m < 1) throw ConfigError(r.at("m"), "must be >= 1");
  return m;
}

void matrix_to(json& j, const MatrixSpec& m) {
  j["system"] = system_to_json(m.system);
  j["universe"] = universe_to_json(m.universe);
  j["measure"] = measure_to_json(m.sampling_measure());
  j["m"] = m.m;
  j["seed"] = m.seed;
  j["normalized"] = m.normalized;
}

// --- presets ------------------------------------------------------------------

json preset_json(const std::string& name) {
  if (name == "runge-trig" || name == "runge-legendre" || name == "theorem12-trig") {
    Config c;
    c.experiment = "interpolation";
    c.interpolation = preset_config(name);
    c.preset = name;
    return to_json(c);
  }
  if (name == "phase-trig") {
    Config c;
    c.experiment = "phase_diagram";
    c.preset = name;
    return to_json(c);
  }
  if (name == "spherical-demo") {
    Config c;
    c.experiment = "spherical_demo";
    c.preset = name;
    return to_json(c);
  }
  throw ConfigError("preset", "unknown preset '" + name + "'");
}

// --- per-experiment parsers -------------------------------------------------

void parse_interpolation(Reader& r, ExperimentConfig& c) {
  if (r.has("system")) c.system = system_from_json(r.raw("system"), r.at("system"));
  else r.skip("system");
  if (r.has("universe")) c.universe = universe_from_json(r.raw("universe"), r.at("universe"));
  else r.skip("universe");
  if (r.has("measure")) c.measure = measure_from_json(r.raw("measure"), r.at("measure"));
  else r.skip("measure");
  r.get("m", c.m);
  r.get("trials", c.trials);
  r.get("seed", c.seed);
  if (r.has("target")) c.target = target_from_json(r.raw("target"), r.at("target"));
  else r.skip("target");
  const json& methods = r.raw("methods");
  if (!methods.is_array() || methods.empty()) throw ConfigError(r.at("methods"), "expected a nonempty array");
  c.methods.clear();
  for (std::size_t i = 0; i < methods.size(); ++i)
    c.methods.push_back(method_from_json(methods[i], r.at("methods") + "[" + std::to_string(i) + "]"));
  r.get("grid", c.grid);
  r.get("l2_nodes", c.l2_nodes);
  if (r.has("solver")) c.solver = solver_from_json(r.raw("solver"), r.at("solver"));
  else r.skip("solver");
  r.get("record_timing", c.record_timing);
  if (c.m < 1) throw ConfigError(r.at("m"), "must be >= 1");
  if (c.trials < 0) throw ConfigError(r.at("trials"), "must be >= 0");
  if (c.grid < 2) throw ConfigError(r.at("grid"), "must be >= 2");
  if (c.l2_nodes < 1) throw ConfigError(r.at("l2_nodes"), "must be >= 1");
  if (c.system.spherical()) throw ConfigError(r.at("system"), "interpolation runs on interval systems");
  if (c.sampling_measure().point_dim() != c.system.point_dim())
    throw ConfigError(r.at("measure"), "measure dimension differs from the system's");
}

void parse_phase(Reader& r, PhaseConfig& c) {
  if (r.has("system")) c.system = system_from_json(r.raw("system"), r.at("system"));
  else r.skip("system");
  if (r.has("universe")) c.universe = universe_from_json(r.raw("universe"), r.at("universe"));
  else r.skip("universe");
  if (r.has("weights")) c.weights = weights_from_json(r.raw("weights"), r.at("weights"));
  else r.skip("weights");
  c.weights_spec = weights_to_json(c.weights);
  r.get("s_values", c.s_values);
  r.get("m_values", c.m_values);
  r.get("trials", c.trials);
  r.get("seed", c.seed);
  r.get("success_tol", c.success_tol);
  if (r.has("solver")) c.solver = solver_from_json(r.raw("solver"), r.at("solver"));
  else r.skip("solver");
  if (c.s_values.empty() || c.m_values.empty()) throw ConfigError(r.at("m_values"), "grids must be nonempty");
  for (int m : c.m_values)
    if (m < 1) throw ConfigError(r.at("m_values"), "entries must be >= 1");
  for (double s : c.s_values) positive(r.at("s_values"), s);
  if (c.trials < 1) throw ConfigError(r.at("trials"), "must be >= 1");
  positive(r.at("success_tol"), c.success_tol);
}

void parse_spherical(Reader& r, SphericalDemoConfig& c) {
  r.get("s", c.s);
  r.get("l_cap", c.l_cap);
  r.get("m", c.m);
  r.get("active", c.active);
  r.get("trials", c.trials);
  r.get("seed", c.seed);
  r.get("spherical_c", c.spherical_c);
  r.get("zero_target", c.zero_target);
  if (r.has("solver")) c.solver = solver_from_json(r.raw("solver"), r.at("solver"));
  else r.skip("solver");
  if (!(c.s >= 1.0)) throw ConfigError(r.at("s"), "must be >= 1");
  if (c.l_cap < 0 || c.m < 1 || c.active < 0 || c.trials < 0)
    throw ConfigError(r.at("m"), "l_cap, active, trials must be >= 0 and m >= 1");
}

}  // namespace

// --- public -------------------------------------------------------------------

json weights_to_json(const WeightScheme& w) {
  using K = WeightScheme::Kind;
  switch (w.kind()) {
    case K::linear: return "linear";
    case K::sqrt: return "sqrt";
    case K::hyperbolic: return "hyperbolic";
    case K::legendre_dominating: return "legendre_dominating";
    case K::constant:
      return w.parameter() == 1.0 ? json("constant") : json{{"kind", "constant"}, {"c", w.parameter()}};
    case K::power: return {{"kind", "power"}, {"alpha", w.parameter()}};
    case K::sobolev: return {{"kind", "sobolev"}, {"r", w.parameter()}};
    case K::mixed: return {{"kind", "mixed"}, {"r", w.parameter()}};
    case K::spherical: return {{"kind", "spherical"}, {"c", w.parameter()}};
    case K::table:
    case K::derived: break;
  }
  throw UsageError("weight scheme " + w.describe() + " has no config form");
}

WeightScheme weights_from_json(const json& j, const std::string& path) {
  if (j.is_string()) {
    const auto name = j.get<std::string>();
    if (name == "constant") return WeightScheme::constant();
    if (name == "linear") return WeightScheme::linear();
    if (name == "sqrt") return WeightScheme::sqrt();
    if (name == "hyperbolic") return WeightScheme::hyperbolic();
    if (name == "legendre_dominating") return WeightScheme::legendre_dominating();
    if (name == "spherical") return WeightScheme::spherical(kSphericalPreconditionedC);
    throw ConfigError(path, "unknown weight scheme '" + name + "'");
  }
  Reader r(j, path);
  const auto kind = r.require<std::string>("kind");
  WeightScheme w;
  if (kind == "constant") {
    double c = 1.0;
    r.get("c", c);
    w = WeightScheme::constant(c);
  } else if (kind == "power") {
    w = WeightScheme::power(r.require<double>("alpha"));
  } else if (kind == "sobolev") {
    w = WeightScheme::sobolev(r.require<double>("r"));
  } else if (kind == "mixed") {
    w = WeightScheme::mixed(r.require<double>("r"));
  } else if (kind == "spherical") {
    double c = kSphericalPreconditionedC;
    r.get("c", c);
    w = WeightScheme::spherical(c);
  } else if (kind == "linear" || kind == "sqrt" || kind == "hyperbolic" || kind == "legendre_dominating") {
    w = weights_from_json(kind, path);
  } else {
    throw ConfigError(r.at("kind"), "unknown weight scheme '" + kind + "'");
  }
  r.finish();
  return w;
}

json universe_to_json(const IndexSetSpec& spec) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Range1d>) return {{"kind", "range_1d"}, {"n", v.n}};
        else if constexpr (std::is_same_v<T, TensorBox>)
          return {{"kind", "tensor_box"}, {"dim", v.dim}, {"n_per_axis", v.n_per_axis}};
        else if constexpr (std::is_same_v<T, HyperbolicCross>)
          return {{"kind", "hyperbolic_cross"}, {"dim", v.dim}, {"s", v.s}};
        else return {{"kind", "spherical_band"}, {"l_max", v.l_max}};
      },
      spec);
}

const std::vector<std::string>& experiment_kinds() {
  static const std::vector<std::string> k{"interpolation", "phase_diagram", "spherical_demo", "rip",
                                          "nsp",           "gram",          "sample",         "oracle_check"};
  return k;
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> p{"runge-trig", "runge-legendre", "theorem12-trig", "phase-trig",
                                          "spherical-demo"};
  return p;
}

std::uint64_t Config::seed() const {
  if (experiment == "interpolation") return interpolation.seed;
  if (experiment == "phase_diagram") return phase.seed;
  if (experiment == "spherical_demo") return spherical.seed;
  if (experiment == "rip") return rip.matrix.seed;
  if (experiment == "nsp") return nsp.matrix.seed;
  if (experiment == "gram")
    if (auto* mc = std::get_if<MonteCarloQuadrature>(&gram.quadrature)) return mc->seed;
  if (experiment == "sample") return sample.seed;
  if (experiment == "oracle_check") return oracle.seed;
  return 0;
}

void Config::set_seed(std::uint64_t s) {
  interpolation.seed = phase.seed = spherical.seed = rip.matrix.seed = nsp.matrix.seed = sample.seed = oracle.seed = s;
  if (auto* mc = std::get_if<MonteCarloQuadrature>(&gram.quadrature)) mc->seed = s;
}

void apply_override(json& doc, const std::string& dotted, const json& value) {
  if (dotted.empty()) throw ConfigError("overrides", "empty override key");
  json* node = &doc;
  std::string path;
  std::size_t start = 0;
  while (true) {
    const auto dot = dotted.find('.', start);
    const std::string key = dotted.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) throw ConfigError("overrides." + dotted, "empty path segment");
    path = join(path, key);
    const bool last = dot == std::string::npos;
    if (node->is_array()) {
      std::size_t idx = 0;
      try {
        std::size_t used = 0;
        idx = std::stoul(key, &used);
        if (used != key.size()) throw std::invalid_argument(key);
      } catch (const std::exception&) {
        throw ConfigError("overrides." + dotted, "'" + key + "' is not an array index");
      }
      if (idx >= node->size()) throw ConfigError("overrides." + dotted, "array index out of range");
      node = &(*node)[idx];
    } else {
      if (node->is_null()) *node = json::object();
      if (!node->is_object()) throw ConfigError("overrides." + dotted, "'" + path + "' is not an object");
      node = &(*node)[key];
    }
    if (last) break;
    start = dot + 1;
  }
  *node = value;
}

std::pair<std::string, json> parse_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("overrides", "expected key=value, got '" + assignment + "'");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  return {key, value};
}

Config parse_config(const json& input, const std::string& default_experiment) {
  if (!input.is_object()) throw ConfigError("", "config must be a JSON object");
  json doc = json::object();
  if (input.contains("preset")) {
    const json& p = input.at("preset");
    if (!p.is_string()) throw ConfigError("preset", "expected a string, got " + type_name(p));
    doc = preset_json(p.get<std::string>());
  }
  for (const auto& [key, value] : input.items())
    if (key != "overrides") doc[key] = value;
  if (input.contains("overrides")) {
    const json& ov = input.at("overrides");
    if (!ov.is_object()) throw ConfigError("overrides", "expected an object");
    for (const auto& [key, value] : ov.items()) apply_override(doc, key, value);
  }

  Config c;
  Reader r(doc, "");
  r.get("experiment", c.experiment);
  if (!doc.contains("experiment")) c.experiment = default_experiment;
  r.get("preset", c.preset);
  if (std::find(experiment_kinds().begin(), experiment_kinds().end(), c.experiment) == experiment_kinds().end())
    throw ConfigError("experiment", "unknown experiment '" + c.experiment + "'");

  if (c.experiment == "interpolation") {
    parse_interpolation(r, c.interpolation);
  } else if (c.experiment == "phase_diagram") {
    parse_phase(r, c.phase);
  } else if (c.experiment == "spherical_demo") {
    parse_spherical(r, c.spherical);
  } else if (c.experiment == "rip") {
    c.rip.matrix = matrix_from(r);
    if (r.has("weights")) c.rip.weights = weights_from_json(r.raw("weights"), r.at("weights"));
    else r.skip("weights");
    r.get("s", c.rip.s);
    std::string mode = "exhaustive";
    r.get("mode", mode);
    if (mode != "exhaustive" && mode != "sampled") throw ConfigError(r.at("mode"), "expected exhaustive or sampled");
    c.rip.sampled = mode == "sampled";
    r.get("cap", c.rip.cap);
    r.get("n_supports", c.rip.n_supports);
    positive(r.at("s"), c.rip.s);
  } else if (c.experiment == "nsp") {
    c.nsp.matrix = matrix_from(r);
    if (r.has("weights")) c.nsp.weights = weights_from_json(r.raw("weights"), r.at("weights"));
    else r.skip("weights");
    r.get("s", c.nsp.s);
    if (r.has("delta")) c.nsp.delta = r.require<double>("delta");
    else r.skip("delta");
    r.get("trials", c.nsp.trials);
    std::string mode = "exhaustive";
    r.get("support_mode", mode);
    if (mode != "exhaustive" && mode != "quasi_best")
      throw ConfigError(r.at("support_mode"), "expected exhaustive or quasi_best");
    c.nsp.mode = mode == "exhaustive" ? SupportMode::exhaustive : SupportMode::quasi_best;
    positive(r.at("s"), c.nsp.s);
  } else if (c.experiment == "gram") {
    if (r.has("system")) c.gram.system = system_from_json(r.raw("system"), r.at("system"));
    else r.skip("system");
    if (r.has("universe")) c.gram.universe = universe_from_json(r.raw("universe"), r.at("universe"));
    else r.skip("universe");
    std::uint64_t seed = 0;
    r.get("seed", seed);
    if (r.has("quadrature")) {
      Reader q(r.raw("quadrature"), r.at("quadrature"));
      const auto kind = q.require<std::string>("kind");
      if (kind == "gauss") {
        GaussQuadrature g;
        q.get("n", g.n);
        if (g.n < 1) throw ConfigError(q.at("n"), "must be >= 1");
        c.gram.quadrature = g;
      } else if (kind == "monte_carlo") {
        MonteCarloQuadrature mc;
        mc.seed = seed;
        q.get("n", mc.n);
        if (mc.n < 1) throw ConfigError(q.at("n"), "must be >= 1");
        c.gram.quadrature = mc;
      } else {
        throw ConfigError(q.at("kind"), "expected gauss or monte_carlo");
      }
      q.finish();
    } else {
      r.skip("quadrature");
    }
  } else if (c.experiment == "sample") {
    if (r.has("measure")) c.sample.measure = measure_from_json(r.raw("measure"), r.at("measure"));
    else r.skip("measure");
    r.get("m", c.sample.m);
    r.get("seed", c.sample.seed);
    if (c.sample.m < 1) throw ConfigError(r.at("m"), "must be >= 1");
  } else if (c.experiment == "oracle_check") {
    auto& o = c.oracle;
    r.get("instances", o.instances);
    r.get("m_max", o.m_max);
    r.get("n_max", o.n_max);
    r.get("w_min", o.w_min);
    r.get("w_max", o.w_max);
    r.get("tol", o.tol);
    r.get("seed", o.seed);
    if (r.has("solver")) o.solver = solver_from_json(r.raw("solver"), r.at("solver"));
    else r.skip("solver");
    if (o.instances < 0) throw ConfigError(r.at("instances"), "must be >= 0");
    if (o.m_max < 1 || o.m_max > 6) throw ConfigError(r.at("m_max"), "must lie in [1, 6]");
    if (o.n_max < 2 || o.n_max > 10) throw ConfigError(r.at("n_max"), "must lie in [2, 10]");
    if (!(o.w_min >= 1.0) || !(o.w_max >= o.w_min)) throw ConfigError(r.at("w_min"), "need 1 <= w_min <= w_max");
    positive(r.at("tol"), o.tol);
  }
  r.finish();
  return c;
}

Config load_config(const std::filesystem::path& path, const std::string& default_experiment) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  json doc = json::parse(buffer.str(), nullptr, false);
  if (doc.is_discarded()) throw ConfigError("", "malformed JSON in " + path.string());
  return parse_config(doc, default_experiment);
}

json to_json(const Config& c) {
  json j{{"experiment", c.experiment}};
  if (!c.preset.empty()) j["preset"] = c.preset;
  if (c.experiment == "interpolation") {
    const auto& e = c.interpolation;
    j["system"] = system_to_json(e.system);
    j["universe"] = universe_to_json(e.universe);
    j["measure"] = measure_to_json(e.sampling_measure());
    j["m"] = e.m;
    j["trials"] = e.trials;
    j["seed"] = e.seed;
    j["target"] = target_to_json(e.target);
    j["methods"] = json::array();
    for (const auto& m : e.methods) j["methods"].push_back(method_to_json(m));
    j["grid"] = e.grid;
    j["l2_nodes"] = e.l2_nodes;
    j["solver"] = to_json(e.solver);
    j["record_timing"] = e.record_timing;
  } else if (c.experiment == "phase_diagram") {
    const auto& p = c.phase;
    j["system"] = system_to_json(p.system);
    j["universe"] = universe_to_json(p.universe);
    j["weights"] = weights_to_json(p.weights);
    j["s_values"] = p.s_values;
    j["m_values"] = p.m_values;
    j["trials"] = p.trials;
    j["seed"] = p.seed;
    j["success_tol"] = p.success_tol;
    j["solver"] = to_json(p.solver);
  } else if (c.experiment == "spherical_demo") {
    const auto& s = c.spherical;
    j["s"] = s.s;
    j["l_cap"] = s.l_cap;
    j["m"] = s.m;
    j["active"] = s.active;
    j["trials"] = s.trials;
    j["seed"] = s.seed;
    j["spherical_c"] = s.spherical_c;
    j["zero_target"] = s.zero_target;
    j["solver"] = to_json(s.solver);
  } else if (c.experiment == "rip") {
    matrix_to(j, c.rip.matrix);
    j["weights"] = weights_to_json(c.rip.weights);
    j["s"] = c.rip.s;
    j["mode"] = c.rip.sampled ? "sampled" : "exhaustive";
    j["cap"] = c.rip.cap;
    j["n_supports"] = c.rip.n_supports;
  } else if (c.experiment == "nsp") {
    matrix_to(j, c.nsp.matrix);
    j["weights"] = weights_to_json(c.nsp.weights);
    j["s"] = c.nsp.s;
    if (c.nsp.delta) j["delta"] = *c.nsp.delta;
    j["trials"] = c.nsp.trials;
    j["support_mode"] = c.nsp.mode == SupportMode::exhaustive ? "exhaustive" : "quasi_best";
  } else if (c.experiment == "gram") {
    j["system"] = system_to_json(c.gram.system);
    j["universe"] = universe_to_json(c.gram.universe);
    if (const auto* g = std::get_if<GaussQuadrature>(&c.gram.quadrature)) {
      j["quadrature"] = {{"kind", "gauss"}, {"n", g->n}};
      j["seed"] = 0;
    } else {
      const auto& mc = std::get<MonteCarloQuadrature>(c.gram.quadrature);
      j["quadrature"] = {{"kind", "monte_carlo"}, {"n", mc.n}};
      j["seed"] = mc.seed;
    }
  } else if (c.experiment == "sample") {
    j["measure"] = measure_to_json(c.sample.measure);
    j["m"] = c.sample.m;
    j["seed"] = c.sample.seed;
  } else if (c.experiment == "oracle_check") {
    const auto& o = c.oracle;
    j["instances"] = o.instances;
    j["m_max"] = o.m_max;
    j["n_max"] = o.n_max;
    j["w_min"] = o.w_min;
    j["w_max"] = o.w_max;
    j["tol"] = o.tol;
    j["seed"] = o.seed;
    j["solver"] = to_json(o.solver);
  }
  return j;
}

}  // namespace wl1
