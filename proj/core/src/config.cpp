#include "polylab/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace polylab {

void to_json(nlohmann::json& j, const Diagnostic& diag) {
  j = nlohmann::json{{"field", diag.field}, {"message", diag.message}};
}

namespace {

std::string join_messages(const std::vector<Diagnostic>& diags) {
  std::string s = "invalid configuration:";
  for (const auto& d : diags) s += " " + d.field + ": " + d.message + ";";
  return s;
}

/// Field name at the head of an exception message ("environment.params.p must ...").
std::string leading_field(const std::string& message, const std::string& fallback) {
  const auto end = message.find_first_of(" :");
  const std::string head = message.substr(0, end);
  return head.rfind(fallback, 0) == 0 ? head : fallback;
}

/// Reads typed fields of one JSON object, recording a diagnostic per problem.
class Reader {
 public:
  Reader(const nlohmann::json& j, std::string prefix, std::vector<Diagnostic>& diags)
      : j_(j), prefix_(std::move(prefix)), diags_(diags) {}

  std::string path(const std::string& key) const { return prefix_.empty() ? key : prefix_ + "." + key; }
  void fail(const std::string& key, const std::string& message) { diags_.push_back({path(key), message}); }
  bool has(const std::string& key) const { return j_.contains(key); }

  void known(std::initializer_list<const char*> keys) {
    std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [k, v] : j_.items()) {
      if (!allowed.contains(k)) fail(k, "unknown field");
    }
  }

  template <class Int>
  Int integer(const std::string& key, Int fallback, long long lo, long long hi) {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_number_integer()) {
      fail(key, "must be an integer");
      return fallback;
    }
    const auto x = v.get<long long>();
    if (x < lo || x > hi) {
      fail(key, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "], got " + std::to_string(x));
      return fallback;
    }
    return static_cast<Int>(x);
  }

  double real(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_number() || !std::isfinite(v.get<double>())) {
      fail(key, "must be a finite number");
      return fallback;
    }
    return v.get<double>();
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    if (!j_.at(key).is_boolean()) {
      fail(key, "must be true or false");
      return fallback;
    }
    return j_.at(key).get<bool>();
  }

  std::string text(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    if (!j_.at(key).is_string()) {
      fail(key, "must be a string");
      return fallback;
    }
    return j_.at(key).get<std::string>();
  }

  const nlohmann::json* array(const std::string& key) {
    if (!has(key)) return nullptr;
    if (!j_.at(key).is_array()) {
      fail(key, "must be an array");
      return nullptr;
    }
    return &j_.at(key);
  }

  const nlohmann::json* object(const std::string& key) {
    if (!has(key)) return nullptr;
    if (!j_.at(key).is_object()) {
      fail(key, "must be an object");
      return nullptr;
    }
    return &j_.at(key);
  }

 private:
  const nlohmann::json& j_;
  std::string prefix_;
  std::vector<Diagnostic>& diags_;
};

std::vector<std::int64_t> read_grid(Reader& r, const std::string& key, std::vector<std::int64_t> fallback,
                                    std::int64_t min_value) {
  const auto* a = r.array(key);
  if (!a) return fallback;
  if (a->empty()) {
    r.fail(key, "must be nonempty");
    return fallback;
  }
  std::vector<std::int64_t> out;
  for (const auto& v : *a) {
    if (!v.is_number_integer() || v.get<long long>() < min_value) {
      r.fail(key, "entries must be integers >= " + std::to_string(min_value));
      return fallback;
    }
    out.push_back(v.get<std::int64_t>());
  }
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (out[i] <= out[i - 1]) {
      r.fail(key, "must be strictly increasing");
      return fallback;
    }
  }
  return out;
}

const std::set<std::string> kGKinds{"constant", "halfSpace", "l1Ball", "sigmoid", "cosine"};
const std::set<std::string> kPhiKinds{"constant", "clampLinear", "gaussianBump", "cosine", "sigmoid"};
const std::set<std::string> kChecks{"martingale", "contraction", "fkg",       "decomposition",
                                    "survival",   "schedule",    "uniformity", "meanOne"};

const std::map<std::string, std::set<std::string>> kParams{
    {"constant", {"value"}},          {"halfSpace", {"axis", "threshold"}},
    {"l1Ball", {"radius"}},           {"sigmoid", {"axis", "center", "width"}},
    {"cosine", {"axis", "frequency"}}, {"clampLinear", {"axis", "slope", "offset"}},
    {"gaussianBump", {"scale"}}};

double param(const FunctionalSpec& spec, const std::string& name, double fallback) {
  const auto it = spec.params.find(name);
  return it == spec.params.end() ? fallback : it->second;
}

/// Checks one functional entry; `lemma_range` adds the [0, 1] requirement of the contraction inequality.
std::vector<FunctionalSpec> read_family(Reader& r, const std::string& key, const std::set<std::string>& kinds,
                                        int d, bool lemma_range) {
  std::vector<FunctionalSpec> out;
  const auto* a = r.array(key);
  if (!a) return out;
  for (std::size_t i = 0; i < a->size(); ++i) {
    const std::string at = key + "[" + std::to_string(i) + "]";
    const auto& e = (*a)[i];
    if (!e.is_object() || !e.contains("kind") || !e.at("kind").is_string()) {
      r.fail(at, "must be an object with a string field 'kind'");
      continue;
    }
    FunctionalSpec spec;
    spec.kind = e.at("kind").get<std::string>();
    if (!kinds.contains(spec.kind)) {
      r.fail(at + ".kind", "unknown functional kind '" + spec.kind + "'");
      continue;
    }
    bool ok = true;
    for (const auto& [k, v] : e.items()) {
      if (k == "kind") continue;
      if (!kParams.at(spec.kind).contains(k)) {
        r.fail(at + "." + k, "unknown parameter for kind '" + spec.kind + "'");
        ok = false;
        continue;
      }
      if (!v.is_number() || !std::isfinite(v.get<double>())) {
        r.fail(at + "." + k, "must be a finite number");
        ok = false;
        continue;
      }
      spec.params[k] = v.get<double>();
    }
    if (!ok) continue;
    if (spec.params.contains("axis")) {
      const double axis = spec.params["axis"];
      if (axis != std::floor(axis) || axis < 1 || axis > d) {
        r.fail(at + ".axis", "must be an integer in [1, d]");
        continue;
      }
    }
    if (spec.kind == "constant") {
      const double v = param(spec, "value", 1.0);
      if (!(v >= 0.0 && v <= 1.0)) {
        r.fail(at + ".value", lemma_range ? "g must take values in [0,1]: the contraction inequality is stated "
                                            "for functionals with range [0,1]"
                                          : "phi must take values in [0,1]");
        continue;
      }
    }
    if ((spec.kind == "sigmoid") && !(param(spec, "width", 1.0) > 0.0)) {
      r.fail(at + ".width", "must be positive");
      continue;
    }
    if (spec.kind == "l1Ball" && !(param(spec, "radius", 0.0) >= 0.0)) {
      r.fail(at + ".radius", "must be >= 0");
      continue;
    }
    if (spec.kind == "gaussianBump" && !(param(spec, "scale", 1.0) >= 0.0)) {
      r.fail(at + ".scale", "must be >= 0");
      continue;
    }
    out.push_back(std::move(spec));
  }
  return out;
}

RunConfig read_config(const nlohmann::json& j, std::vector<Diagnostic>& diags) {
  RunConfig c;
  if (!j.is_object()) {
    diags.push_back({"$", "configuration must be a JSON object"});
    return c;
  }
  Reader r(j, "", diags);
  r.known({"environment", "d", "nGrid", "replicas", "samplesPerReplica", "survivalThreshold", "truncation", "mGrid",
           "gFamily", "phiFamily", "events", "metrics", "verify", "threads", "outputDir", "format"});

  if (!j.contains("environment")) {
    r.fail("environment", "is required");
  } else {
    try {
      c.environment = j.at("environment").get<EnvironmentSpec>();
    } catch (const std::exception& e) {
      diags.push_back({leading_field(e.what(), "environment"), e.what()});
    }
  }
  c.d = r.integer<int>("d", c.d, 1, kMaxDim);
  c.n_grid = read_grid(r, "nGrid", c.n_grid, 1);
  c.replicas = r.integer<std::size_t>("replicas", c.replicas, 1, 100000000);
  c.samples_per_replica = r.integer<std::size_t>("samplesPerReplica", c.samples_per_replica, 1, 100000000);
  c.survival_threshold = r.real("survivalThreshold", c.survival_threshold);
  if (!(c.survival_threshold > 0.0)) r.fail("survivalThreshold", "must be positive");
  if (const auto* t = r.object("truncation")) {
    Reader tr(*t, "truncation", diags);
    tr.known({"c"});
    c.truncation_c = tr.real("c", 0.0);
    if (c.truncation_c < 0.0) tr.fail("c", "must be >= 0 (0 keeps the exact support)");
  }
  c.m_grid = read_grid(r, "mGrid", c.m_grid, 0);
  c.g_family = read_family(r, "gFamily", kGKinds, c.d, true);
  c.phi_family = read_family(r, "phiFamily", kPhiKinds, c.d, false);
  if (!r.has("gFamily")) c.g_family = default_g_family();
  if (!r.has("phiFamily")) c.phi_family = default_phi_family();

  if (const auto* ev = r.array("events")) {
    for (std::size_t i = 0; i < ev->size(); ++i) {
      const std::string at = "events[" + std::to_string(i) + "]";
      const auto& e = (*ev)[i];
      if (!e.is_object() || !e.contains("steps") || !e.at("steps").is_array() || e.at("steps").empty()) {
        r.fail(at, "must be an object with a nonempty array 'steps'");
        continue;
      }
      std::vector<int> steps;
      bool ok = true;
      for (const auto& s : e.at("steps")) {
        try {
          if (!s.is_string()) throw std::invalid_argument("step must be a string such as \"+e1\"");
          steps.push_back(parse_step(s.get<std::string>(), c.d));
        } catch (const std::exception& ex) {
          r.fail(at + ".steps", ex.what());
          ok = false;
          break;
        }
      }
      if (ok) c.events.push_back(std::move(steps));
    }
  } else {
    c.events = {{0}};
  }

  if (const auto* m = r.object("metrics")) {
    Reader mr(*m, "metrics", diags);
    mr.known({"tGrid", "jitter", "paths", "testFunctions"});
    if (const auto* tg = mr.array("tGrid")) {
      c.metrics.t_grid.clear();
      for (const auto& t : *tg) {
        if (!t.is_number() || !(t.get<double>() > 0.0 && t.get<double>() <= 1.0)) {
          mr.fail("tGrid", "entries must lie in (0, 1]");
          c.metrics.t_grid = MetricsSettings{}.t_grid;
          break;
        }
        c.metrics.t_grid.push_back(t.get<double>());
      }
      if (tg->empty()) mr.fail("tGrid", "must be nonempty");
    }
    c.metrics.jitter = mr.boolean("jitter", c.metrics.jitter);
    c.metrics.paths = mr.boolean("paths", c.metrics.paths);
    c.metrics.test_functions = mr.integer<std::size_t>("testFunctions", c.metrics.test_functions, 1, 100000);
  }

  if (const auto* v = r.object("verify")) {
    Reader vr(*v, "verify", diags);
    vr.known({"checks", "contractionM", "contractionN", "tinyDim", "tinyHorizon", "tinyM", "tinyLaw",
              "decompositionInstances", "exhaustiveTolerance", "decompositionTolerance", "seMultiplier"});
    auto& s = c.verify;
    if (const auto* ch = vr.array("checks")) {
      s.checks.clear();
      for (const auto& x : *ch) {
        if (!x.is_string() || !kChecks.contains(x.get<std::string>())) {
          vr.fail("checks", "unknown check " + x.dump());
          continue;
        }
        s.checks.push_back(x.get<std::string>());
      }
    }
    s.contraction_m = vr.integer<std::int64_t>("contractionM", s.contraction_m, 0, 100000);
    s.contraction_n = vr.integer<std::int64_t>("contractionN", s.contraction_n, 1, 100000);
    if (s.contraction_m > s.contraction_n) vr.fail("contractionM", "must not exceed contractionN");
    s.tiny_dim = vr.integer<int>("tinyDim", s.tiny_dim, 1, kMaxDim);
    s.tiny_horizon = vr.integer<std::int64_t>("tinyHorizon", s.tiny_horizon, 1, 24);
    s.tiny_m = vr.integer<std::int64_t>("tinyM", s.tiny_m, 0, 24);
    if (s.tiny_m >= s.tiny_horizon) vr.fail("tinyM", "must be smaller than tinyHorizon");
    if (const auto* tl = vr.object("tinyLaw")) {
      Reader lr(*tl, "verify.tinyLaw", diags);
      lr.known({"a", "b", "p"});
      TwoPointLaw law{lr.real("a", s.tiny_law.low), lr.real("b", s.tiny_law.high), lr.real("p", s.tiny_law.p_low)};
      try {
        validate_law(law);
        s.tiny_law = law;
      } catch (const std::exception& e) {
        diags.push_back({"verify.tinyLaw", e.what()});
      }
    }
    s.decomposition_instances =
        vr.integer<std::size_t>("decompositionInstances", s.decomposition_instances, 0, 100000);
    s.exhaustive_tolerance = vr.real("exhaustiveTolerance", s.exhaustive_tolerance);
    s.decomposition_tolerance = vr.real("decompositionTolerance", s.decomposition_tolerance);
    s.se_multiplier = vr.real("seMultiplier", s.se_multiplier);
    if (s.exhaustive_tolerance < 0.0) vr.fail("exhaustiveTolerance", "must be >= 0");
    if (s.decomposition_tolerance < 0.0) vr.fail("decompositionTolerance", "must be >= 0");
    if (s.se_multiplier < 0.0) vr.fail("seMultiplier", "must be >= 0");
  }

  c.threads = r.integer<int>("threads", c.threads, 1, 1024);
  c.output_dir = r.text("outputDir", c.output_dir);
  c.format = r.text("format", c.format);
  if (c.format != "json" && c.format != "csv") r.fail("format", "must be \"json\" or \"csv\"");
  return c;
}

nlohmann::json family_json(const std::vector<FunctionalSpec>& fam) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& f : fam) {
    nlohmann::json e{{"kind", f.kind}};
    for (const auto& [k, v] : f.params) e[k] = v;
    a.push_back(e);
  }
  return a;
}

}  // namespace

ConfigError::ConfigError(std::vector<Diagnostic> diagnostics)
    : std::invalid_argument(join_messages(diagnostics)), diagnostics_(std::move(diagnostics)) {}

std::vector<Diagnostic> validate_config(const nlohmann::json& j) {
  std::vector<Diagnostic> diags;
  read_config(j, diags);
  return diags;
}

RunConfig parse_config(const nlohmann::json& j) {
  std::vector<Diagnostic> diags;
  RunConfig c = read_config(j, diags);
  if (!diags.empty()) throw ConfigError(std::move(diags));
  return c;
}

nlohmann::json config_to_json(const RunConfig& c) {
  nlohmann::json events = nlohmann::json::array();
  for (const auto& steps : c.events) {
    nlohmann::json s = nlohmann::json::array();
    for (int dir : steps) s.push_back(step_name(dir));
    events.push_back({{"steps", s}});
  }
  const auto& v = c.verify;
  return nlohmann::json{
      {"environment", c.environment},
      {"d", c.d},
      {"nGrid", c.n_grid},
      {"replicas", c.replicas},
      {"samplesPerReplica", c.samples_per_replica},
      {"survivalThreshold", c.survival_threshold},
      {"truncation", {{"c", c.truncation_c}}},
      {"mGrid", c.m_grid},
      {"gFamily", family_json(c.g_family)},
      {"phiFamily", family_json(c.phi_family)},
      {"events", events},
      {"metrics",
       {{"tGrid", c.metrics.t_grid},
        {"jitter", c.metrics.jitter},
        {"paths", c.metrics.paths},
        {"testFunctions", c.metrics.test_functions}}},
      {"verify",
       {{"checks", v.checks},
        {"contractionM", v.contraction_m},
        {"contractionN", v.contraction_n},
        {"tinyDim", v.tiny_dim},
        {"tinyHorizon", v.tiny_horizon},
        {"tinyM", v.tiny_m},
        {"tinyLaw", {{"a", v.tiny_law.low}, {"b", v.tiny_law.high}, {"p", v.tiny_law.p_low}}},
        {"decompositionInstances", v.decomposition_instances},
        {"exhaustiveTolerance", v.exhaustive_tolerance},
        {"decompositionTolerance", v.decomposition_tolerance},
        {"seMultiplier", v.se_multiplier}}},
      {"threads", c.threads},
      {"outputDir", c.output_dir},
      {"format", c.format}};
}

int parse_step(const std::string& name, int d) {
  if (name.size() < 3 || (name[0] != '+' && name[0] != '-') || name[1] != 'e') {
    throw std::invalid_argument("step '" + name + "' must look like +e1 or -e2");
  }
  int axis = 0;
  try {
    std::size_t used = 0;
    axis = std::stoi(name.substr(2), &used);
    if (used != name.size() - 2) throw std::invalid_argument("trailing characters");
  } catch (const std::exception&) {
    throw std::invalid_argument("step '" + name + "' must look like +e1 or -e2");
  }
  if (axis < 1 || axis > d) throw std::invalid_argument("step '" + name + "' names an axis outside [1, d]");
  return 2 * (axis - 1) + (name[0] == '+' ? 0 : 1);
}

std::string step_name(int dir) { return (dir % 2 == 0 ? "+e" : "-e") + std::to_string(dir / 2 + 1); }

EndpointFunctional make_endpoint_functional(const FunctionalSpec& spec, int d) {
  check_dimension(d);
  const int axis = static_cast<int>(param(spec, "axis", 1.0)) - 1;
  if (axis < 0 || axis >= d) throw std::invalid_argument("functional axis outside [1, d]");
  if (spec.kind == "constant") return EndpointFunctional::constant(param(spec, "value", 1.0));
  if (spec.kind == "halfSpace") return EndpointFunctional::half_space(axis, param(spec, "threshold", 0.0));
  if (spec.kind == "l1Ball") return EndpointFunctional::l1_ball(static_cast<std::int64_t>(param(spec, "radius", 0.0)));
  if (spec.kind == "sigmoid") {
    return EndpointFunctional::sigmoid(axis, param(spec, "center", 0.0), param(spec, "width", 1.0));
  }
  if (spec.kind == "cosine") return EndpointFunctional::cosine(axis, param(spec, "frequency", 1.0));
  throw std::invalid_argument("unknown endpoint functional kind '" + spec.kind + "'");
}

BrownianFunctional make_brownian_functional(const FunctionalSpec& spec, int d) {
  check_dimension(d);
  const int axis = static_cast<int>(param(spec, "axis", 1.0)) - 1;
  if (axis < 0 || axis >= d) throw std::invalid_argument("functional axis outside [1, d]");
  const auto ax = static_cast<std::size_t>(axis);
  if (spec.kind == "constant") {
    const double v = param(spec, "value", 1.0);
    return {"const", [v](std::span<const double>) { return v; }};
  }
  if (spec.kind == "clampLinear") {
    const double slope = param(spec, "slope", 0.5);
    const double offset = param(spec, "offset", 0.5);
    return {"clampLinear(x" + std::to_string(axis + 1) + ")",
            [=](std::span<const double> t) { return std::clamp(offset + slope * t[ax], 0.0, 1.0); }};
  }
  if (spec.kind == "gaussianBump") {
    const double scale = param(spec, "scale", 1.0);
    return {"gaussianBump", [scale](std::span<const double> t) {
              double r2 = 0.0;
              for (double x : t) r2 += x * x;
              return std::exp(-scale * r2);
            }};
  }
  if (spec.kind == "cosine") {
    const double f = param(spec, "frequency", 2.0);
    return {"cosine(x" + std::to_string(axis + 1) + ")",
            [=](std::span<const double> t) { return 0.5 * (1.0 + std::cos(f * t[ax])); }};
  }
  if (spec.kind == "sigmoid") {
    const double w = param(spec, "width", 1.0);
    const double center = param(spec, "center", 0.0);
    return {"sigmoid(x" + std::to_string(axis + 1) + ")",
            [=](std::span<const double> t) { return 1.0 / (1.0 + std::exp(-(t[ax] - center) / w)); }};
  }
  throw std::invalid_argument("unknown phi functional kind '" + spec.kind + "'");
}

std::vector<FunctionalSpec> default_g_family() {
  return {{"constant", {{"value", 1.0}}},
          {"constant", {{"value", 0.0}}},
          {"halfSpace", {{"axis", 1.0}, {"threshold", 0.0}}},
          {"l1Ball", {{"radius", 2.0}}},
          {"sigmoid", {{"axis", 1.0}, {"center", 0.0}, {"width", 2.0}}},
          {"cosine", {{"axis", 1.0}, {"frequency", 0.5}}}};
}

std::vector<FunctionalSpec> default_phi_family() {
  return {{"gaussianBump", {{"scale", 1.0}}},
          {"cosine", {{"axis", 1.0}, {"frequency", 2.0}}},
          {"sigmoid", {{"axis", 1.0}, {"center", 0.25}, {"width", 0.5}}}};
}

}  // namespace polylab
