#include "hgas/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <json.hpp>
#include <map>
#include <set>

#include "hgas/error.hpp"
#include "hgas/io.hpp"

namespace hgas {
namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& msg) { throw Error(Errc::config, msg); }

/// Reads the keys of one JSON object and rejects anything left unread.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(where("") + " must be an object");
  }
  ~Reader() = default;

  bool has(const std::string& k) {
    seen_.insert(k);
    return j_.contains(k) && !j_.at(k).is_null();
  }
  const json& at(const std::string& k) {
    if (!has(k)) fail("missing key " + where(k));
    return j_.at(k);
  }
  template <class T>
  T get(const std::string& k) {
    const json& v = at(k);
    try {
      if constexpr (std::is_same_v<T, std::size_t> || std::is_same_v<T, std::uint64_t> || std::is_same_v<T, int>) {
        if (!v.is_number_integer() && !v.is_number_unsigned()) fail(where(k) + " must be an integer");
        if constexpr (!std::is_same_v<T, int>)
          if (v.is_number_integer() && v.get<long long>() < 0) fail(where(k) + " must be non-negative");
      } else if constexpr (std::is_same_v<T, double>) {
        if (!v.is_number()) fail(where(k) + " must be a number");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) fail(where(k) + " must be a string");
      } else if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) fail(where(k) + " must be a boolean");
      }
      return v.get<T>();
    } catch (const nlohmann::json::exception&) {
      fail(where(k) + " has the wrong type");
    }
  }
  template <class T>
  void opt(const std::string& k, T& out) {
    if (has(k)) out = get<T>(k);
  }
  template <class T>
  void opt_list(const std::string& k, std::vector<T>& out) {
    if (!has(k)) return;
    const json& v = j_.at(k);
    if (!v.is_array()) fail(where(k) + " must be an array");
    out.clear();
    for (const auto& e : v) {
      if constexpr (std::is_same_v<T, double>) {
        if (!e.is_number()) fail(where(k) + " must hold numbers");
      } else if (!e.is_string()) {
        fail(where(k) + " must hold strings");
      }
      out.push_back(e.get<T>());
    }
  }
  Reader child(const std::string& k) { return Reader(at(k), where(k)); }
  std::string where(const std::string& k) const { return path_.empty() ? k : (k.empty() ? path_ : path_ + "." + k); }
  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) fail("unknown key " + where(it.key()));
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void one_of(const std::string& what, const std::string& v, std::initializer_list<const char*> allowed) {
  for (const char* a : allowed)
    if (v == a) return;
  std::string list;
  for (const char* a : allowed) list += std::string(list.empty() ? "" : ", ") + a;
  fail(what + " must be one of {" + list + "}, got '" + v + "'");
}

GasConfig parse_gas(Reader r) {
  GasConfig g;
  g.dimension = r.get<int>("dimension");
  if (r.has("kernel")) {
    auto k = r.child("kernel");
    g.kernel = k.get<std::string>("type");
    one_of(k.where("type"), g.kernel, {"coulomb", "riesz"});
    if (g.kernel == "riesz") g.eta = k.get<double>("eta");
    k.finish();
  }
  if (r.has("confinement")) {
    auto c = r.child("confinement");
    g.confinement = c.get<std::string>("type");
    one_of(c.where("type"), g.confinement, {"quadratic", "quartic_minus_quadratic", "coordinate_square"});
    if (g.confinement == "coordinate_square") g.axis = c.get<int>("axis");
    c.finish();
  }
  {
    auto w = r.child("weight");
    g.weight = w.get<std::string>("type");
    one_of(w.where("type"), g.weight, {"constant", "linear", "inverse_sqrt", "inverse", "sine_offset", "power"});
    if (g.weight == "constant") {
      g.weight_parameter = 1;
      w.opt("parameter", g.weight_parameter);
    } else if (g.weight == "power") {
      g.weight_parameter = w.get<double>("parameter");
    }
    w.finish();
  }
  {
    auto c = r.child("charges");
    g.charges = c.get<std::string>("type");
    one_of(c.where("type"), g.charges, {"atomic", "uniform", "tabulated", "csv"});
    if (g.charges == "uniform") {
      g.charge_min = c.get<double>("min");
      g.charge_max = c.get<double>("max");
    } else if (g.charges == "atomic" || g.charges == "tabulated") {
      const std::string second = g.charges == "atomic" ? "weights" : "density";
      if (!c.has("values")) fail("missing key " + c.where("values"));
      if (!c.has(second)) fail("missing key " + c.where(second));
      c.opt_list("values", g.charge_values);
      c.opt_list(second, g.charge_weights);
      if (g.charge_values.size() != g.charge_weights.size())
        fail(c.where("values") + " and " + c.where(second) + " differ in length");
    } else {
      g.charge_file = c.get<std::string>("path");
    }
    c.finish();
  }
  if (r.has("manifold")) {
    g.manifold = r.get<std::string>("manifold");
    one_of(r.where("manifold"), g.manifold, {"sphere", "torus"});
  }
  r.finish();
  return g;
}

json gas_json(const GasConfig& g) {
  json j;
  j["dimension"] = g.dimension;
  j["kernel"] = {{"type", g.kernel}};
  if (g.kernel == "riesz") j["kernel"]["eta"] = g.eta;
  j["confinement"] = {{"type", g.confinement}};
  if (g.confinement == "coordinate_square") j["confinement"]["axis"] = g.axis;
  j["weight"] = {{"type", g.weight}};
  if (g.weight == "constant" || g.weight == "power") j["weight"]["parameter"] = g.weight_parameter;
  j["charges"] = {{"type", g.charges}};
  if (g.charges == "uniform") {
    j["charges"]["min"] = g.charge_min;
    j["charges"]["max"] = g.charge_max;
  } else if (g.charges == "atomic" || g.charges == "tabulated") {
    j["charges"]["values"] = g.charge_values;
    j["charges"][g.charges == "atomic" ? "weights" : "density"] = g.charge_weights;
  } else {
    j["charges"]["path"] = g.charge_file;
  }
  if (!g.manifold.empty()) j["manifold"] = g.manifold;
  return j;
}

AnnealSchedule parse_schedule(Reader r) {
  AnnealSchedule s;
  r.opt("beta0", s.beta0);
  r.opt("beta_growth", s.beta_growth);
  r.opt("stages", s.stages);
  r.opt("steps_per_stage", s.steps_per_stage);
  r.opt("step_size", s.step_size);
  r.opt("step_decay", s.step_decay);
  r.opt("residual_threshold", s.residual_threshold);
  r.opt("max_descent_iterations", s.max_descent_iterations);
  r.opt("lbfgs_memory", s.lbfgs_memory);
  r.opt("trace_every", s.trace_every);
  r.finish();
  try {
    s.validate();
  } catch (const Error& e) {
    fail(r.where("") + ": " + e.what());
  }
  return s;
}

json schedule_json(const AnnealSchedule& s) {
  return {{"beta0", s.beta0},
          {"beta_growth", s.beta_growth},
          {"stages", s.stages},
          {"steps_per_stage", s.steps_per_stage},
          {"step_size", s.step_size},
          {"step_decay", s.step_decay},
          {"residual_threshold", s.residual_threshold},
          {"max_descent_iterations", s.max_descent_iterations},
          {"lbfgs_memory", s.lbfgs_memory},
          {"trace_every", s.trace_every}};
}

const std::set<std::string> known_observables{"radial", "ordering", "nearest_neighbor", "correlation", "splitting"};

}  // namespace

GasSpec GasConfig::build() const {
  GasParams p;
  p.dimension = dimension;
  try {
    p.kernel = kernel == "riesz" ? KernelSpec::riesz(eta) : KernelSpec::coulomb();
    if (confinement == "quartic_minus_quadratic")
      p.confinement = ConfinementSpec::quartic_minus_quadratic();
    else if (confinement == "coordinate_square")
      p.confinement = ConfinementSpec::coordinate_square(axis);
    if (weight == "constant") p.weight = WeightSpec::constant(weight_parameter);
    else if (weight == "linear") p.weight = WeightSpec::linear();
    else if (weight == "inverse_sqrt") p.weight = WeightSpec::inverse_sqrt();
    else if (weight == "inverse") p.weight = WeightSpec::inverse();
    else if (weight == "sine_offset") p.weight = WeightSpec::sine_offset();
    else if (weight == "power") p.weight = WeightSpec::power(weight_parameter);
    if (charges == "uniform") {
      p.charge_law = ChargeDistribution::uniform(charge_min, charge_max);
    } else if (charges == "atomic") {
      std::vector<ChargeDistribution::Atom> atoms;
      for (std::size_t k = 0; k < charge_values.size(); ++k) atoms.push_back({charge_values[k], charge_weights[k]});
      p.charge_law = ChargeDistribution::atomic(atoms);
    } else if (charges == "tabulated") {
      p.charge_law = ChargeDistribution::tabulated(charge_values, charge_weights, true);
    } else {
      const auto t = read_csv(charge_file);
      if (t.columns.size() < 2) fail("charge file " + charge_file + " needs (q, density) columns");
      std::vector<double> q, d;
      for (const auto& row : t.rows) {
        q.push_back(row[0]);
        d.push_back(row[1]);
      }
      p.charge_law = ChargeDistribution::tabulated(q, d, true);
    }
    if (manifold == "sphere") p.manifold = ManifoldSpec::unit_sphere();
    else if (manifold == "torus") p.manifold = ManifoldSpec::torus();
    return GasSpec(p);
  } catch (const Error& e) {
    if (e.code() == Errc::config || e.code() == Errc::io) throw;
    fail(std::string("gas: ") + e.what());
  }
}

ScenarioConfig parse_scenario(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(std::string("invalid JSON: ") + e.what());
  }
  Reader r(root, "");
  ScenarioConfig s;
  r.opt("name", s.name);
  r.opt("description", s.description);
  s.gas = parse_gas(r.child("gas"));
  if (r.has("run")) {
    auto run = r.child("run");
    run.opt("n", s.run.n);
    run.opt("seed", s.run.seed);
    run.opt("replicas", s.run.replicas);
    run.opt("threads", s.run.threads);
    run.opt("sampling", s.run.sampling);
    run.opt("resume", s.run.resume);
    one_of(run.where("sampling"), s.run.sampling, {"iid", "stratified"});
    if (run.has("schedule")) s.run.schedule = parse_schedule(run.child("schedule"));
    run.finish();
    if (s.run.n < 2) fail("run.n must be at least 2");
    if (s.run.replicas < 1) fail("run.replicas must be at least 1");
    if (s.run.threads < 1) fail("run.threads must be at least 1");
  }
  if (r.has("analysis")) {
    auto a = r.child("analysis");
    a.opt_list("observables", s.analysis.observables);
    for (const auto& o : s.analysis.observables)
      if (!known_observables.count(o)) fail("unknown observable '" + o + "' in analysis.observables");
    a.opt("bins", s.analysis.bins);
    a.opt_list("r0", s.analysis.r0);
    a.opt("correlation_width", s.analysis.correlation_width);
    a.opt("correlation_max", s.analysis.correlation_max);
    a.opt("correlation_bins", s.analysis.correlation_bins);
    a.opt("nn_bins", s.analysis.nn_bins);
    a.finish();
    if (s.analysis.bins < 1 || s.analysis.correlation_bins < 1 || s.analysis.nn_bins < 1)
      fail("analysis bin counts must be positive");
  }
  if (r.has("output")) {
    auto o = r.child("output");
    o.opt("directory", s.output.directory);
    o.opt_list("formats", s.output.formats);
    for (const auto& f : s.output.formats) one_of("output.formats", f, {"csv", "json"});
    o.opt("checkpoint", s.output.checkpoint);
    one_of(o.where("checkpoint"), s.output.checkpoint, {"csv", "binary", "both", "none"});
    o.finish();
  }
  if (r.has("inverse")) {
    auto in = r.child("inverse");
    InverseConfig ic;
    in.opt("target", ic.target);
    in.opt("roundtrip", ic.roundtrip);
    in.opt("bins", ic.bins);
    in.opt("fraction", ic.fraction);
    in.finish();
    if (!(ic.fraction > 0 && ic.fraction <= 1)) fail("inverse.fraction must lie in (0, 1]");
    s.inverse = ic;
  }
  r.finish();
  return s;
}

std::string serialize_scenario(const ScenarioConfig& s) {
  json j;
  j["name"] = s.name;
  j["description"] = s.description;
  j["gas"] = gas_json(s.gas);
  j["run"] = {{"n", s.run.n},
              {"seed", s.run.seed},
              {"replicas", s.run.replicas},
              {"threads", s.run.threads},
              {"sampling", s.run.sampling},
              {"resume", s.run.resume},
              {"schedule", schedule_json(s.run.schedule)}};
  j["analysis"] = {{"observables", s.analysis.observables},
                   {"bins", s.analysis.bins},
                   {"r0", s.analysis.r0},
                   {"correlation_width", s.analysis.correlation_width},
                   {"correlation_max", s.analysis.correlation_max},
                   {"correlation_bins", s.analysis.correlation_bins},
                   {"nn_bins", s.analysis.nn_bins}};
  j["output"] = {{"directory", s.output.directory},
                 {"formats", s.output.formats},
                 {"checkpoint", s.output.checkpoint}};
  if (s.inverse)
    j["inverse"] = {{"target", s.inverse->target},
                    {"roundtrip", s.inverse->roundtrip},
                    {"bins", s.inverse->bins},
                    {"fraction", s.inverse->fraction}};
  return j.dump(2) + "\n";
}

std::string apply_overrides(const std::string& text, const std::vector<std::string>& overrides) {
  json root;
  try {
    root = json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(std::string("invalid JSON: ") + e.what());
  }
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos || eq == 0) fail("override '" + o + "' is not key=value");
    const std::string key = o.substr(0, eq), value = o.substr(eq + 1);
    json v;
    try {
      v = json::parse(value);
    } catch (const nlohmann::json::parse_error&) {
      v = value;
    }
    json* node = &root;
    std::size_t start = 0;
    while (true) {
      const auto dot = key.find('.', start);
      const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
      if (part.empty()) fail("override key '" + key + "' has an empty component");
      if (!node->is_object()) fail("override '" + key + "' descends into a non-object");
      if (dot == std::string::npos) {
        (*node)[part] = v;
        break;
      }
      node = &(*node)[part];
      if (node->is_null()) *node = json::object();
      start = dot + 1;
    }
  }
  return root.dump(2) + "\n";
}

namespace {

ScenarioConfig base(const std::string& name, const std::string& description, const std::string& weight) {
  ScenarioConfig s;
  s.name = name;
  s.description = description;
  s.gas.weight = weight;
  s.output.directory = "out/" + name;
  return s;
}

AnnealSchedule short_schedule(int stages, int steps) {
  AnnealSchedule a;
  a.stages = stages;
  a.steps_per_stage = steps;
  a.beta0 = 10;
  a.beta_growth = std::pow(1e6, 1.0 / (stages - 1));
  return a;
}

const std::map<std::string, std::function<ScenarioConfig()>>& presets() {
  static const std::map<std::string, std::function<ScenarioConfig()>> table = {
      {"fig1_increasing",
       [] { return base("fig1_increasing", "d=2 Coulomb, nu uniform on [1,2], g(q)=q", "linear"); }},
      {"fig1_constant", [] { return base("fig1_constant", "d=2 Coulomb, nu uniform on [1,2], g=1", "constant"); }},
      {"fig1_decreasing",
       [] { return base("fig1_decreasing", "d=2 Coulomb, nu uniform on [1,2], g(q)=1/sqrt(q)", "inverse_sqrt"); }},
      {"fig2_two_species",
       [] {
         auto s = base("fig2_two_species", "90% q=1 and 10% q=3, g=1, nearest-neighbour distances", "constant");
         s.gas.charges = "atomic";
         s.gas.charge_values = {1, 3};
         s.gas.charge_weights = {0.9, 0.1};
         s.run.n = 500;
         s.run.replicas = 8;
         s.run.schedule = short_schedule(20, 200);
         s.analysis.observables = {"radial", "nearest_neighbor"};
         return s;
       }},
      {"fig4_atom",
       [] {
         auto s = base("fig4_atom", "charges 1,2,3 in equal thirds, g(q)=q: three disjoint shells", "linear");
         s.gas.charges = "atomic";
         s.gas.charge_values = {1, 2, 3};
         s.gas.charge_weights = {1.0 / 3, 1.0 / 3, 1.0 / 3};
         s.run.n = 600;
         s.run.sampling = "stratified";
         s.analysis.observables = {"radial", "ordering"};
         return s;
       }},
      {"fig5_profiles",
       [] {
         auto s = base("fig5_profiles", "radial particle and charge profiles, g(q)=q, nu uniform on [1,2]", "linear");
         s.run.replicas = 20;
         s.run.schedule = short_schedule(20, 200);
         return s;
       }},
      {"fig6_correlation",
       [] {
         auto s = base("fig6_correlation", "local pair correlation, g(q)=q, nu uniform on [1,5]", "linear");
         s.gas.charge_max = 5;
         s.run.replicas = 20;
         s.run.schedule = short_schedule(20, 200);
         s.analysis.observables = {"radial", "ordering", "correlation"};
         return s;
       }},
      {"fig7_reconstruction",
       [] {
         auto s = base("fig7_reconstruction", "inverse design of nu for f=(3/4pi)(2-r) on the unit disk, g=1/q",
                       "inverse");
         s.run.replicas = 10;
         s.run.schedule = short_schedule(10, 100);
         s.inverse = InverseConfig{};
         s.inverse->roundtrip = true;
         return s;
       }},
      {"fig8_eta",
       [] {
         auto s = base("fig8_eta", "Riesz eta=0.5, d=2, g(q)=q, nu uniform on [1,2]", "linear");
         s.gas.kernel = "riesz";
         s.gas.eta = 0.5;
         return s;
       }},
      {"fig8_quartic",
       [] {
         auto s = base("fig8_quartic", "Coulomb, V=(x^4+y^4)/2-|x|^2, g(q)=q", "linear");
         s.gas.confinement = "quartic_minus_quadratic";
         return s;
       }},
      {"fig9_sphere",
       [] {
         auto s = base("fig9_sphere", "unit sphere, V=z^2, g(q)=q, nu uniform on [1,2]", "linear");
         s.gas.dimension = 3;
         s.gas.manifold = "sphere";
         s.gas.confinement = "coordinate_square";
         s.gas.axis = 2;
         return s;
       }},
      {"fig9_torus",
       [] {
         auto s = base("fig9_torus", "torus with tube radius 1/2, V=y^2, g(q)=q, nu uniform on [1,2]", "linear");
         s.gas.dimension = 3;
         s.gas.manifold = "torus";
         s.gas.confinement = "coordinate_square";
         s.gas.axis = 1;
         return s;
       }},
      {"fig10_sine",
       [] {
         auto s = base("fig10_sine", "non-monotone g(q)=2+sin(pi q/3), nu uniform on [2,6]", "sine_offset");
         s.gas.charge_min = 2;
         s.gas.charge_max = 6;
         s.run.n = 500;
         return s;
       }},
  };
  return table;
}

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto& [k, v] : presets()) out.push_back(k);
  return out;
}

ScenarioConfig preset(const std::string& name) {
  const auto& t = presets();
  auto it = t.find(name);
  if (it == t.end()) {
    std::string list;
    for (const auto& [k, v] : t) list += (list.empty() ? "" : ", ") + k;
    fail("unknown preset '" + name + "' (available: " + list + ")");
  }
  return it->second();
}

}  // namespace hgas
