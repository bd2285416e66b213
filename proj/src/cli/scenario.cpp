#include "trflow/cli/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "trflow/core/errors.hpp"

namespace trflow {

using nlohmann::json;

namespace {

void require_keys(const json& j, const std::string& path, const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ConfigError(path + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) throw ConfigError(path + "." + it.key() + ": unknown key");
}

template <class T>
void read(const json& j, const std::string& path, const char* key, T& out) {
  if (!j.contains(key)) return;
  const json& v = j.at(key);
  const std::string p = path + "." + key;
  try {
    out = v.get<T>();
  } catch (const json::exception&) {
    throw ConfigError(p + ": wrong type (" + std::string(v.type_name()) + ")");
  }
  if constexpr (std::is_same_v<T, double>) {
    if (!std::isfinite(out)) throw ConfigError(p + ": must be finite");
  } else if constexpr (std::is_same_v<T, std::vector<double>>) {
    for (double x : out)
      if (!std::isfinite(x)) throw ConfigError(p + ": entries must be finite");
  }
}

void one_of(const std::string& path, const std::string& v, const std::set<std::string>& allowed) {
  if (allowed.count(v)) return;
  std::string list;
  for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
  throw ConfigError(path + ": '" + v + "' is not one of " + list);
}

Vec to_vec(const std::vector<double>& v, int dim, const char* what) {
  if (v.empty()) return Vec::Zero(dim);
  if (static_cast<int>(v.size()) != dim) throw ConfigError(std::string(what) + ": expected " + std::to_string(dim) + " entries");
  Vec out(dim);
  for (int i = 0; i < dim; ++i) out(i) = v[i];
  return out;
}

json chart_json(const ChartSpec& c) {
  return {{"shape", c.shape}, {"center", c.center}, {"radius", c.radius}, {"lo", c.lo}, {"hi", c.hi}};
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"flat-clifford", "flat-sheared", "ch-torus", "ch-sheared", "fs-sheared",
          "straight-torus", "graph-torus", "bump-ak", "bump-ak-lagrangian", "krf-bump"};
}

json preset_json(const std::string& name) {
  const double c = std::sqrt(0.5);
  if (name == "flat-clifford")
    return {{"ambient", {{"kind", "flat"}}}, {"immersion", {{"preset", "product"}, {"radii", {c, c}}}},
            {"flow", {{"kind", "maslov"}, {"dt", 2.5e-4}, {"steps", 200}, {"diagnostics_every", 10}}}};
  if (name == "flat-sheared")
    return {{"ambient", {{"kind", "flat"}}},
            {"immersion", {{"preset", "sheared"}, {"radius", 1.0}, {"delta", 0.2}}},
            {"flow", {{"kind", "maslov"}, {"dt", 2.5e-4}, {"steps", 200}, {"diagnostics_every", 10}}}};
  if (name == "ch-torus")
    return {{"ambient", {{"kind", "kahler-potential"}, {"potential", "complex-hyperbolic"}}},
            {"immersion", {{"preset", "product"}, {"radii", {0.4, 0.4}}}},
            {"flow", {{"kind", "maslov"}, {"dt", 2e-4}, {"steps", 100}}}};
  if (name == "ch-sheared")
    return {{"ambient", {{"kind", "kahler-potential"}, {"potential", "complex-hyperbolic"}}},
            {"immersion", {{"preset", "sheared"}, {"radius", 0.4}, {"delta", 0.2}}},
            {"flow", {{"kind", "maslov"}, {"ambient_mode", "ke_normalized"}, {"dt", 2e-4}, {"steps", 500},
                      {"diagnostics_every", 10}}}};
  if (name == "fs-sheared")
    return {{"ambient", {{"kind", "kahler-potential"}, {"potential", "fubini-study"}}},
            {"immersion", {{"preset", "sheared"}, {"radius", 0.5}, {"delta", 0.2}}},
            {"flow", {{"kind", "maslov"}, {"dt", 2e-4}, {"steps", 250}, {"diagnostics_every", 25}}}};
  if (name == "straight-torus")
    return {{"ambient", {{"kind", "flat-torus"}}}, {"immersion", {{"preset", "straight"}}},
            {"variation", {{"probe", "sin1"}}}};
  if (name == "graph-torus")
    return {{"ambient", {{"kind", "flat-torus"}}},
            {"immersion", {{"preset", "graph"}, {"linear", {{0.0, 0.5}, {0.0, 0.0}}}, {"periodic_amplitude", 0.1}}}};
  if (name == "bump-ak")
    return {{"ambient", {{"kind", "almost-kahler-bump"}, {"epsilon", 0.1}, {"width", 1.0}, {"scheme", "central-difference"},
                         {"h_amb", 2e-3}}},
            {"immersion", {{"preset", "sheared"}, {"radius", 0.5}, {"delta", 0.2}}}};
  if (name == "bump-ak-lagrangian")
    return {{"ambient", {{"kind", "almost-kahler-bump"}, {"epsilon", 0.1}, {"width", 1.0}, {"scheme", "central-difference"},
                         {"h_amb", 2e-3}}},
            {"immersion", {{"preset", "product"}, {"radii", {0.5, 0.5}}}}};
  if (name == "krf-bump")
    return {{"ambient", {{"kind", "kahler-potential"}, {"potential", "flat-plus-bump"}, {"epsilon", 0.05}, {"width", 1.0},
                         {"potential_nodes", 24}, {"potential_half_width", 1.5}}},
            {"immersion", {{"preset", "sheared"}, {"radius", 0.5}, {"delta", 0.2}}},
            {"flow", {{"kind", "maslov"}, {"ambient_mode", "krf_potential"}, {"dt", 5e-4}, {"steps", 50},
                      {"diagnostics_every", 10}, {"integrability", false}}}};
  throw ConfigError("unknown preset '" + name + "'");
}

ScenarioConfig parse_scenario(const json& raw) {
  const std::string root = "scenario";
  require_keys(raw, root, {"name", "preset", "seed", "ambient", "immersion", "flow", "checks", "variation", "symbol", "str", "phase"});
  json j = raw;
  if (raw.contains("preset")) {
    if (!raw["preset"].is_string()) throw ConfigError("scenario.preset: wrong type");
    j = preset_json(raw["preset"].get<std::string>());
    j.merge_patch(raw);
  }
  ScenarioConfig c;
  read(j, root, "name", c.name);
  read(j, root, "preset", c.preset);
  if (!j.contains("name") && !c.preset.empty()) c.name = c.preset;
  read(j, root, "seed", c.seed);
  read(j, root, "phase", c.phase);

  if (j.contains("ambient")) {
    const json& a = j["ambient"];
    const std::string p = root + ".ambient";
    require_keys(a, p, {"n", "kind", "potential", "epsilon", "center", "width", "scheme", "h_amb", "chart",
                        "potential_nodes", "potential_half_width"});
    AmbientSpec& s = c.ambient;
    read(a, p, "n", s.n);
    read(a, p, "kind", s.kind);
    read(a, p, "potential", s.potential);
    read(a, p, "epsilon", s.epsilon);
    read(a, p, "center", s.center);
    read(a, p, "width", s.width);
    read(a, p, "scheme", s.scheme);
    read(a, p, "h_amb", s.h_amb);
    read(a, p, "potential_nodes", s.potential_nodes);
    read(a, p, "potential_half_width", s.potential_half_width);
    if (a.contains("chart")) {
      const json& ch = a["chart"];
      const std::string q = p + ".chart";
      require_keys(ch, q, {"shape", "center", "radius", "lo", "hi"});
      read(ch, q, "shape", s.chart.shape);
      read(ch, q, "center", s.chart.center);
      read(ch, q, "radius", s.chart.radius);
      read(ch, q, "lo", s.chart.lo);
      read(ch, q, "hi", s.chart.hi);
      one_of(q + ".shape", s.chart.shape, {"whole", "ball", "box"});
    }
    one_of(p + ".kind", s.kind, {"flat", "flat-torus", "kahler-potential", "almost-kahler-bump"});
    one_of(p + ".potential", s.potential, {"flat", "complex-hyperbolic", "fubini-study", "flat-plus-bump"});
    one_of(p + ".scheme", s.scheme, {"analytic", "central-difference"});
    if (s.n < 1 || s.n > 3) throw ConfigError(p + ".n: must be 1, 2 or 3");
    if (s.h_amb <= 0.0) throw ConfigError(p + ".h_amb: must be positive");
    if (s.width <= 0.0) throw ConfigError(p + ".width: must be positive");
    if (s.potential_nodes < 8) throw ConfigError(p + ".potential_nodes: must be at least 8");
  }
  if (j.contains("immersion")) {
    const json& m = j["immersion"];
    const std::string p = root + ".immersion";
    require_keys(m, p, {"preset", "resolution", "radii", "radius", "delta", "center", "linear", "periodic_amplitude"});
    ImmersionSpec& s = c.immersion;
    read(m, p, "preset", s.preset);
    read(m, p, "resolution", s.resolution);
    read(m, p, "radii", s.radii);
    read(m, p, "radius", s.radius);
    read(m, p, "delta", s.delta);
    read(m, p, "center", s.center);
    read(m, p, "linear", s.linear);
    read(m, p, "periodic_amplitude", s.periodic_amplitude);
    one_of(p + ".preset", s.preset, {"product", "sheared", "straight", "graph", "complex-line"});
    for (int r : s.resolution)
      if (r < 16) throw ConfigError(p + ".resolution: at least 16 nodes per axis");
  }
  if (j.contains("flow")) {
    const json& f = j["flow"];
    const std::string p = root + ".flow";
    require_keys(f, p, {"kind", "ambient_mode", "dt", "steps", "integrator", "diagnostics_every", "margin_min", "integrability"});
    FlowSpec& s = c.flow;
    read(f, p, "kind", s.kind);
    read(f, p, "ambient_mode", s.ambient_mode);
    read(f, p, "dt", s.dt);
    read(f, p, "steps", s.steps);
    read(f, p, "integrator", s.integrator);
    read(f, p, "diagnostics_every", s.diagnostics_every);
    read(f, p, "margin_min", s.margin_min);
    read(f, p, "integrability", s.integrability);
    one_of(p + ".kind", s.kind, {"mcf", "jmcf", "maslov"});
    one_of(p + ".ambient_mode", s.ambient_mode, {"static", "ke_normalized", "krf_potential"});
    one_of(p + ".integrator", s.integrator, {"euler", "rk4"});
    if (s.dt <= 0.0) throw ConfigError(p + ".dt: must be positive");
    if (s.steps < 0) throw ConfigError(p + ".steps: must be non-negative");
    if (s.diagnostics_every < 1) throw ConfigError(p + ".diagnostics_every: must be at least 1");
  }
  if (j.contains("checks")) {
    const json& k = j["checks"];
    const std::string p = root + ".checks";
    require_keys(k, p, {"resolutions", "reference_resolution", "random_frames", "rho_j", "maslov_identity",
                        "integrability", "kahler_collapse", "lagrangian_coincidence", "angle"});
    ChecksSpec& s = c.checks;
    read(k, p, "resolutions", s.resolutions);
    read(k, p, "reference_resolution", s.reference_resolution);
    read(k, p, "random_frames", s.random_frames);
    read(k, p, "rho_j", s.rho_j);
    read(k, p, "maslov_identity", s.maslov_identity);
    read(k, p, "integrability", s.integrability);
    read(k, p, "kahler_collapse", s.kahler_collapse);
    read(k, p, "lagrangian_coincidence", s.lagrangian_coincidence);
    read(k, p, "angle", s.angle);
    if (s.resolutions.empty()) throw ConfigError(p + ".resolutions: must not be empty");
    for (int r : s.resolutions)
      if (r < 16) throw ConfigError(p + ".resolutions: at least 16 nodes per axis");
  }
  if (j.contains("variation")) {
    const json& v = j["variation"];
    const std::string p = root + ".variation";
    require_keys(v, p, {"probe", "count", "tau"});
    read(v, p, "probe", c.variation.probe);
    read(v, p, "count", c.variation.count);
    read(v, p, "tau", c.variation.tau);
    if (c.variation.tau <= 0.0) throw ConfigError(p + ".tau: must be positive");
  }
  if (j.contains("symbol")) {
    const json& v = j["symbol"];
    const std::string p = root + ".symbol";
    require_keys(v, p, {"samples", "plane_wave_mode"});
    read(v, p, "samples", c.symbol.samples);
    read(v, p, "plane_wave_mode", c.symbol.plane_wave_mode);
  }
  if (j.contains("str")) {
    const json& v = j["str"];
    const std::string p = root + ".str";
    require_keys(v, p, {"family", "a", "s0", "lo", "hi"});
    read(v, p, "family", c.str.family);
    read(v, p, "a", c.str.a);
    read(v, p, "s0", c.str.s0);
    read(v, p, "lo", c.str.lo);
    read(v, p, "hi", c.str.hi);
    one_of(p + ".family", c.str.family, {"diag", "nilpotent"});
  }
  return c;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return parse_scenario(j);
}

json resolved_json(const ScenarioConfig& c) {
  const AmbientSpec& a = c.ambient;
  const ImmersionSpec& m = c.immersion;
  const FlowSpec& f = c.flow;
  const ChecksSpec& k = c.checks;
  return {
      {"name", c.name},
      {"preset", c.preset},
      {"seed", c.seed},
      {"phase", c.phase},
      {"ambient",
       {{"n", a.n}, {"kind", a.kind}, {"potential", a.potential}, {"epsilon", a.epsilon}, {"center", a.center},
        {"width", a.width}, {"scheme", a.scheme}, {"h_amb", a.h_amb}, {"chart", chart_json(a.chart)},
        {"potential_nodes", a.potential_nodes}, {"potential_half_width", a.potential_half_width}}},
      {"immersion",
       {{"preset", m.preset}, {"resolution", m.resolution}, {"radii", m.radii}, {"radius", m.radius},
        {"delta", m.delta}, {"center", m.center}, {"linear", m.linear}, {"periodic_amplitude", m.periodic_amplitude}}},
      {"flow",
       {{"kind", f.kind}, {"ambient_mode", f.ambient_mode}, {"dt", f.dt}, {"steps", f.steps}, {"integrator", f.integrator},
        {"diagnostics_every", f.diagnostics_every}, {"margin_min", f.margin_min}, {"integrability", f.integrability}}},
      {"checks",
       {{"resolutions", k.resolutions}, {"reference_resolution", k.reference_resolution},
        {"random_frames", k.random_frames}, {"rho_j", k.rho_j}, {"maslov_identity", k.maslov_identity},
        {"integrability", k.integrability}, {"kahler_collapse", k.kahler_collapse},
        {"lagrangian_coincidence", k.lagrangian_coincidence}, {"angle", k.angle}}},
      {"variation", {{"probe", c.variation.probe}, {"count", c.variation.count}, {"tau", c.variation.tau}}},
      {"symbol", {{"samples", c.symbol.samples}, {"plane_wave_mode", c.symbol.plane_wave_mode}}},
      {"str", {{"family", c.str.family}, {"a", c.str.a}, {"s0", c.str.s0}, {"lo", c.str.lo}, {"hi", c.str.hi}}},
  };
}

KahlerPotential build_potential(const AmbientSpec& a) {
  KahlerPotential p;
  p.tag = parse_potential_tag(a.potential);
  p.n = a.n;
  p.epsilon = a.epsilon;
  p.center = to_vec(a.center, 2 * a.n, "ambient.center");
  p.width = a.width;
  return p;
}

ModelPtr build_model(const AmbientSpec& a) {
  const int d = 2 * a.n;
  if (a.kind == "flat") return make_flat(a.n);
  if (a.kind == "flat-torus") return make_flat_torus(a.n);
  if (a.kind == "almost-kahler-bump") {
    BumpMetricSpec s;
    s.n = a.n;
    s.epsilon = a.epsilon;
    s.center = to_vec(a.center, d, "ambient.center");
    s.width = a.width;
    return almost_kahler_bump(s, a.h_amb);
  }
  ChartDomain dom = ChartDomain::whole_space();
  if (a.chart.shape == "ball") dom = ChartDomain::ball(to_vec(a.chart.center, d, "ambient.chart.center"), a.chart.radius);
  if (a.chart.shape == "box")
    dom = ChartDomain::box(to_vec(a.chart.lo, d, "ambient.chart.lo"), to_vec(a.chart.hi, d, "ambient.chart.hi"));
  const DerivativeScheme scheme = a.scheme == "analytic" ? DerivativeScheme::analytic : DerivativeScheme::central_difference;
  return kahler_from_potential(build_potential(a), scheme, a.h_amb, dom);
}

std::optional<PotentialGrid> build_potential_grid(const ScenarioConfig& c) {
  if (c.flow.ambient_mode != "krf_potential") return std::nullopt;
  if (c.ambient.kind != "kahler-potential" || c.ambient.potential != "flat-plus-bump")
    throw ConfigError("scenario.flow.ambient_mode: krf_potential needs a flat-plus-bump kahler-potential ambient");
  const AmbientSpec& a = c.ambient;
  return PotentialGrid::sample(build_potential(a), a.potential_nodes, to_vec(a.center, 2 * a.n, "ambient.center"),
                               a.potential_half_width);
}

Immersion build_immersion(const ImmersionSpec& s, int n, int res) {
  std::array<int, kMaxTorus> r{1, 1, 1};
  if (res > 0) {
    for (int i = 0; i < n; ++i) r[i] = res;
  } else {
    if (static_cast<int>(s.resolution.size()) != n)
      throw ConfigError("scenario.immersion.resolution: expected " + std::to_string(n) + " entries");
    for (int i = 0; i < n; ++i) r[i] = s.resolution[i];
  }
  const TorusGrid grid(n, r);
  const Vec center = to_vec(s.center, 2 * n, "immersion.center");
  if (s.preset == "product") {
    if (static_cast<int>(s.radii.size()) != n)
      throw ConfigError("scenario.immersion.radii: expected " + std::to_string(n) + " entries");
    return product_torus(grid, s.radii, center);
  }
  if (s.preset == "sheared") {
    if (n != 2) throw ConfigError("scenario.immersion.preset: sheared needs n = 2");
    return sheared_torus(grid, s.radius, s.delta, center);
  }
  if (s.preset == "straight") return straight_torus(grid);
  if (s.preset == "complex-line") {
    if (n != 2) throw ConfigError("scenario.immersion.preset: complex-line needs n = 2");
    return complex_line_torus(grid);
  }
  Mat lin = Mat::Zero(n, n);
  if (!s.linear.empty()) {
    if (static_cast<int>(s.linear.size()) != n) throw ConfigError("scenario.immersion.linear: expected n rows");
    for (int i = 0; i < n; ++i) {
      if (static_cast<int>(s.linear[i].size()) != n) throw ConfigError("scenario.immersion.linear: expected n columns");
      for (int k = 0; k < n; ++k) lin(i, k) = s.linear[i][k];
    }
  }
  const double amp = s.periodic_amplitude;
  return graph_torus(grid, lin, [amp, n](const Vec& phi) {
    Vec f(n);
    for (int i = 0; i < n; ++i) f(i) = amp * std::sin(phi((i + 1) % n));
    return f;
  });
}

FlowConfig build_flow_config(const FlowSpec& f) {
  FlowConfig c;
  c.kind = parse_flow_kind(f.kind);
  c.ambient_mode = parse_ambient_mode(f.ambient_mode);
  c.dt = f.dt;
  c.steps = f.steps;
  c.integrator = parse_integrator(f.integrator);
  c.diagnostics_every = f.diagnostics_every;
  c.margin_min = f.margin_min;
  c.integrability = f.integrability;
  return c;
}

}  // namespace trflow
