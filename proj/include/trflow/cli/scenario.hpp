#pragma once
// JSON scenario files: schema, named presets, and construction of the
// ambient model and immersion they describe.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "trflow/flows/flow.hpp"
#include "trflow/immersion/presets.hpp"

namespace trflow {

struct ChartSpec {
  std::string shape = "whole";  // whole | ball | box
  std::vector<double> center;
  double radius = 0.0;
  std::vector<double> lo, hi;
};

struct AmbientSpec {
  int n = 2;
  std::string kind = "flat";  // flat | flat-torus | kahler-potential | almost-kahler-bump
  std::string potential = "flat";  // flat | complex-hyperbolic | fubini-study | flat-plus-bump
  double epsilon = 0.0;
  std::vector<double> center;  // bump center; empty means the origin
  double width = 1.0;
  std::string scheme = "analytic";  // analytic | central-difference
  double h_amb = 1e-3;
  ChartSpec chart;
  int potential_nodes = 24;  // krf box
  double potential_half_width = 1.5;
};

struct ImmersionSpec {
  std::string preset = "product";  // product | sheared | straight | graph | complex-line
  std::vector<int> resolution{32, 32};
  std::vector<double> radii{1.0, 1.0};
  double radius = 1.0;
  double delta = 0.0;
  std::vector<double> center;
  std::vector<std::vector<double>> linear;  // graph: F = M phi + amplitude (sin phi_2, sin phi_1)
  double periodic_amplitude = 0.0;
};

struct FlowSpec {
  std::string kind = "maslov";
  std::string ambient_mode = "static";
  double dt = 1e-4;
  int steps = 100;
  std::string integrator = "rk4";
  int diagnostics_every = 10;
  double margin_min = 1e-6;
  bool integrability = true;
};

struct ChecksSpec {
  std::vector<int> resolutions{32, 64, 128};
  int reference_resolution = 64;
  int random_frames = 10000;
  bool rho_j = true;
  bool maslov_identity = true;
  bool integrability = true;
  bool kahler_collapse = true;
  bool lagrangian_coincidence = true;
  bool angle = true;
};

struct VariationSpec {
  std::string probe = "random:2";  // zero | const:a,b | sin1 | random:K | bump:c1,c2,width,axis
  int count = 10;
  double tau = 1e-4;
};

struct SymbolSpec {
  int samples = 1000;
  std::vector<int> plane_wave_mode{4, 0};
};

struct StrSpec {
  std::string family = "diag";  // diag: diag(a, s); nilpotent: [[0, s], [0, 0]]
  double a = 0.3;
  double s0 = 0.0;
  double lo = -5.0;
  double hi = 5.0;
};

struct ScenarioConfig {
  std::string name = "scenario";
  std::string preset;  // optional base preset
  std::uint64_t seed = 1;
  AmbientSpec ambient;
  ImmersionSpec immersion;
  FlowSpec flow;
  ChecksSpec checks;
  VariationSpec variation;
  SymbolSpec symbol;
  StrSpec str;
  double phase = 0.0;  // Calabi-Yau phase for angles
};

// Throws ConfigError naming the offending path ("scenario.flow.integrater").
ScenarioConfig parse_scenario(const nlohmann::json& j);
ScenarioConfig load_scenario(const std::string& path);
nlohmann::json resolved_json(const ScenarioConfig& c);

std::vector<std::string> preset_names();
// Preset document (valid scenario JSON); ConfigError for unknown names.
nlohmann::json preset_json(const std::string& name);

ModelPtr build_model(const AmbientSpec& a);
KahlerPotential build_potential(const AmbientSpec& a);
std::optional<PotentialGrid> build_potential_grid(const ScenarioConfig& c);
// Resolution override (square) when res > 0.
Immersion build_immersion(const ImmersionSpec& s, int n, int res = 0);
FlowConfig build_flow_config(const FlowSpec& f);

}  // namespace trflow
