#pragma once
// Subcommands of the trflow tool and the residual checks they report.

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "trflow/cli/scenario.hpp"
#include "trflow/variation/variation.hpp"

namespace trflow {

// One row of a JSON report: {check, value, tolerance, pass, refinement_order?}.
// refinement_order is a number, or "floor" when every residual sits below 1e-11.
struct CheckResult {
  std::string check;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::optional<double> order;
  bool floor = false;
  std::string note;
};

nlohmann::json to_json(const CheckResult& r);

inline constexpr double kFloor = 1e-11;

struct Refinement {
  std::vector<double> residuals;
  std::optional<double> order;  // from the last pair above the floor
  bool floor = false;           // all residuals below kFloor
};
// `scales` are the step sizes matching `residuals` (h or h_amb).
Refinement refinement(const std::vector<double>& residuals, const std::vector<double>& scales);

// Residual value at the reference level, tolerance and minimum order.
CheckResult refinement_check(const std::string& name, const Refinement& r, double value, double tolerance,
                             double min_order);

// Individual residual checks on a scenario; each returns nullopt when the
// check does not apply (e.g. Lagrangian-only checks on non-Lagrangian data).
std::optional<CheckResult> check_rho_j(const ScenarioConfig& c);
std::optional<CheckResult> check_maslov_identity(const ScenarioConfig& c);
std::optional<CheckResult> check_integrability(const ScenarioConfig& c);
std::optional<CheckResult> check_kahler_collapse(const ScenarioConfig& c);
std::optional<CheckResult> check_lagrangian_coincidence(const ScenarioConfig& c);
std::vector<CheckResult> check_angle(const ScenarioConfig& c);  // flat models only
std::vector<CheckResult> residual_suite(const ScenarioConfig& c);

struct RunOptions {
  std::string out;        // directory (flow: CSV path)
  std::string snapshots;  // flow only
  std::string probe;      // variation only; overrides the scenario probe
  int threads = 1;
  std::optional<std::uint64_t> seed;
  int resolution = 0;
};

// Each returns the process exit code (0 iff every enabled check passes).
int cmd_check(ScenarioConfig c, const RunOptions& o, std::ostream& log);
int cmd_flow(ScenarioConfig c, const RunOptions& o, std::ostream& log);
int cmd_angle(ScenarioConfig c, const RunOptions& o, std::ostream& log);
int cmd_str_solve(ScenarioConfig c, const RunOptions& o, std::ostream& log);
int cmd_variation(ScenarioConfig c, const RunOptions& o, std::ostream& log);
int cmd_symbol(ScenarioConfig c, const RunOptions& o, std::ostream& log);

// Flow series CSV: a "# einstein_lambda=<value>" line, the header
// t,vol_g,vol_J,sup_omega,min_rhoJ,theta_min,theta_max,integrability_residual,status
// and one row per record.
void write_series_csv(std::ostream& out, const std::vector<DiagnosticRecord>& series, double lambda);

VariationProbe parse_probe(const std::string& spec, const TorusGrid& grid, std::mt19937_64& rng);

}  // namespace trflow
