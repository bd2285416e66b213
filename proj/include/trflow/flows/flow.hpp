#pragma once
// Time stepping of MCF, J-MCF and Maslov flow with a static, KE-normalized
// or Kahler-Ricci (potential grid) ambient, plus diagnostics.

#include <functional>
#include <limits>
#include <optional>
#include <string>

#include "trflow/flows/krf.hpp"
#include "trflow/tensors/fields.hpp"

namespace trflow {

enum class AmbientMode { static_ambient, ke_normalized, krf_potential };
enum class Integrator { euler, rk4 };
enum class FlowStatus { running, completed, degenerate, left_domain, unstable, ambient_degenerate };

const char* ambient_mode_name(AmbientMode m);
AmbientMode parse_ambient_mode(const std::string& s);
const char* integrator_name(Integrator i);
Integrator parse_integrator(const std::string& s);
const char* flow_status_name(FlowStatus s);

struct FlowConfig {
  FlowKind kind = FlowKind::maslov;
  AmbientMode ambient_mode = AmbientMode::static_ambient;
  double dt = 1e-4;
  int steps = 100;
  Integrator integrator = Integrator::rk4;
  int diagnostics_every = 10;
  double margin_min = 1e-6;
  bool integrability = true;      // curvature-based residual at each record
  double krf_margin = 0.0;        // chart margin inside the potential box (0: 3 box cells)
};

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct DiagnosticRecord {
  double t = 0.0;
  double vol_g = kNaN, vol_J = kNaN;
  double sup_omega = kNaN;
  double min_rho = kNaN;
  double theta_min = kNaN, theta_max = kNaN;
  double integrability = kNaN;
  double drift = kNaN;          // sup |omega_t - omega_0| in grid coordinates
  double ke_deviation = kNaN;   // max |omega_t / (omega_0 e^{lambda t}) - 1|
  FlowStatus status = FlowStatus::running;
};

struct FlowState {
  double t = 0.0;
  int step_index = 0;
  Immersion imm;
  ModelPtr model;
  std::optional<PotentialGrid> potential;
  double lambda = kNaN;  // Einstein constant for the KE diagnostic
  TwoForm omega0;
  FlowStatus status = FlowStatus::running;
  std::string message;
  std::vector<DiagnosticRecord> series;
};

// `model` may be null in krf mode (built from the potential).
FlowState make_flow_state(Immersion imm, ModelPtr model, std::optional<PotentialGrid> potential = std::nullopt,
                          double lambda = kNaN, double krf_margin = 0.0);

// Velocity field of the configured flow at the given positions and model.
VectorField flow_velocity(const Immersion& imm, const AmbientModel& model, const FlowConfig& cfg,
                          FramePacket* frames_out = nullptr);

// One step; on failure sets a terminal status and message instead of throwing.
void step(FlowState& state, const FlowConfig& cfg);

DiagnosticRecord diagnose(const FlowState& state, const FlowConfig& cfg);

// Runs until `steps` or a terminal status, recording diagnostics every
// `diagnostics_every` steps plus the initial and final states. The callback
// (optional) sees each recorded state.
void run(FlowState& state, const FlowConfig& cfg,
         const std::function<void(const FlowState&, const DiagnosticRecord&)>& on_record = nullptr);

// Per-node components omega(d_i, d_j), i < j.
TwoForm omega_components(const Immersion& imm, const AmbientModel& model);
double drift(const TwoForm& a, const TwoForm& b);

}  // namespace trflow
