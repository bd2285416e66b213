#include "trflow/flows/flow.hpp"

#include <cmath>

#include "trflow/calibration/angle.hpp"
#include "trflow/core/errors.hpp"

namespace trflow {

const char* ambient_mode_name(AmbientMode m) {
  switch (m) {
    case AmbientMode::static_ambient: return "static";
    case AmbientMode::ke_normalized: return "ke_normalized";
    case AmbientMode::krf_potential: return "krf_potential";
  }
  return "?";
}

AmbientMode parse_ambient_mode(const std::string& s) {
  if (s == "static") return AmbientMode::static_ambient;
  if (s == "ke_normalized") return AmbientMode::ke_normalized;
  if (s == "krf_potential") return AmbientMode::krf_potential;
  throw ConfigError("unknown ambient_mode '" + s + "' (expected static, ke_normalized or krf_potential)");
}

const char* integrator_name(Integrator i) { return i == Integrator::euler ? "euler" : "rk4"; }

Integrator parse_integrator(const std::string& s) {
  if (s == "euler") return Integrator::euler;
  if (s == "rk4") return Integrator::rk4;
  throw ConfigError("unknown integrator '" + s + "' (expected euler or rk4)");
}

const char* flow_status_name(FlowStatus s) {
  switch (s) {
    case FlowStatus::running: return "running";
    case FlowStatus::completed: return "completed";
    case FlowStatus::degenerate: return "degenerate";
    case FlowStatus::left_domain: return "left-domain";
    case FlowStatus::unstable: return "unstable";
    case FlowStatus::ambient_degenerate: return "ambient-degenerate";
  }
  return "?";
}

namespace {

double default_margin(const PotentialGrid& g, double m) { return m > 0.0 ? m : 3.0 * g.spacing(); }

ModelPtr potential_model(const PotentialGrid& g, double margin) { return g.model(default_margin(g, margin)); }

std::vector<Vec> axpy(const std::vector<Vec>& x, double a, const VectorField& v) {
  std::vector<Vec> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + a * v[i];
  return out;
}

// Smallest ambient length of one grid step along L.
double ambient_spacing(const FramePacket& fp) {
  double s = 1e300;
  for (const NodeFrame& f : fp.nodes)
    for (int a = 0; a < fp.n; ++a)
      s = std::min(s, fp.grid.spacing(a) * std::sqrt(f.d.col(a).dot(f.amb.g * f.d.col(a))));
  return s;
}

}  // namespace

TwoForm omega_components(const Immersion& imm, const AmbientModel& model) {
  FrameOptions o;
  o.second_derivatives = false;
  o.enforce_margin = false;
  return pullback_omega(frames(imm, model, o));
}

double drift(const TwoForm& a, const TwoForm& b) {
  double d = 0.0;
  for (int i = 0; i < a.n; ++i)
    for (int j = i + 1; j < a.n; ++j)
      for (std::size_t p = 0; p < a.c[i][j].size(); ++p) d = std::max(d, std::abs(a.c[i][j][p] - b.c[i][j][p]));
  return d;
}

FlowState make_flow_state(Immersion imm, ModelPtr model, std::optional<PotentialGrid> potential, double lambda,
                          double krf_margin) {
  FlowState s{0.0, 0, std::move(imm), std::move(model), std::move(potential), lambda, {}, FlowStatus::running, {}, {}};
  if (!s.model) {
    if (!s.potential) throw ConfigError("flow state needs an ambient model or a potential grid");
    s.model = potential_model(*s.potential, krf_margin);
  }
  try {
    s.omega0 = omega_components(s.imm, *s.model);
  } catch (const DegenerateError& e) {
    const std::string msg = e.what();
    s.status = FlowStatus::degenerate;
    s.message = msg.rfind("degenerate: ", 0) == 0 ? msg : "degenerate: totally real margin lost (" + msg + ")";
  }
  return s;
}

VectorField flow_velocity(const Immersion& imm, const AmbientModel& model, const FlowConfig& cfg,
                          FramePacket* frames_out) {
  FrameOptions o;
  o.margin = cfg.margin_min;
  FramePacket fp = frames(imm, model, o);
  VectorField v = velocity(fp, cfg.kind);
  if (frames_out) *frames_out = std::move(fp);
  return v;
}

void step(FlowState& state, const FlowConfig& cfg) {
  if (state.status != FlowStatus::running) return;
  const bool krf = cfg.ambient_mode == AmbientMode::krf_potential;
  if (krf && !state.potential) throw ConfigError("krf_potential mode needs a potential grid");
  const double dt = cfg.dt;
  const std::vector<Vec>& x0 = state.imm.positions();
  try {
    FramePacket fp0;
    const VectorField k1 = flow_velocity(state.imm, *state.model, cfg, &fp0);
    const double limit = 10.0 * ambient_spacing(fp0);
    double predicted = 0.0;
    for (const Vec& v : k1) predicted = std::max(predicted, std::abs(dt) * v.norm());
    if (!(predicted <= limit)) {
      state.status = FlowStatus::unstable;
      state.message = "unstable step: position change exceeds 10x the grid spacing";
      return;
    }
    std::vector<Vec> x1;
    std::optional<PotentialGrid> p1;
    if (cfg.integrator == Integrator::euler) {
      x1 = axpy(x0, dt, k1);
      if (krf) p1 = state.potential->advanced(state.potential->rate(), dt);
    } else {
      auto stage = [&](const std::vector<Vec>& x, const std::optional<PotentialGrid>& pg, VectorField& k,
                       std::vector<double>& r) {
        ModelPtr m = pg ? potential_model(*pg, cfg.krf_margin) : state.model;
        k = flow_velocity(state.imm.with_positions(x), *m, cfg);
        if (pg) r = pg->rate();
      };
      std::vector<double> r1, r2, r3, r4;
      if (krf) r1 = state.potential->rate();
      VectorField k2, k3, k4;
      std::optional<PotentialGrid> pa, pb, pc;
      if (krf) pa = state.potential->advanced(r1, 0.5 * dt);
      stage(axpy(x0, 0.5 * dt, k1), pa, k2, r2);
      if (krf) pb = state.potential->advanced(r2, 0.5 * dt);
      stage(axpy(x0, 0.5 * dt, k2), pb, k3, r3);
      if (krf) pc = state.potential->advanced(r3, dt);
      stage(axpy(x0, dt, k3), pc, k4, r4);
      x1.resize(x0.size());
      for (std::size_t i = 0; i < x0.size(); ++i) x1[i] = x0[i] + (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      if (krf) {
        std::vector<double> r(r1.size());
        for (std::size_t i = 0; i < r.size(); ++i) r[i] = (r1[i] + 2.0 * r2[i] + 2.0 * r3[i] + r4[i]) / 6.0;
        p1 = state.potential->advanced(r, dt);
      }
    }
    double move = 0.0;
    for (std::size_t i = 0; i < x0.size(); ++i) move = std::max(move, (x1[i] - x0[i]).norm());
    if (!(move <= limit)) {
      state.status = FlowStatus::unstable;
      state.message = "unstable step: position change exceeds 10x the grid spacing";
      return;
    }
    Immersion next = state.imm.with_positions(std::move(x1));
    if (krf) {
      state.potential = std::move(p1);
      state.model = potential_model(*state.potential, cfg.krf_margin);
    }
    state.imm = std::move(next);
    state.t += dt;
    ++state.step_index;
  } catch (const DomainError& e) {
    state.status = FlowStatus::left_domain;
    state.message = e.what();
  } catch (const DegenerateError& e) {
    const std::string msg = e.what();
    state.status = msg.rfind("ambient degenerate", 0) == 0 ? FlowStatus::ambient_degenerate : FlowStatus::degenerate;
    state.message = msg;
  }
}

DiagnosticRecord diagnose(const FlowState& state, const FlowConfig& cfg) {
  DiagnosticRecord r;
  r.t = state.t;
  r.status = state.status;
  FrameOptions o;
  o.curvature = cfg.integrability;
  o.enforce_margin = false;
  FramePacket fp;
  try {
    fp = frames(state.imm, *state.model, o);
  } catch (const Error&) {
    return r;  // terminal states may not admit frames
  }
  const Volumes v = volumes(fp);
  r.vol_g = v.vol_g;
  r.vol_J = v.vol_J;
  r.sup_omega = sup_omega(fp);
  r.min_rho = fp.min_rho;
  if (state.model->is_flat()) {
    try {
      const CYStructure cy = cy_structure(*state.model);
      const std::vector<double> raw = lagrangian_angles(fp, cy);
      std::vector<double> th = raw;
      try {
        th = unwrap_angles(fp.grid, raw).lift;
      } catch (const DegenerateError&) {
      }
      r.theta_min = *std::min_element(th.begin(), th.end());
      r.theta_max = *std::max_element(th.begin(), th.end());
    } catch (const Error&) {
    }
  }
  if (cfg.integrability) r.integrability = integrability_residual(fp);
  const TwoForm w = pullback_omega(fp);
  r.drift = drift(w, state.omega0);
  if (std::isfinite(state.lambda)) {
    const double scale = std::exp(state.lambda * state.t);
    double dev = 0.0;
    for (int i = 0; i < w.n; ++i)
      for (int j = i + 1; j < w.n; ++j)
        for (std::size_t p = 0; p < w.c[i][j].size(); ++p) {
          const double w0 = state.omega0.c[i][j][p];
          if (std::abs(w0) > 1e-6) dev = std::max(dev, std::abs(w.c[i][j][p] / (w0 * scale) - 1.0));
        }
    r.ke_deviation = dev;
  }
  return r;
}

void run(FlowState& state, const FlowConfig& cfg,
         const std::function<void(const FlowState&, const DiagnosticRecord&)>& on_record) {
  if (cfg.dt <= 0.0 || cfg.steps < 0 || cfg.diagnostics_every < 1) throw ConfigError("flow needs dt > 0, steps >= 0, diagnostics_every >= 1");
  auto record = [&] {
    DiagnosticRecord r = diagnose(state, cfg);
    state.series.push_back(r);
    if (on_record) on_record(state, r);
  };
  record();
  while (state.status == FlowStatus::running && state.step_index < cfg.steps) {
    step(state, cfg);
    if (state.status != FlowStatus::running) break;
    if (state.step_index % cfg.diagnostics_every == 0 || state.step_index == cfg.steps) {
      if (state.step_index == cfg.steps) state.status = FlowStatus::completed;
      record();
    }
  }
  if (state.status == FlowStatus::running) state.status = FlowStatus::completed;
  if (state.series.empty() || state.series.back().t != state.t || state.series.back().status != state.status) {
    if (!state.series.empty() && state.series.back().t == state.t) state.series.pop_back();
    record();
  }
}

}  // namespace trflow
