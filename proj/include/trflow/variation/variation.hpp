#pragma once
// Finite-difference checks of the first and second variation of Vol_J
// along chart-straight families iota + t J iota_* Y.

#include <cmath>
#include <functional>
#include <random>

#include "trflow/immersion/presets.hpp"
#include "trflow/tensors/fields.hpp"

namespace trflow {

// Tangent field on L: per-node coefficients Y^i in the grid coordinate frame.
struct VariationProbe {
  int n = 0;
  std::vector<Vec> coef;

  static VariationProbe zero(const TorusGrid& grid);
  static VariationProbe from_function(const TorusGrid& grid, const std::function<Vec(const Vec&)>& y);
  // Smooth random field from trigonometric modes |k_i| <= kmax.
  static VariationProbe random(const TorusGrid& grid, int kmax, std::mt19937_64& rng);
  // b(|phi - c|^2 / w^2) e_axis with the smooth bump b, distance taken periodically.
  static VariationProbe bump(const TorusGrid& grid, const Vec& center, double width, int axis);
  VariationProbe scaled(double s) const;
};

// Ambient displacement J iota_* Y at every node.
std::vector<Vec> probe_direction(const FramePacket& fp, const VariationProbe& y);

// Vol_J of iota + t * direction (margin enforced).
double vol_J_along(const Immersion& imm, const AmbientModel& model, const std::vector<Vec>& direction, double t);

struct FirstVariationReport {
  double derivative = 0.0;  // Richardson central difference of Vol_J
  double predicted = 0.0;   // -int g(JY, H_J + S_J) vol_J
  double residual = 0.0;    // relative to max(|derivative|, 1e-8)
  double tau = 0.0;
  // Rounding bound on the difference quotient, ~eps Vol_J / tau. At a critical
  // immersion both sides vanish and only agreement to this level is meaningful.
  double noise = 0.0;
  bool passes(double tol) const { return residual <= tol || std::abs(derivative - predicted) <= noise; }
};

FirstVariationReport first_variation_check(const Immersion& imm, const AmbientModel& model,
                                           const VariationProbe& y, double tau = 1e-4);

struct SecondVariationReport {
  double second = 0.0;     // Richardson second difference of Vol_J
  double predicted = 0.0;  // int (Div(rho_J Y) / rho_J)^2 vol_J
  double residual = 0.0;   // relative to max(|predicted|, 1e-8)
  double tau = 0.0;
};

// Refused (UnsupportedError) unless the model is flat and sup |H_J| <= crit_tol.
SecondVariationReport second_variation_at_critical(const Immersion& imm, const AmbientModel& model,
                                                   const VariationProbe& y, double tau = 1e-3,
                                                   double crit_tol = 1e-8);

// Div Y = (1/sqrt g) d_i(sqrt g Y^i) with the grid stencils.
ScalarField divergence(const FramePacket& fp, const VariationProbe& y);

struct GradientSample {
  std::size_t node = 0;
  Vec reconstructed;  // from first variations along localized bumps
  Vec expected;       // H_J + S_J at the node
  double rel_error = 0.0;
};

struct GradientReport {
  std::vector<GradientSample> samples;
  double max_rel_error = 0.0;
};

// For each sample node, n bump probes (one per axis) of the given width give
// g(J d_k, V) as a vol_J-weighted average; V is rebuilt in the J d_k frame.
// Errors are relative to sup |H_J + S_J|.
GradientReport gradient_reconstruction(const Immersion& imm, const AmbientModel& model,
                                       const std::vector<std::size_t>& nodes, double width, double tau = 1e-4);

}  // namespace trflow
