#pragma once
// Principal symbols of H_J and of the constraint operator
// W -> d(iota^* omega-bar(W, .)), and a plane-wave linearization harness.

#include "trflow/tensors/fields.hpp"

namespace trflow {

struct SymbolReport {
  Vec zeta;          // covector on L (n)
  Vec direction;     // J iota_* zeta^sharp (2n)
  Mat sigma_HJ;      // 2n x 2n: Z -> g-bar(J v, pi_J Z) J v
  Mat sigma_L;       // n(n-1)/2 x 2n: W -> zeta ^ omega-bar(W, .)
  int rank_HJ = 0;
  int kernel_dim_HJ = 0;
  int kernel_dim_L = 0;
  double eigenvalue = 0.0;     // Rayleigh-free: component of sigma(v') along v'
  double zeta_norm_sq = 0.0;   // |zeta|^2_g
  double composition_residual = 0.0;  // max |sigma_L sigma_HJ|
};

// Throws ConfigError for zeta = 0.
SymbolReport symbol_report(const NodeFrame& f, const Vec& zeta, double rank_tol = 1e-10);

enum class PlaneWaveDirection { j_zeta, tangent, j_perp };
const char* plane_wave_direction_name(PlaneWaveDirection d);

struct PlaneWaveReport {
  double k_sq = 0.0;         // |k|^2_g at the sampled mode
  double coefficient = 0.0;  // -g-bar(C, V)/|V|^2, C the cos-mode coefficient of the response
  double response = 0.0;     // |C|_g / |V|_g
  double ratio = 0.0;        // coefficient / k_sq
  double nodes_per_wavelength = 0.0;
};

// Response [H_J(iota + a cos(k.phi) V) - H_J(iota)] / a for integer mode k.
// V is built from each node's frame with zeta = k / |k|. Intended for a flat
// ambient and a straight torus (constant frames). Rejects modes with fewer
// than 8 nodes per wavelength.
PlaneWaveReport linearize_HJ_planewave(const Immersion& imm, const AmbientModel& model,
                                       const std::vector<int>& mode, PlaneWaveDirection dir,
                                       double amplitude = 1e-6);

}  // namespace trflow
