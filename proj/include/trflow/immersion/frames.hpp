#pragma once
// Per-node frames along an immersion: tangent vectors, the splitting
// T M = T L + J(T L), induced metric, pullback of omega, and rho_J.

#include <string>

#include "trflow/ambient/model.hpp"
#include "trflow/immersion/immersion.hpp"

namespace trflow {

struct NodeFrame {
  Vec pos;
  Mat d;   // 2n x n: d_i iota
  Mat jd;  // J d_i iota
  std::array<std::array<Vec, kMaxTorus>, kMaxTorus> dd;  // d_i d_j iota (if requested)
  Mat B, Binv;        // B = [d | J d]
  Mat pi_L, pi_J;     // splitting projections
  Mat pi_T, pi_N;     // g-orthogonal tangent / normal projections
  Mat gind, gind_inv; // induced metric
  Mat omega;          // omega_ij = omega-bar(d_i, d_j)
  Mat e;              // Gram-Schmidt orthonormal tangent frame
  double vol_density = 0.0;  // sqrt(det g)
  double rho_J = 0.0;        // sqrt(det_C h) on e
  double rho_J_volume = 0.0; // sqrt(vol(e, Je))
  PointGeometry amb;         // without curvature

  // Present when curvature was requested.
  Mat chern_form;  // P-tilde, 2n x 2n
  Mat rho_bar;     // Ricci form
  std::array<std::array<Mat, kMaxTorus>, kMaxTorus> riemann_tangent;  // R-bar(d_i, d_j), 2n x 2n

  // (B^{-1} v) split into tangent and J-tangent coordinates.
  Vec l_coords(const Vec& v) const;
  Vec j_coords(const Vec& v) const;
};

struct FrameOptions {
  bool second_derivatives = true;
  bool curvature = false;
  double margin = 1e-6;
  bool enforce_margin = true;
};

struct FramePacket {
  TorusGrid grid;
  int n = 0;
  bool has_curvature = false;
  bool has_second = false;
  std::vector<NodeFrame> nodes;
  double min_rho = 0.0;
  std::size_t worst_node = 0;
};

// Throws DegenerateError("degenerate: totally real margin lost ...") when
// min rho_J falls below the margin, DomainError when a node leaves the chart.
FramePacket frames(const Immersion& imm, const AmbientModel& model, const FrameOptions& opt = {});

// Pointwise linear algebra for a single frame (used by frames() and tests).
NodeFrame node_frame(const Vec& pos, const Mat& d, const PointGeometry& amb);

// rho_J of the plane spanned by the columns of v, two independent ways.
double rho_J_hermitian(const Mat& v, const Mat& g, const Mat& j);
double rho_J_volume(const Mat& v, const Mat& g, const Mat& j);

struct Volumes {
  double vol_g = 0.0, vol_J = 0.0;
  std::vector<double> density_g, density_J;  // per unit parameter measure
};
Volumes volumes(const FramePacket& fp);

// Largest |omega(d_i, d_j)| / sqrt(det g) over nodes.
double sup_omega(const FramePacket& fp);

std::string node_label(const TorusGrid& grid, std::size_t idx);

}  // namespace trflow
