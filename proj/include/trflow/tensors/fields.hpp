#pragma once
// Extrinsic quantities along an immersion: second fundamental form, mean
// curvature, the Maslov forms xi and xi_J, the vector fields H_J, T_J, S_J,
// and identity residuals relating them.

#include <vector>

#include "trflow/ambient/model.hpp"
#include "trflow/immersion/forms.hpp"

namespace trflow {

using VectorField = std::vector<Vec>;  // ambient vectors per node

// A(d_i, d_j) = pi_N(nabla-bar_{d_i} d_j), per node.
using SecondFundamental = std::array<std::array<Vec, kMaxTorus>, kMaxTorus>;

// Pointwise quantities; `f` needs second derivatives.
SecondFundamental second_fundamental(const NodeFrame& f);
Vec mean_curvature_at(const NodeFrame& f);
// nabla-tilde_{d_i} d_j iota.
Vec chern_derivative(const NodeFrame& f, int i, int j);
Vec levi_civita_derivative(const NodeFrame& f, int i, int j);
Vec xi_J_at(const NodeFrame& f, bool levi_civita = false);  // components on d_k
Vec xi_at(const NodeFrame& f);                              // classical xi
Vec H_J_at(const NodeFrame& f);
Vec T_J_at(const NodeFrame& f);
Vec S_J_at(const NodeFrame& f);
// omega-bar(V, d_k) for each k.
Vec omega_contract(const NodeFrame& f, const Vec& v);

VectorField mean_curvature(const FramePacket& fp);
VectorField H_J(const FramePacket& fp);
VectorField T_J(const FramePacket& fp);
VectorField S_J(const FramePacket& fp);
OneForm xi_J(const FramePacket& fp, bool levi_civita = false);
// Refuses non-Kahler models.
OneForm xi_classical(const FramePacket& fp, const AmbientModel& model);
// 1-form omega-bar(V, d_k iota).
OneForm omega_contract(const FramePacket& fp, const VectorField& v);

enum class FlowKind { mcf, jmcf, maslov };
const char* flow_kind_name(FlowKind k);
FlowKind parse_flow_kind(const std::string& s);
// H, H_J + S_J or H_J + T_J.
VectorField velocity(const FramePacket& fp, FlowKind kind);

double sup_norm(const FramePacket& fp, const VectorField& v);  // max g-bar length
double sup_norm(const OneForm& a);                             // max |component|
double sup_norm(const TwoForm& w);

// sup |omega-bar(H_J + T_J, d_k) - xi_J(d_k)|
double maslov_identity_residual(const FramePacket& fp);
// sup |omega-bar(H, d_k) + (d* omega)(d_k) - xi(d_k)|; Kahler only.
double h_hook_omega_residual(const FramePacket& fp, const AmbientModel& model);
// sup |d xi - RHS of the curvature formula|; Kahler only, needs curvature.
double dxi_formula_residual(const FramePacket& fp, const AmbientModel& model);
// sup |d xi_J - P/2|; needs curvature.
double dxiJ_vs_P_residual(const FramePacket& fp);
// sup |d(omega-bar(H_J + T_J, .)) - P/2|; needs curvature.
double integrability_residual(const FramePacket& fp);
// Pulled-back P-tilde and rho-bar.
TwoForm pullback_chern_form(const FramePacket& fp);
TwoForm pullback_ricci_form(const FramePacket& fp);

struct AltMeanCurvatures {
  VectorField maslov;      // H_J + T_J
  VectorField generalized; // H + 2 T_J
  VectorField chern;       // 2 H-tilde - H
  VectorField complex;     // -pi_N J nabla-bar_{e_i}(J e_i)
  VectorField H;
  double max_pairwise = 0.0;  // sup over pairs and nodes
  double generalized_minus_H = 0.0;
};
// Lagrangian input only: sup|omega| <= lag_tol, else DomainError.
// lag_tol <= 0 selects 1e-8 times the chart diameter of the node set.
AltMeanCurvatures alt_mean_curvatures(const FramePacket& fp, double lag_tol = -1.0);

}  // namespace trflow
