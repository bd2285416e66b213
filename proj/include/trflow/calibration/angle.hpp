#pragma once
// Calabi-Yau form on flat models and the Lagrangian angle of totally real
// planes: intrinsic phase of Omega, polar-decomposition angle, Maslov form.

#include "trflow/ambient/model.hpp"
#include "trflow/immersion/forms.hpp"

namespace trflow {

// Omega = e^{i phase} dz^1 ^ ... ^ dz^n on flat C^n or a flat torus.
struct CYStructure {
  int n = 2;
  double phase = 0.0;
  cplx evaluate(const Mat& v) const;  // columns v_1..v_n (2n x n)
};

// Throws UnsupportedError unless the model is flat.
CYStructure cy_structure(const AmbientModel& model, double phase = 0.0);

// |v_1 ^ ... ^ v_n|_h = sqrt(det_C h(v_i, v_j)), h = g - i omega.
double hermitian_volume(const Mat& v, const Mat& g, const Mat& j);

// e^{i theta} = Omega(v) / |v|_h, theta in (-pi, pi]. Throws DegenerateError
// when |Omega(v)| falls below `threshold` times the Riemannian volume.
double angle_intrinsic(const Mat& v, const Mat& g, const Mat& j, const CYStructure& cy,
                       double threshold = 1e-12);
// theta = arg det_C U with M = P U the polar decomposition of the complex
// column matrix (flat metric).
double angle_polar(const Mat& v, double phase = 0.0, double threshold = 1e-12);

double wrap_angle(double a);  // into (-pi, pi]

struct AngleField {
  std::vector<double> raw;   // per node, (-pi, pi]
  std::vector<double> lift;  // continuous lift (not periodic if winding != 0)
  std::array<int, kMaxTorus> winding{};     // per generator
  std::array<double, kMaxTorus> integral{}; // loop integral of mu_L per generator
};

struct MaslovForm {
  AngleField angle;
  OneForm mu;  // d theta_L
};

// Nearest-branch unwrapping from node 0 in lexicographic sweeps. Throws
// DegenerateError("insufficient resolution ...") when any grid edge jumps by
// more than pi/2 after lifting.
AngleField unwrap_angles(const TorusGrid& grid, const std::vector<double>& raw);
MaslovForm maslov_form(const FramePacket& fp, const CYStructure& cy);
std::vector<double> lagrangian_angles(const FramePacket& fp, const CYStructure& cy);

// sup |xi_J + mu_L|
double xiJ_vs_muL_residual(const FramePacket& fp, const CYStructure& cy);

// sup over nodes of |Omega(d iota) - e^{i theta_L} rho_J sqrt(det g)|.
double same_angle_residual(const FramePacket& fp, const CYStructure& cy);

struct CalibrationReport {
  double re_omega = 0.0;  // Re(e^{i theta} Omega)(e), e orthonormal
  double im_omega = 0.0;
  double vol_J = 0.0;     // rho_J
  double vol_g = 1.0;
  double slack_first = 0.0;   // vol_J - Re
  double slack_second = 0.0;  // vol_g - vol_J
  bool first_equality = false;
  bool second_equality = false;
  bool first_predicted = false;   // |Im| <= sqrt(2 tol) and Re > 0
  bool second_predicted = false;  // sup|omega_ij| <= sqrt(2 tol)
  bool violated = false;          // a slack below -tol
  bool classification_ok() const {
    return first_equality == first_predicted && second_equality == second_predicted;
  }
};
CalibrationReport calibration_inequality_check(const Mat& v, const Mat& g, const Mat& j, const CYStructure& cy,
                                               double theta, double tol = 1e-10);

}  // namespace trflow
