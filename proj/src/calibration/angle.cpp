#include "trflow/calibration/angle.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "trflow/core/errors.hpp"
#include "trflow/tensors/fields.hpp"

namespace trflow {

namespace {
constexpr double kPi = std::numbers::pi;
}

cplx CYStructure::evaluate(const Mat& v) const {
  return std::polar(1.0, phase) * complex_det(to_complex_columns(v));
}

CYStructure cy_structure(const AmbientModel& model, double phase) {
  if (!model.is_flat()) throw UnsupportedError("the Calabi-Yau form is only available on flat models");
  CYStructure cy;
  cy.n = model.n();
  cy.phase = phase;
  return cy;
}

double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  return a;
}

double hermitian_volume(const Mat& v, const Mat& g, const Mat& j) {
  const int n = static_cast<int>(v.cols());
  const Mat gv = v.transpose() * g * v;
  const Mat wv = v.transpose() * j.transpose() * g * v;
  CMat h(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) h(a, b) = cplx(gv(a, b), -wv(a, b));
  return std::sqrt(std::max(0.0, complex_det(h).real()));
}

double angle_intrinsic(const Mat& v, const Mat& g, const Mat& j, const CYStructure& cy, double threshold) {
  const cplx om = cy.evaluate(v);
  const double hv = hermitian_volume(v, g, j);
  const double vg = std::sqrt(std::max(0.0, (v.transpose() * g * v).determinant()));
  if (!(std::abs(om) > threshold * vg) || !(hv > 0.0))
    throw DegenerateError("degenerate frame: |Omega(v)| below threshold (plane contains a complex line)");
  return std::arg(om / hv);
}

double angle_polar(const Mat& v, double phase, double threshold) {
  const CMat m = to_complex_columns(v);
  const cplx det = complex_det(m);
  if (!(std::abs(det) > threshold * std::max(1.0, m.norm())))
    throw DegenerateError("degenerate frame: complex matrix is singular (plane contains a complex line)");
  const CMat u = polar_unitary(m);
  return wrap_angle(phase + std::arg(complex_det(u)));
}

AngleField unwrap_angles(const TorusGrid& grid, const std::vector<double>& raw) {
  const int n = grid.n();
  const std::size_t N = grid.size();
  AngleField af;
  af.raw = raw;
  af.lift.assign(N, 0.0);
  af.lift[0] = raw[0];
  for (std::size_t i = 1; i < N; ++i) {
    const auto c = grid.coords(i);
    int axis = -1;
    for (int a = n - 1; a >= 0; --a)
      if (c[a] > 0) {
        axis = a;
        break;
      }
    const std::size_t parent = grid.shifted(i, axis, -1);
    af.lift[i] = af.lift[parent] + wrap_angle(raw[i] - af.lift[parent]);
  }
  // Every interior edge must be a small step; wrap-around edges give winding.
  for (int a = 0; a < n; ++a) {
    const double h = grid.spacing(a);
    (void)h;
    for (std::size_t i = 0; i < N; ++i) {
      const auto c = grid.coords(i);
      if (c[a] + 1 == grid.resolution(a)) continue;
      const double step = af.lift[grid.shifted(i, a, 1)] - af.lift[i];
      if (std::abs(step) > kPi / 2) {
        std::ostringstream os;
        os << "insufficient resolution: angle jumps by " << step << " across an edge at " << node_label(grid, i);
        throw DegenerateError(os.str());
      }
    }
    // winding along the generator loop through node 0
    double total = 0.0;
    std::size_t i = 0;
    for (int k = 0; k < grid.resolution(a); ++k) {
      const std::size_t nx = grid.shifted(i, a, 1);
      total += wrap_angle(raw[nx] - raw[i]);
      i = nx;
    }
    af.winding[a] = static_cast<int>(std::lround(total / (2.0 * kPi)));
  }
  return af;
}

std::vector<double> lagrangian_angles(const FramePacket& fp, const CYStructure& cy) {
  std::vector<double> raw(fp.nodes.size());
  for (std::size_t p = 0; p < raw.size(); ++p) {
    const NodeFrame& f = fp.nodes[p];
    try {
      raw[p] = angle_intrinsic(f.d, f.amb.g, f.amb.J, cy);
    } catch (const DegenerateError& e) {
      throw DegenerateError(std::string(e.what()) + " at " + node_label(fp.grid, p));
    }
  }
  return raw;
}

MaslovForm maslov_form(const FramePacket& fp, const CYStructure& cy) {
  MaslovForm mf;
  mf.angle = unwrap_angles(fp.grid, lagrangian_angles(fp, cy));
  const TorusGrid& grid = fp.grid;
  const int n = grid.n();
  // periodic part of the lift, differentiated, plus the winding slope
  std::vector<double> per(grid.size());
  for (std::size_t p = 0; p < per.size(); ++p) {
    const Vec phi = grid.angles(p);
    double ramp = 0.0;
    for (int a = 0; a < n; ++a) ramp += mf.angle.winding[a] * phi(a);
    per[p] = mf.angle.lift[p] - ramp;
  }
  mf.mu.n = n;
  for (int a = 0; a < n; ++a) {
    mf.mu.c[a] = grid_diff(grid, per, a);
    for (double& x : mf.mu.c[a]) x += mf.angle.winding[a];
    // loop integral along the generator through node 0
    double s = 0.0;
    std::size_t i = 0;
    for (int k = 0; k < grid.resolution(a); ++k) {
      s += mf.mu.c[a][i] * grid.spacing(a);
      i = grid.shifted(i, a, 1);
    }
    mf.angle.integral[a] = s;
  }
  return mf;
}

double xiJ_vs_muL_residual(const FramePacket& fp, const CYStructure& cy) {
  const MaslovForm mf = maslov_form(fp, cy);
  const OneForm x = xi_J(fp);
  double r = 0.0;
  for (int a = 0; a < fp.n; ++a)
    for (std::size_t p = 0; p < fp.nodes.size(); ++p) r = std::max(r, std::abs(x.c[a][p] + mf.mu.c[a][p]));
  return r;
}

double same_angle_residual(const FramePacket& fp, const CYStructure& cy) {
  double r = 0.0;
  for (const NodeFrame& f : fp.nodes) {
    const double th = angle_intrinsic(f.d, f.amb.g, f.amb.J, cy);
    const cplx expect = std::polar(f.rho_J * f.vol_density, th);
    r = std::max(r, std::abs(cy.evaluate(f.d) - expect));
  }
  return r;
}

CalibrationReport calibration_inequality_check(const Mat& v, const Mat& g, const Mat& j, const CYStructure& cy,
                                               double theta, double tol) {
  CalibrationReport r;
  const Mat e = gram_schmidt(v, g);
  const cplx om = std::polar(1.0, theta) * cy.evaluate(e);
  r.re_omega = om.real();
  r.im_omega = om.imag();
  r.vol_J = hermitian_volume(e, g, j);
  r.vol_g = 1.0;
  r.slack_first = r.vol_J - r.re_omega;
  r.slack_second = r.vol_g - r.vol_J;
  r.first_equality = std::abs(r.slack_first) <= tol;
  r.second_equality = std::abs(r.slack_second) <= tol;
  // Both slacks are quadratic in the defect (Im, resp. omega), so the
  // defect tolerance matching a slack tolerance tol is sqrt(2 tol).
  const double dtol = std::sqrt(2.0 * tol);
  r.first_predicted = std::abs(r.im_omega) <= dtol && r.re_omega > 0.0;
  const Mat w = e.transpose() * j.transpose() * g * e;
  r.second_predicted = max_abs(w) <= dtol;
  r.violated = r.slack_first < -tol || r.slack_second < -tol;
  return r;
}

}  // namespace trflow
