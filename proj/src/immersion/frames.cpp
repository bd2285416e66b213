#include "trflow/immersion/frames.hpp"

#include <cmath>
#include <sstream>

#include "trflow/core/errors.hpp"
#include "trflow/core/parallel.hpp"
#include "trflow/kernels/stencil.hpp"

namespace trflow {

Vec NodeFrame::l_coords(const Vec& v) const {
  const int n = static_cast<int>(d.cols());
  return (Binv * v).head(n);
}

Vec NodeFrame::j_coords(const Vec& v) const {
  const int n = static_cast<int>(d.cols());
  return (Binv * v).tail(n);
}

double rho_J_hermitian(const Mat& v, const Mat& g, const Mat& j) {
  const Mat e = gram_schmidt(v, g);
  const Mat w = e.transpose() * j.transpose() * g * e;  // omega-bar(e_i, e_j)
  const int n = static_cast<int>(v.cols());
  CMat h(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) h(a, b) = cplx(a == b ? 1.0 : 0.0, -w(a, b));
  const double det = complex_det(h).real();
  if (!(det > 0.0)) throw DegenerateError("degenerate frame: det_C h is not positive");
  return std::sqrt(det);
}

double rho_J_volume(const Mat& v, const Mat& g, const Mat& j) {
  const Mat e = gram_schmidt(v, g);
  const int n = static_cast<int>(v.cols());
  Mat m(2 * n, 2 * n);
  m << e, j * e;
  const double vol = std::sqrt(g.determinant()) * std::abs(m.determinant());
  if (!(vol > 0.0)) throw DegenerateError("degenerate frame: vol(e, Je) vanishes");
  return std::sqrt(vol);
}

NodeFrame node_frame(const Vec& pos, const Mat& d, const PointGeometry& amb) {
  const int n = static_cast<int>(d.cols());
  const int dim = 2 * n;
  NodeFrame f;
  f.pos = pos;
  f.d = d;
  f.jd = amb.J * d;
  f.B.resize(dim, dim);
  f.B << d, f.jd;
  Eigen::PartialPivLU<Mat> lu(f.B);
  f.Binv = lu.inverse();
  Mat pl = Mat::Zero(dim, dim), pj = Mat::Zero(dim, dim);
  for (int k = 0; k < n; ++k) {
    pl(k, k) = 1.0;
    pj(n + k, n + k) = 1.0;
  }
  f.pi_L = f.B * pl * f.Binv;
  f.pi_J = f.B * pj * f.Binv;
  f.gind = d.transpose() * amb.g * d;
  f.gind_inv = f.gind.inverse();
  f.pi_T = d * f.gind_inv * d.transpose() * amb.g;
  f.pi_N = Mat::Identity(dim, dim) - f.pi_T;
  f.omega = d.transpose() * amb.omega * d;
  f.vol_density = std::sqrt(f.gind.determinant());
  f.e = gram_schmidt(d, amb.g);
  f.rho_J = rho_J_hermitian(d, amb.g, amb.J);
  f.rho_J_volume = rho_J_volume(d, amb.g, amb.J);
  f.amb = amb;
  return f;
}

std::string node_label(const TorusGrid& grid, std::size_t idx) {
  const auto c = grid.coords(idx);
  std::ostringstream os;
  os << "node " << idx << " (";
  for (int a = 0; a < grid.n(); ++a) os << (a ? "," : "") << c[a];
  os << ")";
  return os.str();
}

FramePacket frames(const Immersion& imm, const AmbientModel& model, const FrameOptions& opt) {
  const TorusGrid& grid = imm.grid();
  const int n = grid.n();
  if (model.dim() != imm.ambient_dim()) throw ConfigError("immersion and ambient dimensions differ");
  const ImmersionDerivatives der = immersion_derivatives(imm, opt.second_derivatives);
  FramePacket fp;
  fp.grid = grid;
  fp.n = n;
  fp.has_curvature = opt.curvature;
  fp.has_second = opt.second_derivatives;
  fp.nodes.resize(grid.size());
  parallel_for(grid.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const Vec x = model.domain().reduce(imm.position(i));
      PointGeometry geo = model.geometry(x, opt.curvature);
      NodeFrame f;
      try {
        f = node_frame(imm.position(i), der.d[i], geo);
      } catch (const DegenerateError& err) {
        throw DegenerateError("degenerate: totally real margin lost at " + node_label(grid, i) + ": " + err.what());
      }
      if (opt.second_derivatives) f.dd = der.dd[i];
      if (opt.curvature) {
        const CurvatureSet& cs = geo.curvature();
        f.chern_form = cs.chern_form;
        f.rho_bar = cs.rho;
        for (int a = 0; a < n; ++a)
          for (int c = 0; c < n; ++c) f.riemann_tangent[a][c] = cs.riemann.endo(f.d.col(a), f.d.col(c));
        f.amb.curv.reset();
      }
      fp.nodes[i] = std::move(f);
    }
  });
  fp.min_rho = fp.nodes[0].rho_J;
  for (std::size_t i = 1; i < fp.nodes.size(); ++i)
    if (fp.nodes[i].rho_J < fp.min_rho) {
      fp.min_rho = fp.nodes[i].rho_J;
      fp.worst_node = i;
    }
  if (opt.enforce_margin && fp.min_rho < opt.margin) {
    std::ostringstream os;
    os << "degenerate: totally real margin lost at " << node_label(grid, fp.worst_node)
       << " (rho_J = " << fp.min_rho << " < " << opt.margin << ")";
    throw DegenerateError(os.str());
  }
  return fp;
}

Volumes volumes(const FramePacket& fp) {
  Volumes v;
  const std::size_t N = fp.nodes.size();
  v.density_g.resize(N);
  v.density_J.resize(N);
  for (std::size_t i = 0; i < N; ++i) {
    v.density_g[i] = fp.nodes[i].vol_density;
    v.density_J[i] = fp.nodes[i].rho_J * fp.nodes[i].vol_density;
  }
  v.vol_g = grid_integrate(fp.grid, v.density_g);
  v.vol_J = grid_integrate(fp.grid, v.density_J);
  return v;
}

double sup_omega(const FramePacket& fp) {
  double s = 0.0;
  for (const auto& f : fp.nodes) s = std::max(s, max_abs(f.omega) / f.vol_density);
  return s;
}

}  // namespace trflow
