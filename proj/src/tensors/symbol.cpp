#include "trflow/tensors/symbol.hpp"

#include <cmath>

#include "trflow/core/errors.hpp"

namespace trflow {

namespace {

int numerical_rank(const Eigen::MatrixXd& m, double tol) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto s = svd.singularValues();
  const double scale = std::max(1.0, s.size() ? s(0) : 0.0);
  int r = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > tol * scale) ++r;
  return r;
}

}  // namespace

SymbolReport symbol_report(const NodeFrame& f, const Vec& zeta, double rank_tol) {
  const int n = static_cast<int>(f.d.cols());
  const int dim = 2 * n;
  if (zeta.size() != n) throw ConfigError("covector has the wrong dimension");
  if (zeta.norm() == 0.0) throw ConfigError("symbol needs a nonzero covector");
  SymbolReport r;
  r.zeta = zeta;
  const Vec sharp = f.gind_inv * zeta;
  const Vec v = f.d * sharp;
  const Vec jv = f.amb.J * v;
  r.direction = jv;
  r.zeta_norm_sq = zeta.dot(sharp);
  r.sigma_HJ = jv * (jv.transpose() * f.amb.g * f.pi_J);
  // Image direction is jv; sigma(jv) = lambda jv.
  const Vec image = r.sigma_HJ * jv;
  r.eigenvalue = image.dot(f.amb.g * jv) / jv.dot(f.amb.g * jv);
  const int rows = n * (n - 1) / 2;
  r.sigma_L = Mat::Zero(rows, dim);
  const Mat wd = f.amb.omega * f.d;  // column b: W -> omega-bar(W, d_b) as a row vector after transpose
  int row = 0;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b, ++row)
      r.sigma_L.row(row) = zeta(a) * wd.col(b).transpose() - zeta(b) * wd.col(a).transpose();
  r.rank_HJ = numerical_rank(r.sigma_HJ, rank_tol);
  r.kernel_dim_HJ = dim - r.rank_HJ;
  r.kernel_dim_L = dim - numerical_rank(r.sigma_L, rank_tol);
  r.composition_residual = rows ? max_abs(r.sigma_L * r.sigma_HJ) : 0.0;
  return r;
}

const char* plane_wave_direction_name(PlaneWaveDirection d) {
  switch (d) {
    case PlaneWaveDirection::j_zeta: return "j-zeta";
    case PlaneWaveDirection::tangent: return "tangent";
    case PlaneWaveDirection::j_perp: return "j-perp";
  }
  return "?";
}

PlaneWaveReport linearize_HJ_planewave(const Immersion& imm, const AmbientModel& model,
                                       const std::vector<int>& mode, PlaneWaveDirection dir,
                                       double amplitude) {
  const TorusGrid& grid = imm.grid();
  const int n = grid.n();
  if (static_cast<int>(mode.size()) != n) throw ConfigError("plane-wave mode has the wrong dimension");
  Vec k(n);
  double npw = 1e300;
  for (int a = 0; a < n; ++a) {
    k(a) = mode[a];
    if (mode[a] != 0) npw = std::min(npw, static_cast<double>(grid.resolution(a)) / std::abs(mode[a]));
  }
  if (k.norm() == 0.0) throw ConfigError("plane-wave mode must be nonzero");
  if (npw < 8.0) throw ConfigError("plane-wave mode is unresolvable: fewer than 8 nodes per wavelength");
  if (dir == PlaneWaveDirection::j_perp && n < 2) throw ConfigError("j-perp direction needs n >= 2");

  FrameOptions opt;
  const FramePacket base = frames(imm, model, opt);
  const VectorField h0 = H_J(base);
  const Vec zhat = k / k.norm();

  std::vector<Vec> dirs(grid.size()), pos(grid.size());
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const NodeFrame& f = base.nodes[p];
    const Vec sharp = f.gind_inv * zhat;
    Vec v;
    switch (dir) {
      case PlaneWaveDirection::j_zeta: v = f.amb.J * (f.d * sharp); break;
      case PlaneWaveDirection::tangent: v = f.d * sharp; break;
      case PlaneWaveDirection::j_perp: {
        // a vector of TL g-orthogonal to sharp: w with zeta(w) = 0
        int axis = 0;
        for (int a = 1; a < n; ++a)
          if (std::abs(zhat(a)) < std::abs(zhat(axis))) axis = a;
        Mat cols(n, 2);
        cols.col(0) = sharp;
        cols.col(1) = Vec::Unit(n, axis);
        const Mat e = gram_schmidt(cols, f.gind);
        v = f.amb.J * (f.d * e.col(1));
        v *= std::sqrt(zhat.dot(sharp));  // same length scale as the j-zeta direction
        break;
      }
    }
    dirs[p] = v;
    const double phase = k.dot(grid.angles(p));
    pos[p] = imm.position(p) + amplitude * std::cos(phase) * v;
  }
  const FramePacket pert = frames(imm.with_positions(pos), model, opt);
  const VectorField h1 = H_J(pert);

  PlaneWaveReport rep;
  rep.nodes_per_wavelength = npw;
  const double norm = 2.0 / static_cast<double>(grid.size());
  Vec c = Vec::Zero(imm.ambient_dim());
  double vv = 0.0, ksq = 0.0;
  Mat g = Mat::Zero(imm.ambient_dim(), imm.ambient_dim());
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const double phase = k.dot(grid.angles(p));
    c += norm * std::cos(phase) * (h1[p] - h0[p]) / amplitude;
    g += base.nodes[p].amb.g / static_cast<double>(grid.size());
    vv += dirs[p].dot(base.nodes[p].amb.g * dirs[p]) / static_cast<double>(grid.size());
    ksq += k.dot(base.nodes[p].gind_inv * k) / static_cast<double>(grid.size());
  }
  // Average direction (constant on straight tori).
  Vec vbar = Vec::Zero(imm.ambient_dim());
  for (const Vec& v : dirs) vbar += v / static_cast<double>(grid.size());
  rep.k_sq = ksq;
  rep.coefficient = vv > 0.0 ? -c.dot(g * vbar) / vv : 0.0;
  rep.response = vv > 0.0 ? std::sqrt(std::max(0.0, c.dot(g * c)) / vv) : 0.0;
  rep.ratio = rep.coefficient / ksq;
  return rep;
}

}  // namespace trflow
