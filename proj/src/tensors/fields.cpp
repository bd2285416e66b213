#include "trflow/tensors/fields.hpp"

#include <cmath>

#include "trflow/core/errors.hpp"
#include "trflow/core/parallel.hpp"

namespace trflow {

namespace {

int ncols(const NodeFrame& f) { return static_cast<int>(f.d.cols()); }

template <class F>
VectorField map_nodes(const FramePacket& fp, F fn) {
  VectorField out(fp.nodes.size());
  parallel_for(fp.nodes.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) out[i] = fn(fp.nodes[i]);
  });
  return out;
}

OneForm form_from_nodes(const FramePacket& fp, const std::vector<Vec>& comps) {
  OneForm a;
  a.n = fp.n;
  for (int k = 0; k < fp.n; ++k) {
    a.c[k].resize(comps.size());
    for (std::size_t p = 0; p < comps.size(); ++p) a.c[k][p] = comps[p](k);
  }
  return a;
}

void require_second(const FramePacket& fp) {
  if (!fp.has_second) throw UnsupportedError("frames were computed without second derivatives");
}

void require_curvature(const FramePacket& fp) {
  if (!fp.has_curvature) throw UnsupportedError("frames were computed without ambient curvature");
}

void require_kahler(const AmbientModel& m, const char* what) {
  if (!m.is_kahler())
    throw UnsupportedError(std::string(what) + " needs a Kahler ambient (it relies on a parallel complex structure)");
}

double g_norm(const NodeFrame& f, const Vec& v) { return std::sqrt(std::max(0.0, v.dot(f.amb.g * v))); }

}  // namespace

Vec chern_derivative(const NodeFrame& f, int i, int j) {
  return f.dd[i][j] + f.amb.chern.apply(f.d.col(i), f.d.col(j));
}

Vec levi_civita_derivative(const NodeFrame& f, int i, int j) {
  return f.dd[i][j] + f.amb.levi_civita.apply(f.d.col(i), f.d.col(j));
}

SecondFundamental second_fundamental(const NodeFrame& f) {
  SecondFundamental a;
  const int n = ncols(f);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a[i][j] = f.pi_N * levi_civita_derivative(f, i, j);
  return a;
}

Vec mean_curvature_at(const NodeFrame& f) {
  const int n = ncols(f);
  Vec h = Vec::Zero(f.d.rows());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) h += f.gind_inv(i, j) * levi_civita_derivative(f, i, j);
  return f.pi_N * h;
}

// Trace over TL of Y -> J pi_J nabla_{d_k} Y. With pi_J V = J d y, y the lower
// B-coordinates of V, J pi_J V = -d y, so the i-th column is -y(nabla_k d_i).
Vec xi_J_at(const NodeFrame& f, bool levi_civita) {
  const int n = ncols(f);
  Vec xi(n);
  for (int k = 0; k < n; ++k) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      const Vec v = levi_civita ? levi_civita_derivative(f, k, i) : chern_derivative(f, k, i);
      s -= f.j_coords(v)(i);
    }
    xi(k) = s;
  }
  return xi;
}

// xi(X) = -omega-bar(e_i, A(e_i, X))
Vec xi_at(const NodeFrame& f) {
  const int n = ncols(f);
  const SecondFundamental a = second_fundamental(f);
  Vec xi = Vec::Zero(n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) xi(k) -= f.gind_inv(i, j) * f.d.col(i).dot(f.amb.omega * a[j][k]);
  return xi;
}

// H_J = g^{kl} g^{ij} g-bar(pi_J nabla_{d_i} d_l, J d_j) J d_k
Vec H_J_at(const NodeFrame& f) {
  const int n = ncols(f);
  Vec c = Vec::Zero(n);  // coefficients on J d_k
  Mat jg = f.jd.transpose() * f.amb.g;  // rows: g-bar(J d_j, .)
  for (int l = 0; l < n; ++l) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      const Vec pv = f.pi_J * chern_derivative(f, i, l);
      for (int j = 0; j < n; ++j) s += f.gind_inv(i, j) * jg.row(j).dot(pv);
    }
    for (int k = 0; k < n; ++k) c(k) += f.gind_inv(k, l) * s;
  }
  return f.jd * c;
}

// T_J = -g-bar(pi_L J T(e_j, e_i), e_i) J e_j
Vec T_J_at(const NodeFrame& f) {
  const int n = ncols(f);
  Vec out = Vec::Zero(f.d.rows());
  const Mat pj = f.pi_L * f.amb.J;
  for (int j = 0; j < n; ++j) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      const Vec t = pj * f.amb.torsion(f.e.col(j), f.e.col(i));
      s += t.dot(f.amb.g * f.e.col(i));
    }
    out -= s * (f.amb.J * f.e.col(j));
  }
  return out;
}

// S_J = -g-bar(pi_L T(J e_j, e_i), e_i) J e_j
Vec S_J_at(const NodeFrame& f) {
  const int n = ncols(f);
  Vec out = Vec::Zero(f.d.rows());
  for (int j = 0; j < n; ++j) {
    const Vec je = f.amb.J * f.e.col(j);
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      const Vec t = f.pi_L * f.amb.torsion(je, f.e.col(i));
      s += t.dot(f.amb.g * f.e.col(i));
    }
    out -= s * je;
  }
  return out;
}

Vec omega_contract(const NodeFrame& f, const Vec& v) { return (v.transpose() * f.amb.omega * f.d).transpose(); }

VectorField mean_curvature(const FramePacket& fp) {
  require_second(fp);
  return map_nodes(fp, mean_curvature_at);
}
VectorField H_J(const FramePacket& fp) {
  require_second(fp);
  return map_nodes(fp, H_J_at);
}
VectorField T_J(const FramePacket& fp) { return map_nodes(fp, T_J_at); }
VectorField S_J(const FramePacket& fp) { return map_nodes(fp, S_J_at); }

OneForm xi_J(const FramePacket& fp, bool levi_civita) {
  require_second(fp);
  return form_from_nodes(fp, map_nodes(fp, [&](const NodeFrame& f) { return xi_J_at(f, levi_civita); }));
}

OneForm xi_classical(const FramePacket& fp, const AmbientModel& model) {
  require_kahler(model, "the classical Maslov form xi");
  require_second(fp);
  return form_from_nodes(fp, map_nodes(fp, xi_at));
}

OneForm omega_contract(const FramePacket& fp, const VectorField& v) {
  std::vector<Vec> c(fp.nodes.size());
  for (std::size_t p = 0; p < c.size(); ++p) c[p] = omega_contract(fp.nodes[p], v[p]);
  return form_from_nodes(fp, c);
}

const char* flow_kind_name(FlowKind k) {
  switch (k) {
    case FlowKind::mcf: return "mcf";
    case FlowKind::jmcf: return "jmcf";
    case FlowKind::maslov: return "maslov";
  }
  return "?";
}

FlowKind parse_flow_kind(const std::string& s) {
  if (s == "mcf") return FlowKind::mcf;
  if (s == "jmcf") return FlowKind::jmcf;
  if (s == "maslov") return FlowKind::maslov;
  throw ConfigError("unknown flow kind '" + s + "' (expected mcf, jmcf or maslov)");
}

VectorField velocity(const FramePacket& fp, FlowKind kind) {
  require_second(fp);
  switch (kind) {
    case FlowKind::mcf: return map_nodes(fp, mean_curvature_at);
    case FlowKind::jmcf: return map_nodes(fp, [](const NodeFrame& f) { return Vec(H_J_at(f) + S_J_at(f)); });
    case FlowKind::maslov: return map_nodes(fp, [](const NodeFrame& f) { return Vec(H_J_at(f) + T_J_at(f)); });
  }
  return {};
}

double sup_norm(const FramePacket& fp, const VectorField& v) {
  double s = 0.0;
  for (std::size_t p = 0; p < v.size(); ++p) s = std::max(s, g_norm(fp.nodes[p], v[p]));
  return s;
}

double sup_norm(const OneForm& a) {
  double s = 0.0;
  for (int k = 0; k < a.n; ++k)
    for (double x : a.c[k]) s = std::max(s, std::abs(x));
  return s;
}

double sup_norm(const TwoForm& w) {
  double s = 0.0;
  for (int i = 0; i < w.n; ++i)
    for (int j = i + 1; j < w.n; ++j)
      for (double x : w.c[i][j]) s = std::max(s, std::abs(x));
  return s;
}

namespace {

OneForm subtract(const OneForm& a, const OneForm& b) {
  OneForm r = a;
  for (int k = 0; k < a.n; ++k)
    for (std::size_t p = 0; p < r.c[k].size(); ++p) r.c[k][p] -= b.c[k][p];
  return r;
}

// w - s * v
TwoForm subtract(const TwoForm& w, const TwoForm& v, double s = 1.0) {
  TwoForm r = w;
  for (int i = 0; i < w.n; ++i)
    for (int j = i + 1; j < w.n; ++j)
      for (std::size_t p = 0; p < r.c[i][j].size(); ++p) r.c[i][j][p] -= s * v.c[i][j][p];
  return r;
}

TwoForm pullback(const FramePacket& fp, const Mat NodeFrame::*field) {
  TwoForm w;
  w.n = fp.n;
  for (int i = 0; i < fp.n; ++i)
    for (int j = i + 1; j < fp.n; ++j) {
      w.c[i][j].resize(fp.nodes.size());
      for (std::size_t p = 0; p < fp.nodes.size(); ++p) {
        const NodeFrame& f = fp.nodes[p];
        w.c[i][j][p] = f.d.col(i).dot((f.*field) * f.d.col(j));
      }
    }
  return w;
}

}  // namespace

TwoForm pullback_chern_form(const FramePacket& fp) {
  require_curvature(fp);
  return pullback(fp, &NodeFrame::chern_form);
}

TwoForm pullback_ricci_form(const FramePacket& fp) {
  require_curvature(fp);
  return pullback(fp, &NodeFrame::rho_bar);
}

double maslov_identity_residual(const FramePacket& fp) {
  require_second(fp);
  double r = 0.0;
  for (const NodeFrame& f : fp.nodes) {
    const Vec lhs = omega_contract(f, H_J_at(f) + T_J_at(f));
    r = std::max(r, (lhs - xi_J_at(f)).cwiseAbs().maxCoeff());
  }
  return r;
}

double h_hook_omega_residual(const FramePacket& fp, const AmbientModel& model) {
  const OneForm xi = xi_classical(fp, model);
  const OneForm dstar = codifferential(fp, pullback_omega(fp));
  double r = 0.0;
  for (std::size_t p = 0; p < fp.nodes.size(); ++p) {
    const Vec wh = omega_contract(fp.nodes[p], mean_curvature_at(fp.nodes[p]));
    for (int k = 0; k < fp.n; ++k) r = std::max(r, std::abs(wh(k) + dstar.c[k][p] - xi.c[k][p]));
  }
  return r;
}

// d xi(X,Y) = omega-bar(R-bar(X,Y) e_i, e_i) - omega(R(X,Y) e_i, e_i)
//             - 2 omega-bar(A(X, e_i), A(Y, e_i))
double dxi_formula_residual(const FramePacket& fp, const AmbientModel& model) {
  require_curvature(fp);
  const TwoForm dxi = exterior_d(fp.grid, xi_classical(fp, model));
  const InducedCurvature ic = induced_curvature(fp);
  const int n = fp.n;
  double r = 0.0;
  for (std::size_t p = 0; p < fp.nodes.size(); ++p) {
    const NodeFrame& f = fp.nodes[p];
    const SecondFundamental A = second_fundamental(f);
    for (int x = 0; x < n; ++x)
      for (int y = x + 1; y < n; ++y) {
        double rhs = 0.0;
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) {
            const double gab = f.gind_inv(a, b);
            const double amb = (f.riemann_tangent[x][y] * f.d.col(a)).dot(f.amb.omega * f.d.col(b));
            double intr = 0.0;
            for (int c = 0; c < n; ++c) intr += ic.r[p][x][y](c, a) * f.omega(c, b);
            const double aa = A[x][a].dot(f.amb.omega * A[y][b]);
            rhs += gab * (amb - intr - 2.0 * aa);
          }
        r = std::max(r, std::abs(dxi.c[x][y][p] - rhs));
      }
  }
  return r;
}

double dxiJ_vs_P_residual(const FramePacket& fp) {
  return sup_norm(subtract(exterior_d(fp.grid, xi_J(fp)), pullback_chern_form(fp), 0.5));
}

double integrability_residual(const FramePacket& fp) {
  const OneForm a = omega_contract(fp, velocity(fp, FlowKind::maslov));
  return sup_norm(subtract(exterior_d(fp.grid, a), pullback_chern_form(fp), 0.5));
}

AltMeanCurvatures alt_mean_curvatures(const FramePacket& fp, double lag_tol) {
  require_second(fp);
  if (lag_tol <= 0.0) {
    Vec lo = fp.nodes[0].pos, hi = fp.nodes[0].pos;
    for (const auto& f : fp.nodes) {
      lo = lo.cwiseMin(f.pos);
      hi = hi.cwiseMax(f.pos);
    }
    lag_tol = 1e-8 * std::max(1.0, (hi - lo).norm());
  }
  double sw = 0.0;
  for (const auto& f : fp.nodes) sw = std::max(sw, max_abs(f.omega));
  if (sw > lag_tol) throw DomainError("alternative mean curvatures need a Lagrangian immersion (sup|omega| exceeds tolerance)");
  const int n = fp.n;
  AltMeanCurvatures out;
  const std::size_t N = fp.nodes.size();
  out.maslov.resize(N);
  out.generalized.resize(N);
  out.chern.resize(N);
  out.complex.resize(N);
  out.H.resize(N);
  for (std::size_t p = 0; p < N; ++p) {
    const NodeFrame& f = fp.nodes[p];
    const Vec h = mean_curvature_at(f);
    const Vec tj = T_J_at(f);
    Vec ht = Vec::Zero(f.d.rows()), hc = Vec::Zero(f.d.rows());
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        ht += f.gind_inv(i, j) * chern_derivative(f, i, j);
        // nabla-bar_{d_i}(J d_j) = (nabla-bar_{d_i} J) d_j + J nabla-bar_{d_i} d_j
        Mat nj = Mat::Zero(f.d.rows(), f.d.rows());
        for (int a = 0; a < f.d.rows(); ++a) nj += f.d(a, i) * f.amb.nabla_j[a];
        hc += f.gind_inv(i, j) * (nj * f.d.col(j) + f.amb.J * levi_civita_derivative(f, i, j));
      }
    out.H[p] = h;
    out.maslov[p] = H_J_at(f) + tj;
    out.generalized[p] = h + 2.0 * tj;
    out.chern[p] = 2.0 * (f.pi_N * ht) - h;
    out.complex[p] = -(f.pi_N * (f.amb.J * hc));
    const Vec* v[4] = {&out.maslov[p], &out.generalized[p], &out.chern[p], &out.complex[p]};
    for (int a = 0; a < 4; ++a)
      for (int b = a + 1; b < 4; ++b) out.max_pairwise = std::max(out.max_pairwise, g_norm(f, *v[a] - *v[b]));
    out.generalized_minus_H = std::max(out.generalized_minus_H, g_norm(f, out.generalized[p] - h));
  }
  return out;
}

}  // namespace trflow
