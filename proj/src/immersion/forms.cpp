#include "trflow/immersion/forms.hpp"

#include "trflow/core/errors.hpp"

namespace trflow {

double TwoForm::component(std::size_t node, int i, int j) const {
  if (i == j) return 0.0;
  return i < j ? c[i][j][node] : -c[j][i][node];
}

OneForm exterior_d(const TorusGrid& grid, const ScalarField& f) {
  OneForm a;
  a.n = grid.n();
  for (int i = 0; i < a.n; ++i) a.c[i] = grid_diff(grid, f, i);
  return a;
}

TwoForm exterior_d(const TorusGrid& grid, const OneForm& a) {
  TwoForm w;
  w.n = grid.n();
  for (int i = 0; i < w.n; ++i)
    for (int j = i + 1; j < w.n; ++j) {
      ScalarField dij = grid_diff(grid, a.c[j], i);
      const ScalarField dji = grid_diff(grid, a.c[i], j);
      for (std::size_t k = 0; k < dij.size(); ++k) dij[k] -= dji[k];
      w.c[i][j] = std::move(dij);
    }
  return w;
}

TwoForm pullback_omega(const FramePacket& fp) {
  TwoForm w;
  w.n = fp.n;
  const std::size_t N = fp.nodes.size();
  for (int i = 0; i < fp.n; ++i)
    for (int j = i + 1; j < fp.n; ++j) {
      w.c[i][j].resize(N);
      for (std::size_t k = 0; k < N; ++k) w.c[i][j][k] = fp.nodes[k].omega(i, j);
    }
  return w;
}

// delta a = -(1/sqrt g) d_i (sqrt g g^{ij} a_j)
ScalarField codifferential(const FramePacket& fp, const OneForm& a) {
  const std::size_t N = fp.nodes.size();
  const int n = fp.n;
  ScalarField out(N, 0.0);
  for (int i = 0; i < n; ++i) {
    ScalarField flux(N);
    for (std::size_t k = 0; k < N; ++k) {
      const NodeFrame& f = fp.nodes[k];
      double s = 0.0;
      for (int j = 0; j < n; ++j) s += f.gind_inv(i, j) * a.c[j][k];
      flux[k] = f.vol_density * s;
    }
    const ScalarField df = grid_diff(fp.grid, flux, i);
    for (std::size_t k = 0; k < N; ++k) out[k] -= df[k];
  }
  for (std::size_t k = 0; k < N; ++k) out[k] /= fp.nodes[k].vol_density;
  return out;
}

// (delta w)_b = -g_bk (1/sqrt g) d_i (sqrt g w^{ik})
OneForm codifferential(const FramePacket& fp, const TwoForm& w) {
  const std::size_t N = fp.nodes.size();
  const int n = fp.n;
  std::array<ScalarField, kMaxTorus> up;  // (1/sqrt g) d_i(sqrt g w^{ik}) for each k
  for (int k = 0; k < n; ++k) up[k].assign(N, 0.0);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      ScalarField flux(N);
      for (std::size_t p = 0; p < N; ++p) {
        const NodeFrame& f = fp.nodes[p];
        double s = 0.0;
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) s += f.gind_inv(i, a) * f.gind_inv(k, b) * w.component(p, a, b);
        flux[p] = f.vol_density * s;
      }
      const ScalarField df = grid_diff(fp.grid, flux, i);
      for (std::size_t p = 0; p < N; ++p) up[k][p] += df[p];
    }
  OneForm out;
  out.n = n;
  for (int b = 0; b < n; ++b) {
    out.c[b].resize(N);
    for (std::size_t p = 0; p < N; ++p) {
      const NodeFrame& f = fp.nodes[p];
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += f.gind(b, k) * up[k][p];
      out.c[b][p] = -s / f.vol_density;
    }
  }
  return out;
}

InducedCurvature induced_curvature(const FramePacket& fp) {
  const std::size_t N = fp.nodes.size();
  const int n = fp.n;
  // dg[l][a][b] = d_l g_ab
  std::array<std::array<std::array<ScalarField, kMaxTorus>, kMaxTorus>, kMaxTorus> dg;
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) {
      ScalarField gab(N);
      for (std::size_t p = 0; p < N; ++p) gab[p] = fp.nodes[p].gind(a, b);
      for (int l = 0; l < n; ++l) {
        dg[l][a][b] = grid_diff(fp.grid, gab, l);
        if (b != a) dg[l][b][a] = dg[l][a][b];
      }
    }
  InducedCurvature ic;
  ic.n = n;
  ic.christoffel.resize(N);
  for (std::size_t p = 0; p < N; ++p) {
    const Mat& gi = fp.nodes[p].gind_inv;
    for (int i = 0; i < n; ++i) {
      Mat c = Mat::Zero(n, n);
      for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j) {
          double s = 0.0;
          for (int l = 0; l < n; ++l)
            s += gi(k, l) * (dg[i][j][l][p] + dg[j][i][l][p] - dg[l][i][j][p]);
          c(k, j) = 0.5 * s;
        }
      ic.christoffel[p][i] = c;
    }
  }
  // d_a of each Christoffel entry
  std::array<std::array<std::array<std::array<ScalarField, kMaxTorus>, kMaxTorus>, kMaxTorus>, kMaxTorus> dc;
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j) {
        ScalarField f(N);
        for (std::size_t p = 0; p < N; ++p) f[p] = ic.christoffel[p][i](k, j);
        for (int a = 0; a < n; ++a) dc[a][i][k][j] = grid_diff(fp.grid, f, a);
      }
  ic.r.resize(N);
  for (std::size_t p = 0; p < N; ++p)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        Mat r(n, n);
        for (int k = 0; k < n; ++k)
          for (int j = 0; j < n; ++j) r(k, j) = dc[a][b][k][j][p] - dc[b][a][k][j][p];
        const auto& C = ic.christoffel[p];
        r += C[a] * C[b] - C[b] * C[a];
        ic.r[p][a][b] = r;
      }
  return ic;
}

ScalarField gauss_curvature(const FramePacket& fp, const InducedCurvature& ic) {
  if (fp.n != 2) throw UnsupportedError("gauss curvature needs a surface");
  ScalarField k(fp.nodes.size());
  for (std::size_t p = 0; p < k.size(); ++p) {
    // R_1212 = g(R(d1,d2) d2, d1)
    const Mat& g = fp.nodes[p].gind;
    const Vec r = ic.r[p][0][1].col(1);
    k[p] = (g.row(0) * r)(0) / g.determinant();
  }
  return k;
}

}  // namespace trflow
