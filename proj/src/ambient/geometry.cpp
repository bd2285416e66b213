#include "trflow/ambient/geometry.hpp"

#include "trflow/core/errors.hpp"

namespace trflow {

Vec Connection::apply(const Vec& x, const Vec& y) const { return along_vector(x) * y; }

Mat Connection::along_vector(const Vec& x) const {
  Mat m = Mat::Zero(dim, dim);
  for (int i = 0; i < dim; ++i)
    if (x(i) != 0.0) m += x(i) * along[i];
  return m;
}

Mat Curvature::endo(const Vec& x, const Vec& y) const {
  Mat m = Mat::Zero(dim, dim);
  for (int b = 0; b < dim; ++b)
    for (int c = 0; c < dim; ++c) {
      const double w = x(b) * y(c);
      if (w != 0.0) m += w * r[b][c];
    }
  return m;
}

const CurvatureSet& PointGeometry::curvature() const {
  if (!curv) throw UnsupportedError("curvature was not computed at this point");
  return *curv;
}

Vec PointGeometry::torsion(const Vec& x, const Vec& y) const {
  return chern.apply(x, y) - chern.apply(y, x);
}

double PointGeometry::max_nabla_j() const {
  double m = 0.0;
  for (int a = 0; a < dim; ++a) m = std::max(m, max_abs(nabla_j[a]));
  return m;
}

namespace {

// Curvature of a connection given its coefficient matrices C_b and their
// derivatives dC[a][b] = d_a C_b: R_bc = d_b C_c - d_c C_b + C_b C_c - C_c C_b.
Curvature curvature_of(int dim, const PerAxis<Mat>& c, const PerAxisPair<Mat>& dc) {
  Curvature r;
  r.dim = dim;
  for (int b = 0; b < dim; ++b)
    for (int e = 0; e < dim; ++e)
      r.r[b][e] = dc[b][e] - dc[e][b] + c[b] * c[e] - c[e] * c[b];
  return r;
}

}  // namespace

PointGeometry geometry_from_jet(const AmbientJet& jet, bool curvature) {
  const int d = jet.dim;
  if (jet.order < 1) throw UnsupportedError("geometry_from_jet: first derivatives required");
  if (curvature && jet.order < 2)
    throw UnsupportedError("geometry_from_jet: curvature requires second derivatives");

  PointGeometry pg;
  pg.dim = d;
  pg.g = jet.g;
  pg.ginv = jet.g.inverse();
  pg.J = jet.J;
  pg.omega = jet.J.transpose() * jet.g;

  // Lowered Christoffels: low[i](l, j) = Gamma_{l,ij}.
  PerAxis<Mat> low;
  for (int i = 0; i < d; ++i) {
    low[i] = Mat::Zero(d, d);
    for (int l = 0; l < d; ++l)
      for (int j = 0; j < d; ++j)
        low[i](l, j) = 0.5 * (jet.dg[i](j, l) + jet.dg[j](i, l) - jet.dg[l](i, j));
  }
  pg.levi_civita.dim = d;
  for (int i = 0; i < d; ++i) pg.levi_civita.along[i] = pg.ginv * low[i];

  const PerAxis<Mat>& gam = pg.levi_civita.along;
  pg.chern.dim = d;
  for (int a = 0; a < d; ++a) {
    pg.nabla_j[a] = jet.dJ[a] + gam[a] * jet.J - jet.J * gam[a];
    pg.chern.along[a] = gam[a] + 0.5 * pg.nabla_j[a] * jet.J;
  }

  if (!curvature) return pg;
  auto cs = std::make_shared<CurvatureSet>();

  // dgam[m][i] = d_m (Gamma_i).
  PerAxisPair<Mat> dgam;
  for (int m = 0; m < d; ++m) {
    const Mat dginv = -pg.ginv * jet.dg[m] * pg.ginv;
    for (int i = 0; i < d; ++i) {
      Mat dlow = Mat::Zero(d, d);
      for (int l = 0; l < d; ++l)
        for (int j = 0; j < d; ++j)
          dlow(l, j) = 0.5 * (jet.ddg[m][i](j, l) + jet.ddg[m][j](i, l) - jet.ddg[m][l](i, j));
      dgam[m][i] = dginv * low[i] + pg.ginv * dlow;
    }
  }
  cs->riemann = curvature_of(d, gam, dgam);

  PerAxisPair<Mat> dchern;
  for (int m = 0; m < d; ++m)
    for (int a = 0; a < d; ++a) {
      const Mat dnj = jet.ddJ[m][a] + dgam[m][a] * jet.J + gam[a] * jet.dJ[m] -
                      jet.dJ[m] * gam[a] - jet.J * dgam[m][a];
      dchern[m][a] = dgam[m][a] + 0.5 * (dnj * jet.J + pg.nabla_j[a] * jet.dJ[m]);
    }
  cs->chern_curvature = curvature_of(d, pg.chern.along, dchern);

  cs->ricci = Mat::Zero(d, d);
  for (int b = 0; b < d; ++b)
    for (int c = 0; c < d; ++c)
      for (int e = 0; e < d; ++e) cs->ricci(c, e) += cs->riemann.r[b][c](b, e);
  cs->rho = jet.J.transpose() * cs->ricci;

  cs->chern_form = Mat::Zero(d, d);
  for (int b = 0; b < d; ++b)
    for (int c = 0; c < d; ++c) cs->chern_form(b, c) = (jet.J * cs->chern_curvature.r[b][c]).trace();
  pg.curv = std::move(cs);
  return pg;
}

}  // namespace trflow
