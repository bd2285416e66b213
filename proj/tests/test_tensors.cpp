#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "trflow/ambient/model.hpp"
#include "trflow/ambient/queries.hpp"
#include "trflow/core/errors.hpp"
#include "trflow/immersion/presets.hpp"
#include "trflow/tensors/fields.hpp"
#include "trflow/tensors/symbol.hpp"

using namespace trflow;

namespace {

ModelPtr potential_model(PotentialTag tag) {
  KahlerPotential p;
  p.tag = tag;
  p.n = 2;
  return kahler_from_potential(p, DerivativeScheme::analytic);
}

ModelPtr bump_model(double h_amb = 1e-3) {
  BumpMetricSpec s;
  s.n = 2;
  s.epsilon = 0.1;
  s.center = Vec::Zero(4);
  s.width = 1.0;
  return almost_kahler_bump(s, h_amb);
}

FramePacket fr(const Immersion& imm, const AmbientModel& m, bool curvature = false) {
  FrameOptions o;
  o.curvature = curvature;
  return frames(imm, m, o);
}

}  // namespace

TEST_CASE("straight torus in the flat torus is totally geodesic") {
  auto m = make_flat_torus(2);
  const FramePacket fp = fr(straight_torus(TorusGrid::square(2, 32)), *m, true);
  CHECK(sup_norm(fp, mean_curvature(fp)) < 1e-12);
  CHECK(sup_norm(fp, H_J(fp)) < 1e-12);
  CHECK(sup_norm(xi_J(fp)) < 1e-12);
  CHECK(sup_norm(xi_classical(fp, *m)) < 1e-12);
  CHECK(maslov_identity_residual(fp) < 1e-12);
  CHECK(h_hook_omega_residual(fp, *m) < 1e-12);
  CHECK(dxi_formula_residual(fp, *m) < 1e-12);
  CHECK(integrability_residual(fp) < 1e-12);
}

TEST_CASE("product torus mean curvature is the circle curvature") {
  auto flat = make_flat(2);
  for (double r : {1.0, 2.0}) {
    const FramePacket fp = fr(product_torus(TorusGrid::square(2, 64), {r, r}), *flat);
    const VectorField H = mean_curvature(fp);
    double err = 0.0;
    for (std::size_t p = 0; p < H.size(); ++p) {
      Vec expect = -fp.nodes[p].pos / (r * r);
      err = std::max(err, (H[p] - expect).norm());
      // normal to L
      CHECK(std::abs(H[p].dot(fp.nodes[p].d.col(0))) < 1e-12);
      const SecondFundamental A = second_fundamental(fp.nodes[p]);
      CHECK((A[0][1] - A[1][0]).norm() < 1e-12);
    }
    CHECK(err < 1e-5 / r);
    CHECK(sup_norm(fp, H) == doctest::Approx(std::sqrt(2.0) / r).epsilon(1e-5));
  }
}

TEST_CASE("xi_J on the unit product torus and Lagrangian coincidences") {
  auto flat = make_flat(2);
  const FramePacket fp = fr(product_torus(TorusGrid::square(2, 64), {1.0, 1.0}), *flat);
  const OneForm x = xi_J(fp);
  for (int k = 0; k < 2; ++k)
    for (double v : x.c[k]) CHECK(v == doctest::Approx(-1.0).epsilon(1e-5));
  const OneForm xc = xi_classical(fp, *flat);
  const OneForm xl = xi_J(fp, true);
  for (int k = 0; k < 2; ++k)
    for (std::size_t p = 0; p < fp.nodes.size(); ++p) {
      CHECK(std::abs(x.c[k][p] - xc.c[k][p]) < 1e-5);
      CHECK(std::abs(x.c[k][p] - xl.c[k][p]) < 1e-12);
    }
  const VectorField H = mean_curvature(fp), hj = H_J(fp);
  double d = 0.0;
  for (std::size_t p = 0; p < H.size(); ++p) d = std::max(d, (H[p] - hj[p]).norm());
  CHECK(d < 1e-5);
}

TEST_CASE("H_J, T_J, S_J take values in J(TL)") {
  auto m = bump_model();
  const FramePacket fp = fr(sheared_torus(TorusGrid::square(2, 32), 0.5, 0.2), *m);
  for (const NodeFrame& f : fp.nodes) {
    for (const Vec& v : {H_J_at(f), T_J_at(f), S_J_at(f)}) CHECK((f.pi_L * v).norm() < 1e-10 * (1 + v.norm()));
  }
}

TEST_CASE("Maslov identity on flat, Kahler and almost Kahler data") {
  auto flat = make_flat(2);
  auto ch = potential_model(PotentialTag::complex_hyperbolic);
  auto ak = bump_model();
  const auto g = TorusGrid::square(2, 32);
  CHECK(maslov_identity_residual(fr(product_torus(g, {1.0, 1.0}), *flat)) < 1e-10);
  CHECK(maslov_identity_residual(fr(sheared_torus(g, 1.0, 0.2), *flat)) < 1e-10);
  CHECK(maslov_identity_residual(fr(sheared_torus(g, 0.4, 0.2), *ch)) < 1e-10);
  CHECK(maslov_identity_residual(fr(sheared_torus(g, 0.5, 0.2), *ak)) < 1e-10);
}

TEST_CASE("torsion vectors: Kahler collapse and almost Kahler cancellation") {
  const auto g = TorusGrid::square(2, 32);
  auto ch = potential_model(PotentialTag::complex_hyperbolic);
  const FramePacket k = fr(sheared_torus(g, 0.4, 0.2), *ch);
  CHECK(sup_norm(k, T_J(k)) < 1e-8);
  CHECK(sup_norm(k, S_J(k)) < 1e-8);

  double prev = 0.0;
  for (double h : {2e-3, 1e-3}) {
    auto ak = bump_model(h);
    const FramePacket fp = fr(sheared_torus(g, 0.5, 0.2), *ak);
    const VectorField t = T_J(fp), s = S_J(fp);
    VectorField sum(t.size());
    for (std::size_t p = 0; p < t.size(); ++p) sum[p] = t[p] + s[p];
    const double tn = sup_norm(fp, t), sn = sup_norm(fp, sum);
    CHECK(tn > 1e-2);
    CHECK(sn < 1e-4);
    if (prev > 1e-11) CHECK(prev / std::max(sn, 1e-300) > 3.0);
    prev = sn;
  }
}

TEST_CASE("interior product of H with omega: refinement") {
  auto flat = make_flat(2);
  const double r32 = h_hook_omega_residual(fr(sheared_torus(TorusGrid::square(2, 32), 1.0, 0.2), *flat), *flat);
  const double r64 = h_hook_omega_residual(fr(sheared_torus(TorusGrid::square(2, 64), 1.0, 0.2), *flat), *flat);
  CHECK(r64 < 1e-4);
  CHECK(r32 / r64 > 3.0);
  auto ak = bump_model();
  const FramePacket fp = fr(sheared_torus(TorusGrid::square(2, 16), 0.5, 0.2), *ak);
  CHECK_THROWS_AS(h_hook_omega_residual(fp, *ak), UnsupportedError);
}

TEST_CASE("curvature formula for d xi") {
  auto flat = make_flat(2);
  const double f32 = dxi_formula_residual(fr(sheared_torus(TorusGrid::square(2, 32), 1.0, 0.2), *flat, true), *flat);
  const double f64 = dxi_formula_residual(fr(sheared_torus(TorusGrid::square(2, 64), 1.0, 0.2), *flat, true), *flat);
  CHECK(f64 < 1e-3);
  CHECK(f32 / f64 > 3.0);
  auto ch = potential_model(PotentialTag::complex_hyperbolic);
  const double c32 = dxi_formula_residual(fr(sheared_torus(TorusGrid::square(2, 32), 0.4, 0.2), *ch, true), *ch);
  const double c64 = dxi_formula_residual(fr(sheared_torus(TorusGrid::square(2, 64), 0.4, 0.2), *ch, true), *ch);
  CHECK(c64 < 1e-3);
  CHECK(c32 / c64 > 3.0);
}

TEST_CASE("d xi_J equals half the Chern form; CH Einstein relation") {
  auto ch = potential_model(PotentialTag::complex_hyperbolic);
  std::mt19937_64 rng(3);
  const EinsteinRatio er = einstein_ratio(*ch, sample_ball(Vec::Zero(4), 0.5, 1000, rng));
  double prev = 0.0;
  for (int N : {32, 64}) {
    const FramePacket fp = fr(sheared_torus(TorusGrid::square(2, N), 0.4, 0.2), *ch, true);
    const double r = dxiJ_vs_P_residual(fp), ri = integrability_residual(fp);
    CHECK(r < 1e-3);
    CHECK(ri < 1e-3);
    if (prev > 0.0) CHECK(prev / r > 3.0);
    prev = r;
    const TwoForm P = pullback_chern_form(fp), w = pullback_omega(fp), rho = pullback_ricci_form(fp);
    for (std::size_t p = 0; p < fp.nodes.size(); ++p) {
      CHECK(P.c[0][1][p] == doctest::Approx(2 * er.lambda * w.c[0][1][p]).epsilon(1e-7).scale(1.0));
      CHECK(P.c[0][1][p] == doctest::Approx(2 * rho.c[0][1][p]).epsilon(1e-8).scale(1.0));
    }
  }
  auto flat = make_flat(2);
  const FramePacket fl = fr(sheared_torus(TorusGrid::square(2, 32), 1.0, 0.2), *flat, true);
  CHECK(dxiJ_vs_P_residual(fl) < 1e-3);
}

TEST_CASE("alternative mean curvatures on Lagrangian tori") {
  const auto g = TorusGrid::square(2, 32);
  auto ch = potential_model(PotentialTag::complex_hyperbolic);
  // A product torus is Lagrangian in any U(2)-invariant Kahler metric.
  const AltMeanCurvatures k32 = alt_mean_curvatures(fr(product_torus(g, {0.4, 0.3}), *ch));
  const AltMeanCurvatures k64 = alt_mean_curvatures(fr(product_torus(TorusGrid::square(2, 64), {0.4, 0.3}), *ch));
  CHECK(k64.max_pairwise < 1e-5);
  CHECK(k32.max_pairwise / k64.max_pairwise > 3.0);
  CHECK(k64.generalized_minus_H < 1e-8);

  auto ak = bump_model();
  double prev = 0.0;
  for (int N : {32, 64}) {
    const AltMeanCurvatures a = alt_mean_curvatures(fr(product_torus(TorusGrid::square(2, N), {0.5, 0.4}), *ak));
    CHECK(a.generalized_minus_H > 1e-2);
    CHECK(a.max_pairwise < 1e-4);
    if (prev > 1e-11) CHECK(prev / std::max(a.max_pairwise, 1e-300) > 3.0);
    prev = a.max_pairwise;
  }
  auto flat = make_flat(2);
  CHECK_THROWS_AS(alt_mean_curvatures(fr(sheared_torus(g, 1.0, 0.2), *flat)), DomainError);
}

TEST_CASE("symbol of H_J and the constraint operator") {
  auto ch = potential_model(PotentialTag::complex_hyperbolic);
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int done = 0;
  while (done < 1000) {
    Vec x(4), zeta(2);
    for (int k = 0; k < 4; ++k) x(k) = 0.4 * u(rng);
    for (int k = 0; k < 2; ++k) zeta(k) = u(rng);
    Mat d(4, 2);
    for (int k = 0; k < 4; ++k)
      for (int a = 0; a < 2; ++a) d(k, a) = u(rng);
    const PointGeometry geo = ch->geometry(x, false);
    NodeFrame f;
    try {
      f = node_frame(x, d, geo);
    } catch (const DegenerateError&) {
      continue;
    }
    if (f.rho_J < 1e-3) continue;
    const SymbolReport r = symbol_report(f, zeta);
    CHECK(r.rank_HJ == 1);
    CHECK(r.kernel_dim_HJ == 3);
    CHECK(std::abs(r.eigenvalue - r.zeta_norm_sq) <= 1e-12 * std::max(1.0, r.zeta_norm_sq));
    CHECK(r.composition_residual <= 1e-12 * std::max(1.0, r.zeta_norm_sq));
    CHECK(r.kernel_dim_L == 3);
    ++done;
  }
  Mat lag = Mat::Zero(4, 2);
  lag(0, 0) = lag(2, 1) = 1.0;
  NodeFrame f = node_frame(Vec::Zero(4), lag, ch->geometry(Vec::Zero(4), false));
  CHECK_THROWS_AS(symbol_report(f, Vec::Zero(2)), ConfigError);
}

TEST_CASE("plane-wave linearization of H_J") {
  auto m = make_flat_torus(2);
  const Immersion imm = straight_torus(TorusGrid::square(2, 64));
  const PlaneWaveReport jz = linearize_HJ_planewave(imm, *m, {4, 0}, PlaneWaveDirection::j_zeta);
  CHECK(jz.nodes_per_wavelength == 16.0);
  CHECK(jz.ratio > 0.98);
  CHECK(jz.ratio < 1.02);
  const PlaneWaveReport diag = linearize_HJ_planewave(imm, *m, {4, 4}, PlaneWaveDirection::j_zeta);
  CHECK(diag.ratio > 0.98);
  CHECK(diag.ratio < 1.02);
  for (auto dir : {PlaneWaveDirection::tangent, PlaneWaveDirection::j_perp}) {
    const PlaneWaveReport r = linearize_HJ_planewave(imm, *m, {4, 0}, dir);
    CHECK(std::abs(r.response) * 50 <= std::abs(jz.coefficient));
  }
  CHECK_THROWS_AS(linearize_HJ_planewave(imm, *m, {10, 0}, PlaneWaveDirection::j_zeta), ConfigError);
}
