#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "trflow/ambient/model.hpp"
#include "trflow/core/errors.hpp"
#include "trflow/immersion/forms.hpp"
#include "trflow/immersion/frames.hpp"
#include "trflow/immersion/presets.hpp"

using namespace trflow;

namespace {

constexpr double kPi = 3.14159265358979323846;

ModelPtr ch_model() {
  KahlerPotential p;
  p.tag = PotentialTag::complex_hyperbolic;
  p.n = 2;
  return kahler_from_potential(p, DerivativeScheme::analytic);
}

}  // namespace

TEST_CASE("grid indexing and resolution floor") {
  CHECK_THROWS_AS(TorusGrid::square(2, 8), ConfigError);
  const TorusGrid g(2, {16, 20, 1});
  CHECK(g.size() == 320);
  for (std::size_t i : {0ul, 17ul, 319ul}) {
    CHECK(g.index(g.coords(i)) == i);
    CHECK(g.shifted(g.shifted(i, 1, 3), 1, -3) == i);
  }
  CHECK(g.shifted(0, 0, -1) == g.index({15, 0, 0}));
  CHECK(g.angles(g.index({4, 5, 0}))(1) == doctest::Approx(2 * kPi * 5 / 20));
}

TEST_CASE("product torus: Lagrangian, rho_J = 1, area") {
  auto flat = make_flat(2);
  double prev = 0.0;
  for (int N : {32, 64}) {
    const auto imm = product_torus(TorusGrid::square(2, N), {1.0, 0.5});
    const FramePacket fp = frames(imm, *flat);
    CHECK(sup_omega(fp) < 1e-13);
    for (const auto& f : fp.nodes) {
      CHECK(f.rho_J == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(f.rho_J_volume == doctest::Approx(1.0).epsilon(1e-12));
    }
    const Volumes v = volumes(fp);
    const double err = std::abs(v.vol_g - 4 * kPi * kPi * 0.5);
    const double h = 2 * kPi / N;
    CHECK(err < 4 * kPi * kPi * 0.5 * std::pow(h, 4) / 10);  // stencil factor 1 - h^4/30 per axis
    CHECK(v.vol_J == doctest::Approx(v.vol_g).epsilon(1e-12));
    if (prev > 0.0) CHECK(prev / err > 14.0);  // fourth order
    prev = err;
  }
}

TEST_CASE("sheared torus pullback of omega") {
  auto flat = make_flat(2);
  const double r = 0.7, delta = 0.2;
  const auto imm = sheared_torus(TorusGrid::square(2, 64), r, delta);
  const FramePacket fp = frames(imm, *flat);
  double err = 0.0;
  for (std::size_t i = 0; i < fp.nodes.size(); ++i) {
    const Vec phi = fp.grid.angles(i);
    err = std::max(err, std::abs(fp.nodes[i].omega(0, 1) - r * r * delta * std::sin(phi(1) - phi(0))));
    CHECK(fp.nodes[i].omega(0, 1) == doctest::Approx(-fp.nodes[i].omega(1, 0)));
  }
  CHECK(err < 1e-5);
  CHECK(fp.min_rho < 1.0);
  CHECK(fp.min_rho > 0.9);
}

TEST_CASE("splitting projections") {
  auto m = ch_model();
  const auto imm = sheared_torus(TorusGrid::square(2, 32), 0.4, 0.3);
  const FramePacket fp = frames(imm, *m);
  for (std::size_t i = 0; i < fp.nodes.size(); i += 37) {
    const NodeFrame& f = fp.nodes[i];
    const Mat I = Mat::Identity(4, 4);
    CHECK(max_abs(f.pi_L + f.pi_J - I) < 1e-12);
    CHECK(max_abs(f.pi_L * f.pi_L - f.pi_L) < 1e-12);
    CHECK(max_abs(f.pi_L * f.d - f.d) < 1e-12);
    CHECK(max_abs(f.pi_J * f.jd - f.jd) < 1e-12);
    CHECK(max_abs(f.pi_L * f.jd) < 1e-12);
    // pi_J J = J pi_L
    CHECK(max_abs(f.pi_J * f.amb.J - f.amb.J * f.pi_L) < 1e-12);
    // pi_T is g-self-adjoint
    CHECK(max_abs(f.amb.g * f.pi_T - (f.amb.g * f.pi_T).transpose()) < 1e-12);
    CHECK(max_abs(f.e.transpose() * f.amb.g * f.e - Mat::Identity(2, 2)) < 1e-12);
  }
}

TEST_CASE("rho_J: two formulas, rotation toward a complex line") {
  auto m = ch_model();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    Vec x(4);
    for (int k = 0; k < 4; ++k) x(k) = 0.4 * u(rng);
    const PointGeometry geo = m->geometry(x, false);
    Mat v(4, 2);
    for (int k = 0; k < 4; ++k)
      for (int a = 0; a < 2; ++a) v(k, a) = u(rng);
    const double a = rho_J_hermitian(v, geo.g, geo.J), b = rho_J_volume(v, geo.g, geo.J);
    CHECK(a == doctest::Approx(b).epsilon(1e-10));
    CHECK(a <= 1.0 + 1e-12);
    CHECK(a > 0.0);
  }
  const PointGeometry geo = m->geometry(Vec::Zero(4), false);
  Mat e = gram_schmidt(Mat::Identity(4, 2), geo.g);
  for (double th : {0.0, 0.3, 1.0, 1.4}) {
    Mat v(4, 2);
    v.col(0) = e.col(0);
    // orthonormal to e0 and Je0 in the flat-at-origin metric
    Vec w = Vec::Zero(4);
    w(2) = 1.0;
    w /= std::sqrt(w.dot(geo.g * w));
    v.col(1) = std::cos(th) * w + std::sin(th) * geo.J * e.col(0);
    CHECK(rho_J_hermitian(v, geo.g, geo.J) == doctest::Approx(std::cos(th)).epsilon(1e-10));
    CHECK(rho_J_volume(v, geo.g, geo.J) == doctest::Approx(std::cos(th)).epsilon(1e-10));
  }
}

TEST_CASE("margin loss is reported with the node") {
  auto flat = make_flat(2);
  const auto imm = complex_line_torus(TorusGrid::square(2, 16));
  try {
    frames(imm, *flat);
    FAIL("expected DegenerateError");
  } catch (const DegenerateError& e) {
    CHECK(std::string(e.what()).find("totally real margin lost") != std::string::npos);
    CHECK(std::string(e.what()).find("node") != std::string::npos);
  }
}

TEST_CASE("chart domain exit is a domain error") {
  auto m = ch_model();
  const auto imm = product_torus(TorusGrid::square(2, 16), {0.9, 0.9});
  CHECK_THROWS_AS(frames(imm, *m), DomainError);
}

TEST_CASE("graph torus periods and periodic part") {
  Mat M(2, 2);
  M << 1.0, 0.0, 0.5, 2.0;
  const TorusGrid grid = TorusGrid::square(2, 32);
  const auto imm = graph_torus(grid, M, [](const Vec& p) {
    Vec f(2);
    f << 0.1 * std::sin(p(0)), 0.1 * std::cos(p(1));
    return f;
  });
  const auto y1 = imm.periodic_component(1);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Vec p = grid.angles(i);
    CHECK(y1[i] == doctest::Approx(0.1 * std::sin(p(0))).epsilon(1e-12));
  }
  // derivative includes the linear part
  const auto der = immersion_derivatives(imm, false);
  const Vec p = grid.angles(5);
  CHECK(der.d[5](1, 0) == doctest::Approx(1.0 + 0.1 * std::cos(p(0))).epsilon(1e-5));
  CHECK(der.d[5](3, 1) == doctest::Approx(2.0 - 0.1 * std::sin(p(1))).epsilon(1e-5));
}

namespace {

struct CodiffErrors {
  double one = 0.0, lap = 0.0, integral = 0.0, dd = 0.0;
};

CodiffErrors codiff_errors(int N) {
  const TorusGrid grid = TorusGrid::square(2, N);
  auto flat = make_flat(2);
  const double r1 = 1.0, r2 = 0.6;
  const FramePacket fp = frames(product_torus(grid, {r1, r2}), *flat);
  ScalarField f(grid.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const Vec p = grid.angles(i);
    f[i] = std::sin(p(0)) * std::cos(2 * p(1));
  }
  CodiffErrors out;
  const TwoForm ddf = exterior_d(grid, exterior_d(grid, f));
  for (double v : ddf.c[0][1]) out.dd = std::max(out.dd, std::abs(v));

  TwoForm w;
  w.n = 2;
  w.c[0][1] = f;
  const OneForm dw = codifferential(fp, w);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const Vec p = grid.angles(i);
    const double d2f = -2 * std::sin(p(0)) * std::sin(2 * p(1));
    const double d1f = std::cos(p(0)) * std::cos(2 * p(1));
    out.one = std::max(out.one, std::abs(dw.c[0][i] - d2f / (r2 * r2)));
    out.one = std::max(out.one, std::abs(dw.c[1][i] + d1f / (r1 * r1)));
  }
  // delta d f = -Laplacian f
  const ScalarField lap = codifferential(fp, exterior_d(grid, f));
  for (std::size_t i = 0; i < f.size(); ++i) {
    out.lap = std::max(out.lap, std::abs(lap[i] - f[i] * (1 / (r1 * r1) + 4 / (r2 * r2))));
    out.integral += lap[i] * fp.nodes[i].vol_density;
  }
  out.integral *= grid.cell_measure();
  return out;
}

}  // namespace

TEST_CASE("exterior derivative and codifferential") {
  const CodiffErrors a = codiff_errors(64), b = codiff_errors(128);
  CHECK(a.dd < 1e-12);
  CHECK(a.one < 1e-3);
  CHECK(a.lap < 5e-3);
  CHECK(a.one / b.one > 14.0);
  CHECK(a.lap / b.lap > 14.0);
  CHECK(std::abs(a.integral) < 1e-10);
}

namespace {

// max |K_intrinsic - K_Gauss equation| and max |K| on a perturbed torus
std::pair<double, double> gauss_errors(int N, double* total_out) {
  auto flat = make_flat(2);
  const TorusGrid grid = TorusGrid::square(2, N);
  std::mt19937_64 rng(5);
  const TrigField field = TrigField::random(2, 4, 2, rng);
  const auto imm = perturbed(product_torus(grid, {1.0, 1.0}), field, 0.2);
  const FramePacket fp = frames(imm, *flat);
  const InducedCurvature ic = induced_curvature(fp);
  const ScalarField K = gauss_curvature(fp, ic);
  double err = 0.0, scale = 0.0, total = 0.0;
  for (std::size_t i = 0; i < K.size(); ++i) {
    const NodeFrame& f = fp.nodes[i];
    auto A = [&](int a, int b) { return Vec(f.pi_N * f.dd[a][b]); };
    const Vec a11 = A(0, 0), a22 = A(1, 1), a12 = A(0, 1);
    const double k_ext = (a11.dot(a22) - a12.dot(a12)) / f.gind.determinant();
    err = std::max(err, std::abs(K[i] - k_ext));
    scale = std::max(scale, std::abs(k_ext));
    total += K[i] * f.vol_density;
  }
  *total_out = total * grid.cell_measure();
  return {err, scale};
}

}  // namespace

TEST_CASE("induced curvature matches the Gauss equation") {
  double t64 = 0.0, t128 = 0.0;
  const auto [e64, s64] = gauss_errors(64, &t64);
  const auto [e128, s128] = gauss_errors(128, &t128);
  CHECK(s128 > 1e-2);
  CHECK(e128 < 2e-3 * s128);
  CHECK(e64 / e128 > 3.5);         // at least second order (mixed derivatives)
  CHECK(std::abs(t128) < 1e-4);    // Gauss-Bonnet on a torus
  CHECK(std::abs(t128) < std::abs(t64));
}
