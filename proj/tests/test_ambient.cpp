#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "trflow/ambient/model.hpp"
#include "trflow/ambient/queries.hpp"
#include "trflow/ambient/spline.hpp"
#include "trflow/core/errors.hpp"

using namespace trflow;

namespace {

Vec random_vec(int d, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Vec v(d);
  for (int i = 0; i < d; ++i) v(i) = u(rng);
  return v;
}

KahlerPotential potential(PotentialTag tag) {
  KahlerPotential p;
  p.tag = tag;
  p.n = 2;
  if (tag == PotentialTag::flat_plus_bump) {
    p.epsilon = 0.05;
    p.center = Vec::Zero(4);
    p.width = 1.0;
  }
  return p;
}

BumpMetricSpec bump_spec() {
  BumpMetricSpec s;
  s.n = 2;
  s.epsilon = 0.1;
  s.center = Vec::Zero(4);
  s.center << 1.0, 0.0, 1.0, 0.0;
  s.width = 1.0;
  return s;
}

}  // namespace

TEST_CASE("flat model: identity metric, vanishing connection and curvature") {
  auto m = make_flat(2);
  std::mt19937_64 rng(1);
  const Vec x = random_vec(4, rng);
  const PointGeometry g = m->geometry(x, true);
  CHECK(max_abs(g.g - Mat::Identity(4, 4)) == 0.0);
  for (int a = 0; a < 4; ++a) CHECK(max_abs(g.levi_civita.along[a]) == 0.0);
  CHECK(max_abs(g.rho()) == 0.0);
  CHECK(max_abs(g.chern_form()) == 0.0);
  const EinsteinRatio er = einstein_ratio(*m, sample_ball(Vec::Zero(4), 1.0, 100, rng));
  CHECK(er.lambda == 0.0);
  CHECK(er.deviation == 0.0);
}

TEST_CASE("flat potential reproduces the identity metric") {
  auto m = kahler_from_potential(potential(PotentialTag::flat), DerivativeScheme::analytic);
  std::mt19937_64 rng(2);
  const PointGeometry g = m->geometry(random_vec(4, rng), true);
  CHECK(max_abs(g.g - Mat::Identity(4, 4)) < 1e-15);
  CHECK(max_abs(g.rho()) < 1e-15);
}

TEST_CASE("potential derivatives match finite differences of lower orders") {
  std::mt19937_64 rng(3);
  for (auto tag : {PotentialTag::complex_hyperbolic, PotentialTag::fubini_study, PotentialTag::flat_plus_bump}) {
    const KahlerPotential p = potential(tag);
    const Vec x = random_vec(4, rng, 0.3);
    const ScalarJet s = p.evaluate(x, 4);
    const double h = 1e-4;
    for (int a = 0; a < 4; ++a) {
      Vec e = Vec::Zero(4);
      e(a) = h;
      const ScalarJet sp = p.evaluate(x + e, 4), sm = p.evaluate(x - e, 4);
      CHECK(std::abs((sp.value - sm.value) / (2 * h) - s.grad(a)) < 1e-7);
      CHECK(max_abs((sp.grad - sm.grad) / (2 * h) - s.hess.col(a)) < 1e-7);
      CHECK(max_abs((sp.hess - sm.hess) / (2 * h) - s.third[a]) < 1e-6);
      for (int b = 0; b < 4; ++b)
        CHECK(max_abs((sp.third[b] - sm.third[b]) / (2 * h) - s.fourth[a][b]) < 1e-5);
    }
  }
}

TEST_CASE("structure invariants hold on random points for every model kind") {
  std::mt19937_64 rng(4);
  std::vector<ModelPtr> models = {
      make_flat(2), make_flat_torus(2),
      kahler_from_potential(potential(PotentialTag::complex_hyperbolic), DerivativeScheme::analytic),
      kahler_from_potential(potential(PotentialTag::fubini_study), DerivativeScheme::analytic),
      kahler_from_potential(potential(PotentialTag::flat_plus_bump), DerivativeScheme::analytic),
      almost_kahler_bump(bump_spec())};
  for (const auto& m : models) {
    for (int k = 0; k < 1000; ++k) {
      const Vec x = m->kind() == ModelKind::kahler_potential ? random_vec(4, rng, 0.45) : random_vec(4, rng, 2.0);
      Mat g, j;
      m->value(x, g, j);
      CHECK(max_abs(j * j + Mat::Identity(4, 4)) < 1e-10);
      CHECK(max_abs(j.transpose() * g * j - g) < 1e-10);
      CHECK(max_abs(m->symplectic(x) - j.transpose() * g) < 1e-14);
      CHECK(Eigen::SelfAdjointEigenSolver<Mat>(g).eigenvalues().minCoeff() > 0.0);
    }
  }
}

TEST_CASE("almost Kahler pair keeps the standard symplectic form") {
  auto m = almost_kahler_bump(bump_spec());
  std::mt19937_64 rng(5);
  for (int k = 0; k < 200; ++k) {
    const Vec x = random_vec(4, rng, 2.0);
    CHECK(max_abs(m->symplectic(x) - standard_omega(2)) < 1e-12);
  }
  // identity g' gives the flat structure
  auto flat = almost_kahler_from_pair([](const Vec&) { return Mat(Mat::Identity(4, 4)); }, 2);
  const PointGeometry g = flat->geometry(random_vec(4, rng), false);
  CHECK(max_abs(g.J - standard_j(2)) < 1e-14);
  CHECK(max_abs(g.g - Mat::Identity(4, 4)) < 1e-14);
  CHECK(max_abs(g.torsion(random_vec(4, rng), random_vec(4, rng))) < 1e-12);
}

TEST_CASE("Kahler models: Chern equals Levi-Civita, J parallel, P = 2 rho, no torsion") {
  std::mt19937_64 rng(6);
  for (auto tag : {PotentialTag::complex_hyperbolic, PotentialTag::fubini_study, PotentialTag::flat_plus_bump}) {
    auto m = kahler_from_potential(potential(tag), DerivativeScheme::analytic);
    for (int k = 0; k < 1000; ++k) {
      const Vec x = random_vec(4, rng, 0.45);
      const PointGeometry g = m->geometry(x, true);
      CHECK(g.max_nabla_j() < 1e-10);
      for (int a = 0; a < 4; ++a) CHECK(max_abs(g.chern.along[a] - g.levi_civita.along[a]) < 1e-8);
      CHECK(max_abs(g.chern_form() - 2.0 * g.rho()) < 1e-8);
      CHECK(max_abs(g.torsion(random_vec(4, rng), random_vec(4, rng))) < 1e-10);
    }
  }
}

TEST_CASE("finite-difference scheme agrees with the analytic Kahler scheme at order h_amb^2") {
  std::mt19937_64 rng(7);
  const KahlerPotential p = potential(PotentialTag::complex_hyperbolic);
  auto an = kahler_from_potential(p, DerivativeScheme::analytic);
  std::vector<Vec> pts;
  for (int k = 0; k < 100; ++k) pts.push_back(random_vec(4, rng, 0.25));
  double prev = 0.0;
  for (double h : {2e-3, 1e-3}) {
    auto fd = kahler_from_potential(p, DerivativeScheme::central_difference, h);
    double err = 0.0;
    for (const Vec& x : pts) {
      const PointGeometry a = an->geometry(x, true), f = fd->geometry(x, true);
      for (int i = 0; i < 4; ++i) CHECK(max_abs(a.levi_civita.along[i] - f.levi_civita.along[i]) < 1e-8);
      err = std::max({err, max_abs(a.rho() - f.rho()), max_abs(f.chern_form() - 2.0 * f.rho())});
    }
    CHECK(err < 200.0 * h * h);
    if (prev > 0) CHECK(prev / err > 3.0);
    prev = err;
  }
}

TEST_CASE("complex hyperbolic and Fubini-Study charts are Einstein with opposite signs") {
  std::mt19937_64 rng(8);
  auto ch = kahler_from_potential(potential(PotentialTag::complex_hyperbolic), DerivativeScheme::analytic);
  const EinsteinRatio e1 = einstein_ratio(*ch, sample_ball(Vec::Zero(4), 0.5, 10000, rng));
  CHECK(e1.lambda < 0.0);
  CHECK(e1.deviation <= 1e-8);
  auto fs = kahler_from_potential(potential(PotentialTag::fubini_study), DerivativeScheme::analytic);
  const EinsteinRatio e2 = einstein_ratio(*fs, sample_ball(Vec::Zero(4), 0.5, 2000, rng));
  CHECK(e2.lambda > 0.0);
  CHECK(e2.deviation <= 1e-8);
  auto bump = kahler_from_potential(potential(PotentialTag::flat_plus_bump), DerivativeScheme::analytic);
  const EinsteinRatio e3 = einstein_ratio(*bump, sample_ball(Vec::Zero(4), 0.9, 500, rng));
  CHECK(e3.deviation > 1e-3);
  MESSAGE("lambda(ch) = " << e1.lambda << ", lambda(fs) = " << e2.lambda);
}

TEST_CASE("non-positive potential Hessian is rejected with the offending point") {
  KahlerPotential p = potential(PotentialTag::flat_plus_bump);
  p.epsilon = -3.0;
  p.width = 0.5;
  CHECK_THROWS_AS(kahler_from_potential(p, DerivativeScheme::analytic), DegenerateError);
  try {
    kahler_from_potential(p, DerivativeScheme::analytic);
  } catch (const DegenerateError& e) {
    CHECK(std::string(e.what()).find("at [") != std::string::npos);
  }
}

TEST_CASE("points outside the chart are rejected") {
  auto ch = kahler_from_potential(potential(PotentialTag::complex_hyperbolic), DerivativeScheme::analytic);
  Vec x = Vec::Zero(4);
  x(0) = 0.99;
  CHECK_THROWS_AS(ch->geometry(x), DomainError);
}

TEST_CASE("bump almost Kahler model: torsion has no (1,1) part and Chern connection preserves J") {
  auto m = almost_kahler_bump(bump_spec(), 1e-3);
  std::mt19937_64 rng(9);
  double max_nj = 0.0;
  for (int k = 0; k < 300; ++k) {
    const Vec x = bump_spec().center + random_vec(4, rng, 0.6);
    const PointGeometry g = m->geometry(x);
    max_nj = std::max(max_nj, g.max_nabla_j());
    const Vec X = random_vec(4, rng), Y = random_vec(4, rng);
    CHECK(max_abs(g.torsion(g.J * X, Y) + g.J * g.torsion(X, Y)) < 1e-8);
    CHECK(max_abs(g.torsion(X, X)) == 0.0);
  }
  CHECK(max_nj > 1e-2);

  // Chern-parallel J, oracle: independent finite differences of J at a wider step
  const Vec x = bump_spec().center + Vec::Constant(4, 0.2);
  const PointGeometry g = m->geometry(x);
  const double h = 2e-3;
  double nabla_tilde_j = 0.0, diff_lc = 0.0;
  for (int a = 0; a < 4; ++a) {
    Vec e = Vec::Zero(4);
    e(a) = h;
    const Mat dj = (m->complex_structure(x + e) - m->complex_structure(x - e)) / (2 * h);
    const Mat c = g.chern.along[a];
    nabla_tilde_j = std::max(nabla_tilde_j, max_abs(dj + c * g.J - g.J * c));
    diff_lc = std::max(diff_lc, max_abs(c - g.levi_civita.along[a]));
  }
  CHECK(nabla_tilde_j < 1e-5);
  CHECK(diff_lc > 1e-3);
}

TEST_CASE("Chern torsion at the bump center matches an independent forward-difference evaluation") {
  const BumpMetricSpec spec = bump_spec();
  auto m = almost_kahler_bump(spec, 1e-3);
  const Vec x = spec.center + Vec::Constant(4, 0.15);
  Vec X = Vec::Zero(4), Y = Vec::Zero(4);
  X(0) = 1.0;  // d/dx1
  Y(3) = 1.0;  // d/dy2
  const Vec t = chern_torsion(*m, x, X, Y);

  // Oracle: forward differences of g and J, Levi-Civita by the Koszul formula.
  const double h = 1e-6;
  Mat g0, j0;
  polar_retraction(spec.evaluate(x), g0, j0);
  PerAxis<Mat> dg, dj;
  for (int a = 0; a < 4; ++a) {
    Vec e = Vec::Zero(4);
    e(a) = h;
    Mat g1, j1;
    polar_retraction(spec.evaluate(x + e), g1, j1);
    dg[a] = (g1 - g0) / h;
    dj[a] = (j1 - j0) / h;
  }
  auto nabla_j = [&](const Vec& v) {
    Mat out = Mat::Zero(4, 4);
    const Mat ginv = g0.inverse();
    for (int a = 0; a < 4; ++a) {
      Mat gam(4, 4);
      for (int k = 0; k < 4; ++k)
        for (int jj = 0; jj < 4; ++jj) {
          double s = 0;
          for (int l = 0; l < 4; ++l) s += ginv(k, l) * 0.5 * (dg[a](jj, l) + dg[jj](a, l) - dg[l](a, jj));
          gam(k, jj) = s;
        }
      out += v(a) * (dj[a] + gam * j0 - j0 * gam);
    }
    return out;
  };
  const Vec oracle = 0.5 * nabla_j(X) * (j0 * Y) - 0.5 * nabla_j(Y) * (j0 * X);
  CHECK(t.norm() > 1e-3);
  CHECK((t - oracle).norm() < 1e-4 * std::max(1.0, oracle.norm()));
}

TEST_CASE("Levi-Civita curvature symmetries and first Bianchi identity") {
  std::mt19937_64 rng(10);
  auto m = kahler_from_potential(potential(PotentialTag::flat_plus_bump), DerivativeScheme::analytic);
  auto ak = almost_kahler_bump(bump_spec(), 1e-3);
  for (const auto& [model, tol] : {std::pair{m, 1e-10}, std::pair{ak, 1e-4}}) {
    for (int k = 0; k < 50; ++k) {
      const Vec x = random_vec(4, rng, 0.5) + (model == ak ? bump_spec().center : Vec::Zero(4));
      const PointGeometry g = model->geometry(x, true);
      const Vec X = random_vec(4, rng), Y = random_vec(4, rng), Z = random_vec(4, rng), W = random_vec(4, rng);
      const auto& R = g.curvature().riemann;
      CHECK((R.apply(X, Y, Z) + R.apply(Y, X, Z)).norm() < tol);
      // g(R(X,Y)Z, W) = -g(R(X,Y)W, Z)
      CHECK(std::abs(W.dot(g.g * R.apply(X, Y, Z)) + Z.dot(g.g * R.apply(X, Y, W))) < tol);
      CHECK((R.apply(X, Y, Z) + R.apply(Y, Z, X) + R.apply(Z, X, Y)).norm() < tol);
    }
  }
}

TEST_CASE("quintic prefilter solves the periodic interpolation system") {
  std::mt19937_64 rng(11);
  for (int n : {6, 7, 16, 33}) {
    std::vector<double> s(n), c;
    std::uniform_real_distribution<double> u(-1, 1);
    for (auto& v : s) v = u(rng);
    c = s;
    quintic_prefilter_line(c.data(), n);
    for (int i = 0; i < n; ++i) {
      double r = 0;
      for (int k = -2; k <= 2; ++k) r += c[((i + k) % n + n) % n] * quintic_bspline(k, 0);
      CHECK(std::abs(r - s[i]) < 1e-13);
    }
  }
}

TEST_CASE("quintic B-spline: partition of unity and derivative consistency") {
  for (double s : {-2.7, -1.3, -0.2, 0.3, 0.4, 1.9, 2.95}) {
    double sum = 0, dsum = 0;
    for (int k = -6; k <= 6; ++k) {
      sum += quintic_bspline(s + k, 0);
      dsum += quintic_bspline(s + k, 1);
    }
    CHECK(std::abs(sum - 1.0) < 1e-14);
    CHECK(std::abs(dsum) < 1e-13);
    for (int m = 0; m < 4; ++m) {
      const double h = 1e-5;
      const double fd = (quintic_bspline(s + h, m) - quintic_bspline(s - h, m)) / (2 * h);
      CHECK(std::abs(fd - quintic_bspline(s, m + 1)) < 1e-7);
    }
  }
}

TEST_CASE("box spline interpolates a smooth periodic function with converging derivatives") {
  auto f = [](double x, double y) { return std::sin(x) * std::cos(2 * y); };
  double prev = 0;
  for (int n : {16, 32}) {
    const double h = 2 * M_PI / n;
    std::vector<double> samples(n * n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) samples[i * n + j] = f(i * h, j * h);
    Vec lo = Vec::Zero(2);
    PeriodicBoxSpline sp({n, n}, lo, h, samples);
    Vec node(2);
    node << 3 * h, 5 * h;
    CHECK(std::abs(sp.evaluate(node, 0).value - f(3 * h, 5 * h)) < 1e-13);
    Vec x(2);
    x << 1.234, 0.567;
    const ScalarJet s = sp.evaluate(x, 4);
    // d^4/dx^2 dy^2 of sin x cos 2y = 4 sin x cos 2y
    const double err = std::abs(s.fourth[0][0](1, 1) - 4 * std::sin(x(0)) * std::cos(2 * x(1))) +
                       std::abs(s.hess(0, 1) + 2 * std::cos(x(0)) * std::sin(2 * x(1)));
    if (prev > 0) CHECK(prev / err > 3.0);
    prev = err;
  }
}
