#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "trflow/core/errors.hpp"
#include "trflow/variation/variation.hpp"

using namespace trflow;

namespace {

ModelPtr potential_model(PotentialTag tag) {
  KahlerPotential p;
  p.tag = tag;
  p.n = 2;
  return kahler_from_potential(p, DerivativeScheme::analytic);
}

ModelPtr bump_model(double h_amb) {
  BumpMetricSpec s;
  s.n = 2;
  s.epsilon = 0.1;
  s.center = Vec::Zero(4);
  s.width = 1.0;
  return almost_kahler_bump(s, h_amb);
}

Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_CASE("zero probe has zero first variation") {
  const Immersion imm = product_torus(TorusGrid::square(2, 32), {1.0, 1.0});
  const auto r = first_variation_check(imm, *make_flat(2), VariationProbe::zero(imm.grid()));
  CHECK(std::abs(r.derivative) < 1e-8);
  CHECK(std::abs(r.predicted) < 1e-14);
}

TEST_CASE("first variation on the product torus") {
  // translating one circle inward: d/dt Vol_J = -4 pi^2
  std::vector<double> res;
  for (int n : {64, 128}) {
    const Immersion imm = product_torus(TorusGrid::square(2, n), {1.0, 1.0});
    const auto y = VariationProbe::from_function(imm.grid(), [](const Vec&) { return vec2(1.0, 0.0); });
    const auto r = first_variation_check(imm, *make_flat(2), y, 1e-4);
    CHECK(r.derivative == doctest::Approx(-4.0 * M_PI * M_PI).epsilon(1e-4));
    res.push_back(r.residual);
  }
  CHECK(res[1] <= 1e-6);
  CHECK(res[0] / res[1] >= 4.0);
}

TEST_CASE("first variation on random probes in analytic Kahler models") {
  std::mt19937_64 rng(11);
  for (PotentialTag tag : {PotentialTag::complex_hyperbolic, PotentialTag::fubini_study}) {
    auto m = potential_model(tag);
    const Immersion imm = sheared_torus(TorusGrid::square(2, 128), 0.4, 0.2);
    double worst = 0.0;
    for (int k = 0; k < 10; ++k) {
      const auto r = first_variation_check(imm, *m, VariationProbe::random(imm.grid(), 2, rng));
      worst = std::max(worst, r.residual);
    }
    MESSAGE(std::string(potential_tag_name(tag)) << " worst residual " << worst);
    CHECK(worst <= 1e-5);
  }
}

TEST_CASE("first variation in the almost Kahler bump model") {
  std::mt19937_64 rng(12);
  const Immersion imm = sheared_torus(TorusGrid::square(2, 64), 0.5, 0.2);
  const auto y = VariationProbe::random(imm.grid(), 2, rng);
  const auto r = first_variation_check(imm, *bump_model(1e-3), y);
  MESSAGE("ak residual " << r.residual);
  CHECK(r.residual <= 1e-4);
}

TEST_CASE("second variation at the straight torus") {
  auto m = make_flat_torus(2);
  const Immersion imm = straight_torus(TorusGrid::square(2, 64));
  const auto constant = VariationProbe::from_function(imm.grid(), [](const Vec&) { return vec2(0.3, -0.7); });
  CHECK(std::abs(second_variation_at_critical(imm, *m, constant).second) < 1e-8);

  const auto y = VariationProbe::from_function(imm.grid(), [](const Vec& p) { return vec2(std::sin(p(0)), 0.0); });
  const auto r = second_variation_at_critical(imm, *m, y);
  const double exact = 2.0 * M_PI * M_PI;
  CHECK(std::abs(r.predicted - exact) / exact < 1e-4);
  CHECK(std::abs(r.second - exact) / exact < 1e-4);
  CHECK(r.residual < 1e-4);

  const auto r2 = second_variation_at_critical(imm, *m, y.scaled(2.0));
  CHECK(r2.second / r.second == doctest::Approx(4.0).epsilon(1e-6));
}

TEST_CASE("second variation is non-negative on random probes") {
  auto m = make_flat_torus(2);
  const Immersion imm = straight_torus(TorusGrid::square(2, 32));
  std::mt19937_64 rng(13);
  double lowest = 1e300;
  for (int k = 0; k < 50; ++k) {
    const auto r = second_variation_at_critical(imm, *m, VariationProbe::random(imm.grid(), 2, rng));
    lowest = std::min(lowest, r.second);
    CHECK(r.residual < 1e-4);
  }
  CHECK(lowest >= -1e-6);
}

TEST_CASE("second variation refuses non-critical or curved input") {
  const Immersion prod = product_torus(TorusGrid::square(2, 32), {1.0, 1.0});
  const auto y = VariationProbe::zero(prod.grid());
  CHECK_THROWS_AS(second_variation_at_critical(prod, *make_flat(2), y), UnsupportedError);
  CHECK_THROWS_AS(second_variation_at_critical(sheared_torus(TorusGrid::square(2, 32), 0.4, 0.2),
                                               *potential_model(PotentialTag::complex_hyperbolic), y),
                  UnsupportedError);
}

TEST_CASE("localized bumps reconstruct the gradient") {
  const Immersion imm = sheared_torus(TorusGrid::square(2, 64), 0.5, 0.2);
  auto m = bump_model(1e-3);
  const TorusGrid& g = imm.grid();
  std::vector<std::size_t> nodes{g.index({0, 0, 0}), g.index({10, 40, 0}), g.index({33, 7, 0}), g.index({50, 50, 0})};
  const auto rep = gradient_reconstruction(imm, *m, nodes, 0.4);
  MESSAGE("gradient max rel error " << rep.max_rel_error);
  CHECK(rep.max_rel_error < 0.05);
}
