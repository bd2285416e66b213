#pragma once
// Named immersion families.

#include <functional>
#include <random>

#include "trflow/immersion/immersion.hpp"

namespace trflow {

// Samples iota(phi) on the grid; `periods` as in Immersion.
Immersion sample_immersion(const TorusGrid& grid, const std::function<Vec(const Vec&)>& iota,
                           std::array<Vec, kMaxTorus> periods = {});

// Product of circles: iota(phi) = center + (r_1 e^{i phi_1}, ..., r_n e^{i phi_n}).
Immersion product_torus(const TorusGrid& grid, const std::vector<double>& radii, Vec center = Vec());

// n = 2: center + r (e^{i phi_1}, e^{i phi_2} + delta e^{i phi_1}).
Immersion sheared_torus(const TorusGrid& grid, double radius, double delta, Vec center = Vec());

// iota(phi) = (phi_1, ..., phi_n) in the flat torus.
Immersion straight_torus(const TorusGrid& grid);

// Graph iota(phi) = phi + i F(phi) with F(phi) = M phi + f(phi), f periodic.
Immersion graph_torus(const TorusGrid& grid, const Mat& linear, const std::function<Vec(const Vec&)>& periodic);

// n = 2 complex torus iota(phi) = (phi_1 + i phi_2, 0): contains a complex line.
Immersion complex_line_torus(const TorusGrid& grid);

// Random smooth periodic R^{dim}-valued field: trigonometric modes |k_i| <= kmax,
// coefficients uniform in [-1, 1] scaled by 1/(1+|k|^2).
struct TrigField {
  int n = 2, dim = 4, kmax = 2;
  std::vector<std::vector<int>> modes;
  std::vector<Vec> cos_coef, sin_coef;
  Vec operator()(const Vec& phi) const;
  static TrigField random(int n, int dim, int kmax, std::mt19937_64& rng);
};

// base + amplitude * field, evaluated nodewise.
Immersion perturbed(const Immersion& base, const TrigField& field, double amplitude);

}  // namespace trflow
