#include "trflow/immersion/presets.hpp"

#include <cmath>
#include <numbers>

#include "trflow/core/errors.hpp"

namespace trflow {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

Immersion sample_immersion(const TorusGrid& grid, const std::function<Vec(const Vec&)>& iota,
                           std::array<Vec, kMaxTorus> periods) {
  std::vector<Vec> pos(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) pos[i] = iota(grid.angles(i));
  return Immersion(grid, 2 * grid.n(), std::move(pos), std::move(periods));
}

Immersion product_torus(const TorusGrid& grid, const std::vector<double>& radii, Vec center) {
  const int n = grid.n();
  if (static_cast<int>(radii.size()) != n) throw ConfigError("product torus needs one radius per factor");
  if (center.size() == 0) center = Vec::Zero(2 * n);
  return sample_immersion(grid, [&](const Vec& phi) {
    Vec x = center;
    for (int k = 0; k < n; ++k) {
      x(2 * k) += radii[k] * std::cos(phi(k));
      x(2 * k + 1) += radii[k] * std::sin(phi(k));
    }
    return x;
  });
}

Immersion sheared_torus(const TorusGrid& grid, double radius, double delta, Vec center) {
  if (grid.n() != 2) throw ConfigError("sheared torus is defined for n = 2");
  if (center.size() == 0) center = Vec::Zero(4);
  return sample_immersion(grid, [&](const Vec& phi) {
    Vec x = center;
    const double c1 = std::cos(phi(0)), s1 = std::sin(phi(0));
    x(0) += radius * c1;
    x(1) += radius * s1;
    x(2) += radius * (std::cos(phi(1)) + delta * c1);
    x(3) += radius * (std::sin(phi(1)) + delta * s1);
    return x;
  });
}

Immersion straight_torus(const TorusGrid& grid) {
  const int n = grid.n();
  std::array<Vec, kMaxTorus> periods;
  for (int a = 0; a < n; ++a) {
    periods[a] = Vec::Zero(2 * n);
    periods[a](2 * a) = kTwoPi;
  }
  return sample_immersion(grid, [&](const Vec& phi) {
    Vec x = Vec::Zero(2 * n);
    for (int k = 0; k < n; ++k) x(2 * k) = phi(k);
    return x;
  }, periods);
}

Immersion graph_torus(const TorusGrid& grid, const Mat& linear, const std::function<Vec(const Vec&)>& periodic) {
  const int n = grid.n();
  if (linear.rows() != n || linear.cols() != n) throw ConfigError("graph slope matrix must be n x n");
  std::array<Vec, kMaxTorus> periods;
  for (int a = 0; a < n; ++a) {
    periods[a] = Vec::Zero(2 * n);
    periods[a](2 * a) = kTwoPi;
    for (int k = 0; k < n; ++k) periods[a](2 * k + 1) = kTwoPi * linear(k, a);
  }
  return sample_immersion(grid, [&](const Vec& phi) {
    const Vec f = linear * phi + (periodic ? periodic(phi) : Vec(Vec::Zero(n)));
    Vec x(2 * n);
    for (int k = 0; k < n; ++k) {
      x(2 * k) = phi(k);
      x(2 * k + 1) = f(k);
    }
    return x;
  }, periods);
}

Immersion complex_line_torus(const TorusGrid& grid) {
  if (grid.n() != 2) throw ConfigError("complex line torus is defined for n = 2");
  std::array<Vec, kMaxTorus> periods;
  periods[0] = Vec::Zero(4);
  periods[0](0) = kTwoPi;
  periods[1] = Vec::Zero(4);
  periods[1](1) = kTwoPi;
  return sample_immersion(grid, [](const Vec& phi) {
    Vec x = Vec::Zero(4);
    x(0) = phi(0);
    x(1) = phi(1);
    return x;
  }, periods);
}

Vec TrigField::operator()(const Vec& phi) const {
  Vec v = Vec::Zero(dim);
  for (std::size_t m = 0; m < modes.size(); ++m) {
    double arg = 0.0;
    for (int a = 0; a < n; ++a) arg += modes[m][a] * phi(a);
    v += std::cos(arg) * cos_coef[m] + std::sin(arg) * sin_coef[m];
  }
  return v;
}

TrigField TrigField::random(int n, int dim, int kmax, std::mt19937_64& rng) {
  TrigField f;
  f.n = n;
  f.dim = dim;
  f.kmax = kmax;
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<int> k(n, -kmax);
  while (true) {
    int k2 = 0;
    for (int a = 0; a < n; ++a) k2 += k[a] * k[a];
    if (k2 > 0) {
      f.modes.push_back(k);
      Vec c(dim), s(dim);
      for (int i = 0; i < dim; ++i) {
        c(i) = u(rng) / (1.0 + k2);
        s(i) = u(rng) / (1.0 + k2);
      }
      f.cos_coef.push_back(c);
      f.sin_coef.push_back(s);
    }
    int a = 0;
    while (a < n && ++k[a] > kmax) k[a++] = -kmax;
    if (a == n) break;
  }
  return f;
}

Immersion perturbed(const Immersion& base, const TrigField& field, double amplitude) {
  std::vector<Vec> pos(base.grid().size());
  for (std::size_t i = 0; i < pos.size(); ++i) pos[i] = base.position(i) + amplitude * field(base.grid().angles(i));
  return base.with_positions(std::move(pos));
}

}  // namespace trflow
