#include "trflow/immersion/immersion.hpp"

#include <numbers>
#include <stdexcept>

#include "trflow/core/errors.hpp"
#include "trflow/kernels/stencil.hpp"

namespace trflow {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

TorusGrid::TorusGrid(int n, std::array<int, kMaxTorus> res) : n_(n), res_(res) {
  if (n < 1 || n > kMaxTorus) throw ConfigError("torus dimension must be 1..3");
  size_ = 1;
  for (int a = 0; a < kMaxTorus; ++a) {
    if (a >= n) {
      res_[a] = 1;
      continue;
    }
    if (res_[a] < 16) throw ConfigError("grid resolution must be at least 16 nodes per axis");
    size_ *= static_cast<std::size_t>(res_[a]);
  }
}

TorusGrid TorusGrid::square(int n, int res) { return TorusGrid(n, {res, res, res}); }

double TorusGrid::spacing(int axis) const { return kTwoPi / res_[axis]; }

std::vector<int> TorusGrid::extents() const { return std::vector<int>(res_.begin(), res_.begin() + n_); }

double TorusGrid::cell_measure() const {
  double m = 1.0;
  for (int a = 0; a < n_; ++a) m *= spacing(a);
  return m;
}

std::array<int, kMaxTorus> TorusGrid::coords(std::size_t idx) const {
  std::array<int, kMaxTorus> c{0, 0, 0};
  for (int a = n_ - 1; a >= 0; --a) {
    c[a] = static_cast<int>(idx % res_[a]);
    idx /= res_[a];
  }
  return c;
}

std::size_t TorusGrid::index(const std::array<int, kMaxTorus>& c) const {
  std::size_t idx = 0;
  for (int a = 0; a < n_; ++a) idx = idx * res_[a] + static_cast<std::size_t>(((c[a] % res_[a]) + res_[a]) % res_[a]);
  return idx;
}

std::size_t TorusGrid::shifted(std::size_t idx, int axis, int delta) const {
  auto c = coords(idx);
  c[axis] += delta;
  return index(c);
}

Vec TorusGrid::angles(std::size_t idx) const {
  const auto c = coords(idx);
  Vec phi(n_);
  for (int a = 0; a < n_; ++a) phi(a) = c[a] * spacing(a);
  return phi;
}

Immersion::Immersion(TorusGrid grid, int ambient_dim, std::vector<Vec> positions,
                     std::array<Vec, kMaxTorus> periods)
    : grid_(std::move(grid)), dim_(ambient_dim), pos_(std::move(positions)), periods_(std::move(periods)) {
  if (ambient_dim != 2 * grid_.n()) throw ConfigError("ambient dimension must be twice the torus dimension");
  if (pos_.size() != grid_.size()) throw ConfigError("position count does not match the grid");
  for (int a = 0; a < kMaxTorus; ++a)
    if (periods_[a].size() == 0) periods_[a] = Vec::Zero(dim_);
}

std::vector<double> Immersion::periodic_component(int c) const {
  std::vector<double> f(pos_.size());
  for (std::size_t i = 0; i < pos_.size(); ++i) {
    double v = pos_[i](c);
    const Vec phi = grid_.angles(i);
    for (int a = 0; a < grid_.n(); ++a) v -= periods_[a](c) * phi(a) / kTwoPi;
    f[i] = v;
  }
  return f;
}

Immersion Immersion::with_positions(std::vector<Vec> positions) const {
  return Immersion(grid_, dim_, std::move(positions), periods_);
}

std::vector<double> grid_diff(const TorusGrid& grid, const std::vector<double>& f, int axis) {
  std::vector<double> out(f.size());
  const auto ext = grid.extents();
  const double h = grid.spacing(axis);
  kernels::diff1(f.data(), out.data(), kernels::axis_layout(ext, axis), 1.0 / (12.0 * h));
  return out;
}

std::vector<double> grid_diff2(const TorusGrid& grid, const std::vector<double>& f, int axis) {
  std::vector<double> out(f.size());
  const auto ext = grid.extents();
  const double h = grid.spacing(axis);
  kernels::diff2(f.data(), out.data(), kernels::axis_layout(ext, axis), 1.0 / (12.0 * h * h));
  return out;
}

double grid_integrate(const TorusGrid& grid, const std::vector<double>& f) {
  return kernels::sum(f.data(), f.size()) * grid.cell_measure();
}

ImmersionDerivatives immersion_derivatives(const Immersion& imm, bool second) {
  const TorusGrid& grid = imm.grid();
  const int n = grid.n();
  const int dim = imm.ambient_dim();
  const std::size_t N = grid.size();
  ImmersionDerivatives out;
  out.n = n;
  out.d.assign(N, Mat::Zero(dim, n));
  if (second) {
    std::array<std::array<Vec, kMaxTorus>, kMaxTorus> zero;
    for (auto& row : zero)
      for (auto& v : row) v = Vec::Zero(dim);
    out.dd.assign(N, zero);
  }
  for (int c = 0; c < dim; ++c) {
    const std::vector<double> q = imm.periodic_component(c);
    std::array<std::vector<double>, kMaxTorus> dq;
    for (int i = 0; i < n; ++i) {
      dq[i] = grid_diff(grid, q, i);
      const double ramp = imm.period(i)(c) / (2.0 * std::numbers::pi);
      for (std::size_t k = 0; k < N; ++k) out.d[k](c, i) = dq[i][k] + ramp;
    }
    if (!second) continue;
    for (int i = 0; i < n; ++i) {
      const auto dii = grid_diff2(grid, q, i);
      for (std::size_t k = 0; k < N; ++k) out.dd[k][i][i](c) = dii[k];
      for (int j = i + 1; j < n; ++j) {
        const auto dij = grid_diff(grid, dq[i], j);
        for (std::size_t k = 0; k < N; ++k) out.dd[k][i][j](c) = out.dd[k][j][i](c) = dij[k];
      }
    }
  }
  return out;
}

}  // namespace trflow
