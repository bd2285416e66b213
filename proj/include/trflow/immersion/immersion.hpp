#pragma once
// Periodic-grid discretization of an immersion T^n -> chart.

#include <array>
#include <vector>

#include "trflow/core/linalg.hpp"

namespace trflow {

inline constexpr int kMaxTorus = 3;

// Lexicographic (row-major) node order, axis 0 slowest; spacing 2*pi/N_i.
class TorusGrid {
 public:
  TorusGrid() = default;
  TorusGrid(int n, std::array<int, kMaxTorus> res);
  static TorusGrid square(int n, int res);

  int n() const { return n_; }
  int resolution(int axis) const { return res_[axis]; }
  double spacing(int axis) const;
  std::size_t size() const { return size_; }
  std::vector<int> extents() const;
  // Parameter-space area element prod(spacing).
  double cell_measure() const;

  std::array<int, kMaxTorus> coords(std::size_t idx) const;
  std::size_t index(const std::array<int, kMaxTorus>& c) const;  // wraps periodically
  std::size_t shifted(std::size_t idx, int axis, int delta) const;
  Vec angles(std::size_t idx) const;

 private:
  int n_ = 0;
  std::array<int, kMaxTorus> res_{1, 1, 1};
  std::size_t size_ = 0;
};

class Immersion {
 public:
  // `periods[i]` is iota(phi + 2*pi e_i) - iota(phi); positions are lifts.
  Immersion(TorusGrid grid, int ambient_dim, std::vector<Vec> positions,
            std::array<Vec, kMaxTorus> periods = {});

  const TorusGrid& grid() const { return grid_; }
  int ambient_dim() const { return dim_; }
  int n() const { return grid_.n(); }
  const std::vector<Vec>& positions() const { return pos_; }
  const Vec& position(std::size_t i) const { return pos_[i]; }
  void set_position(std::size_t i, const Vec& v) { pos_[i] = v; }
  const Vec& period(int axis) const { return periods_[axis]; }

  // Component c of the periodic part iota - sum_i P_i phi_i / (2 pi).
  std::vector<double> periodic_component(int c) const;

  // Same grid and periods, new positions.
  Immersion with_positions(std::vector<Vec> positions) const;

 private:
  TorusGrid grid_;
  int dim_;
  std::vector<Vec> pos_;
  std::array<Vec, kMaxTorus> periods_;
};

// 4th-order central derivative data along L at every node.
struct ImmersionDerivatives {
  int n = 0;
  std::vector<Mat> d;                           // 2n x n, columns d_i iota
  std::vector<std::array<std::array<Vec, kMaxTorus>, kMaxTorus>> dd;  // d_i d_j iota
};

// Pure second derivatives use the 5-point second-derivative stencil, mixed
// ones the composition of first-derivative stencils.
ImmersionDerivatives immersion_derivatives(const Immersion& imm, bool second = true);

// Scalar field derivatives on the grid (4th-order, periodic).
std::vector<double> grid_diff(const TorusGrid& grid, const std::vector<double>& f, int axis);
std::vector<double> grid_diff2(const TorusGrid& grid, const std::vector<double>& f, int axis);

// Trapezoidal (spectral for periodic data) quadrature of a nodal field.
double grid_integrate(const TorusGrid& grid, const std::vector<double>& f);

}  // namespace trflow
