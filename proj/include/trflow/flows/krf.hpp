#pragma once
// Kahler-Ricci flow at the level of the potential phi = |x|^2/2 + psi, with
// psi sampled on a box grid treated as periodic (psi vanishes near the faces).

#include <vector>

#include "trflow/ambient/model.hpp"

namespace trflow {

class PotentialGrid {
 public:
  // Cube [center - half_width, center + half_width)^{2n} with `nodes` per axis.
  PotentialGrid(int n, int nodes, Vec center, double half_width, std::vector<double> psi);
  // Samples phi - |x|^2/2.
  static PotentialGrid sample(const KahlerPotential& phi, int nodes, Vec center, double half_width);

  int n() const { return n_; }
  int dim() const { return 2 * n_; }
  int nodes() const { return nodes_; }
  double spacing() const { return h_; }
  const Vec& lo() const { return lo_; }
  double half_width() const { return half_width_; }
  const Vec& center() const { return center_; }
  std::size_t size() const { return psi_.size(); }
  std::vector<int> extents() const;
  const std::vector<double>& psi() const { return psi_; }
  Vec node_position(std::size_t idx) const;

  // d(psi)/dt = (1/2) log det(I + (H + J^T H J)/2), H the 4th-order central
  // difference Hessian of psi. Throws DegenerateError("ambient degenerate")
  // when the metric stops being positive.
  std::vector<double> rate() const;

  // psi + dt * rate
  PotentialGrid advanced(const std::vector<double>& rate, double dt) const;

  // Kahler model reading psi through a quintic spline; chart domain is the
  // cube shrunk by `margin` on every side.
  ModelPtr model(double margin) const;

 private:
  int n_;
  int nodes_;
  Vec center_, lo_;
  double half_width_;
  double h_;
  std::vector<double> psi_;
};

}  // namespace trflow
