#pragma once
// Discrete differential forms on the parameter torus, and the intrinsic
// (induced-metric) Levi-Civita curvature.

#include <vector>

#include "trflow/immersion/frames.hpp"

namespace trflow {

using ScalarField = std::vector<double>;

struct OneForm {
  int n = 0;
  std::array<ScalarField, kMaxTorus> c;
};

// Only components c[i][j] with i < j are populated.
struct TwoForm {
  int n = 0;
  std::array<std::array<ScalarField, kMaxTorus>, kMaxTorus> c;
  double component(std::size_t node, int i, int j) const;
};

OneForm exterior_d(const TorusGrid& grid, const ScalarField& f);
TwoForm exterior_d(const TorusGrid& grid, const OneForm& a);

// Pullback omega(d_i iota, d_j iota).
TwoForm pullback_omega(const FramePacket& fp);

// Codifferential with respect to the induced metric.
ScalarField codifferential(const FramePacket& fp, const OneForm& a);
OneForm codifferential(const FramePacket& fp, const TwoForm& w);

// Per-node Levi-Civita curvature endomorphisms R(d_i, d_j) of the induced
// metric, in the coordinate basis d_k (n x n).
struct InducedCurvature {
  int n = 0;
  std::vector<std::array<std::array<Mat, kMaxTorus>, kMaxTorus>> r;
  std::vector<std::array<Mat, kMaxTorus>> christoffel;  // (C_i)(k, j) = Gamma^k_ij
};
InducedCurvature induced_curvature(const FramePacket& fp);

// Gaussian curvature K = R_1212 / det g (n = 2 only).
ScalarField gauss_curvature(const FramePacket& fp, const InducedCurvature& ic);

}  // namespace trflow
