#pragma once
// Pointwise tensor algebra from metric / complex-structure jets: Levi-Civita
// and Chern connections, torsion, curvatures, Ricci form and Chern form.

#include <array>
#include <memory>

#include "trflow/core/linalg.hpp"

namespace trflow {

template <class T>
using PerAxis = std::array<T, kMaxReal>;
template <class T>
using PerAxisPair = std::array<std::array<T, kMaxReal>, kMaxReal>;

// Values and coordinate derivatives of g and J at a point. Only the first
// `order` derivative levels are filled.
struct AmbientJet {
  int dim = 0;
  int order = 0;
  Mat g, J;
  PerAxis<Mat> dg, dJ;
  PerAxisPair<Mat> ddg, ddJ;
};

// Affine connection coefficients. along[i] is the matrix of Y -> Gamma(d_i, Y),
// so (along[i])(k, j) = Gamma^k_{ij} and nabla_{d_i} d_j = Gamma^k_{ij} d_k.
struct Connection {
  int dim = 0;
  PerAxis<Mat> along;

  // Gamma(X, Y) = X^i Y^j Gamma^k_{ij} d_k.
  Vec apply(const Vec& x, const Vec& y) const;
  // Matrix of Y -> Gamma(X, Y).
  Mat along_vector(const Vec& x) const;
};

// r[b][c] is the endomorphism R(d_b, d_c) with
// R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z.
struct Curvature {
  int dim = 0;
  PerAxisPair<Mat> r;

  Mat endo(const Vec& x, const Vec& y) const;
  Vec apply(const Vec& x, const Vec& y, const Vec& z) const { return endo(x, y) * z; }
};

struct CurvatureSet {
  Curvature riemann;          // of the Levi-Civita connection
  Curvature chern_curvature;  // of the Chern connection
  Mat ricci;                  // Ric_{cd} = tr(X -> R(X, d_c) d_d)
  Mat rho;                    // rho(X,Y) = Ric(JX, Y)
  Mat chern_form;             // P(X,Y) = tr(J R-tilde(X,Y))
};

struct PointGeometry {
  int dim = 0;
  Mat g, ginv, J, omega;  // omega = J^T g, i.e. omega(X,Y) = g(JX,Y)
  Connection levi_civita;
  Connection chern;
  PerAxis<Mat> nabla_j;  // (nabla-bar_{d_a} J)
  // Present only when requested; kept out of line because it is large.
  std::shared_ptr<const CurvatureSet> curv;

  bool has_curvature() const { return static_cast<bool>(curv); }
  // Throws UnsupportedError when curvature was not computed.
  const CurvatureSet& curvature() const;
  const Mat& rho() const { return curvature().rho; }
  const Mat& chern_form() const { return curvature().chern_form; }

  // Chern torsion T(X,Y) = Gamma-tilde(X,Y) - Gamma-tilde(Y,X).
  Vec torsion(const Vec& x, const Vec& y) const;
  double max_nabla_j() const;
};

// `curvature` requires jet.order >= 2.
PointGeometry geometry_from_jet(const AmbientJet& jet, bool curvature);

}  // namespace trflow
