#pragma once
// Single-chart ambient models on R^{2n} = C^n.

#include <functional>
#include <memory>
#include <string>

#include "trflow/ambient/geometry.hpp"
#include "trflow/ambient/potential.hpp"
#include "trflow/ambient/spline.hpp"

namespace trflow {

enum class ModelKind { flat, flat_torus, kahler_potential, almost_kahler_pair };
enum class DerivativeScheme { analytic, central_difference };

const char* model_kind_name(ModelKind k);
const char* scheme_name(DerivativeScheme s);

struct ChartDomain {
  enum class Shape { whole, box, ball, lattice };
  Shape shape = Shape::whole;
  Vec lo, hi;        // box
  Vec center;        // ball
  double radius = 0; // ball
  Vec periods;       // lattice: period per real coordinate

  static ChartDomain whole_space();
  static ChartDomain box(Vec lo, Vec hi);
  static ChartDomain ball(Vec center, double radius);
  static ChartDomain lattice(Vec periods);

  bool contains(const Vec& x) const;
  // Lattice models: coordinates reduced into [0, period). Others: identity.
  Vec reduce(const Vec& x) const;
  std::string describe() const;
};

class AmbientModel {
 public:
  AmbientModel(int n, ModelKind kind, ChartDomain domain, DerivativeScheme scheme, double h_amb);
  virtual ~AmbientModel() = default;

  int n() const { return n_; }
  int dim() const { return 2 * n_; }
  ModelKind kind() const { return kind_; }
  const ChartDomain& domain() const { return domain_; }
  DerivativeScheme scheme() const { return scheme_; }
  double h_amb() const { return h_amb_; }
  bool is_kahler() const { return kind_ != ModelKind::almost_kahler_pair; }
  // Flat models carry the constant Calabi-Yau form dz^1 ^ ... ^ dz^n.
  bool is_flat() const { return kind_ == ModelKind::flat || kind_ == ModelKind::flat_torus; }

  // Throws DomainError when x is outside the chart.
  void require_domain(const Vec& x) const;

  // Metric and J with `order` derivative levels (0..2).
  AmbientJet jet(const Vec& x, int order) const;
  PointGeometry geometry(const Vec& x, bool curvature = false) const;

  Mat metric(const Vec& x) const;
  Mat complex_structure(const Vec& x) const;
  Mat symplectic(const Vec& x) const;

  // g and J at a point, no derivatives.
  virtual void value(const Vec& x, Mat& g, Mat& j) const = 0;

 protected:
  // Default: central differences of value() at step h_amb.
  virtual AmbientJet jet_impl(const Vec& x, int order) const;

 private:
  int n_;
  ModelKind kind_;
  ChartDomain domain_;
  DerivativeScheme scheme_;
  double h_amb_;
};

using ModelPtr = std::shared_ptr<const AmbientModel>;

// Central-difference jet of a (g, J) field: 4th-order first derivatives,
// 2nd-order second derivatives.
AmbientJet central_difference_jet(const std::function<void(const Vec&, Mat&, Mat&)>& f,
                                  const Vec& x, int order, double h);

ModelPtr make_flat(int n);
// Flat torus C^n / lattice; `periods` per real coordinate (default 2*pi).
ModelPtr make_flat_torus(int n, Vec periods = Vec());

// Checks positivity of the metric on a sample grid over `sample_box`
// (or the domain) and throws DegenerateError naming the offending point.
ModelPtr kahler_from_potential(const KahlerPotential& phi, DerivativeScheme scheme,
                               double h_amb = 1e-3, ChartDomain domain = ChartDomain::whole_space());

// g' = diag(1 + eps*b(|x-c|^2/w^2), 1, ..., 1).
struct BumpMetricSpec {
  int n = 2;
  double epsilon = 0.1;
  Vec center;
  double width = 1.0;
  Mat evaluate(const Vec& x) const;
};

ModelPtr almost_kahler_from_pair(std::function<Mat(const Vec&)> gprime, int n, double h_amb = 1e-3,
                                 ChartDomain domain = ChartDomain::whole_space());
ModelPtr almost_kahler_bump(const BumpMetricSpec& spec, double h_amb = 1e-3);

// Polar retraction: J and g from the constant standard form and a metric g'.
void polar_retraction(const Mat& gprime, Mat& g, Mat& j);

// Kahler model whose potential is |x|^2/2 plus a spline interpolant of
// samples on a periodic box grid.
ModelPtr kahler_from_grid_potential(int n, std::shared_ptr<const PeriodicBoxSpline> psi, ChartDomain box);

}  // namespace trflow
