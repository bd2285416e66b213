#pragma once
// Kahler potentials with closed-form derivatives up to order 4.

#include <string>

#include "trflow/ambient/geometry.hpp"

namespace trflow {

// Partial derivatives of a scalar function up to `order`.
struct ScalarJet {
  int dim = 0;
  int order = 0;
  double value = 0.0;
  Vec grad;
  Mat hess;
  PerAxis<Mat> third;        // third[a](b,c)
  PerAxisPair<Mat> fourth;   // fourth[a][b](c,d)

  static ScalarJet zero(int dim, int order);
  ScalarJet& operator+=(const ScalarJet& o);
};

// Smooth compactly supported bump b(u) = exp(1 - 1/(1-u)) for u < 1, else 0.
// Returns b and its first four u-derivatives in out[0..4].
void bump_profile(double u, double out[5]);

enum class PotentialTag { flat, complex_hyperbolic, fubini_study, flat_plus_bump };

struct KahlerPotential {
  PotentialTag tag = PotentialTag::flat;
  int n = 2;
  double epsilon = 0.0;  // bump amplitude
  Vec center;            // bump center (2n)
  double width = 1.0;    // bump radius

  ScalarJet evaluate(const Vec& x, int order) const;
  std::string name() const;
};

PotentialTag parse_potential_tag(const std::string& s);
const char* potential_tag_name(PotentialTag t);

// Kahler metric data from the real Hessian: g = (H + J^T H J)/2, with the
// derivative levels of g taken from the third and fourth derivatives.
AmbientJet kahler_jet_from_scalar(const ScalarJet& phi, int order);

}  // namespace trflow
