#pragma once
// Periodic quintic B-spline interpolation on a uniform box grid in up to
// six dimensions. The interpolant is C^4, so derivatives up to order 4 are
// continuous across cells.

#include <vector>

#include "trflow/ambient/potential.hpp"

namespace trflow {

// m-th derivative (m <= 4) of the centered quintic B-spline at s.
double quintic_bspline(double s, int m);

// In-place periodic prefilter of one line (samples -> spline coefficients).
void quintic_prefilter_line(double* line, int n);

class PeriodicBoxSpline {
 public:
  // Grid node k along axis a sits at lo(a) + k*h; period extents[a]*h.
  // `samples` is row-major over `extents`.
  PeriodicBoxSpline(std::vector<int> extents, Vec lo, double h, const std::vector<double>& samples);

  int dim() const { return static_cast<int>(extents_.size()); }
  ScalarJet evaluate(const Vec& x, int order) const;

 private:
  std::vector<int> extents_;
  Vec lo_;
  double h_;
  std::vector<double> coef_;
};

}  // namespace trflow
