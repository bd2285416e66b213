#pragma once
// Special totally real (STR) machinery: phase residuals along immersions,
// graph equations det_C(I + iM), a scalar-family root finder, and J-volume
// comparisons inside a homology class.

#include <functional>
#include <random>
#include <string>

#include "trflow/calibration/angle.hpp"
#include "trflow/immersion/presets.hpp"

namespace trflow {

struct StrResidual {
  double theta = 0.0;      // best phase: circular mean of -theta_L
  double residual = 0.0;   // sup |sin(theta_L + theta)| rho_J sqrt(det g)
  double min_re = 0.0;     // min cos(theta_L + theta) rho_J sqrt(det g)
  double sup_omega = 0.0;  // Lagrangian defect, reported separately
};
StrResidual str_residual(const FramePacket& fp, const CYStructure& cy);

struct GraphDet {
  double im = 0.0, re = 0.0;
};
// det_C(I + iM) for a real n x n matrix M.
GraphDet str_graph_residual(const Mat& m);
// Smallest singular value of J F + F J (F real 2n x 2n, J standard) and
// the injectivity test against `tol`.
double totally_real_graph_margin(const Mat& f);
bool totally_real_graph_check(const Mat& f, double tol = 1e-10);

struct StrRoot {
  double s = 0.0;
  double im = 0.0, re = 0.0;
  bool identically_satisfied = false;
  int iterations = 0;
};
// Root of Im det_C(I + iM(s)) with Re > 0, searched on [lo, hi] (must
// contain s0). Newton with bisection fallback to |Im| <= 1e-12. Throws
// Error("no STR member found") when no admissible root exists.
StrRoot str_graph_newton(const std::function<Mat(double)>& family, double s0, double lo, double hi);

// iota + amplitude * (0, f_1, 0, f_2, ...): a graph perturbation in the
// y-directions, which stays in the homology class of iota.
Immersion graph_perturbation(const Immersion& base, const TrigField& f, double amplitude);

struct HomologyRow {
  double amplitude = 0.0;
  double vol_J = 0.0, vol_g = 0.0;
  double excess = 0.0;  // vol_J - base vol_J
};
std::vector<HomologyRow> homology_comparison(const Immersion& base, const AmbientModel& model,
                                             const std::vector<TrigField>& fields, double amplitude);
// Least-squares slope of log(excess) vs log(amplitude).
double excess_exponent(const Immersion& base, const AmbientModel& model, const TrigField& field,
                       const std::vector<double>& amplitudes);

struct ClassReport {
  std::string name;
  int candidates = 0;
  bool has_str = false;                // a totally real candidate with STR residual <= tol
  bool has_partially_complex = false;  // a candidate with min rho_J <= tol
  double best_str_residual = 0.0;
  double min_rho = 0.0;
};
// Two classes in the flat torus: the straight torus class and the class of
// a complex line torus, each with random graph perturbations.
std::vector<ClassReport> dichotomy_experiment(int resolution, int perturbations, std::mt19937_64& rng,
                                              double tol = 1e-8);

}  // namespace trflow
