#include "trflow/calibration/str.hpp"

#include <cmath>

#include "trflow/core/errors.hpp"

namespace trflow {

StrResidual str_residual(const FramePacket& fp, const CYStructure& cy) {
  const std::vector<double> th = lagrangian_angles(fp, cy);
  cplx s = 0.0;
  for (double t : th) s += std::polar(1.0, -t);
  StrResidual r;
  r.theta = std::abs(s) > 0.0 ? std::arg(s) : 0.0;
  r.min_re = 1e300;
  for (std::size_t p = 0; p < th.size(); ++p) {
    const NodeFrame& f = fp.nodes[p];
    const double dens = f.rho_J * f.vol_density;
    r.residual = std::max(r.residual, std::abs(std::sin(th[p] + r.theta)) * dens);
    r.min_re = std::min(r.min_re, std::cos(th[p] + r.theta) * dens);
  }
  r.sup_omega = sup_omega(fp);
  return r;
}

GraphDet str_graph_residual(const Mat& m) {
  const int n = static_cast<int>(m.rows());
  CMat a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = cplx(i == j ? 1.0 : 0.0, m(i, j));
  const cplx d = complex_det(a);
  return {d.imag(), d.real()};
}

double totally_real_graph_margin(const Mat& f) {
  const int n = static_cast<int>(f.rows()) / 2;
  if (f.rows() != f.cols() || f.rows() != 2 * n) throw ConfigError("graph differential must be 2n x 2n");
  const Mat j = standard_j(n);
  const Mat k = j * f + f * j;
  Eigen::JacobiSVD<Mat> svd(k);
  return svd.singularValues().minCoeff();
}

bool totally_real_graph_check(const Mat& f, double tol) { return totally_real_graph_margin(f) > tol; }

namespace {

double im_det(const std::function<Mat(double)>& fam, double s) { return str_graph_residual(fam(s)).im; }

// Newton from the midpoint with bisection safeguard on a sign-change bracket.
double refine_root(const std::function<Mat(double)>& fam, double a, double b, int& iters) {
  double fa = im_det(fam, a);
  double x = 0.5 * (a + b);
  for (iters = 0; iters < 200; ++iters) {
    const double fx = im_det(fam, x);
    if (std::abs(fx) <= 1e-12 && std::abs(fx) <= 1e-14 * std::max(1.0, std::abs(x))) return x;
    if (std::abs(fx) == 0.0) return x;
    if ((fx < 0) == (fa < 0)) {
      a = x;
      fa = fx;
    } else {
      b = x;
    }
    const double step = 1e-7 * std::max(1.0, std::abs(x));
    const double df = (im_det(fam, x + step) - im_det(fam, x - step)) / (2 * step);
    double nx = df != 0.0 ? x - fx / df : 0.5 * (a + b);
    if (!(nx > std::min(a, b) && nx < std::max(a, b))) nx = 0.5 * (a + b);
    if (std::abs(nx - x) <= 1e-16 * std::max(1.0, std::abs(x)) || std::abs(b - a) <= 1e-15 * std::max(1.0, std::abs(x))) {
      x = nx;
      break;
    }
    x = nx;
  }
  return x;
}

}  // namespace

StrRoot str_graph_newton(const std::function<Mat(double)>& family, double s0, double lo, double hi) {
  if (!(lo < hi) || s0 < lo || s0 > hi) throw ConfigError("str-solve bracket must satisfy lo <= s0 <= hi");
  StrRoot r;
  // Identically satisfied: Im det vanishes at s0 and across the bracket.
  bool ident = true;
  for (int k = 0; k <= 16 && ident; ++k) {
    const double s = k == 0 ? s0 : lo + (hi - lo) * (k - 0.5) / 16.0;
    ident = std::abs(im_det(family, s)) <= 1e-12;
  }
  if (ident) {
    const GraphDet d = str_graph_residual(family(s0));
    if (d.re > 0.0) {
      r.s = s0;
      r.im = d.im;
      r.re = d.re;
      r.identically_satisfied = true;
      return r;
    }
    throw Error("no STR member found: Im det vanishes identically but Re det <= 0 at s0");
  }
  // Candidate brackets by scanning, nearest to s0 first.
  const int M = 256;
  std::vector<std::pair<double, double>> brackets;
  double prev_s = lo, prev_f = im_det(family, lo);
  for (int k = 1; k <= M; ++k) {
    const double s = lo + (hi - lo) * k / M;
    const double f = im_det(family, s);
    if (prev_f == 0.0) brackets.push_back({prev_s, prev_s});
    else if ((f < 0) != (prev_f < 0) && f != 0.0) brackets.push_back({prev_s, s});
    prev_s = s;
    prev_f = f;
  }
  if (prev_f == 0.0) brackets.push_back({hi, hi});
  std::sort(brackets.begin(), brackets.end(), [&](auto& a, auto& b) {
    return std::abs(0.5 * (a.first + a.second) - s0) < std::abs(0.5 * (b.first + b.second) - s0);
  });
  for (const auto& [a, b] : brackets) {
    int it = 0;
    const double s = a == b ? a : refine_root(family, a, b, it);
    const GraphDet d = str_graph_residual(family(s));
    if (std::abs(d.im) <= 1e-12 && d.re > 0.0) {
      r.s = s;
      r.im = d.im;
      r.re = d.re;
      r.iterations = it;
      return r;
    }
  }
  throw Error("no STR member found in the bracket (no root with Re det > 0)");
}

Immersion graph_perturbation(const Immersion& base, const TrigField& f, double amplitude) {
  const TorusGrid& grid = base.grid();
  const int n = grid.n();
  if (f.dim != n) throw ConfigError("graph perturbation field must have n components");
  std::vector<Vec> pos(grid.size());
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const Vec v = f(grid.angles(p));
    pos[p] = base.position(p);
    for (int k = 0; k < n; ++k) pos[p](2 * k + 1) += amplitude * v(k);
  }
  return base.with_positions(std::move(pos));
}

std::vector<HomologyRow> homology_comparison(const Immersion& base, const AmbientModel& model,
                                             const std::vector<TrigField>& fields, double amplitude) {
  const Volumes v0 = volumes(frames(base, model));
  std::vector<HomologyRow> rows;
  rows.reserve(fields.size());
  for (const TrigField& f : fields) {
    FramePacket fp;
    try {
      fp = frames(graph_perturbation(base, f, amplitude), model);
    } catch (const DegenerateError& e) {
      throw DegenerateError(std::string("perturbation rejected: ") + e.what());
    }
    const Volumes v = volumes(fp);
    rows.push_back({amplitude, v.vol_J, v.vol_g, v.vol_J - v0.vol_J});
  }
  return rows;
}

double excess_exponent(const Immersion& base, const AmbientModel& model, const TrigField& field,
                       const std::vector<double>& amplitudes) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(amplitudes.size());
  for (double a : amplitudes) {
    const double e = homology_comparison(base, model, {field}, a)[0].excess;
    if (!(e > 0.0)) throw Error("excess is not positive; cannot fit an exponent");
    const double x = std::log(a), y = std::log(e);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

std::vector<ClassReport> dichotomy_experiment(int resolution, int perturbations, std::mt19937_64& rng, double tol) {
  const TorusGrid grid = TorusGrid::square(2, resolution);
  auto model = make_flat_torus(2);
  const CYStructure cy = cy_structure(*model);
  struct Cls {
    const char* name;
    Immersion base;
  };
  std::vector<Cls> catalog = {{"straight-torus", straight_torus(grid)}, {"complex-line-torus", complex_line_torus(grid)}};
  std::vector<ClassReport> out;
  for (const Cls& c : catalog) {
    ClassReport rep;
    rep.name = c.name;
    rep.best_str_residual = 1e300;
    rep.min_rho = 1e300;
    for (int k = 0; k <= perturbations; ++k) {
      const Immersion imm = k == 0 ? c.base : perturbed(c.base, TrigField::random(2, 4, 2, rng), 0.1);
      ++rep.candidates;
      FrameOptions opt;
      opt.second_derivatives = false;
      opt.enforce_margin = false;
      FramePacket fp;
      try {
        fp = frames(imm, *model, opt);
      } catch (const DegenerateError&) {
        rep.has_partially_complex = true;  // rho_J vanished at some node
        rep.min_rho = 0.0;
        continue;
      }
      rep.min_rho = std::min(rep.min_rho, fp.min_rho);
      if (fp.min_rho <= tol) {
        rep.has_partially_complex = true;
        continue;
      }
      const StrResidual s = str_residual(fp, cy);
      rep.best_str_residual = std::min(rep.best_str_residual, s.residual);
      if (s.residual <= tol && s.min_re > 0.0) rep.has_str = true;
    }
    out.push_back(rep);
  }
  return out;
}

}  // namespace trflow
