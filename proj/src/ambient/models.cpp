#include "trflow/ambient/model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "trflow/core/errors.hpp"

namespace trflow {

const char* model_kind_name(ModelKind k) {
  switch (k) {
    case ModelKind::flat: return "flat";
    case ModelKind::flat_torus: return "flat-torus";
    case ModelKind::kahler_potential: return "kahler-potential";
    case ModelKind::almost_kahler_pair: return "almost-kahler-pair";
  }
  return "?";
}

const char* scheme_name(DerivativeScheme s) {
  return s == DerivativeScheme::analytic ? "analytic" : "central-difference";
}

ChartDomain ChartDomain::whole_space() { return ChartDomain{}; }

ChartDomain ChartDomain::box(Vec lo, Vec hi) {
  ChartDomain d;
  d.shape = Shape::box;
  d.lo = std::move(lo);
  d.hi = std::move(hi);
  return d;
}

ChartDomain ChartDomain::ball(Vec center, double radius) {
  ChartDomain d;
  d.shape = Shape::ball;
  d.center = std::move(center);
  d.radius = radius;
  return d;
}

ChartDomain ChartDomain::lattice(Vec periods) {
  ChartDomain d;
  d.shape = Shape::lattice;
  d.periods = std::move(periods);
  return d;
}

bool ChartDomain::contains(const Vec& x) const {
  if (!x.allFinite()) return false;
  switch (shape) {
    case Shape::whole:
    case Shape::lattice: return true;
    case Shape::box:
      for (int i = 0; i < x.size(); ++i)
        if (!(x(i) > lo(i) && x(i) < hi(i))) return false;
      return true;
    case Shape::ball: return (x - center).norm() < radius;
  }
  return false;
}

Vec ChartDomain::reduce(const Vec& x) const {
  if (shape != Shape::lattice) return x;
  Vec r = x;
  for (int i = 0; i < x.size(); ++i) r(i) = x(i) - periods(i) * std::floor(x(i) / periods(i));
  return r;
}

std::string ChartDomain::describe() const {
  std::ostringstream os;
  switch (shape) {
    case Shape::whole: os << "whole chart"; break;
    case Shape::box: os << "box [" << lo.transpose() << "] x [" << hi.transpose() << "]"; break;
    case Shape::ball: os << "ball radius " << radius; break;
    case Shape::lattice: os << "lattice periods [" << periods.transpose() << "]"; break;
  }
  return os.str();
}

AmbientModel::AmbientModel(int n, ModelKind kind, ChartDomain domain, DerivativeScheme scheme, double h_amb)
    : n_(n), kind_(kind), domain_(std::move(domain)), scheme_(scheme), h_amb_(h_amb) {
  if (n < 1 || n > kMaxComplex) throw ConfigError("complex dimension must be 1..3");
  if (!(h_amb > 0.0)) throw ConfigError("h_amb must be positive");
}

void AmbientModel::require_domain(const Vec& x) const {
  if (x.size() != dim()) throw std::invalid_argument("ambient point has wrong dimension");
  if (!domain_.contains(x)) {
    std::ostringstream os;
    os << "left chart domain: point [" << x.transpose() << "] outside " << domain_.describe();
    throw DomainError(os.str());
  }
}

AmbientJet AmbientModel::jet(const Vec& x, int order) const {
  require_domain(x);
  return jet_impl(x, order);
}

PointGeometry AmbientModel::geometry(const Vec& x, bool curvature) const {
  return geometry_from_jet(jet(x, curvature ? 2 : 1), curvature);
}

Mat AmbientModel::metric(const Vec& x) const {
  require_domain(x);
  Mat g, j;
  value(x, g, j);
  return g;
}

Mat AmbientModel::complex_structure(const Vec& x) const {
  require_domain(x);
  Mat g, j;
  value(x, g, j);
  return j;
}

Mat AmbientModel::symplectic(const Vec& x) const {
  require_domain(x);
  Mat g, j;
  value(x, g, j);
  return j.transpose() * g;
}

AmbientJet AmbientModel::jet_impl(const Vec& x, int order) const {
  return central_difference_jet([this](const Vec& p, Mat& g, Mat& j) { value(p, g, j); }, x, order,
                                h_amb_);
}

AmbientJet central_difference_jet(const std::function<void(const Vec&, Mat&, Mat&)>& f, const Vec& x,
                                  int order, double h) {
  const int d = static_cast<int>(x.size());
  AmbientJet jet;
  jet.dim = d;
  jet.order = order;
  f(x, jet.g, jet.J);
  for (int a = 0; a < d; ++a) {
    jet.dg[a] = Mat::Zero(d, d);
    jet.dJ[a] = Mat::Zero(d, d);
    for (int b = 0; b < d; ++b) {
      jet.ddg[a][b] = Mat::Zero(d, d);
      jet.ddJ[a][b] = Mat::Zero(d, d);
    }
  }
  if (order < 1) return jet;
  PerAxis<Mat> gp, gm, jp, jm;  // values at x +- h e_a
  for (int a = 0; a < d; ++a) {
    Vec e = Vec::Zero(d);
    e(a) = h;
    Mat gp2, gm2, jp2, jm2;
    f(x + e, gp[a], jp[a]);
    f(x - e, gm[a], jm[a]);
    f(x + 2 * e, gp2, jp2);
    f(x - 2 * e, gm2, jm2);
    jet.dg[a] = (8.0 * (gp[a] - gm[a]) - (gp2 - gm2)) / (12.0 * h);
    jet.dJ[a] = (8.0 * (jp[a] - jm[a]) - (jp2 - jm2)) / (12.0 * h);
  }
  if (order < 2) return jet;
  const double h2 = h * h;
  for (int a = 0; a < d; ++a) {
    jet.ddg[a][a] = (gp[a] - 2.0 * jet.g + gm[a]) / h2;
    jet.ddJ[a][a] = (jp[a] - 2.0 * jet.J + jm[a]) / h2;
    for (int b = a + 1; b < d; ++b) {
      Vec ea = Vec::Zero(d), eb = Vec::Zero(d);
      ea(a) = h;
      eb(b) = h;
      Mat gpp, gpm, gmp, gmm, jpp, jpm, jmp, jmm;
      f(x + ea + eb, gpp, jpp);
      f(x + ea - eb, gpm, jpm);
      f(x - ea + eb, gmp, jmp);
      f(x - ea - eb, gmm, jmm);
      jet.ddg[a][b] = jet.ddg[b][a] = (gpp - gpm - gmp + gmm) / (4.0 * h2);
      jet.ddJ[a][b] = jet.ddJ[b][a] = (jpp - jpm - jmp + jmm) / (4.0 * h2);
    }
  }
  return jet;
}

namespace {

class FlatModel final : public AmbientModel {
 public:
  FlatModel(int n, ModelKind kind, ChartDomain dom)
      : AmbientModel(n, kind, std::move(dom), DerivativeScheme::analytic, 1e-3), j_(standard_j(n)) {}

  void value(const Vec&, Mat& g, Mat& j) const override {
    g = Mat::Identity(dim(), dim());
    j = j_;
  }

 protected:
  AmbientJet jet_impl(const Vec&, int order) const override {
    AmbientJet jet;
    const int d = dim();
    jet.dim = d;
    jet.order = order;
    jet.g = Mat::Identity(d, d);
    jet.J = j_;
    for (int a = 0; a < d; ++a) {
      jet.dg[a] = jet.dJ[a] = Mat::Zero(d, d);
      for (int b = 0; b < d; ++b) jet.ddg[a][b] = jet.ddJ[a][b] = Mat::Zero(d, d);
    }
    return jet;
  }

 private:
  Mat j_;
};

class PotentialModel final : public AmbientModel {
 public:
  PotentialModel(KahlerPotential phi, DerivativeScheme scheme, double h_amb, ChartDomain dom)
      : AmbientModel(phi.n, ModelKind::kahler_potential, std::move(dom), scheme, h_amb),
        phi_(std::move(phi)) {}

  void value(const Vec& x, Mat& g, Mat& j) const override {
    const AmbientJet jet = kahler_jet_from_scalar(phi_.evaluate(x, 2), 0);
    g = jet.g;
    j = jet.J;
  }

 protected:
  AmbientJet jet_impl(const Vec& x, int order) const override {
    if (scheme() == DerivativeScheme::central_difference) return AmbientModel::jet_impl(x, order);
    return kahler_jet_from_scalar(phi_.evaluate(x, order + 2), order);
  }

 private:
  KahlerPotential phi_;
};

class PairModel final : public AmbientModel {
 public:
  PairModel(std::function<Mat(const Vec&)> gp, int n, double h_amb, ChartDomain dom)
      : AmbientModel(n, ModelKind::almost_kahler_pair, std::move(dom), DerivativeScheme::central_difference,
                     h_amb),
        gprime_(std::move(gp)) {}

  void value(const Vec& x, Mat& g, Mat& j) const override { polar_retraction(gprime_(x), g, j); }

 private:
  std::function<Mat(const Vec&)> gprime_;
};

class GridPotentialModel final : public AmbientModel {
 public:
  GridPotentialModel(int n, std::shared_ptr<const PeriodicBoxSpline> psi, ChartDomain dom)
      : AmbientModel(n, ModelKind::kahler_potential, std::move(dom), DerivativeScheme::analytic, 1e-3),
        psi_(std::move(psi)) {}

  void value(const Vec& x, Mat& g, Mat& j) const override {
    const AmbientJet jet = jet_impl(x, 0);
    g = jet.g;
    j = jet.J;
  }

 protected:
  AmbientJet jet_impl(const Vec& x, int order) const override {
    ScalarJet s = psi_->evaluate(x, order + 2);
    s.hess += Mat::Identity(dim(), dim());
    return kahler_jet_from_scalar(s, order);
  }

 private:
  std::shared_ptr<const PeriodicBoxSpline> psi_;
};

void check_positive_on_samples(const AmbientModel& m, const ChartDomain& dom, const Vec& fallback_lo,
                               const Vec& fallback_hi) {
  const int d = m.dim();
  Vec lo = fallback_lo, hi = fallback_hi;
  if (dom.shape == ChartDomain::Shape::box) {
    lo = dom.lo;
    hi = dom.hi;
  } else if (dom.shape == ChartDomain::Shape::ball) {
    lo = dom.center.array() - dom.radius;
    hi = dom.center.array() + dom.radius;
  }
  const int per_axis = d <= 2 ? 21 : (d <= 4 ? 7 : 4);
  std::size_t total = 1;
  for (int a = 0; a < d; ++a) total *= per_axis;
  for (std::size_t k = 0; k < total; ++k) {
    Vec x(d);
    std::size_t rem = k;
    for (int a = 0; a < d; ++a) {
      const int i = static_cast<int>(rem % per_axis);
      rem /= per_axis;
      x(a) = lo(a) + (hi(a) - lo(a)) * (i + 0.5) / per_axis;
    }
    if (!dom.contains(x)) continue;
    Mat g, j;
    m.value(x, g, j);
    Eigen::LLT<Mat> llt(g);
    if (llt.info() != Eigen::Success || !g.allFinite()) {
      std::ostringstream os;
      os << "Kahler potential metric is not positive definite at [" << x.transpose() << "]";
      throw DegenerateError(os.str());
    }
  }
}

}  // namespace

ModelPtr make_flat(int n) {
  return std::make_shared<FlatModel>(n, ModelKind::flat, ChartDomain::whole_space());
}

ModelPtr make_flat_torus(int n, Vec periods) {
  if (periods.size() == 0) periods = Vec::Constant(2 * n, 2.0 * std::numbers::pi);
  if (periods.size() != 2 * n) throw ConfigError("flat-torus periods must have 2n entries");
  return std::make_shared<FlatModel>(n, ModelKind::flat_torus, ChartDomain::lattice(periods));
}

ModelPtr kahler_from_potential(const KahlerPotential& phi, DerivativeScheme scheme, double h_amb,
                               ChartDomain domain) {
  const int d = 2 * phi.n;
  if (phi.tag == PotentialTag::complex_hyperbolic) {
    if (domain.shape == ChartDomain::Shape::whole) domain = ChartDomain::ball(Vec::Zero(d), 0.95);
    if (domain.shape == ChartDomain::Shape::ball && domain.center.norm() + domain.radius > 1.0)
      throw ConfigError("complex-hyperbolic chart must lie inside the unit ball");
  }
  if (phi.tag == PotentialTag::flat_plus_bump && phi.center.size() != d)
    throw ConfigError("bump center must have 2n entries");
  auto m = std::make_shared<PotentialModel>(phi, scheme, h_amb, domain);
  Vec lo = Vec::Constant(d, -2.0), hi = Vec::Constant(d, 2.0);
  if (phi.tag == PotentialTag::flat_plus_bump) {
    lo = phi.center.array() - 1.05 * phi.width;
    hi = phi.center.array() + 1.05 * phi.width;
  }
  check_positive_on_samples(*m, domain, lo, hi);
  return m;
}

Mat BumpMetricSpec::evaluate(const Vec& x) const {
  Mat g = Mat::Identity(2 * n, 2 * n);
  double b[5];
  bump_profile((x - center).squaredNorm() / (width * width), b);
  g(0, 0) += epsilon * b[0];
  return g;
}

void polar_retraction(const Mat& gprime, Mat& g, Mat& j) {
  const int d = static_cast<int>(gprime.rows());
  const Mat om = standard_omega(d / 2);
  // omega(X,Y) = g'(AX,Y)  =>  A = g'^{-1} om^T
  const Mat a = gprime.ldlt().solve(om.transpose());
  // In g'-orthonormal coordinates A becomes skew; J = A (A*A)^{-1/2}.
  const Mat s = spd_sqrt(gprime);
  const Mat sinv = s.inverse();
  const Mat ahat = s * a * sinv;
  const Mat p = ahat.transpose() * ahat;
  Eigen::FullPivLU<Mat> lu(p);
  if (!lu.isInvertible()) throw DegenerateError("polar retraction: singular A");
  const Mat jhat = ahat * spd_inv_sqrt(p);
  j = sinv * jhat * s;
  g = om * j;
  g = 0.5 * (g + g.transpose());
}

ModelPtr almost_kahler_from_pair(std::function<Mat(const Vec&)> gprime, int n, double h_amb,
                                 ChartDomain domain) {
  return std::make_shared<PairModel>(std::move(gprime), n, h_amb, std::move(domain));
}

ModelPtr almost_kahler_bump(const BumpMetricSpec& spec, double h_amb) {
  if (spec.center.size() != 2 * spec.n) throw ConfigError("bump center must have 2n entries");
  if (spec.epsilon <= -1.0) throw ConfigError("bump amplitude must exceed -1");
  return almost_kahler_from_pair([spec](const Vec& x) { return spec.evaluate(x); }, spec.n, h_amb);
}

ModelPtr kahler_from_grid_potential(int n, std::shared_ptr<const PeriodicBoxSpline> psi, ChartDomain box) {
  return std::make_shared<GridPotentialModel>(n, std::move(psi), std::move(box));
}

}  // namespace trflow
