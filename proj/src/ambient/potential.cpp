#include "trflow/ambient/potential.hpp"

#include <cmath>

#include "trflow/core/errors.hpp"

namespace trflow {

ScalarJet ScalarJet::zero(int dim, int order) {
  ScalarJet s;
  s.dim = dim;
  s.order = order;
  s.grad = Vec::Zero(dim);
  s.hess = Mat::Zero(dim, dim);
  for (int a = 0; a < dim; ++a) {
    s.third[a] = Mat::Zero(dim, dim);
    for (int b = 0; b < dim; ++b) s.fourth[a][b] = Mat::Zero(dim, dim);
  }
  return s;
}

ScalarJet& ScalarJet::operator+=(const ScalarJet& o) {
  value += o.value;
  grad += o.grad;
  hess += o.hess;
  for (int a = 0; a < dim; ++a) {
    third[a] += o.third[a];
    for (int b = 0; b < dim; ++b) fourth[a][b] += o.fourth[a][b];
  }
  return *this;
}

void bump_profile(double u, double out[5]) {
  for (int k = 0; k < 5; ++k) out[k] = 0.0;
  if (u >= 1.0) return;
  const double v = 1.0 / (1.0 - u);
  const double b = std::exp(1.0 - v);
  // h = 1 - v, h^(k) = -v^(k), v^(k) = k! v^{k+1}.
  const double h1 = -v * v;
  const double h2 = -2.0 * v * v * v;
  const double h3 = -6.0 * v * v * v * v;
  const double h4 = -24.0 * v * v * v * v * v;
  out[0] = b;
  out[1] = b * h1;
  out[2] = b * (h2 + h1 * h1);
  out[3] = b * (h3 + 3.0 * h1 * h2 + h1 * h1 * h1);
  out[4] = b * (h4 + 4.0 * h1 * h3 + 3.0 * h2 * h2 + 6.0 * h1 * h1 * h2 + h1 * h1 * h1 * h1);
}

namespace {

// Jet of f(q) with q = |x - c|^2 / w^2, from the profile derivatives f[0..4].
ScalarJet compose_quadratic(const Vec& x, const Vec& c, double w, const double f[5], int order) {
  const int d = static_cast<int>(x.size());
  ScalarJet s = ScalarJet::zero(d, order);
  const double s2 = 2.0 / (w * w);
  const Vec qa = s2 * (x - c);
  auto qab = [&](int a, int b) { return a == b ? s2 : 0.0; };
  s.value = f[0];
  s.grad = f[1] * qa;
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) s.hess(a, b) = f[2] * qa(a) * qa(b) + f[1] * qab(a, b);
  if (order >= 3)
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        for (int e = 0; e < d; ++e)
          s.third[a](b, e) = f[3] * qa(a) * qa(b) * qa(e) +
                             f[2] * (qab(a, b) * qa(e) + qab(a, e) * qa(b) + qab(b, e) * qa(a));
  if (order >= 4)
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        for (int e = 0; e < d; ++e)
          for (int g = 0; g < d; ++g)
            s.fourth[a][b](e, g) =
                f[4] * qa(a) * qa(b) * qa(e) * qa(g) +
                f[3] * (qab(a, b) * qa(e) * qa(g) + qab(a, e) * qa(b) * qa(g) +
                        qab(a, g) * qa(b) * qa(e) + qab(b, e) * qa(a) * qa(g) +
                        qab(b, g) * qa(a) * qa(e) + qab(e, g) * qa(a) * qa(b)) +
                f[2] * (qab(a, b) * qab(e, g) + qab(a, e) * qab(b, g) + qab(a, g) * qab(b, e));
  return s;
}

}  // namespace

ScalarJet KahlerPotential::evaluate(const Vec& x, int order) const {
  const int d = 2 * n;
  const Vec origin = Vec::Zero(d);
  const double q = x.squaredNorm();
  double f[5] = {0, 0, 0, 0, 0};
  switch (tag) {
    case PotentialTag::flat:
    case PotentialTag::flat_plus_bump:
      f[0] = 0.5 * q;
      f[1] = 0.5;
      break;
    case PotentialTag::complex_hyperbolic: {
      if (q >= 1.0) throw DomainError("complex-hyperbolic potential outside the unit ball");
      const double r = 1.0 / (1.0 - q);
      f[0] = -std::log(1.0 - q);
      f[1] = r;
      f[2] = r * r;
      f[3] = 2.0 * r * r * r;
      f[4] = 6.0 * r * r * r * r;
      break;
    }
    case PotentialTag::fubini_study: {
      const double r = 1.0 / (1.0 + q);
      f[0] = std::log(1.0 + q);
      f[1] = r;
      f[2] = -r * r;
      f[3] = 2.0 * r * r * r;
      f[4] = -6.0 * r * r * r * r;
      break;
    }
  }
  ScalarJet s = compose_quadratic(x, origin, 1.0, f, order);
  if (tag == PotentialTag::flat_plus_bump && epsilon != 0.0) {
    const Vec diff = x - center;
    double b[5];
    bump_profile(diff.squaredNorm() / (width * width), b);
    for (double& v : b) v *= epsilon;
    s += compose_quadratic(x, center, width, b, order);
  }
  return s;
}

std::string KahlerPotential::name() const { return potential_tag_name(tag); }

PotentialTag parse_potential_tag(const std::string& s) {
  if (s == "flat") return PotentialTag::flat;
  if (s == "complex-hyperbolic") return PotentialTag::complex_hyperbolic;
  if (s == "fubini-study" || s == "fubini-study-chart") return PotentialTag::fubini_study;
  if (s == "flat-plus-bump") return PotentialTag::flat_plus_bump;
  throw ConfigError("unknown potential tag '" + s + "'");
}

const char* potential_tag_name(PotentialTag t) {
  switch (t) {
    case PotentialTag::flat: return "flat";
    case PotentialTag::complex_hyperbolic: return "complex-hyperbolic";
    case PotentialTag::fubini_study: return "fubini-study";
    case PotentialTag::flat_plus_bump: return "flat-plus-bump";
  }
  return "?";
}

AmbientJet kahler_jet_from_scalar(const ScalarJet& phi, int order) {
  const int d = phi.dim;
  const Mat j = standard_j(d / 2);
  const Mat jt = j.transpose();
  auto herm = [&](const Mat& h) -> Mat { return 0.5 * (h + jt * h * j); };
  AmbientJet jet;
  jet.dim = d;
  jet.order = order;
  jet.g = herm(phi.hess);
  jet.J = j;
  for (int a = 0; a < d; ++a) {
    jet.dJ[a] = Mat::Zero(d, d);
    jet.dg[a] = order >= 1 ? herm(phi.third[a]) : Mat::Zero(d, d);
    for (int b = 0; b < d; ++b) {
      jet.ddJ[a][b] = Mat::Zero(d, d);
      jet.ddg[a][b] = order >= 2 ? herm(phi.fourth[a][b]) : Mat::Zero(d, d);
    }
  }
  return jet;
}

}  // namespace trflow

