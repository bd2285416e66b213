#include "trflow/ambient/spline.hpp"

#include <cmath>
#include <stdexcept>

#include "trflow/core/errors.hpp"

namespace trflow {

namespace {

constexpr double kPoles[2] = {-0.430575347099973, -0.0430962882032647};
constexpr double kBinom6[7] = {1, 6, 15, 20, 15, 6, 1};
constexpr double kInvFact[6] = {1.0, 1.0, 0.5, 1.0 / 6.0, 1.0 / 24.0, 1.0 / 120.0};

// Truncated-power representation of the quintic B-spline, evaluated from the
// side with fewer terms to limit cancellation.
double bspline_right(double s, int m) {
  // s >= 0: beta^{(m)}(s) = (-1)^m/(5-m)! sum_k (-1)^k C(6,k) (3 - k - s)_+^{5-m}
  double acc = 0.0;
  for (int k = 0; k <= 6; ++k) {
    const double y = 3.0 - k - s;
    if (y <= 0.0) break;
    const double term = kBinom6[k] * std::pow(y, 5 - m);
    acc += (k % 2 ? -term : term);
  }
  return (m % 2 ? -acc : acc) * kInvFact[5 - m];
}

}  // namespace

double quintic_bspline(double s, int m) {
  if (m < 0 || m > 4) throw std::invalid_argument("quintic_bspline: derivative order 0..4");
  if (std::abs(s) >= 3.0) return 0.0;
  if (s >= 0.0) return bspline_right(s, m);
  const double v = bspline_right(-s, m);
  return m % 2 ? -v : v;
}

void quintic_prefilter_line(double* c, int n) {
  for (double z : kPoles) {
    const double lambda = (1.0 - z) * (1.0 - 1.0 / z);
    for (int k = 0; k < n; ++k) c[k] *= lambda;
    const double zn = std::pow(z, n);
    // causal init: sum over one period of z^i c[-i]
    double s = 0.0, zi = 1.0;
    for (int i = 0; i < n; ++i) {
      s += zi * c[(n - i) % n];
      zi *= z;
    }
    c[0] = s / (1.0 - zn);
    for (int k = 1; k < n; ++k) c[k] += z * c[k - 1];
    // anticausal init: c-[n-1] = -z/(1-z^n) sum_j z^j c+[(n-1+j) mod n]
    s = 0.0;
    zi = 1.0;
    for (int j = 0; j < n; ++j) {
      s += zi * c[(n - 1 + j) % n];
      zi *= z;
    }
    c[n - 1] = -z * s / (1.0 - zn);
    for (int k = n - 2; k >= 0; --k) c[k] = z * (c[k + 1] - c[k]);
  }
}

PeriodicBoxSpline::PeriodicBoxSpline(std::vector<int> extents, Vec lo, double h,
                                     const std::vector<double>& samples)
    : extents_(std::move(extents)), lo_(std::move(lo)), h_(h), coef_(samples) {
  const int d = dim();
  if (d < 1 || d > kMaxReal || lo_.size() != d) throw std::invalid_argument("PeriodicBoxSpline: bad dimension");
  std::size_t total = 1;
  for (int e : extents_) {
    if (e < 6) throw std::invalid_argument("PeriodicBoxSpline: need >= 6 nodes per axis");
    total *= static_cast<std::size_t>(e);
  }
  if (samples.size() != total) throw std::invalid_argument("PeriodicBoxSpline: sample count mismatch");
  std::vector<double> line;
  for (int a = 0; a < d; ++a) {
    std::size_t inner = 1, outer = 1;
    for (int b = a + 1; b < d; ++b) inner *= extents_[b];
    for (int b = 0; b < a; ++b) outer *= extents_[b];
    const int n = extents_[a];
    line.resize(n);
    for (std::size_t o = 0; o < outer; ++o)
      for (std::size_t i = 0; i < inner; ++i) {
        double* base = coef_.data() + o * n * inner + i;
        for (int k = 0; k < n; ++k) line[k] = base[k * inner];
        quintic_prefilter_line(line.data(), n);
        for (int k = 0; k < n; ++k) base[k * inner] = line[k];
      }
  }
}

ScalarJet PeriodicBoxSpline::evaluate(const Vec& x, int order) const {
  const int d = dim();
  if (order > 4) throw std::invalid_argument("PeriodicBoxSpline: order <= 4");
  const int nm = order + 1;
  // w[a][m][t]: m-th derivative weight of stencil node t along axis a.
  double w[kMaxReal][5][6];
  int idx[kMaxReal][6];
  for (int a = 0; a < d; ++a) {
    const double u = (x(a) - lo_(a)) / h_;
    const double fl = std::floor(u);
    const int base = static_cast<int>(fl);
    const int n = extents_[a];
    double hm = 1.0;
    for (int m = 0; m < nm; ++m) {
      for (int t = 0; t < 6; ++t) w[a][m][t] = quintic_bspline(u - (fl - 2 + t), m) / hm;
      hm *= h_;
    }
    for (int t = 0; t < 6; ++t) idx[a][t] = (((base - 2 + t) % n) + n) % n;
  }
  std::size_t stride[kMaxReal];
  stride[d - 1] = 1;
  for (int a = d - 2; a >= 0; --a) stride[a] = stride[a + 1] * extents_[a + 1];

  // Staged tensor contraction, last axis first. buf holds, for each prefix
  // of stencil indices, the contracted values for every derivative tuple of
  // the already contracted (trailing) axes.
  std::vector<double> cur(1, 0.0), next;
  // gather the 6^d coefficients
  std::size_t count = 1;
  for (int a = 0; a < d; ++a) count *= 6;
  cur.assign(count, 0.0);
  for (std::size_t k = 0; k < count; ++k) {
    std::size_t rem = k, off = 0;
    for (int a = d - 1; a >= 0; --a) {
      off += idx[a][rem % 6] * stride[a];
      rem /= 6;
    }
    cur[k] = coef_[off];
  }
  std::size_t prefix = count, suffix = 1;
  for (int a = d - 1; a >= 0; --a) {
    prefix /= 6;
    next.assign(prefix * nm * suffix, 0.0);
    for (std::size_t p = 0; p < prefix; ++p)
      for (int m = 0; m < nm; ++m)
        for (std::size_t s = 0; s < suffix; ++s) {
          double acc = 0.0;
          for (int t = 0; t < 6; ++t) acc += cur[(p * 6 + t) * suffix + s] * w[a][m][t];
          next[(p * nm + m) * suffix + s] = acc;
        }
    cur.swap(next);
    suffix *= nm;
  }
  // cur is indexed by (m_0, ..., m_{d-1}) in base nm.
  auto at = [&](std::initializer_list<int> axes) {
    int m[kMaxReal] = {0, 0, 0, 0, 0, 0};
    for (int a : axes) ++m[a];
    std::size_t k = 0;
    for (int a = 0; a < d; ++a) k = k * nm + m[a];
    return cur[k];
  };
  ScalarJet s = ScalarJet::zero(d, order);
  s.value = at({});
  if (order >= 1)
    for (int a = 0; a < d; ++a) s.grad(a) = at({a});
  if (order >= 2)
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) s.hess(a, b) = at({a, b});
  if (order >= 3)
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        for (int c = 0; c < d; ++c) s.third[a](b, c) = at({a, b, c});
  if (order >= 4)
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        for (int c = 0; c < d; ++c)
          for (int e = 0; e < d; ++e) s.fourth[a][b](c, e) = at({a, b, c, e});
  return s;
}

}  // namespace trflow
