#include "trflow/kernels/stencil.hpp"

namespace trflow::kernels::scalar {

namespace {

inline std::size_t wrap(std::ptrdiff_t j, std::size_t n) {
  const auto m = static_cast<std::ptrdiff_t>(n);
  return static_cast<std::size_t>(((j % m) + m) % m);
}

}  // namespace

void diff1(const double* in, double* out, AxisLayout l, double scale) {
  const std::size_t slab = l.n * l.inner;
  for (std::size_t o = 0; o < l.outer; ++o) {
    const double* src = in + o * slab;
    double* dst = out + o * slab;
    for (std::size_t j = 0; j < l.n; ++j) {
      const auto sj = static_cast<std::ptrdiff_t>(j);
      const double* p1 = src + wrap(sj + 1, l.n) * l.inner;
      const double* m1 = src + wrap(sj - 1, l.n) * l.inner;
      const double* p2 = src + wrap(sj + 2, l.n) * l.inner;
      const double* m2 = src + wrap(sj - 2, l.n) * l.inner;
      double* d = dst + j * l.inner;
      for (std::size_t k = 0; k < l.inner; ++k) {
        const double a = (p1[k] - m1[k]) * 8.0;
        const double b = p2[k] - m2[k];
        d[k] = (a - b) * scale;
      }
    }
  }
}

void diff2(const double* in, double* out, AxisLayout l, double scale) {
  const std::size_t slab = l.n * l.inner;
  for (std::size_t o = 0; o < l.outer; ++o) {
    const double* src = in + o * slab;
    double* dst = out + o * slab;
    for (std::size_t j = 0; j < l.n; ++j) {
      const auto sj = static_cast<std::ptrdiff_t>(j);
      const double* c0 = src + j * l.inner;
      const double* p1 = src + wrap(sj + 1, l.n) * l.inner;
      const double* m1 = src + wrap(sj - 1, l.n) * l.inner;
      const double* p2 = src + wrap(sj + 2, l.n) * l.inner;
      const double* m2 = src + wrap(sj - 2, l.n) * l.inner;
      double* d = dst + j * l.inner;
      for (std::size_t k = 0; k < l.inner; ++k) {
        const double a = (p1[k] + m1[k]) * 16.0;
        const double b = p2[k] + m2[k];
        const double c = c0[k] * 30.0;
        d[k] = ((a - b) - c) * scale;
      }
    }
  }
}

double sum(const double* x, std::size_t n) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    for (int k = 0; k < 4; ++k) acc[k] += x[i + k];
  double total = (acc[0] + acc[1]) + (acc[2] + acc[3]);
  for (; i < n; ++i) total += x[i];
  return total;
}

double dot(const double* x, const double* y, std::size_t n) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    for (int k = 0; k < 4; ++k) acc[k] += x[i + k] * y[i + k];
  double total = (acc[0] + acc[1]) + (acc[2] + acc[3]);
  for (; i < n; ++i) total += x[i] * y[i];
  return total;
}

}  // namespace trflow::kernels::scalar
