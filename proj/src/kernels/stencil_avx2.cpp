#include "trflow/kernels/stencil.hpp"

#include <immintrin.h>

// Compiled for the baseline target; only these functions are allowed to
// use AVX2. FMA is deliberately not enabled so results match the scalar
// reference bit for bit.
#define TRFLOW_AVX2 __attribute__((target("avx2")))

namespace trflow::kernels::avx2 {

namespace {

inline std::size_t wrap(std::ptrdiff_t j, std::size_t n) {
  const auto m = static_cast<std::ptrdiff_t>(n);
  return static_cast<std::size_t>(((j % m) + m) % m);
}

TRFLOW_AVX2 inline __m256d d1(__m256d p1, __m256d m1, __m256d p2, __m256d m2,
                              __m256d eight, __m256d scale) {
  const __m256d a = _mm256_mul_pd(_mm256_sub_pd(p1, m1), eight);
  const __m256d b = _mm256_sub_pd(p2, m2);
  return _mm256_mul_pd(_mm256_sub_pd(a, b), scale);
}

TRFLOW_AVX2 inline __m256d d2(__m256d c0, __m256d p1, __m256d m1, __m256d p2,
                              __m256d m2, __m256d sixteen, __m256d thirty,
                              __m256d scale) {
  const __m256d a = _mm256_mul_pd(_mm256_add_pd(p1, m1), sixteen);
  const __m256d b = _mm256_add_pd(p2, m2);
  const __m256d c = _mm256_mul_pd(c0, thirty);
  return _mm256_mul_pd(_mm256_sub_pd(_mm256_sub_pd(a, b), c), scale);
}

inline double d1s(double p1, double m1, double p2, double m2, double scale) {
  const double a = (p1 - m1) * 8.0;
  const double b = p2 - m2;
  return (a - b) * scale;
}

inline double d2s(double c0, double p1, double m1, double p2, double m2,
                  double scale) {
  const double a = (p1 + m1) * 16.0;
  const double b = p2 + m2;
  const double c = c0 * 30.0;
  return ((a - b) - c) * scale;
}

}  // namespace

TRFLOW_AVX2 void diff1(const double* in, double* out, AxisLayout l,
                       double scale) {
  const __m256d eight = _mm256_set1_pd(8.0);
  const __m256d vs = _mm256_set1_pd(scale);
  const std::size_t slab = l.n * l.inner;
  for (std::size_t o = 0; o < l.outer; ++o) {
    const double* src = in + o * slab;
    double* dst = out + o * slab;
    if (l.inner == 1) {
      // Contiguous along the axis: vectorize over j away from the seam.
      std::size_t j = 0;
      for (; j < 2 && j < l.n; ++j) {
        const auto sj = static_cast<std::ptrdiff_t>(j);
        dst[j] = d1s(src[wrap(sj + 1, l.n)], src[wrap(sj - 1, l.n)],
                     src[wrap(sj + 2, l.n)], src[wrap(sj - 2, l.n)], scale);
      }
      for (; j + 4 + 2 <= l.n; j += 4) {
        const __m256d r = d1(_mm256_loadu_pd(src + j + 1), _mm256_loadu_pd(src + j - 1),
                             _mm256_loadu_pd(src + j + 2), _mm256_loadu_pd(src + j - 2),
                             eight, vs);
        _mm256_storeu_pd(dst + j, r);
      }
      for (; j < l.n; ++j) {
        const auto sj = static_cast<std::ptrdiff_t>(j);
        dst[j] = d1s(src[wrap(sj + 1, l.n)], src[wrap(sj - 1, l.n)],
                     src[wrap(sj + 2, l.n)], src[wrap(sj - 2, l.n)], scale);
      }
      continue;
    }
    for (std::size_t j = 0; j < l.n; ++j) {
      const auto sj = static_cast<std::ptrdiff_t>(j);
      const double* p1 = src + wrap(sj + 1, l.n) * l.inner;
      const double* m1 = src + wrap(sj - 1, l.n) * l.inner;
      const double* p2 = src + wrap(sj + 2, l.n) * l.inner;
      const double* m2 = src + wrap(sj - 2, l.n) * l.inner;
      double* d = dst + j * l.inner;
      std::size_t k = 0;
      for (; k + 4 <= l.inner; k += 4) {
        const __m256d r = d1(_mm256_loadu_pd(p1 + k), _mm256_loadu_pd(m1 + k),
                             _mm256_loadu_pd(p2 + k), _mm256_loadu_pd(m2 + k), eight, vs);
        _mm256_storeu_pd(d + k, r);
      }
      for (; k < l.inner; ++k) d[k] = d1s(p1[k], m1[k], p2[k], m2[k], scale);
    }
  }
}

TRFLOW_AVX2 void diff2(const double* in, double* out, AxisLayout l,
                       double scale) {
  const __m256d sixteen = _mm256_set1_pd(16.0);
  const __m256d thirty = _mm256_set1_pd(30.0);
  const __m256d vs = _mm256_set1_pd(scale);
  const std::size_t slab = l.n * l.inner;
  for (std::size_t o = 0; o < l.outer; ++o) {
    const double* src = in + o * slab;
    double* dst = out + o * slab;
    if (l.inner == 1) {
      std::size_t j = 0;
      for (; j < 2 && j < l.n; ++j) {
        const auto sj = static_cast<std::ptrdiff_t>(j);
        dst[j] = d2s(src[j], src[wrap(sj + 1, l.n)], src[wrap(sj - 1, l.n)],
                     src[wrap(sj + 2, l.n)], src[wrap(sj - 2, l.n)], scale);
      }
      for (; j + 4 + 2 <= l.n; j += 4) {
        const __m256d r = d2(_mm256_loadu_pd(src + j), _mm256_loadu_pd(src + j + 1),
                             _mm256_loadu_pd(src + j - 1), _mm256_loadu_pd(src + j + 2),
                             _mm256_loadu_pd(src + j - 2), sixteen, thirty, vs);
        _mm256_storeu_pd(dst + j, r);
      }
      for (; j < l.n; ++j) {
        const auto sj = static_cast<std::ptrdiff_t>(j);
        dst[j] = d2s(src[j], src[wrap(sj + 1, l.n)], src[wrap(sj - 1, l.n)],
                     src[wrap(sj + 2, l.n)], src[wrap(sj - 2, l.n)], scale);
      }
      continue;
    }
    for (std::size_t j = 0; j < l.n; ++j) {
      const auto sj = static_cast<std::ptrdiff_t>(j);
      const double* c0 = src + j * l.inner;
      const double* p1 = src + wrap(sj + 1, l.n) * l.inner;
      const double* m1 = src + wrap(sj - 1, l.n) * l.inner;
      const double* p2 = src + wrap(sj + 2, l.n) * l.inner;
      const double* m2 = src + wrap(sj - 2, l.n) * l.inner;
      double* d = dst + j * l.inner;
      std::size_t k = 0;
      for (; k + 4 <= l.inner; k += 4) {
        const __m256d r = d2(_mm256_loadu_pd(c0 + k), _mm256_loadu_pd(p1 + k),
                             _mm256_loadu_pd(m1 + k), _mm256_loadu_pd(p2 + k),
                             _mm256_loadu_pd(m2 + k), sixteen, thirty, vs);
        _mm256_storeu_pd(d + k, r);
      }
      for (; k < l.inner; ++k) d[k] = d2s(c0[k], p1[k], m1[k], p2[k], m2[k], scale);
    }
  }
}

TRFLOW_AVX2 double sum(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  alignas(32) double lane[4];
  _mm256_store_pd(lane, acc);
  double total = (lane[0] + lane[1]) + (lane[2] + lane[3]);
  for (; i < n; ++i) total += x[i];
  return total;
}

TRFLOW_AVX2 double dot(const double* x, const double* y, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  alignas(32) double lane[4];
  _mm256_store_pd(lane, acc);
  double total = (lane[0] + lane[1]) + (lane[2] + lane[3]);
  for (; i < n; ++i) total += x[i] * y[i];
  return total;
}

}  // namespace trflow::kernels::avx2
