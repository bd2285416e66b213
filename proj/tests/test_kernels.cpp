#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "trflow/kernels/stencil.hpp"

using namespace trflow::kernels;

namespace {

std::vector<double> random_field(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

bool bit_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("axis layout splits extents around the axis") {
  const int ext[4] = {3, 5, 7, 11};
  const AxisLayout l = axis_layout(ext, 2);
  CHECK(l.outer == 15);
  CHECK(l.n == 7);
  CHECK(l.inner == 11);
}

TEST_CASE("stencils are 4th order on a periodic sine") {
  for (int axis = 0; axis < 2; ++axis) {
    double err_prev1 = 0, err_prev2 = 0;
    for (int n : {16, 32}) {
      const int ext[2] = {n, n};
      std::vector<double> f(n * n), d1(n * n), d2(n * n);
      const double h = 2 * M_PI / n;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) f[i * n + j] = std::sin(axis == 0 ? i * h : j * h);
      const AxisLayout l = axis_layout(ext, axis);
      diff1(f.data(), d1.data(), l, 1.0 / (12 * h));
      diff2(f.data(), d2.data(), l, 1.0 / (12 * h * h));
      double e1 = 0, e2 = 0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const double t = axis == 0 ? i * h : j * h;
          e1 = std::max(e1, std::abs(d1[i * n + j] - std::cos(t)));
          e2 = std::max(e2, std::abs(d2[i * n + j] + std::sin(t)));
        }
      if (err_prev1 > 0) {
        CHECK(std::log2(err_prev1 / e1) > 3.8);
        CHECK(std::log2(err_prev2 / e2) > 3.8);
      }
      err_prev1 = e1;
      err_prev2 = e2;
    }
  }
}

TEST_CASE("scalar and AVX2 kernels agree bit for bit") {
  if (detected_isa() != Isa::avx2) {
    MESSAGE("AVX2 not available; equivalence test skipped");
    return;
  }
  const std::vector<std::vector<int>> shapes = {{17}, {6, 23}, {9, 4, 13}, {5, 6, 7, 8}, {16, 16}};
  for (const auto& ext : shapes) {
    std::size_t total = 1;
    for (int e : ext) total *= e;
    const auto f = random_field(total, 42 + total);
    for (int axis = 0; axis < static_cast<int>(ext.size()); ++axis) {
      const AxisLayout l = axis_layout(ext, axis);
      std::vector<double> s1(total), v1(total), s2(total), v2(total);
      scalar::diff1(f.data(), s1.data(), l, 0.37);
      avx2::diff1(f.data(), v1.data(), l, 0.37);
      scalar::diff2(f.data(), s2.data(), l, 1.91);
      avx2::diff2(f.data(), v2.data(), l, 1.91);
      CHECK(bit_equal(s1, v1));
      CHECK(bit_equal(s2, v2));
    }
  }
  for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 64u, 1001u}) {
    const auto x = random_field(n, 7 + n), y = random_field(n, 9 + n);
    CHECK(scalar::sum(x.data(), n) == avx2::sum(x.data(), n));
    CHECK(scalar::dot(x.data(), y.data(), n) == avx2::dot(x.data(), y.data(), n));
  }
}

TEST_CASE("runtime selection can be forced and restored") {
  const Isa best = detected_isa();
  set_isa(Isa::scalar);
  CHECK(active_isa() == Isa::scalar);
  set_isa(best);
  CHECK(active_isa() == best);
  CHECK(std::string(isa_name(Isa::avx2)) == "avx2");
}
