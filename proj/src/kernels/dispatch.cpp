#include <atomic>
#include <stdexcept>

#include "trflow/kernels/stencil.hpp"

namespace trflow::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{detected_isa()};
  return isa;
}

}  // namespace

Isa detected_isa() {
  static const Isa best = cpu_has_avx2() ? Isa::avx2 : Isa::scalar;
  return best;
}

Isa active_isa() { return current().load(std::memory_order_relaxed); }

void set_isa(Isa isa) {
  if (isa == Isa::avx2 && !cpu_has_avx2())
    throw std::invalid_argument("AVX2 kernels requested but the CPU lacks AVX2");
  current().store(isa, std::memory_order_relaxed);
}

const char* isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

AxisLayout axis_layout(std::span<const int> extents, int axis) {
  if (axis < 0 || static_cast<std::size_t>(axis) >= extents.size())
    throw std::out_of_range("axis_layout: axis out of range");
  AxisLayout l;
  for (int a = 0; a < axis; ++a) l.outer *= static_cast<std::size_t>(extents[a]);
  l.n = static_cast<std::size_t>(extents[axis]);
  for (std::size_t a = axis + 1; a < extents.size(); ++a)
    l.inner *= static_cast<std::size_t>(extents[a]);
  return l;
}

void diff1(const double* in, double* out, AxisLayout l, double scale) {
  if (active_isa() == Isa::avx2) return avx2::diff1(in, out, l, scale);
  scalar::diff1(in, out, l, scale);
}

void diff2(const double* in, double* out, AxisLayout l, double scale) {
  if (active_isa() == Isa::avx2) return avx2::diff2(in, out, l, scale);
  scalar::diff2(in, out, l, scale);
}

double sum(const double* x, std::size_t n) {
  return active_isa() == Isa::avx2 ? avx2::sum(x, n) : scalar::sum(x, n);
}

double dot(const double* x, const double* y, std::size_t n) {
  return active_isa() == Isa::avx2 ? avx2::dot(x, y, n) : scalar::dot(x, y, n);
}

}  // namespace trflow::kernels
