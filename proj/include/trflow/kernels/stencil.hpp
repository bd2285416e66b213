#pragma once
// Periodic finite-difference stencils and reductions over flat row-major
// arrays. Each operation has a scalar reference and an AVX2 variant; the
// active variant is picked once at startup from the CPU feature flags and
// can be overridden (tests force each one in turn).
//
// Both variants perform the same floating-point operations in the same
// order, so their outputs are bit-identical.

#include <cstddef>
#include <span>

namespace trflow::kernels {

enum class Isa { scalar, avx2 };

Isa detected_isa();
Isa active_isa();
// Throws std::invalid_argument if the CPU cannot run `isa`.
void set_isa(Isa isa);
const char* isa_name(Isa isa);

// A row-major array viewed along one axis: `outer` blocks, each holding
// `n` slices of `inner` contiguous values.
struct AxisLayout {
  std::size_t outer = 1;
  std::size_t n = 1;
  std::size_t inner = 1;
};
AxisLayout axis_layout(std::span<const int> extents, int axis);

// out = (8(f[j+1]-f[j-1]) - (f[j+2]-f[j-2])) * scale, indices wrapped.
// With scale = 1/(12h) this is the 4th-order first derivative.
void diff1(const double* in, double* out, AxisLayout l, double scale);
// out = (16(f[j+1]+f[j-1]) - (f[j+2]+f[j-2]) - 30 f[j]) * scale.
// With scale = 1/(12h^2) this is the 4th-order second derivative.
void diff2(const double* in, double* out, AxisLayout l, double scale);

double sum(const double* x, std::size_t n);
double dot(const double* x, const double* y, std::size_t n);

namespace scalar {
void diff1(const double* in, double* out, AxisLayout l, double scale);
void diff2(const double* in, double* out, AxisLayout l, double scale);
double sum(const double* x, std::size_t n);
double dot(const double* x, const double* y, std::size_t n);
}  // namespace scalar

namespace avx2 {
void diff1(const double* in, double* out, AxisLayout l, double scale);
void diff2(const double* in, double* out, AxisLayout l, double scale);
double sum(const double* x, std::size_t n);
double dot(const double* x, const double* y, std::size_t n);
}  // namespace avx2

}  // namespace trflow::kernels
