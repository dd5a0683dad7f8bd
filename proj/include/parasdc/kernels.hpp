#pragma once

#include <cstddef>
#include <span>
#include <string_view>

namespace parasdc::kernels {

/// Element-wise inner loops over the spatial dimension. Every ISA variant
/// performs the same operations in the same order without fused multiply-add,
/// so results are bitwise identical across variants.
struct KernelTable {
  std::string_view isa;
  // y[i] += a * x[i]
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // out[i] = x[i] - y[i]
  void (*subtract)(const double* x, const double* y, double* out, std::size_t n);
  // max_i |x[i]|
  double (*max_abs)(const double* x, std::size_t n);
  // max_i |x[i] - y[i]|
  double (*max_abs_diff)(const double* x, const double* y, std::size_t n);
  // out[i] = scale * ((u[i-1] + u[i+1]) - 2 u[i]) with u[-1] = left, u[n] = right
  void (*laplacian)(const double* u, double left, double right, double scale, double* out,
                    std::size_t n);
};

const KernelTable& scalar_table();

/// AVX2 (x86-64) or NEON (aarch64) table; nullptr when the CPU or build lacks it.
const KernelTable* simd_table();

/// Selected once: the SIMD table when available unless PARASDC_SIMD=scalar.
const KernelTable& active();

inline void axpy(double a, std::span<const double> x, std::span<double> y) {
  active().axpy(a, x.data(), y.data(), y.size());
}
inline void subtract(std::span<const double> x, std::span<const double> y, std::span<double> out) {
  active().subtract(x.data(), y.data(), out.data(), out.size());
}
inline double max_abs(std::span<const double> x) { return active().max_abs(x.data(), x.size()); }
inline double max_abs_diff(std::span<const double> x, std::span<const double> y) {
  return active().max_abs_diff(x.data(), y.data(), x.size());
}
inline void laplacian(std::span<const double> u, double left, double right, double scale,
                      std::span<double> out) {
  active().laplacian(u.data(), left, right, scale, out.data(), u.size());
}

}  // namespace parasdc::kernels
