#include <arm_neon.h>

#include <algorithm>
#include <cmath>

#include "parasdc/kernels.hpp"

namespace parasdc::kernels {

namespace {

void axpy_neon(double a, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t prod = vmulq_f64(va, vld1q_f64(x + i));
    vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), prod));
  }
  for (; i < n; ++i) y[i] = y[i] + a * x[i];
}

void subtract_neon(const double* x, const double* y, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(out + i, vsubq_f64(vld1q_f64(x + i), vld1q_f64(y + i)));
  for (; i < n; ++i) out[i] = x[i] - y[i];
}

double max_abs_neon(const double* x, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vmaxq_f64(acc, vabsq_f64(vld1q_f64(x + i)));
  double m = vmaxvq_f64(acc);
  for (; i < n; ++i) m = std::max(m, std::abs(x[i]));
  return m;
}

double max_abs_diff_neon(const double* x, const double* y, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    acc = vmaxq_f64(acc, vabsq_f64(vsubq_f64(vld1q_f64(x + i), vld1q_f64(y + i))));
  double m = vmaxvq_f64(acc);
  for (; i < n; ++i) m = std::max(m, std::abs(x[i] - y[i]));
  return m;
}

void laplacian_neon(const double* u, double left, double right, double scale, double* out,
                    std::size_t n) {
  if (n < 4) {
    scalar_table().laplacian(u, left, right, scale, out, n);
    return;
  }
  out[0] = scale * ((left + u[1]) - 2.0 * u[0]);
  const float64x2_t vs = vdupq_n_f64(scale);
  const float64x2_t two = vdupq_n_f64(2.0);
  std::size_t i = 1;
  for (; i + 2 <= n - 1; i += 2) {
    const float64x2_t t = vsubq_f64(vaddq_f64(vld1q_f64(u + i - 1), vld1q_f64(u + i + 1)),
                                    vmulq_f64(two, vld1q_f64(u + i)));
    vst1q_f64(out + i, vmulq_f64(vs, t));
  }
  for (; i + 1 < n; ++i) out[i] = scale * ((u[i - 1] + u[i + 1]) - 2.0 * u[i]);
  out[n - 1] = scale * ((u[n - 2] + right) - 2.0 * u[n - 1]);
}

}  // namespace

const KernelTable& neon_table() {
  static const KernelTable table{"neon", axpy_neon, subtract_neon, max_abs_neon,
                                 max_abs_diff_neon, laplacian_neon};
  return table;
}

}  // namespace parasdc::kernels
