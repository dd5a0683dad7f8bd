#include <algorithm>
#include <cmath>

#include "parasdc/kernels.hpp"

namespace parasdc::kernels {

namespace {

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = y[i] + a * x[i];
}

void subtract_scalar(const double* x, const double* y, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] - y[i];
}

double max_abs_scalar(const double* x, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(x[i]));
  return m;
}

double max_abs_diff_scalar(const double* x, const double* y, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(x[i] - y[i]));
  return m;
}

void laplacian_scalar(const double* u, double left, double right, double scale, double* out,
                      std::size_t n) {
  if (n == 0) return;
  if (n == 1) {
    out[0] = scale * ((left + right) - 2.0 * u[0]);
    return;
  }
  out[0] = scale * ((left + u[1]) - 2.0 * u[0]);
  for (std::size_t i = 1; i + 1 < n; ++i) out[i] = scale * ((u[i - 1] + u[i + 1]) - 2.0 * u[i]);
  out[n - 1] = scale * ((u[n - 2] + right) - 2.0 * u[n - 1]);
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{"scalar", axpy_scalar, subtract_scalar, max_abs_scalar,
                                 max_abs_diff_scalar, laplacian_scalar};
  return table;
}

}  // namespace parasdc::kernels
