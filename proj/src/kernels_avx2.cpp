// Compiled with -mavx2 only (no -mfma): multiply and add stay separate
// roundings, matching the scalar table bit for bit.

#include <immintrin.h>

#include <algorithm>
#include <cmath>

#include "parasdc/kernels.hpp"

namespace parasdc::kernels {

namespace {

inline __m256d abs_pd(__m256d v) {
  return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v);
}

inline double hmax(__m256d v) {
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, v);
  return std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d prod = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), prod));
  }
  for (; i < n; ++i) y[i] = y[i] + a * x[i];
}

void subtract_avx2(const double* x, const double* y, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i, _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) out[i] = x[i] - y[i];
}

double max_abs_avx2(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_max_pd(acc, abs_pd(_mm256_loadu_pd(x + i)));
  double m = hmax(acc);
  for (; i < n; ++i) m = std::max(m, std::abs(x[i]));
  return m;
}

double max_abs_diff_avx2(const double* x, const double* y, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
    acc = _mm256_max_pd(acc, abs_pd(d));
  }
  double m = hmax(acc);
  for (; i < n; ++i) m = std::max(m, std::abs(x[i] - y[i]));
  return m;
}

void laplacian_avx2(const double* u, double left, double right, double scale, double* out,
                    std::size_t n) {
  if (n < 6) {
    scalar_table().laplacian(u, left, right, scale, out, n);
    return;
  }
  out[0] = scale * ((left + u[1]) - 2.0 * u[0]);
  const __m256d vs = _mm256_set1_pd(scale);
  const __m256d two = _mm256_set1_pd(2.0);
  std::size_t i = 1;
  for (; i + 4 <= n - 1; i += 4) {
    const __m256d lo = _mm256_loadu_pd(u + i - 1);
    const __m256d hi = _mm256_loadu_pd(u + i + 1);
    const __m256d mid = _mm256_loadu_pd(u + i);
    const __m256d t = _mm256_sub_pd(_mm256_add_pd(lo, hi), _mm256_mul_pd(two, mid));
    _mm256_storeu_pd(out + i, _mm256_mul_pd(vs, t));
  }
  for (; i + 1 < n; ++i) out[i] = scale * ((u[i - 1] + u[i + 1]) - 2.0 * u[i]);
  out[n - 1] = scale * ((u[n - 2] + right) - 2.0 * u[n - 1]);
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable table{"avx2", axpy_avx2, subtract_avx2, max_abs_avx2,
                                 max_abs_diff_avx2, laplacian_avx2};
  return table;
}

}  // namespace parasdc::kernels
