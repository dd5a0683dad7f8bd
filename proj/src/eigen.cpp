// Small dense unsymmetric eigensolver: Householder reduction to Hessenberg
// form followed by single-shift complex QR, eigenvectors by inverse iteration.

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "parasdc/dense.hpp"

namespace parasdc {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr std::size_t kMaxDimension = 16;
constexpr std::size_t kInverseIterationCap = 50;
constexpr std::uint64_t kEigenvectorSeed = 0x5DC0FFEEULL;
constexpr int kRefinementSteps = 4;

void reduce_to_hessenberg(ComplexMatrix& h) {
  const std::size_t n = h.rows();
  if (n < 3) return;
  ComplexVector v(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    const std::size_t len = n - k - 1;
    double alpha = 0.0;
    for (std::size_t i = 0; i < len; ++i) alpha = std::hypot(alpha, abs(h(k + 1 + i, k)));
    if (alpha == 0.0) continue;
    const Complex x0 = h(k + 1, k);
    const double x0_abs = abs(x0);
    const Complex phase = x0_abs == 0.0 ? Complex{1.0} : Complex{x0.re / x0_abs, x0.im / x0_abs};
    for (std::size_t i = 0; i < len; ++i) v[i] = h(k + 1 + i, k);
    v[0] += phase * alpha;
    double vnorm2 = 0.0;
    for (std::size_t i = 0; i < len; ++i) vnorm2 += norm_sq(v[i]);
    if (vnorm2 == 0.0) continue;
    const double beta = 2.0 / vnorm2;

    for (std::size_t j = k; j < n; ++j) {
      Complex s;
      for (std::size_t i = 0; i < len; ++i) s += conj(v[i]) * h(k + 1 + i, j);
      s = beta * s;
      for (std::size_t i = 0; i < len; ++i) h(k + 1 + i, j) -= v[i] * s;
    }
    for (std::size_t r = 0; r < n; ++r) {
      Complex s;
      for (std::size_t j = 0; j < len; ++j) s += h(r, k + 1 + j) * v[j];
      s = beta * s;
      for (std::size_t j = 0; j < len; ++j) h(r, k + 1 + j) -= s * conj(v[j]);
    }
    for (std::size_t i = k + 2; i < n; ++i) h(i, k) = Complex{};
  }
}

// Eigenvalue of [[a, b], [c, d]] closest to d.
Complex wilkinson_shift(Complex a, Complex b, Complex c, Complex d) {
  const Complex half_diff = 0.5 * (a - d);
  const Complex disc = csqrt(half_diff * half_diff + b * c);
  const Complex mean = 0.5 * (a + d);
  const Complex l1 = mean + disc;
  const Complex l2 = mean - disc;
  return abs(l1 - d) < abs(l2 - d) ? l1 : l2;
}

ComplexVector hessenberg_qr(ComplexMatrix h) {
  const std::size_t n = h.rows();
  ComplexVector values(n);
  const double scale = std::max(max_abs_entry(h), std::numeric_limits<double>::min());
  const std::size_t cap = 100 * n;
  std::size_t total = 0;
  std::size_t since_deflation = 0;
  std::vector<Complex> cs(n), sn(n);

  std::ptrdiff_t hi = static_cast<std::ptrdiff_t>(n) - 1;
  while (hi >= 0) {
    std::ptrdiff_t l = hi;
    while (l > 0) {
      double ref = abs(h(l - 1, l - 1)) + abs(h(l, l));
      if (ref == 0.0) ref = scale;
      if (abs(h(l, l - 1)) <= kEps * ref) {
        h(l, l - 1) = Complex{};
        break;
      }
      --l;
    }
    if (l == hi) {
      values[hi] = h(hi, hi);
      --hi;
      since_deflation = 0;
      continue;
    }
    if (++total > cap)
      throw ConvergenceFailure("QR iteration exceeded " + std::to_string(cap) + " sweeps");
    ++since_deflation;

    Complex mu;
    if (since_deflation % 10 == 0) {
      mu = h(hi, hi) + Complex{0.75 * abs(h(hi, hi - 1))};
    } else {
      mu = wilkinson_shift(h(hi - 1, hi - 1), h(hi - 1, hi), h(hi, hi - 1), h(hi, hi));
    }

    for (std::ptrdiff_t k = l; k <= hi; ++k) h(k, k) -= mu;
    for (std::ptrdiff_t k = l; k < hi; ++k) {
      const Complex a = h(k, k);
      const Complex b = h(k + 1, k);
      const double r = std::hypot(abs(a), abs(b));
      Complex c{1.0}, s{};
      if (r != 0.0) {
        c = Complex{a.re / r, a.im / r};
        s = Complex{b.re / r, b.im / r};
      }
      cs[k] = c;
      sn[k] = s;
      for (std::ptrdiff_t j = k; j <= hi; ++j) {
        const Complex x = h(k, j);
        const Complex y = h(k + 1, j);
        h(k, j) = conj(c) * x + conj(s) * y;
        h(k + 1, j) = c * y - s * x;
      }
    }
    for (std::ptrdiff_t k = l; k < hi; ++k) {
      const Complex c = cs[k];
      const Complex s = sn[k];
      const std::ptrdiff_t last = std::min(k + 1, hi);
      for (std::ptrdiff_t i = l; i <= last; ++i) {
        const Complex x = h(i, k);
        const Complex y = h(i, k + 1);
        h(i, k) = x * c + y * s;
        h(i, k + 1) = y * conj(c) - x * conj(s);
      }
    }
    for (std::ptrdiff_t k = l; k <= hi; ++k) h(k, k) += mu;
  }
  return values;
}

bool eigen_order(const Complex& a, const Complex& b) {
  if (a.re != b.re) return a.re < b.re;
  return a.im > b.im;
}

// Makes the spectrum of a real matrix exactly closed under conjugation.
void pair_conjugates(ComplexVector& values, double scale) {
  const double tol = 1e-8 * scale;
  std::vector<bool> used(values.size(), false);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (used[i] || values[i].im <= 0.0) continue;
    std::size_t best = values.size();
    double best_dist = tol;
    for (std::size_t j = 0; j < values.size(); ++j) {
      if (j == i || used[j] || values[j].im >= 0.0) continue;
      const double d = abs(values[i] - conj(values[j]));
      if (d <= best_dist) {
        best_dist = d;
        best = j;
      }
    }
    if (best == values.size()) continue;
    const Complex avg = 0.5 * (values[i] + conj(values[best]));
    values[i] = avg;
    values[best] = conj(avg);
    used[i] = used[best] = true;
  }
  for (std::size_t i = 0; i < values.size(); ++i)
    if (!used[i] && std::abs(values[i].im) <= tol) values[i].im = 0.0;
}

ComplexVector complex_spectrum(const ComplexMatrix& a) {
  if (!a.square()) throw DimensionMismatch("eigenvalues of a non-square matrix");
  if (a.rows() > kMaxDimension)
    throw InvalidArgument("eigenvalue solver supports dimension <= 16");
  ComplexMatrix h = a;
  reduce_to_hessenberg(h);
  return hessenberg_qr(std::move(h));
}

// Solves (A - shift I) x = b by LU with partial pivoting; tiny pivots are
// replaced by a floor so the nearly singular systems of inverse iteration work.
ComplexVector shifted_solve_regularized(const ComplexMatrix& a, Complex shift,
                                        const ComplexVector& b, double floor) {
  const std::size_t n = a.rows();
  ComplexMatrix m = a;
  for (std::size_t i = 0; i < n; ++i) m(i, i) -= shift;
  ComplexVector x = b;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (abs(m(i, k)) > abs(m(p, k))) p = i;
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(p, j));
      std::swap(x[k], x[p]);
    }
    if (abs(m(k, k)) < floor) m(k, k) = Complex{floor};
    for (std::size_t i = k + 1; i < n; ++i) {
      const Complex l = m(i, k) / m(k, k);
      if (l == Complex{}) continue;
      for (std::size_t j = k + 1; j < n; ++j) m(i, j) -= l * m(k, j);
      x[i] -= l * x[k];
    }
  }
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t j = i + 1; j < n; ++j) x[i] -= m(i, j) * x[j];
    x[i] = x[i] / m(i, i);
  }
  return x;
}

// Unit 2-norm, first significant component real and positive.
void normalize_eigenvector(ComplexVector& x) {
  double nrm = 0.0;
  for (const Complex& z : x) nrm = std::hypot(nrm, abs(z));
  double biggest = 0.0;
  for (const Complex& z : x) biggest = std::max(biggest, abs(z));
  for (const Complex& z : x) {
    const double m = abs(z);
    if (m > 1e-8 * biggest) {
      const Complex phase{z.re / m, -z.im / m};
      for (Complex& w : x) w = (1.0 / nrm) * (w * phase);
      break;
    }
  }
}

ComplexVector inverse_iteration(const ComplexMatrix& a, Complex lambda, double scale,
                                std::mt19937_64& rng) {
  const std::size_t n = a.rows();
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  ComplexVector x(n);
  for (Complex& z : x) z = Complex{dist(rng), dist(rng)};
  normalize_eigenvector(x);
  const double floor = kEps * scale;
  const Complex shift = lambda + Complex{scale * 1e-13, scale * 1e-13};
  for (std::size_t it = 0; it < kInverseIterationCap; ++it) {
    ComplexVector y = shifted_solve_regularized(a, shift, x, floor);
    normalize_eigenvector(y);
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) change = std::max(change, abs(y[i] - x[i]));
    x = std::move(y);
    if (change <= 1e-15 && it >= 1) break;
  }
  return x;
}

// Newton on (A x - lambda x, c^H x - 1) = 0 with c the starting vector.
// Polishes eigenpairs whose QR eigenvalue carries the conditioning error.
void refine_eigenpair(const ComplexMatrix& a, Complex& lambda, ComplexVector& x) {
  const std::size_t n = a.rows();
  const ComplexVector c = x;
  double prev = std::numeric_limits<double>::infinity();
  for (int it = 0; it < kRefinementSteps; ++it) {
    ComplexVector r(n + 1);
    for (std::size_t i = 0; i < n; ++i) {
      Complex s;
      for (std::size_t j = 0; j < n; ++j) s += a(i, j) * x[j];
      r[i] = s - lambda * x[i];
    }
    Complex cx;
    for (std::size_t i = 0; i < n; ++i) cx += conj(c[i]) * x[i];
    r[n] = cx - Complex{1.0};
    double res = 0.0;
    for (const Complex& z : r) res = std::max(res, abs(z));
    if (!(res < prev)) break;
    prev = res;
    ComplexMatrix j(n + 1, n + 1);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < n; ++k) j(i, k) = a(i, k);
      j(i, i) -= lambda;
      j(i, n) = Complex{} - x[i];
      j(n, i) = conj(c[i]);
    }
    ComplexVector d;
    try {
      d = lu_factor_solve(j, std::span<const Complex>(r));
    } catch (const SingularMatrix&) {
      break;
    }
    for (std::size_t i = 0; i < n; ++i) x[i] -= d[i];
    lambda -= d[n];
  }
  normalize_eigenvector(x);
}

}  // namespace

ComplexVector eigenvalues(const RealMatrix& a) {
  if (!a.square()) throw DimensionMismatch("eigenvalues of a non-square matrix");
  ComplexVector values = complex_spectrum(to_complex(a));
  pair_conjugates(values, std::max(inf_norm(a), std::numeric_limits<double>::min()));
  std::sort(values.begin(), values.end(), eigen_order);
  return values;
}

EigenDecomposition eigendecompose(const RealMatrix& a) {
  if (!a.square()) throw DimensionMismatch("eigendecompose of a non-square matrix");
  if (a.rows() > 9) throw InvalidArgument("eigendecompose supports dimension <= 9");
  const std::size_t n = a.rows();
  ComplexVector values = eigenvalues(a);
  const double scale = std::max(inf_norm(a), std::numeric_limits<double>::min());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (abs(values[i] - values[j]) <= 1e-10 * scale)
        throw DefectiveMatrix("eigenvalues " + std::to_string(i) + " and " + std::to_string(j) +
                              " coincide");

  const ComplexMatrix ac = to_complex(a);
  ComplexMatrix v(n, n);
  std::mt19937_64 rng(kEigenvectorSeed);
  const ComplexVector qr_values = values;
  std::vector<ComplexVector> vecs(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (values[k].im < 0.0) continue;  // filled from the conjugate partner below
    vecs[k] = inverse_iteration(ac, values[k], scale, rng);
    const bool real = values[k].im == 0.0;
    refine_eigenpair(ac, values[k], vecs[k]);
    if (real) values[k].im = 0.0;
  }
  // The spectrum was paired exactly; keep pairs exact after refinement.
  for (std::size_t k = 0; k < n; ++k) {
    if (values[k].im >= 0.0) continue;
    std::size_t partner = n;
    for (std::size_t j = 0; j < n; ++j)
      if (qr_values[j].im > 0.0 && qr_values[j] == conj(qr_values[k])) partner = j;
    if (partner == n) {
      vecs[k] = inverse_iteration(ac, values[k], scale, rng);
      refine_eigenpair(ac, values[k], vecs[k]);
      continue;
    }
    values[k] = conj(values[partner]);
    vecs[k] = vecs[partner];
    for (Complex& z : vecs[k]) z = conj(z);
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i) v(i, k) = vecs[k][i];
  ComplexMatrix vinv = inverse(v);
  return {std::move(values), std::move(v), std::move(vinv)};
}

double spectral_radius(const RealMatrix& a) {
  double rho = 0.0;
  for (const Complex& z : eigenvalues(a)) rho = std::max(rho, abs(z));
  return rho;
}

double spectral_radius(const ComplexMatrix& a) {
  double rho = 0.0;
  for (const Complex& z : complex_spectrum(a)) rho = std::max(rho, abs(z));
  return rho;
}

}  // namespace parasdc
