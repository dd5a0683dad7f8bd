#include "parasdc/dense.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace parasdc {

namespace {

void require_finite_entries(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) throw InvalidArgument("matrix entry is not finite");
}
void require_finite_entries(std::span<const Complex> v) {
  for (const Complex& z : v)
    if (!is_finite(z)) throw InvalidArgument("matrix entry is not finite");
}

std::string shape(std::size_t r, std::size_t c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

}  // namespace

template <typename T>
DenseMatrix<T>::DenseMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, T{}) {
  if (rows == 0 || cols == 0) throw DimensionMismatch("empty matrix " + shape(rows, cols));
}

template <typename T>
DenseMatrix<T>::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<T> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (rows == 0 || cols == 0) throw DimensionMismatch("empty matrix " + shape(rows, cols));
  if (data_.size() != rows * cols)
    throw DimensionMismatch("entry count does not match " + shape(rows, cols));
  require_finite_entries(data_);
}

template <typename T>
DenseMatrix<T>::DenseMatrix(std::initializer_list<std::initializer_list<T>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  if (rows_ == 0 || cols_ == 0) throw DimensionMismatch("empty matrix");
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw DimensionMismatch("ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
  require_finite_entries(data_);
}

template <typename T>
DenseMatrix<T> DenseMatrix<T>::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = T{1.0};
  return m;
}

template <typename T>
DenseMatrix<T> DenseMatrix<T>::diagonal(std::span<const T> diag) {
  DenseMatrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  require_finite_entries(m.data_);
  return m;
}

template <typename T>
DenseMatrix<T> DenseMatrix<T>::transpose() const {
  DenseMatrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

template <typename T>
bool DenseMatrix<T>::is_lower_triangular() const {
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = r + 1; c < cols_; ++c)
      if ((*this)(r, c) != T{}) return false;
  return true;
}

template <typename T>
bool DenseMatrix<T>::is_diagonal() const {
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c)
      if (r != c && (*this)(r, c) != T{}) return false;
  return true;
}

template <typename T>
DenseMatrix<T> operator*(const DenseMatrix<T>& a, const DenseMatrix<T>& b) {
  if (a.cols() != b.rows())
    throw DimensionMismatch(shape(a.rows(), a.cols()) + " * " + shape(b.rows(), b.cols()));
  DenseMatrix<T> c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const T aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

template <typename T>
DenseMatrix<T> operator+(const DenseMatrix<T>& a, const DenseMatrix<T>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionMismatch("matrix sum");
  DenseMatrix<T> c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) + b(i, j);
  return c;
}

template <typename T>
DenseMatrix<T> operator-(const DenseMatrix<T>& a, const DenseMatrix<T>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionMismatch("matrix difference");
  DenseMatrix<T> c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) - b(i, j);
  return c;
}

template <typename T>
DenseMatrix<T> operator*(const T& s, const DenseMatrix<T>& a) {
  DenseMatrix<T> c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = s * a(i, j);
  return c;
}

template <typename T>
std::vector<T> matvec(const DenseMatrix<T>& a, std::span<const T> x) {
  if (x.size() != a.cols()) throw DimensionMismatch("matvec");
  std::vector<T> y(a.rows(), T{});
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) y[i] += a(i, j) * x[j];
  return y;
}

ComplexMatrix to_complex(const RealMatrix& a) {
  ComplexMatrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = Complex{a(i, j)};
  return c;
}

template <typename T>
double inf_norm(const DenseMatrix<T>& a) {
  double best = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (const T& v : a.row(i)) s += magnitude(v);
    best = std::max(best, s);
  }
  return best;
}

template <typename T>
double max_abs_entry(const DenseMatrix<T>& a) {
  double best = 0.0;
  for (const T& v : a.data()) best = std::max(best, magnitude(v));
  return best;
}

template <typename T>
LuFactorization<T>::LuFactorization(DenseMatrix<T> a) : lu_(std::move(a)), perm_(lu_.rows()) {
  if (!lu_.square()) throw DimensionMismatch("LU of non-square matrix");
  const std::size_t n = lu_.rows();
  for (std::size_t i = 0; i < n; ++i) perm_[i] = i;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    double best = magnitude(lu_(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      const double m = magnitude(lu_(i, k));
      if (m > best) {
        best = m;
        p = i;
      }
    }
    if (best <= kPivotThreshold)
      throw SingularMatrix("pivot " + std::to_string(best) + " in column " + std::to_string(k));
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(p, j));
      std::swap(perm_[k], perm_[p]);
    }
    const T pivot = lu_(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const T l = lu_(i, k) / pivot;
      lu_(i, k) = l;
      if (l == T{}) continue;
      for (std::size_t j = k + 1; j < n; ++j) lu_(i, j) -= l * lu_(k, j);
    }
  }
}

template <typename T>
std::vector<T> LuFactorization<T>::solve(std::span<const T> b) const {
  const std::size_t n = lu_.rows();
  if (b.size() != n) throw DimensionMismatch("LU solve right-hand side");
  std::vector<T> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[perm_[i]];
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) x[i] -= lu_(i, j) * x[j];
  for (std::size_t ii = n; ii-- > 0;) {
    for (std::size_t j = ii + 1; j < n; ++j) x[ii] -= lu_(ii, j) * x[j];
    x[ii] = x[ii] / lu_(ii, ii);
  }
  return x;
}

template <typename T>
DenseMatrix<T> LuFactorization<T>::inverse() const {
  const std::size_t n = lu_.rows();
  DenseMatrix<T> inv(n, n);
  std::vector<T> e(n);
  for (std::size_t c = 0; c < n; ++c) {
    std::fill(e.begin(), e.end(), T{});
    e[c] = T{1.0};
    const auto col = solve(e);
    for (std::size_t r = 0; r < n; ++r) inv(r, c) = col[r];
  }
  return inv;
}

template <typename T>
std::vector<T> lu_factor_solve(const DenseMatrix<T>& a, std::span<const T> b) {
  if (!a.square()) throw DimensionMismatch("lu_factor_solve needs a square matrix");
  if (b.size() != a.rows()) throw DimensionMismatch("lu_factor_solve right-hand side");
  return LuFactorization<T>(a).solve(b);
}

template <typename T>
DenseMatrix<T> inverse(const DenseMatrix<T>& a) {
  return LuFactorization<T>(a).inverse();
}

DoolittleFactors doolittle_lu(const RealMatrix& a) {
  if (!a.square()) throw DimensionMismatch("doolittle_lu needs a square matrix");
  const std::size_t n = a.rows();
  RealMatrix l = RealMatrix::identity(n);
  RealMatrix u(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = k; j < n; ++j) {
      double s = a(k, j);
      for (std::size_t p = 0; p < k; ++p) s -= l(k, p) * u(p, j);
      u(k, j) = s;
    }
    if (std::abs(u(k, k)) <= kPivotThreshold)
      throw ZeroPivot("leading minor " + std::to_string(k + 1) + " is singular");
    for (std::size_t i = k + 1; i < n; ++i) {
      double s = a(i, k);
      for (std::size_t p = 0; p < k; ++p) s -= l(i, p) * u(p, k);
      l(i, k) = s / u(k, k);
    }
  }
  return {std::move(l), std::move(u)};
}

#define PARASDC_INSTANTIATE(T)                                                         \
  template class DenseMatrix<T>;                                                       \
  template class LuFactorization<T>;                                                   \
  template DenseMatrix<T> operator*(const DenseMatrix<T>&, const DenseMatrix<T>&);     \
  template DenseMatrix<T> operator+(const DenseMatrix<T>&, const DenseMatrix<T>&);     \
  template DenseMatrix<T> operator-(const DenseMatrix<T>&, const DenseMatrix<T>&);     \
  template DenseMatrix<T> operator*(const T&, const DenseMatrix<T>&);                  \
  template std::vector<T> matvec(const DenseMatrix<T>&, std::span<const T>);           \
  template double inf_norm(const DenseMatrix<T>&);                                     \
  template double max_abs_entry(const DenseMatrix<T>&);                                \
  template std::vector<T> lu_factor_solve(const DenseMatrix<T>&, std::span<const T>);  \
  template DenseMatrix<T> inverse(const DenseMatrix<T>&);

PARASDC_INSTANTIATE(double)
PARASDC_INSTANTIATE(Complex)

#undef PARASDC_INSTANTIATE

}  // namespace parasdc
