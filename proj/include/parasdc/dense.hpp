#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "parasdc/complex.hpp"
#include "parasdc/errors.hpp"

namespace parasdc {

using Vector = std::vector<double>;
using ComplexVector = std::vector<Complex>;

/// Row-major dense matrix over double or Complex.
template <typename T>
class DenseMatrix {
 public:
  using value_type = T;

  DenseMatrix(std::size_t rows, std::size_t cols);
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<T> entries);
  DenseMatrix(std::initializer_list<std::initializer_list<T>> rows);

  static DenseMatrix identity(std::size_t n);
  static DenseMatrix diagonal(std::span<const T> diag);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<T> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const T> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  const std::vector<T>& data() const { return data_; }

  DenseMatrix transpose() const;
  bool is_lower_triangular() const;
  bool is_diagonal() const;

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<T> data_;
};

using RealMatrix = DenseMatrix<double>;
using ComplexMatrix = DenseMatrix<Complex>;

template <typename T>
DenseMatrix<T> operator*(const DenseMatrix<T>& a, const DenseMatrix<T>& b);
template <typename T>
DenseMatrix<T> operator+(const DenseMatrix<T>& a, const DenseMatrix<T>& b);
template <typename T>
DenseMatrix<T> operator-(const DenseMatrix<T>& a, const DenseMatrix<T>& b);
template <typename T>
DenseMatrix<T> operator*(const T& s, const DenseMatrix<T>& a);

template <typename T>
std::vector<T> matvec(const DenseMatrix<T>& a, std::span<const T> x);

ComplexMatrix to_complex(const RealMatrix& a);

/// Maximum absolute row sum.
template <typename T>
double inf_norm(const DenseMatrix<T>& a);

/// Largest absolute entry.
template <typename T>
double max_abs_entry(const DenseMatrix<T>& a);

/// Pivots at or below this magnitude are treated as singular.
inline constexpr double kPivotThreshold = 1e-14;

/// LU factorization with partial pivoting, reusable across right-hand sides.
template <typename T>
class LuFactorization {
 public:
  explicit LuFactorization(DenseMatrix<T> a);

  std::vector<T> solve(std::span<const T> b) const;
  DenseMatrix<T> inverse() const;
  std::size_t size() const { return lu_.rows(); }

 private:
  DenseMatrix<T> lu_;
  std::vector<std::size_t> perm_;
};

/// Solves A x = b with partial pivoting.
template <typename T>
std::vector<T> lu_factor_solve(const DenseMatrix<T>& a, std::span<const T> b);

template <typename T>
DenseMatrix<T> inverse(const DenseMatrix<T>& a);

struct DoolittleFactors {
  RealMatrix lower;  // unit diagonal
  RealMatrix upper;
};

/// Unpivoted Doolittle factorization A = L U.
DoolittleFactors doolittle_lu(const RealMatrix& a);

struct EigenDecomposition {
  ComplexVector eigenvalues;
  ComplexMatrix eigenvectors;          // columns, unit 2-norm
  ComplexMatrix inverse_eigenvectors;
};

/// All eigenvalues of a real square matrix (dimension <= 16), sorted by
/// ascending real part, then descending imaginary part. Conjugate pairs are
/// returned exactly conjugate.
ComplexVector eigenvalues(const RealMatrix& a);

/// Diagonalization A = V diag(lambda) V^-1 for matrices with distinct eigenvalues.
EigenDecomposition eigendecompose(const RealMatrix& a);

double spectral_radius(const RealMatrix& a);

/// Spectral radius of a complex matrix; used for iteration-matrix analysis.
double spectral_radius(const ComplexMatrix& a);

}  // namespace parasdc
