#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "parasdc/complex.hpp"
#include "parasdc/dense.hpp"
#include "parasdc/errors.hpp"

namespace parasdc {

/// Square matrix with kl sub- and ku super-diagonals. Row i stores columns
/// [i - kl, i + ku]; entries outside the band are zero.
template <typename T>
class BandMatrix {
 public:
  BandMatrix(std::size_t n, std::size_t kl, std::size_t ku)
      : n_(n), kl_(std::min(kl, n ? n - 1 : 0)), ku_(std::min(ku, n ? n - 1 : 0)),
        width_(kl_ + ku_ + 1), data_(n * width_, T{}) {
    if (n == 0) throw DimensionMismatch("empty band matrix");
  }

  static BandMatrix identity(std::size_t n) {
    BandMatrix m(n, 0, 0);
    for (std::size_t i = 0; i < n; ++i) m.set(i, i, T{1.0});
    return m;
  }

  std::size_t size() const { return n_; }
  std::size_t lower() const { return kl_; }
  std::size_t upper() const { return ku_; }

  bool in_band(std::size_t i, std::size_t j) const {
    return j + kl_ >= i && j <= i + ku_;
  }
  T get(std::size_t i, std::size_t j) const {
    return in_band(i, j) ? data_[i * width_ + (j + kl_ - i)] : T{};
  }
  void set(std::size_t i, std::size_t j, T value) {
    if (!in_band(i, j))
      throw DimensionMismatch("entry (" + std::to_string(i) + "," + std::to_string(j) +
                              ") outside band");
    data_[i * width_ + (j + kl_ - i)] = value;
  }
  void add(std::size_t i, std::size_t j, T value) { set(i, j, get(i, j) + value); }

  std::size_t first_col(std::size_t i) const { return i > kl_ ? i - kl_ : 0; }
  std::size_t last_col(std::size_t i) const { return std::min(n_ - 1, i + ku_); }

  template <typename V>
  void multiply(std::span<const V> x, std::span<V> y) const {
    if (x.size() != n_ || y.size() != n_) throw DimensionMismatch("band matvec");
    for (std::size_t i = 0; i < n_; ++i) {
      V s{};
      for (std::size_t j = first_col(i); j <= last_col(i); ++j) s += get(i, j) * x[j];
      y[i] = s;
    }
  }

  /// I - alpha * A, with the element type of alpha.
  template <typename S>
  BandMatrix<S> shifted_identity(S alpha) const {
    BandMatrix<S> m(n_, kl_, ku_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = first_col(i); j <= last_col(i); ++j) {
        S v = -(alpha * S{get(i, j)});
        if (i == j) v += S{1.0};
        m.set(i, j, v);
      }
    return m;
  }

  DenseMatrix<T> to_dense() const {
    DenseMatrix<T> d(n_, n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = first_col(i); j <= last_col(i); ++j) d(i, j) = get(i, j);
    return d;
  }

  friend bool operator==(const BandMatrix&, const BandMatrix&) = default;

 private:
  std::size_t n_;
  std::size_t kl_;
  std::size_t ku_;
  std::size_t width_;
  std::vector<T> data_;
};

/// Banded LU with partial pivoting (fill widens the upper band to kl + ku).
template <typename T>
class BandLU {
 public:
  explicit BandLU(const BandMatrix<T>& a)
      : n_(a.size()), kl_(a.lower()), ku_(a.upper()), ld_(2 * kl_ + ku_ + 1),
        ab_(n_ * ld_, T{}), piv_(n_) {
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = a.first_col(i); j <= a.last_col(i); ++j) at(i, j) = a.get(i, j);
    factor();
  }

  std::size_t size() const { return n_; }

  template <typename V>
  void solve_in_place(std::span<V> b) const {
    if (b.size() != n_) throw DimensionMismatch("band solve right-hand side");
    for (std::size_t j = 0; j < n_; ++j) {
      if (piv_[j] != j) std::swap(b[j], b[piv_[j]]);
      const std::size_t last = std::min(n_ - 1, j + kl_);
      for (std::size_t i = j + 1; i <= last; ++i) b[i] -= at(i, j) * b[j];
    }
    const std::size_t bw = kl_ + ku_;
    for (std::size_t i = n_; i-- > 0;) {
      const std::size_t last = std::min(n_ - 1, i + bw);
      V s = b[i];
      for (std::size_t c = i + 1; c <= last; ++c) s -= at(i, c) * b[c];
      b[i] = s / at(i, i);
    }
  }

  template <typename V>
  std::vector<V> solve(std::span<const V> b) const {
    std::vector<V> x(b.begin(), b.end());
    solve_in_place(std::span<V>(x));
    return x;
  }

 private:
  // Column-major band storage: entry (i, j) lives at ab_[(kl+ku+i-j) + j*ld].
  T& at(std::size_t i, std::size_t j) { return ab_[(kl_ + ku_ + i - j) + j * ld_]; }
  const T& at(std::size_t i, std::size_t j) const { return ab_[(kl_ + ku_ + i - j) + j * ld_]; }

  void factor() {
    const std::size_t bw = kl_ + ku_;
    for (std::size_t j = 0; j < n_; ++j) {
      const std::size_t last_row = std::min(n_ - 1, j + kl_);
      std::size_t p = j;
      double best = magnitude(at(j, j));
      for (std::size_t i = j + 1; i <= last_row; ++i) {
        const double m = magnitude(at(i, j));
        if (m > best) {
          best = m;
          p = i;
        }
      }
      if (best <= kPivotThreshold)
        throw SingularMatrix("band pivot " + std::to_string(best) + " in column " +
                             std::to_string(j));
      piv_[j] = p;
      const std::size_t last_col = std::min(n_ - 1, j + bw);
      if (p != j)
        for (std::size_t c = j; c <= last_col; ++c) std::swap(at(j, c), at(p, c));
      const T pivot = at(j, j);
      for (std::size_t i = j + 1; i <= last_row; ++i) {
        const T l = at(i, j) / pivot;
        at(i, j) = l;
        if (l == T{}) continue;
        for (std::size_t c = j + 1; c <= last_col; ++c) at(i, c) -= l * at(j, c);
      }
    }
  }

  std::size_t n_;
  std::size_t kl_;
  std::size_t ku_;
  std::size_t ld_;
  std::vector<T> ab_;
  std::vector<std::size_t> piv_;
};

}  // namespace parasdc
