#pragma once

#include <cmath>

namespace parasdc {

/// Complex scalar stored as an explicit (re, im) pair.
struct Complex {
  double re = 0.0;
  double im = 0.0;

  constexpr Complex() = default;
  constexpr Complex(double real) : re(real) {}  // NOLINT(google-explicit-constructor)
  constexpr Complex(double real, double imag) : re(real), im(imag) {}

  constexpr Complex& operator+=(const Complex& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  constexpr Complex& operator-=(const Complex& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
  constexpr Complex& operator*=(const Complex& o) {
    const double r = re * o.re - im * o.im;
    im = re * o.im + im * o.re;
    re = r;
    return *this;
  }
  Complex& operator/=(const Complex& o);

  friend constexpr bool operator==(const Complex&, const Complex&) = default;
};

constexpr Complex operator+(Complex a, const Complex& b) { return a += b; }
constexpr Complex operator-(Complex a, const Complex& b) { return a -= b; }
constexpr Complex operator*(Complex a, const Complex& b) { return a *= b; }
constexpr Complex operator-(const Complex& a) { return {-a.re, -a.im}; }
constexpr Complex operator*(double s, const Complex& a) { return {s * a.re, s * a.im}; }
constexpr Complex operator*(const Complex& a, double s) { return {s * a.re, s * a.im}; }

constexpr Complex conj(const Complex& a) { return {a.re, -a.im}; }
inline double abs(const Complex& a) { return std::hypot(a.re, a.im); }
constexpr double norm_sq(const Complex& a) { return a.re * a.re + a.im * a.im; }

// Smith's algorithm; avoids overflow in the denominator.
inline Complex& Complex::operator/=(const Complex& o) {
  if (std::abs(o.re) >= std::abs(o.im)) {
    const double r = o.im / o.re;
    const double d = o.re + o.im * r;
    const double nr = (re + im * r) / d;
    im = (im - re * r) / d;
    re = nr;
  } else {
    const double r = o.re / o.im;
    const double d = o.re * r + o.im;
    const double nr = (re * r + im) / d;
    im = (im * r - re) / d;
    re = nr;
  }
  return *this;
}

inline Complex operator/(Complex a, const Complex& b) { return a /= b; }

inline Complex csqrt(const Complex& z) {
  if (z.re == 0.0 && z.im == 0.0) return {};
  const double m = abs(z);
  const double r = std::sqrt(0.5 * (m + std::abs(z.re)));
  if (z.re >= 0.0) return {r, z.im / (2.0 * r)};
  return {std::abs(z.im) / (2.0 * r), std::copysign(r, z.im)};
}

/// Magnitude helpers shared by real and complex templates.
inline double magnitude(double x) { return std::abs(x); }
inline double magnitude(const Complex& z) { return abs(z); }
inline bool is_finite(double x) { return std::isfinite(x); }
inline bool is_finite(const Complex& z) { return std::isfinite(z.re) && std::isfinite(z.im); }

}  // namespace parasdc
