#pragma once

#include <algorithm>
#include <cmath>
#include <complex>

namespace amspec {

template <class T>
struct Vector2 {
  T x{};
  T y{};
};

/// 2x2 matrix [[a, b], [c, d]].
template <class T>
struct Matrix2 {
  T a{1}, b{0}, c{0}, d{1};

  static Matrix2 identity() { return {T(1), T(0), T(0), T(1)}; }
  static Matrix2 diag(T p, T q) { return {p, T(0), T(0), q}; }

  T det() const { return a * d - b * c; }
  T trace() const { return a + d; }

  /// Inverse via the adjugate; callers check det away from 0.
  Matrix2 inverse() const {
    const T k = T(1) / det();
    return {d * k, -b * k, -c * k, a * k};
  }

  friend Matrix2 operator*(const Matrix2& x, const Matrix2& y) {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
  }
  friend Vector2<T> operator*(const Matrix2& m, const Vector2<T>& v) {
    return {m.a * v.x + m.b * v.y, m.c * v.x + m.d * v.y};
  }
  friend Matrix2 operator-(const Matrix2& x, const Matrix2& y) {
    return {x.a - y.a, x.b - y.b, x.c - y.c, x.d - y.d};
  }
  friend Matrix2 operator+(const Matrix2& x, const Matrix2& y) {
    return {x.a + y.a, x.b + y.b, x.c + y.c, x.d + y.d};
  }
  Matrix2& operator*=(T s) {
    a *= s;
    b *= s;
    c *= s;
    d *= s;
    return *this;
  }
};

using Mat2 = Matrix2<double>;
using CMat2 = Matrix2<std::complex<double>>;
using Vec2 = Vector2<double>;

/// Largest entry magnitude.
template <class T>
double max_abs(const Matrix2<T>& m) {
  return std::max({std::abs(m.a), std::abs(m.b), std::abs(m.c), std::abs(m.d)});
}

/// Operator 2-norm (largest singular value).
template <class T>
double op_norm(const Matrix2<T>& m) {
  const double fro2 = std::norm(std::complex<double>(m.a)) + std::norm(std::complex<double>(m.b)) +
                      std::norm(std::complex<double>(m.c)) + std::norm(std::complex<double>(m.d));
  const double det = std::abs(std::complex<double>(m.det()));
  const double disc = std::max(0.0, fro2 * fro2 - 4.0 * det * det);
  return std::sqrt(0.5 * (fro2 + std::sqrt(disc)));
}

inline CMat2 to_complex(const Mat2& m) { return {m.a, m.b, m.c, m.d}; }

}  // namespace amspec
