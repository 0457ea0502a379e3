#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <type_traits>
#include <vector>

#include "gtdyn/common.hpp"

namespace gtdyn {

// Minimal dense row-major matrix. Kernel boxes stay small (a few thousand
// states) and most determinants are N x N with N <= 4, so nothing heavier
// is warranted; the exact mode needs cpp_rational scalars anyway.
template <class T>
struct Matrix {
  std::size_t rows = 0, cols = 0;
  std::vector<T> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, T(0)) {}

  T& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

template <class T>
Matrix<T> matmul(const Matrix<T>& a, const Matrix<T>& b) {
  if (a.cols != b.rows) throw std::invalid_argument("matmul: shape mismatch");
  Matrix<T> out(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t k = 0; k < a.cols; ++k) {
      const T& aik = a(i, k);
      if (aik == T(0)) continue;
      for (std::size_t j = 0; j < b.cols; ++j) out(i, j) += aik * b(k, j);
    }
  return out;
}

namespace detail {
inline double abs_val(double x) { return std::fabs(x); }
inline long double abs_val(long double x) { return fabsl(x); }
template <class T>
double abs_val(const std::complex<T>& z) {
  return std::abs(z);
}
}  // namespace detail

// Determinant by partial-pivot LU; T is a floating or complex scalar.
template <class T>
T det_lu(Matrix<T> a) {
  if (a.rows != a.cols) throw std::invalid_argument("det_lu: square matrix required");
  const std::size_t n = a.rows;
  T det(1);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = detail::abs_val(a(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      double v = detail::abs_val(a(i, k));
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (best == 0.0) return T(0);
    if (piv != k) {
      for (std::size_t j = k; j < n; ++j) std::swap(a(k, j), a(piv, j));
      det = -det;
    }
    det *= a(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      T f = a(i, k) / a(k, k);
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
    }
  }
  return det;
}

// Exact determinant of a rational matrix: clear row denominators, then
// fraction-free (Bareiss) elimination over cpp_int.
inline Rational det_exact(const Matrix<Rational>& a) {
  if (a.rows != a.cols) throw std::invalid_argument("det_exact: square matrix required");
  const std::size_t n = a.rows;
  if (n == 0) return Rational(1);
  Matrix<BigInt> m(n, n);
  BigInt scale(1);
  for (std::size_t i = 0; i < n; ++i) {
    BigInt den(1);
    for (std::size_t j = 0; j < n; ++j) den = lcm(den, denominator(a(i, j)));
    for (std::size_t j = 0; j < n; ++j)
      m(i, j) = numerator(a(i, j)) * (den / denominator(a(i, j)));
    scale *= den;
  }
  BigInt prev(1);
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m(k, k) == 0) {
      std::size_t piv = k + 1;
      while (piv < n && m(piv, k) == 0) ++piv;
      if (piv == n) return Rational(0);
      for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(piv, j));
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j)
        m(i, j) = (m(i, j) * m(k, k) - m(i, k) * m(k, j)) / prev;
    prev = m(k, k);
  }
  BigInt det_int = m(n - 1, n - 1);
  if (sign < 0) det_int = -det_int;
  return Rational(det_int, scale);
}

// Unified entry point used by templated evaluators.
template <class T>
T det(const Matrix<T>& a) {
  if constexpr (std::is_same_v<T, Rational>) {
    return det_exact(a);
  } else {
    return det_lu(a);
  }
}

}  // namespace gtdyn
