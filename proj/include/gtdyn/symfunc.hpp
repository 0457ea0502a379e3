#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <stdexcept>
#include <type_traits>
#include <vector>

#include "gtdyn/common.hpp"
#include "gtdyn/linalg.hpp"
#include "gtdyn/signatures.hpp"

namespace gtdyn {

// ============================================================================
// Schur Laurent polynomial evaluation.
//
// Two routes share one entry point: the bialternant det[z_i^{a_j}] / V(z) for
// pairwise-distinct points, and a confluent divided-difference table when
// points collide (exact ties in rational mode, a relative threshold in float
// mode). Principal specializations below never go through the generic
// determinant.
// ============================================================================

enum class SchurMode { auto_fallback, strict_bialternant };

namespace detail {

template <class T>
bool is_zero_scalar(const T& x) {
  if constexpr (std::is_same_v<T, Rational>) return x == 0;
  else return abs_val(x) == 0.0;
}

template <class T>
bool nearly_equal(const T& a, const T& b) {
  if constexpr (std::is_same_v<T, Rational>) {
    return a == b;
  } else {
    double s = abs_val(a) + abs_val(b);
    return abs_val(a - b) <= 1e-12 * (s > 1.0 ? s : 1.0);
  }
}

// Generalized binomial C(a, k) for integer a of either sign.
template <class T>
T gen_binom(Int a, Int k) {
  T acc(1);
  for (Int i = 0; i < k; ++i) acc = acc * T(a - i) / T(i + 1);
  return acc;
}

// Confluent divided differences of f(x) = x^a over sorted nodes (ties
// adjacent). dd[i] ends up as f[z_0, ..., z_i].
template <class T>
std::vector<T> power_divided_differences(Int a, const std::vector<T>& z) {
  const std::size_t n = z.size();
  // table[j][i] = f[z_i, ..., z_{i+j}]
  std::vector<std::vector<T>> table(n);
  table[0].resize(n);
  for (std::size_t i = 0; i < n; ++i) table[0][i] = int_pow(z[i], a);
  for (std::size_t j = 1; j < n; ++j) {
    table[j].resize(n - j);
    for (std::size_t i = 0; i + j < n; ++i) {
      if (nearly_equal(z[i + j], z[i])) {
        // f^{(j)}(x)/j! = C(a, j) x^{a-j}
        table[j][i] = gen_binom<T>(a, static_cast<Int>(j)) * int_pow(z[i], a - static_cast<Int>(j));
      } else {
        table[j][i] = (table[j - 1][i + 1] - table[j - 1][i]) / (z[i + j] - z[i]);
      }
    }
  }
  std::vector<T> out(n);
  for (std::size_t j = 0; j < n; ++j) out[j] = table[j][0];
  return out;
}

template <class T>
bool sort_key_less(const T& a, const T& b) {
  if constexpr (std::is_same_v<T, Rational>) return a < b;
  else if constexpr (std::is_same_v<T, std::complex<double>>) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  } else return a < b;
}

}  // namespace detail

template <class T>
T schur_eval(const Signature& lam, const std::vector<T>& z,
             SchurMode mode = SchurMode::auto_fallback) {
  validate_signature(lam);
  const std::size_t n = lam.size();
  if (z.size() != n) throw std::invalid_argument("schur_eval: |z| must equal length of lambda");
  for (const T& v : z)
    if (detail::is_zero_scalar(v))
      throw std::invalid_argument("schur_eval: evaluation points must be nonzero");

  bool distinct = true;
  for (std::size_t i = 0; i < n && distinct; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (detail::nearly_equal(z[i], z[j])) {
        distinct = false;
        break;
      }

  std::vector<Int> a(n);  // exponents a_j = lam_j + n - j (1-based j)
  for (std::size_t j = 0; j < n; ++j)
    a[j] = lam[j] + static_cast<Int>(n) - static_cast<Int>(j) - 1;

  if (distinct) {
    Matrix<T> m(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) m(i, j) = int_pow(z[i], a[j]);
    T num = det(m);
    T den(1);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) den *= (z[i] - z[j]);
    return num / den;
  }

  if (mode == SchurMode::strict_bialternant)
    throw degenerate_point_error("schur_eval: coincident evaluation points in strict bialternant mode");

  // Divided-difference route: det[f_j[z_0..z_i]] picks up the sign of
  // prod_{i<j}(z_j - z_i) relative to V(z).
  std::vector<T> zs = z;
  std::sort(zs.begin(), zs.end(), detail::sort_key_less<T>);
  Matrix<T> m(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    auto dd = detail::power_divided_differences(a[j], zs);
    for (std::size_t i = 0; i < n; ++i) m(i, j) = dd[i];
  }
  T val = det(m);
  if ((n * (n - 1) / 2) % 2 == 1) val = -val;
  return val;
}

// ============================================================================
// Principal specializations.
// ============================================================================

// dim of the U(N) irreducible with highest weight lam:
// prod_{i<j} (a_i - a_j)/(j - i) with a_i = lam_i - i.
inline Rational dim_u_exact(const Signature& lam) {
  validate_signature(lam);
  const Int n = static_cast<Int>(lam.size());
  BigInt num(1), den(1);
  for (Int i = 0; i < n; ++i)
    for (Int j = i + 1; j < n; ++j) {
      num *= BigInt((lam[i] - i) - (lam[j] - j));
      den *= BigInt(j - i);
    }
  return Rational(num, den);
}

inline Rational dim_u(const Signature& lam, int N) {
  if (static_cast<int>(lam.size()) != N)
    throw std::invalid_argument("dim_u: length of lambda must equal N");
  return dim_u_exact(lam);
}

inline double dim_u_d(const Signature& lam) { return to_double(dim_u_exact(lam)); }

namespace detail {
template <class T>
void check_q_range(const T& q) {
  if (!(q > T(0) && q < T(1))) throw std::invalid_argument("q must lie in (0,1)");
}
}  // namespace detail

// s_lam(1, q^-2, ..., q^{-2(N-1)}): geometric-point bialternant in closed
// product form, with t = q^-2:
//   prod_{j<k} (t^{a_k} - t^{a_j}) / (t^{j-1} - t^{k-1}),  a_j = lam_j + N - j.
template <class T>
T spec_q2(const Signature& lam, int N, const T& q) {
  if (static_cast<int>(lam.size()) != N)
    throw std::invalid_argument("spec_q2: length of lambda must equal N");
  detail::check_q_range(q);
  const T t = T(1) / (q * q);
  T num(1), den(1);
  for (int j = 0; j < N; ++j)
    for (int k = j + 1; k < N; ++k) {
      Int aj = lam[j] + N - (j + 1);
      Int ak = lam[k] + N - (k + 1);
      num *= (int_pow(t, ak) - int_pow(t, aj));
      den *= (int_pow(t, static_cast<Int>(j)) - int_pow(t, static_cast<Int>(k)));
    }
  return num / den;
}

// Quantum dimension s_lam(q^{N-1}, q^{N-3}, ..., q^{-N+1}) via the q-bracket
// product prod_{i<j} [a_i - a_j]_q / [j - i]_q, [m]_q = (q^m - q^-m)/(q - q^-1).
template <class T>
T qdim(const Signature& lam, int N, const T& q) {
  if (static_cast<int>(lam.size()) != N)
    throw std::invalid_argument("qdim: length of lambda must equal N");
  detail::check_q_range(q);
  auto bracket = [&q](Int m) {
    return (int_pow(q, m) - int_pow(q, -m)) / (q - T(1) / q);
  };
  T num(1), den(1);
  for (int i = 0; i < N; ++i)
    for (int j = i + 1; j < N; ++j) {
      num *= bracket((lam[i] - i) - (lam[j] - j));
      den *= bracket(j - i);
    }
  return num / den;
}

// d_q with the classical limit folded in: q = 1 means dim_u.
inline double dq_dim(const Signature& lam, int N, double q) {
  if (q == 1.0) return to_double(dim_u(lam, N));
  return qdim(lam, N, q);
}

// ============================================================================
// Littlewood-Richardson coefficients N^beta_{alpha,gamma} on S_N.
//
// Both inputs are shifted nonnegative (tensoring with determinant powers
// leaves the coefficients invariant), then the classical LR rule counts
// column-strict lattice fillings of beta/alpha with content gamma, rows
// capped at N.
// ============================================================================

struct LRTable {
  Signature alpha, gamma;
  std::map<Signature, long long> entries;  // absent keys mean 0

  long long at(const Signature& beta) const {
    auto it = entries.find(beta);
    return it == entries.end() ? 0 : it->second;
  }
};

namespace detail {

// Count LR skew tableaux of shape B/A with content C (all partitions given
// as length-N vectors, B >= A componentwise). Cells are filled in reverse
// reading-word order (rows top to bottom, right to left within a row) so the
// lattice condition can be checked incrementally.
inline long long count_lr_fillings(const std::vector<Int>& A, const std::vector<Int>& B,
                                   const std::vector<Int>& C) {
  const int N = static_cast<int>(A.size());
  struct Cell {
    int row;
    Int col;
  };
  std::vector<Cell> cells;
  for (int r = 0; r < N; ++r)
    for (Int c = B[r] - 1; c >= A[r]; --c) cells.push_back({r, c});

  std::vector<Int> used(N + 2, 0);  // letters are 1..N
  std::vector<Int> quota(N + 2, 0);
  for (int v = 1; v <= N; ++v) quota[v] = C[v - 1];

  const Int width = B.empty() ? 0 : B[0];
  std::vector<int> fill(static_cast<std::size_t>(N) * std::max<Int>(width, 1), 0);  // 0 = empty
  auto at = [&](int r, Int c) -> int& { return fill[static_cast<std::size_t>(r) * width + c]; };

  long long count = 0;
  std::function<void(std::size_t)> rec = [&](std::size_t idx) {
    if (idx == cells.size()) {
      ++count;
      return;
    }
    const Cell cell = cells[idx];
    int max_v = N;
    // row weakly increasing left to right: bounded by the value just right
    if (cell.col + 1 < B[cell.row]) max_v = std::min(max_v, at(cell.row, cell.col + 1));
    int min_v = 1;
    // column strictly increasing downward: exceed the value just above
    if (cell.row > 0 && cell.col >= A[cell.row - 1]) {
      int above = at(cell.row - 1, cell.col);
      if (above > 0) min_v = std::max(min_v, above + 1);
    }
    for (int v = min_v; v <= max_v; ++v) {
      if (used[v] >= quota[v]) continue;
      if (v > 1 && used[v] + 1 > used[v - 1]) continue;  // lattice word
      used[v]++;
      at(cell.row, cell.col) = v;
      rec(idx + 1);
      at(cell.row, cell.col) = 0;
      used[v]--;
    }
  };
  rec(0);
  return count;
}

}  // namespace detail

inline LRTable lr_coeffs(const Signature& alpha, const Signature& gamma) {
  validate_signature(alpha);
  validate_signature(gamma);
  if (alpha.size() != gamma.size())
    throw std::invalid_argument("lr_coeffs: alpha and gamma must have the same length");
  const int N = static_cast<int>(alpha.size());

  const Int shift_a = std::max<Int>(0, -alpha[N - 1]);
  const Int shift_c = std::max<Int>(0, -gamma[N - 1]);
  std::vector<Int> A(N), C(N);
  for (int i = 0; i < N; ++i) {
    A[i] = alpha[i] + shift_a;
    C[i] = gamma[i] + shift_c;
  }
  Int sizeA = 0, sizeC = 0;
  for (int i = 0; i < N; ++i) {
    sizeA += A[i];
    sizeC += C[i];
  }
  const Int total = sizeA + sizeC;

  LRTable table;
  table.alpha = alpha;
  table.gamma = gamma;

  // Enumerate candidate B: partitions with <= N rows, B >= A, |B| = total,
  // B_1 <= A_1 + C_1.
  std::vector<Int> B(N);
  std::function<void(int, Int, Int)> rec = [&](int row, Int ub, Int remaining) {
    if (row == N) {
      if (remaining != 0) return;
      long long c = detail::count_lr_fillings(A, B, C);
      if (c > 0) {
        std::vector<Int> beta(N);
        for (int i = 0; i < N; ++i) beta[i] = B[i] - shift_a - shift_c;
        table.entries[Signature(std::move(beta))] = c;
      }
      return;
    }
    Int max_v = std::min<Int>(ub, remaining - [&] {
      Int below = 0;
      for (int r = row + 1; r < N; ++r) below += A[r];
      return below;
    }());
    for (Int v = std::max<Int>(A[row], 0); v <= max_v; ++v) {
      // rows below can absorb at most (N - row - 1) * v more cells
      if (remaining - v > static_cast<Int>(N - row - 1) * v) continue;
      B[row] = v;
      rec(row + 1, v, remaining - v);
    }
    B[row] = 0;
  };
  rec(0, A[0] + C[0], total);
  return table;
}

}  // namespace gtdyn
