#pragma once

#include <cmath>
#include <stdexcept>
#include <type_traits>
#include <vector>

#include "gtdyn/generators.hpp"
#include "gtdyn/signatures.hpp"
#include "gtdyn/symfunc.hpp"
#include "gtdyn/voiculescu.hpp"

namespace gtdyn {

// ============================================================================
// Branching links Lambda^n_{n-1} for U(N) and U_q(N), the boundary kernel
// Lambda^infty_N, and the intertwining defect Q_n Lambda - Lambda Q_{n-1}.
//
// Entries are dimension ratios (classical) or q-weighted ratios; in rational
// mode with rational q the row sums are exactly 1 whenever the column box
// contains every interlacing mu.
// ============================================================================

template <class T>
struct LinkMatrixT {
  SignatureBox row_box;  // level n
  SignatureBox col_box;  // level n-1
  T q = T(1);            // T(1) means the classical link
  std::vector<T> entries;

  T at(std::size_t i, std::size_t j) const { return entries[i * col_box.size() + j]; }
  T& at(std::size_t i, std::size_t j) { return entries[i * col_box.size() + j]; }

  T row_sum(std::size_t i) const {
    T s(0);
    for (std::size_t j = 0; j < col_box.size(); ++j) s += at(i, j);
    return s;
  }
};

using LinkMatrix = LinkMatrixT<double>;
using LinkMatrixExact = LinkMatrixT<Rational>;

// Free-space link rows --------------------------------------------------------

inline std::vector<std::pair<Signature, double>> linkrow_un(const Signature& lam) {
  std::vector<std::pair<Signature, double>> out;
  const double dl = dim_u_d(lam);
  for (const auto& mu : enumerate_interlacing(lam)) out.emplace_back(mu, dim_u_d(mu) / dl);
  return out;
}

template <class T>
std::vector<std::pair<Signature, T>> linkrow_uqn(const Signature& lam, const T& q) {
  const int n = static_cast<int>(lam.size());
  if (n < 2) throw std::invalid_argument("linkrow_uqn: need level >= 2");
  std::vector<std::pair<Signature, T>> out;
  // q^{n|mu| - (n-1)|lam|} s_mu(q^{n-2},...,q^{-n+2}) / s_lam(q^{n-1},...,q^{-n+1})
  const T denom = qdim(lam, n, q);
  for (const auto& mu : enumerate_interlacing(lam)) {
    T val = int_pow(q, static_cast<Int>(n) * mu.sum() - static_cast<Int>(n - 1) * lam.sum()) *
            qdim(mu, n - 1, q) / denom;
    out.emplace_back(mu, val);
  }
  return out;
}

// Dense builders --------------------------------------------------------------

namespace detail {
inline void check_link_boxes(const SignatureBox& row_box, const SignatureBox& col_box) {
  if (row_box.N != col_box.N + 1)
    throw std::invalid_argument("link: boxes must sit at adjacent levels");
}
}  // namespace detail

template <class T = double>
LinkMatrixT<T> link_un(int n, const SignatureBox& row_box, const SignatureBox& col_box) {
  detail::check_link_boxes(row_box, col_box);
  if (row_box.N != n) throw std::invalid_argument("link_un: row box level mismatch");
  LinkMatrixT<T> L;
  L.row_box = row_box;
  L.col_box = col_box;
  L.q = T(1);
  L.entries.assign(row_box.size() * col_box.size(), T(0));
  for (std::size_t i = 0; i < row_box.size(); ++i) {
    const Signature& lam = row_box[i];
    T dl;
    if constexpr (std::is_same_v<T, Rational>) dl = dim_u_exact(lam);
    else dl = T(dim_u_d(lam));
    for (const auto& mu : enumerate_interlacing(lam)) {
      auto j = col_box.find(mu);
      if (!j) continue;
      if constexpr (std::is_same_v<T, Rational>) L.at(i, *j) = dim_u_exact(mu) / dl;
      else L.at(i, *j) = T(dim_u_d(mu)) / dl;
    }
  }
  return L;
}

template <class T = double>
LinkMatrixT<T> link_uqn(int n, const T& q, const SignatureBox& row_box,
                        const SignatureBox& col_box) {
  detail::check_link_boxes(row_box, col_box);
  if (row_box.N != n) throw std::invalid_argument("link_uqn: row box level mismatch");
  if (!(q > T(0) && q < T(1))) throw std::invalid_argument("link_uqn: q must lie in (0,1)");
  LinkMatrixT<T> L;
  L.row_box = row_box;
  L.col_box = col_box;
  L.q = q;
  L.entries.assign(row_box.size() * col_box.size(), T(0));
  for (std::size_t i = 0; i < row_box.size(); ++i) {
    for (const auto& [mu, val] : linkrow_uqn(row_box[i], q)) {
      auto j = col_box.find(mu);
      if (j) L.at(i, *j) = val;
    }
  }
  return L;
}

// Boundary kernel Lambda^infty_N(omega, .) ------------------------------------

inline MeasureVector boundary_link(const OmegaPoint& omega, int N, const SignatureBox& box,
                                   std::optional<CoeffWindow> window = std::nullopt) {
  if (box.N != N) throw std::invalid_argument("boundary_link: box level mismatch");
  validate_omega(omega);
  CoeffWindow w = window ? window_for_box(omega, box, *window)
                         : window_for_box(omega, box, phi_coeffs_default(omega));
  MeasureVector mv;
  mv.box = box;
  mv.probs.resize(box.size());
  for (std::size_t idx = 0; idx < box.size(); ++idx) {
    const Signature& lam = box[idx];
    const std::size_t n = lam.size();
    Matrix<double> m(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        m(i, j) = w.at(lam[i] - static_cast<Int>(i + 1) + static_cast<Int>(j + 1));
    double d = det_lu(m);
    mv.probs[idx] = (d == 0.0) ? 0.0 : d * dim_u_d(lam);
  }
  mv.tail = std::max(0.0, 1.0 - mv.mass());
  return mv;
}

// Intertwining defect ---------------------------------------------------------

// Interior rows: the one-step support provably stays inside the box.
inline bool row_interior(const SignatureBox& box, Int window_lo, Int window_hi,
                         const Signature& lam) {
  return lam[0] + window_hi <= box.hi && lam[lam.size() - 1] + window_lo >= box.lo;
}

// max |(Q_hi L - L Q_lo)(lam, nu)| over interior rows lam of Q_hi's box.
inline double verify_intertwine(const KernelMatrix& Q_hi, const KernelMatrix& Q_lo,
                                const LinkMatrix& L) {
  if (Q_hi.kind != KernelKind::transition || Q_lo.kind != KernelKind::transition)
    throw std::invalid_argument("verify_intertwine: transition kernels expected");
  if (Q_hi.meta.N != Q_lo.meta.N + 1)
    throw std::invalid_argument("verify_intertwine: levels must be adjacent");
  if (L.row_box.size() != Q_hi.box.size() || L.col_box.size() != Q_lo.box.size() ||
      L.row_box.N != Q_hi.box.N || L.col_box.N != Q_lo.box.N)
    throw std::invalid_argument("verify_intertwine: incompatible shapes");

  const std::size_t nhi = Q_hi.box.size(), nlo = Q_lo.box.size();
  double defect = 0.0;
  for (std::size_t i = 0; i < nhi; ++i) {
    if (!row_interior(Q_hi.box, Q_hi.meta.window_lo, Q_hi.meta.window_hi, Q_hi.box[i])) continue;
    for (std::size_t v = 0; v < nlo; ++v) {
      double lhs = 0.0;
      for (std::size_t m = 0; m < nhi; ++m) lhs += Q_hi.at(i, m) * L.at(m, v);
      double rhs = 0.0;
      for (std::size_t m = 0; m < nlo; ++m) rhs += L.at(i, m) * Q_lo.at(m, v);
      defect = std::max(defect, std::fabs(lhs - rhs));
    }
  }
  return defect;
}

}  // namespace gtdyn
