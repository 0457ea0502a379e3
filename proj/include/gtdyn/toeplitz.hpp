#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <tuple>
#include <utility>
#include <vector>

#include "gtdyn/generators.hpp"
#include "gtdyn/links.hpp"
#include "gtdyn/rng.hpp"
#include "gtdyn/signatures.hpp"

namespace gtdyn {

// ============================================================================
// Toeplitz-like kernels on X-configurations:
//   T_n(a; F)(X,Y)       = det[a_i^{y_j}] / det[a_i^{x_j}] * det[f(x_i-y_j)] / prod_1^n F(a_i^-1)
//   T^n_{n-1}(a; F)(X,Y) = det[a_i^{y_j}]^{n-1} / det[a_i^{x_j}]^n
//                          * det[f(x_i-y_j)]^n / prod_1^{n-1} F(a_i^-1),  y_n = virt.
// Here a_i = q^{-2(i-1)} = t^{i-1}, so the alternants collapse to the closed
// geometric form prod_{j<k}(t^{e_k} - t^{e_j}): same-sign factor products, no
// cancellation. The f-determinant runs in long double because its raw entries
// span many orders of magnitude before the prefactors normalize them away.
// ============================================================================

struct ToeplitzSpec {
  int n = 0;
  double q = 0.0;
  long double t = 0.0L;                    // q^{-2}
  // Coefficients are stored factored as f(m) = fscale^m * g(m) with g bounded,
  // so the f-determinant runs on mild entries and the geometric growth moves
  // into an exact power prefactor.
  long double fscale = 1.0L;
  std::function<long double(Int)> f;       // bounded part g(m)
  std::function<long double(Int)> f_virt;  // bounded part of f(m - virt)
  std::vector<long double> fvals;          // F(a_i^{-1}), i = 1..(n or n-1)
};

namespace detail {

inline long double ld_ipow(long double base, Int e) {
  if (e < 0) return 1.0L / ld_ipow(base, -e);
  long double acc = 1.0L, b = base;
  Int n = e;
  while (n > 0) {
    if (n & 1) acc *= b;
    b *= b;
    n >>= 1;
  }
  return acc;
}

// det[t^{(i-1) e_j}]_{i,j=1..m} = prod_{j<k} (t^{e_k} - t^{e_j})
inline long double geometric_alternant(long double t, const std::vector<Int>& e) {
  long double acc = 1.0L;
  for (std::size_t j = 0; j < e.size(); ++j)
    for (std::size_t k = j + 1; k < e.size(); ++k)
      acc *= (ld_ipow(t, e[k]) - ld_ipow(t, e[j]));
  return acc;
}

}  // namespace detail

// Single U_q(N) transition entry Q^{chi_n}(lam, mu) on the determinantal route.
inline double qrow_entry_uqn(const OmegaPoint& omega, int n, double q, const CoeffWindow& w,
                             const Signature& lam, const Signature& mu) {
  double d = detail::det_phi(w, lam, mu);
  if (d == 0.0) return 0.0;
  return d * spec_q2(mu, n, q) / (spec_q2(lam, n, q) * phi_product_q(omega, n, q));
}

// U_q link entry Lambda^n_{n-1}(mu, nu) for nu < mu (0 otherwise).
inline double link_entry_uqn(int n, double q, const Signature& mu, const Signature& nu) {
  if (!interlaces(nu, mu)) return 0.0;
  return std::pow(q, static_cast<double>(n) * nu.sum() - static_cast<double>(n - 1) * mu.sum()) *
         qdim(nu, n - 1, q) / qdim(mu, n, q);
}

// --------------------------------------------------------------------------
// Spec builders.
// --------------------------------------------------------------------------

// Thm 10.1 spec: F = Psi_omega with Psi_omega(z) = Phi_omega(1/z), so
// f(m) = phi_omega(-m) and F(a_i^{-1}) = Phi_omega(q^{-2(i-1)}).
inline ToeplitzSpec make_spec_psi(const OmegaPoint& omega, int n, double q,
                                  const CoeffWindow& window) {
  validate_q_annulus(omega, n, q);
  ToeplitzSpec s;
  s.n = n;
  s.q = q;
  s.t = 1.0L / (static_cast<long double>(q) * q);
  CoeffWindow w = window;
  s.f = [w](Int m) { return static_cast<long double>(w.at(-m)); };
  for (int i = 1; i <= n; ++i)
    s.fvals.push_back(static_cast<long double>(phi_eval(omega, std::pow(q, -2.0 * (i - 1)))));
  for (long double v : s.fvals)
    if (v == 0.0L) throw std::domain_error("toeplitz spec: F(alpha_i^{-1}) vanishes");
  return s;
}

// Prop 10.2 spec: F_n(z) = 1/(1 - q^{-2(n-1)} z), f(m) = q^{-2(n-1)m} for
// m >= 0, and f(m - virt) = q^{-2(n-1)m}.
inline ToeplitzSpec make_spec_fn(int n, double q) {
  if (n < 2) throw std::invalid_argument("make_spec_fn: need n >= 2");
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("make_spec_fn: q must lie in (0,1)");
  ToeplitzSpec s;
  s.n = n;
  s.q = q;
  s.t = 1.0L / (static_cast<long double>(q) * q);
  const long double rho = detail::ld_ipow(s.t, n - 1);  // q^{-2(n-1)}
  s.fscale = rho;
  s.f = [](Int m) { return m >= 0 ? 1.0L : 0.0L; };
  s.f_virt = [](Int) { return 1.0L; };
  for (int i = 1; i <= n - 1; ++i) {
    long double z = detail::ld_ipow(s.t, -(i - 1));  // alpha_i^{-1} = q^{2(i-1)}
    s.fvals.push_back(1.0L / (1.0L - rho * z));
  }
  return s;
}

// Delta spec: F = Psi_omega F_n. Coefficients come from the convolution
//   f(m) = q^{-2(n-1)m} * sum_{k >= -m} phi(k) rho^k,   rho = q^{-2(n-1)},
// summed against the decaying direction; the annulus precondition makes the
// inner sum finite and its tail is certified by the Chernoff-type bound
// phi(k) <= Phi(s)/s^k for any rho < s inside the annulus.
inline ToeplitzSpec make_spec_psi_fn(const OmegaPoint& omega, int n, double q,
                                     Int m_lo, Int m_hi, double inner_tol = 1e-16) {
  if (n < 2) throw std::invalid_argument("make_spec_psi_fn: need n >= 2");
  if (m_lo > m_hi) throw std::invalid_argument("make_spec_psi_fn: empty argument range");
  validate_q_annulus(omega, n, q);
  ToeplitzSpec s;
  s.n = n;
  s.q = q;
  s.t = 1.0L / (static_cast<long double>(q) * q);
  const double rho = std::pow(q, -2.0 * (n - 1));
  const double pole = annulus_outer(omega);
  if (!(rho < pole))
    throw std::domain_error("make_spec_psi_fn: annulus condition fails, Psi_omega F_n has no "
                            "common annulus (alpha+_1 too large for this q, n)");
  const double sbound = std::isinf(pole) ? 2.0 * rho + 1.0 : 0.5 * (rho + pole);
  const double phis = phi_eval(omega, sbound);

  // widen K until Phi(s) (rho/s)^{K+1} / (1 - rho/s) < inner_tol
  Int K = std::max<Int>(8, -m_lo);
  const double r = rho / sbound;
  while (phis * std::pow(r, static_cast<double>(K + 1)) / (1.0 - r) >= inner_tol) {
    ++K;
    if (K > kWindowCap)
      throw resource_error("make_spec_psi_fn: certified inner sum exceeds the window cap");
  }
  // long-double coefficients keep the G-sums accurate enough for the 1e-10
  // two-route comparisons at n = 3
  auto full = detail::phi_full_product<long double>(omega, rho);
  auto phi_ld = [&full](Int k) -> long double {
    if (k < full.lo || k > full.hi()) return 0.0L;
    return full.c[static_cast<std::size_t>(k - full.lo)];
  };

  // G(m) = sum_{k = -m}^{K} phi(k) rho^k, precomputed for m in [m_lo, m_hi]
  std::vector<long double> g(static_cast<std::size_t>(m_hi - m_lo + 1));
  const long double rho_l = static_cast<long double>(rho);
  for (Int m = m_lo; m <= m_hi; ++m) {
    long double acc = 0.0L;
    for (Int k = -m; k <= K; ++k) acc += phi_ld(k) * detail::ld_ipow(rho_l, k);
    g[static_cast<std::size_t>(m - m_lo)] = acc;
  }
  s.fscale = rho_l;
  s.f = [g, m_lo, m_hi](Int m) -> long double {
    if (m < m_lo || m > m_hi) return 0.0L;
    return g[static_cast<std::size_t>(m - m_lo)];
  };
  // The virtual column stays f(m - virt) = alpha_n^m: convolving it against
  // psi pulls out Phi(q^{-2(n-1)}), which is exactly the n-th normalizer
  // factor dropped when the product runs only to n-1.
  s.f_virt = [](Int) { return 1.0L; };
  for (int i = 1; i <= n - 1; ++i) {
    double zi = std::pow(q, 2.0 * (i - 1));  // alpha_i^{-1}
    long double val = static_cast<long double>(phi_eval(omega, 1.0 / zi)) /
                      (1.0L - static_cast<long double>(rho * zi));
    s.fvals.push_back(val);
  }
  return s;
}

// --------------------------------------------------------------------------
// Kernel evaluation.
// --------------------------------------------------------------------------

inline double toeplitz_T(const ToeplitzSpec& spec, const XConfig& X, const XConfig& Y) {
  const int n = spec.n;
  if (static_cast<int>(X.size()) != n || static_cast<int>(Y.size()) != n)
    throw std::invalid_argument("toeplitz_T: configurations must have length n");
  if (static_cast<int>(spec.fvals.size()) < n)
    throw std::invalid_argument("toeplitz_T: spec lacks F(alpha_i^{-1}) values up to i = n");
  long double detX = detail::geometric_alternant(spec.t, X.points);
  long double detY = detail::geometric_alternant(spec.t, Y.points);
  if (detX == 0.0L) throw std::domain_error("toeplitz_T: det[alpha_i^{x_j}] vanishes");
  Matrix<long double> m(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
  Int scale_exp = 0;
  for (int i = 0; i < n; ++i) {
    scale_exp += X.points[i] - Y.points[i];
    for (int j = 0; j < n; ++j) m(i, j) = spec.f(X.points[i] - Y.points[j]);
  }
  long double val = (detY / detX) * det_lu(m) * detail::ld_ipow(spec.fscale, scale_exp);
  for (int i = 0; i < n; ++i) val /= spec.fvals[static_cast<std::size_t>(i)];
  return static_cast<double>(val);
}

inline double toeplitz_Tdown(const ToeplitzSpec& spec, const XConfig& X, const XConfig& Y) {
  const int n = spec.n;
  if (static_cast<int>(X.size()) != n || static_cast<int>(Y.size()) != n - 1)
    throw std::invalid_argument("toeplitz_Tdown: need |X| = n, |Y| = n-1");
  if (!spec.f_virt) throw std::invalid_argument("toeplitz_Tdown: spec has no virtual-variable rule");
  if (static_cast<int>(spec.fvals.size()) < n - 1)
    throw std::invalid_argument("toeplitz_Tdown: spec lacks F(alpha_i^{-1}) values up to i = n-1");
  long double detX = detail::geometric_alternant(spec.t, X.points);
  long double detY = detail::geometric_alternant(spec.t, Y.points);
  if (detX == 0.0L) throw std::domain_error("toeplitz_Tdown: det[alpha_i^{x_j}] vanishes");
  Matrix<long double> m(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
  Int scale_exp = 0;
  for (int i = 0; i < n; ++i) {
    scale_exp += X.points[i];
    for (int j = 0; j < n - 1; ++j) m(i, j) = spec.f(X.points[i] - Y.points[j]);
    m(static_cast<std::size_t>(i), static_cast<std::size_t>(n - 1)) = spec.f_virt(X.points[i]);
  }
  for (int j = 0; j < n - 1; ++j) scale_exp -= Y.points[j];
  long double val = (detY / detX) * det_lu(m) * detail::ld_ipow(spec.fscale, scale_exp);
  for (int i = 0; i < n - 1; ++i) val /= spec.fvals[static_cast<std::size_t>(i)];
  return static_cast<double>(val);
}

// Signature-level wrappers.
inline double toeplitz_q_entry(const ToeplitzSpec& spec, const Signature& lam,
                               const Signature& mu) {
  return toeplitz_T(spec, to_xconfig(lam), to_xconfig(mu));
}

inline double toeplitz_link_entry(const ToeplitzSpec& spec, const Signature& lam,
                                  const Signature& mu) {
  return toeplitz_Tdown(spec, to_xconfig(lam), to_xconfig(mu));
}

// --------------------------------------------------------------------------
// Delta^n_{n-1} = Q^{chi_n} Lambda^n_{n-1}, both as an explicit product and
// directly as T^n_{n-1}(...; Psi_omega F_n).
// --------------------------------------------------------------------------

struct DeltaKernel {
  SignatureBox row_box;  // level n
  SignatureBox col_box;  // level n-1
  std::vector<double> product_entries;
  std::vector<double> direct_entries;
  double max_defect = 0.0;

  double product_at(std::size_t i, std::size_t j) const {
    return product_entries[i * col_box.size() + j];
  }
  double direct_at(std::size_t i, std::size_t j) const {
    return direct_entries[i * col_box.size() + j];
  }
};

// Free-space Delta value: sum over mu of Q(lam, mu) Lambda(mu, nu).
inline double delta_product_value(const OmegaPoint& omega, int n, double q, const CoeffWindow& w,
                                  const Signature& lam, const Signature& nu) {
  double acc = 0.0;
  for (const auto& [mu, qv] : qrow_uqn(omega, n, q, w, lam))
    acc += qv * link_entry_uqn(n, q, mu, nu);
  return acc;
}

inline DeltaKernel delta_kernel(int n, const OmegaPoint& omega, double q,
                                const SignatureBox& row_box, const SignatureBox& col_box,
                                std::optional<CoeffWindow> window = std::nullopt) {
  if (row_box.N != n || col_box.N != n - 1)
    throw std::invalid_argument("delta_kernel: boxes must sit at levels n, n-1");
  validate_q_annulus(omega, n, q);
  const double rho = std::pow(q, -2.0 * (n - 1));
  CoeffWindow w = window ? window_for_box(omega, row_box, *window, rho)
                         : window_for_box(omega, row_box, phi_coeffs_for_q(omega, n, q), rho);

  DeltaKernel d;
  d.row_box = row_box;
  d.col_box = col_box;
  d.product_entries.assign(row_box.size() * col_box.size(), 0.0);
  d.direct_entries.assign(row_box.size() * col_box.size(), 0.0);

  // f-arguments are x_i(lam) - y_j(nu); x ranges over [row.lo - n, row.hi - 1],
  // y over [col.lo - (n-1), col.hi - 1], widened by the window span for the
  // mu-sum on the product side.
  Int span = w.n_max - w.n_min;
  Int m_lo = (row_box.lo - n) - (col_box.hi - 1) - span;
  Int m_hi = (row_box.hi - 1) - (col_box.lo - (n - 1)) + span;
  ToeplitzSpec direct = make_spec_psi_fn(omega, n, q, m_lo, m_hi);

  for (std::size_t i = 0; i < row_box.size(); ++i) {
    const Signature& lam = row_box[i];
    for (const auto& [mu, qv] : qrow_uqn(omega, n, q, w, lam)) {
      if (std::fabs(qv) < 1e-17) continue;  // dust terms, bounded by #support * 1e-17
      for (const auto& [nu, lv] : linkrow_uqn(mu, q)) {
        auto j = col_box.find(nu);
        if (j) d.product_entries[i * col_box.size() + *j] += qv * lv;
      }
    }
    for (std::size_t j = 0; j < col_box.size(); ++j) {
      double v = toeplitz_link_entry(direct, lam, col_box[j]);
      d.direct_entries[i * col_box.size() + j] = v;
      d.max_defect = std::max(d.max_defect,
                              std::fabs(v - d.product_entries[i * col_box.size() + j]));
    }
  }
  return d;
}

// --------------------------------------------------------------------------
// Multilevel dynamics P_N: sequential sampler and exact one-step laws.
// --------------------------------------------------------------------------

class MultilevelSampler {
 public:
  struct Law {
    std::vector<Signature> support;
    std::vector<double> weights;  // unnormalized: Q(lam, .) Lambda(., mu_prev)
    double total = 0.0;
  };

  MultilevelSampler(OmegaPoint omega, int N, double q, double window_tol = 1e-12)
      : omega_(std::move(omega)), N_(N), q_(q) {
    if (N < 1) throw std::invalid_argument("multilevel: N must be >= 1");
    validate_q_annulus(omega_, N, q);
    window_ = phi_coeffs_for_q(omega_, N, q, window_tol);
  }

  const CoeffWindow& window() const { return window_; }

  const Law& level1_law(const Signature& lam) {
    auto it = level1_.find(lam);
    if (it == level1_.end()) {
      Law law;
      for (const auto& [mu, p] : qrow_uqn(omega_, 1, q_, window_, lam)) {
        law.support.push_back(mu);
        law.weights.push_back(p);
        law.total += p;
      }
      it = level1_.emplace(lam, std::move(law)).first;
    }
    return it->second;
  }

  // Law of mu^(n) given lam^(n) and the already-sampled mu^(n-1).
  const Law& conditional_law(int n, const Signature& lam, const Signature& mu_prev) {
    auto key = std::make_tuple(n, lam, mu_prev);
    auto it = cond_.find(key);
    if (it == cond_.end()) {
      Law law;
      Int lo = lam[lam.size() - 1] + window_.n_min;
      Int hi = lam[0] + window_.n_max;
      for (const auto& mu : enumerate_interlacing_above(mu_prev, lo, hi)) {
        double qv = qrow_entry_uqn(omega_, n, q_, window_, lam, mu);
        if (qv == 0.0) continue;
        double wgt = qv * link_entry_uqn(n, q_, mu, mu_prev);
        if (wgt == 0.0) continue;
        law.support.push_back(mu);
        law.weights.push_back(wgt);
        law.total += wgt;
      }
      it = cond_.emplace(std::move(key), std::move(law)).first;
    }
    return it->second;
  }

  GTPattern step(const GTPattern& state, Rng& rng) {
    validate_pattern(state);
    if (static_cast<int>(state.depth()) != N_)
      throw std::invalid_argument("multilevel step: pattern depth mismatch");
    GTPattern next;
    next.levels.resize(static_cast<std::size_t>(N_));
    {
      const Law& law = level1_law(state.levels[0]);
      if (law.total <= 0.0) throw std::domain_error("multilevel step: level-1 law degenerate");
      next.levels[0] = law.support[rng.categorical(law.weights)];
    }
    for (int n = 2; n <= N_; ++n) {
      const Law& law = conditional_law(n, state.levels[static_cast<std::size_t>(n - 1)],
                                       next.levels[static_cast<std::size_t>(n - 2)]);
      if (law.total <= 0.0)
        throw std::domain_error("multilevel step: zero normalizer at level " + std::to_string(n));
      next.levels[static_cast<std::size_t>(n - 1)] = law.support[rng.categorical(law.weights)];
    }
    validate_pattern(next);
    return next;
  }

  // Exact one-step law from `state` (the distribution the sampler draws).
  std::map<GTPattern, double> one_step_law(const GTPattern& state) {
    validate_pattern(state);
    std::map<GTPattern, double> out;
    const Law& l1 = level1_law(state.levels[0]);
    std::function<void(int, GTPattern&, double)> rec = [&](int n, GTPattern& acc, double p) {
      if (n > N_) {
        out[acc] += p;
        return;
      }
      const Law& law = conditional_law(n, state.levels[static_cast<std::size_t>(n - 1)],
                                       acc.levels[static_cast<std::size_t>(n - 2)]);
      for (std::size_t k = 0; k < law.support.size(); ++k) {
        acc.levels[static_cast<std::size_t>(n - 1)] = law.support[k];
        rec(n + 1, acc, p * law.weights[k] / law.total);
      }
    };
    for (std::size_t k = 0; k < l1.support.size(); ++k) {
      GTPattern acc;
      acc.levels.resize(static_cast<std::size_t>(N_));
      acc.levels[0] = l1.support[k];
      rec(2, acc, l1.weights[k] / l1.total);
    }
    return out;
  }

 private:
  OmegaPoint omega_;
  int N_;
  double q_;
  CoeffWindow window_;
  std::map<Signature, Law> level1_;
  std::map<std::tuple<int, Signature, Signature>, Law> cond_;
};

// The P_N formula with Delta on the DIRECT Toeplitz route (Psi_omega F_n);
// the second, determinant-only route against the sampler's sequential law.
class PnFormula {
 public:
  PnFormula(OmegaPoint omega, int N, double q, CoeffWindow window, Int part_lo, Int part_hi)
      : omega_(std::move(omega)), N_(N), q_(q), window_(std::move(window)) {
    Int span = window_.n_max - window_.n_min;
    for (int n = 2; n <= N_; ++n) {
      Int m_lo = (part_lo - n) - (part_hi - 1) - span - 2;
      Int m_hi = (part_hi - 1) - (part_lo - (n - 1)) + span + 2;
      specs_.push_back(make_spec_psi_fn(omega_, n, q_, m_lo, m_hi));
    }
  }

  double entry(const GTPattern& state, const GTPattern& target) const {
    validate_pattern(state);
    validate_pattern(target);
    double val = qrow_entry_uqn(omega_, 1, q_, window_, state.levels[0], target.levels[0]);
    for (int n = 2; n <= N_; ++n) {
      const Signature& lam_n = state.levels[static_cast<std::size_t>(n - 1)];
      const Signature& mu_n = target.levels[static_cast<std::size_t>(n - 1)];
      const Signature& mu_prev = target.levels[static_cast<std::size_t>(n - 2)];
      double delta = toeplitz_link_entry(specs_[static_cast<std::size_t>(n - 2)], lam_n, mu_prev);
      if (!(delta > 0.0)) return 0.0;
      val *= qrow_entry_uqn(omega_, n, q_, window_, lam_n, mu_n) *
             link_entry_uqn(n, q_, mu_n, mu_prev) / delta;
    }
    return val;
  }

 private:
  OmegaPoint omega_;
  int N_;
  double q_;
  CoeffWindow window_;
  std::vector<ToeplitzSpec> specs_;  // level n = 2..N
};

// Gibbs initialization: top signature fixed, lower levels drawn from the
// q-deformed links downward.
inline GTPattern sample_down_chain(const Signature& top, double q, Rng& rng) {
  const int N = static_cast<int>(top.size());
  GTPattern g;
  g.levels.resize(static_cast<std::size_t>(N));
  g.levels[static_cast<std::size_t>(N - 1)] = top;
  for (int n = N; n >= 2; --n) {
    auto row = linkrow_uqn(g.levels[static_cast<std::size_t>(n - 1)], q);
    std::vector<double> wts;
    wts.reserve(row.size());
    for (const auto& [mu, p] : row) wts.push_back(p);
    g.levels[static_cast<std::size_t>(n - 2)] = row[rng.categorical(wts)].first;
  }
  validate_pattern(g);
  return g;
}

}  // namespace gtdyn
