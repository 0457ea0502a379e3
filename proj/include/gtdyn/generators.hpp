#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gtdyn/linalg.hpp"
#include "gtdyn/parallel.hpp"
#include "gtdyn/signatures.hpp"
#include "gtdyn/symfunc.hpp"
#include "gtdyn/voiculescu.hpp"

namespace gtdyn {

// ============================================================================
// Markov generators on S_N built two independent ways:
//   - determinantal: L(lam,mu) = ratio(mu,lam) det[phi(mu_j-j-lam_i+i)] - id
//     (ratio = dim for U(N), spec_q2 with the 1/prod Phi(q^{-2(i-1)}) factor
//     for U_q(N)),
//   - fusion: L(a,b) = d_q(b)/d_q(a) sum_g P(g) N^b_{a,g}/d_q(g) - id.
// The determinantal exponent is mu_j - j - lam_i + i, the form derived in the
// proofs; the N=2 Haar-integral oracle pins this down (see oracle.hpp).
// ============================================================================

enum class KernelKind { generator, transition };
enum class BuildRoute { determinantal, fusion, toeplitz };

inline const char* route_name(BuildRoute r) {
  switch (r) {
    case BuildRoute::determinantal: return "determinantal";
    case BuildRoute::fusion: return "fusion";
    case BuildRoute::toeplitz: return "toeplitz";
  }
  return "?";
}

struct KernelMeta {
  OmegaPoint omega;
  int N = 0;
  double q = 1.0;  // 1.0 means classical U(N)
  BuildRoute route = BuildRoute::determinantal;
  double window_tail = 0.0;
  Int window_lo = 0, window_hi = 0;
};

struct KernelMatrix {
  SignatureBox box;
  KernelKind kind = KernelKind::generator;
  KernelMeta meta;
  std::vector<double> entries;

  double at(std::size_t i, std::size_t j) const { return entries[i * box.size() + j]; }
  double& at(std::size_t i, std::size_t j) { return entries[i * box.size() + j]; }

  double row_sum(std::size_t i) const {
    double s = 0.0;
    for (std::size_t j = 0; j < box.size(); ++j) s += at(i, j);
    return s;
  }
};

inline KernelMatrix to_transition(const KernelMatrix& gen) {
  if (gen.kind == KernelKind::transition) return gen;
  KernelMatrix out = gen;
  out.kind = KernelKind::transition;
  for (std::size_t i = 0; i < out.box.size(); ++i) out.at(i, i) += 1.0;
  return out;
}

inline KernelMatrix to_generator(const KernelMatrix& tr) {
  if (tr.kind == KernelKind::generator) return tr;
  KernelMatrix out = tr;
  out.kind = KernelKind::generator;
  for (std::size_t i = 0; i < out.box.size(); ++i) out.at(i, i) -= 1.0;
  return out;
}

// A free-space transition row: pairs (mu, Q(lam,mu)) over the window-bounded
// support, lexicographic-descending in mu.
using KernelRow = std::vector<std::pair<Signature, double>>;

namespace detail {

// All weakly decreasing mu with per-coordinate bounds lbs[j] <= mu_j <= ubs[j].
inline std::vector<Signature> enumerate_bounded(const std::vector<Int>& lbs,
                                                const std::vector<Int>& ubs) {
  const std::size_t n = lbs.size();
  std::vector<Signature> out;
  std::vector<Int> cur(n);
  std::function<void(std::size_t)> rec = [&](std::size_t k) {
    if (k == n) {
      out.emplace_back(cur);
      return;
    }
    Int ub = (k == 0) ? ubs[k] : std::min(ubs[k], cur[k - 1]);
    for (Int v = ub; v >= lbs[k]; --v) {
      cur[k] = v;
      rec(k + 1);
    }
  };
  rec(0);
  return out;
}

inline std::vector<Signature> row_support(const Signature& lam, const CoeffWindow& w) {
  const int N = static_cast<int>(lam.size());
  std::vector<Int> lbs(N), ubs(N);
  const Int base_lo = lam[N - 1] - N + w.n_min;  // min_i (lam_i - i) + n_min
  const Int base_hi = lam[0] - 1 + w.n_max;      // max_i (lam_i - i) + n_max
  for (int j = 1; j <= N; ++j) {
    lbs[j - 1] = base_lo + j;
    ubs[j - 1] = base_hi + j;
  }
  return enumerate_bounded(lbs, ubs);
}

// Stack-based determinant for the small sizes that dominate kernel builds.
inline double det_small(double* a, int n) {
  switch (n) {
    case 1:
      return a[0];
    case 2:
      return a[0] * a[3] - a[1] * a[2];
    case 3:
      return a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6]) +
             a[2] * (a[3] * a[7] - a[4] * a[6]);
    default: {
      // partial-pivot LU in place
      double det = 1.0;
      for (int k = 0; k < n; ++k) {
        int piv = k;
        double best = std::fabs(a[k * n + k]);
        for (int i = k + 1; i < n; ++i)
          if (std::fabs(a[i * n + k]) > best) {
            best = std::fabs(a[i * n + k]);
            piv = i;
          }
        if (best == 0.0) return 0.0;
        if (piv != k) {
          for (int j = k; j < n; ++j) std::swap(a[k * n + j], a[piv * n + j]);
          det = -det;
        }
        det *= a[k * n + k];
        for (int i = k + 1; i < n; ++i) {
          double f = a[i * n + k] / a[k * n + k];
          for (int j = k + 1; j < n; ++j) a[i * n + j] -= f * a[k * n + j];
        }
      }
      return det;
    }
  }
}

inline double det_phi(const CoeffWindow& w, const Signature& lam, const Signature& mu) {
  const int n = static_cast<int>(lam.size());
  if (n > 16) throw std::invalid_argument("det_phi: level too large");
  double buf[16 * 16];
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Int e = (mu[static_cast<std::size_t>(j)] - static_cast<Int>(j + 1)) -
              (lam[static_cast<std::size_t>(i)] - static_cast<Int>(i + 1));
      buf[i * n + j] = w.at(e);
    }
  return det_small(buf, n);
}

}  // namespace detail

// Ensures the window covers every exponent reachable inside a box; widens by
// recomputing the series window when necessary.
inline CoeffWindow window_for_box(const OmegaPoint& omega, const SignatureBox& box,
                                  CoeffWindow w, double pos_tilt = 1.0) {
  Int need = (box.hi - box.lo) + box.N - 1;
  Int lo = std::min<Int>(w.n_min, -need);
  Int hi = std::max<Int>(w.n_max, need);
  if (lo < w.n_min || hi > w.n_max) {
    if (lo < -kWindowCap || hi > kWindowCap)
      throw resource_error("window_for_box: required indices exceed the window cap");
    return phi_coeffs_series(omega, lo, hi, pos_tilt);
  }
  return w;
}

// --------------------------------------------------------------------------
// U(N) determinantal route.
// --------------------------------------------------------------------------

inline KernelRow qrow_un(const OmegaPoint& omega, int N, const CoeffWindow& w,
                         const Signature& lam) {
  if (static_cast<int>(lam.size()) != N) throw std::invalid_argument("qrow_un: bad row length");
  if (omega.is_trivial()) return {{lam, 1.0}};
  KernelRow row;
  const double dl = dim_u_d(lam);
  for (const auto& mu : detail::row_support(lam, w)) {
    double d = detail::det_phi(w, lam, mu);
    if (d == 0.0) continue;
    row.emplace_back(mu, d * dim_u_d(mu) / dl);
  }
  return row;
}

// --------------------------------------------------------------------------
// U_q(N) determinantal route (Lemma 7.1 preconditions enforced).
// --------------------------------------------------------------------------

inline double phi_product_q(const OmegaPoint& omega, int N, double q) {
  double p = 1.0;
  for (int i = 1; i <= N; ++i) p *= phi_eval(omega, std::pow(q, -2.0 * (i - 1)));
  return p;
}

inline KernelRow qrow_uqn(const OmegaPoint& omega, int N, double q, const CoeffWindow& w,
                          const Signature& lam) {
  if (static_cast<int>(lam.size()) != N) throw std::invalid_argument("qrow_uqn: bad row length");
  if (omega.is_trivial()) return {{lam, 1.0}};
  KernelRow row;
  const double denom = phi_product_q(omega, N, q);
  const double sl = spec_q2(lam, N, q);
  for (const auto& mu : detail::row_support(lam, w)) {
    double d = detail::det_phi(w, lam, mu);
    if (d == 0.0) continue;
    row.emplace_back(mu, d * spec_q2(mu, N, q) / (sl * denom));
  }
  return row;
}

// Unified row access: q = 1 -> U(N), q in (0,1) -> U_q(N).
inline KernelRow qrow(const OmegaPoint& omega, int N, double q, const CoeffWindow& w,
                      const Signature& lam) {
  return q == 1.0 ? qrow_un(omega, N, w, lam) : qrow_uqn(omega, N, q, w, lam);
}

namespace detail {

inline KernelMatrix build_determinantal(const OmegaPoint& omega, int N, double q,
                                        const SignatureBox& box, CoeffWindow w,
                                        unsigned workers) {
  if (box.N != N) throw std::invalid_argument("generator: box level mismatch");
  validate_omega(omega);
  if (q != 1.0) validate_q_annulus(omega, N, q);
  w = window_for_box(omega, box, w, q == 1.0 ? 1.0 : std::pow(q, -2.0 * (N - 1)));
  KernelMatrix k;
  k.box = box;
  k.kind = KernelKind::generator;
  k.meta = {omega, N, q, BuildRoute::determinantal, w.tail_mass, w.n_min, w.n_max};
  k.entries.assign(box.size() * box.size(), 0.0);
  parallel_for(box.size(), [&](std::size_t i) {
    for (const auto& [mu, val] : qrow(omega, N, q, w, box[i])) {
      auto j = box.find(mu);
      if (j) k.at(i, *j) += val;
    }
    k.at(i, i) -= 1.0;
  }, workers);
  return k;
}

}  // namespace detail

inline KernelMatrix generator_un(const OmegaPoint& omega, int N, const SignatureBox& box,
                                 std::optional<CoeffWindow> window = std::nullopt,
                                 unsigned workers = 0) {
  CoeffWindow w = window ? *window : phi_coeffs_default(omega);
  return detail::build_determinantal(omega, N, 1.0, box, w, workers);
}

inline KernelMatrix generator_uqn(const OmegaPoint& omega, int N, double q,
                                  const SignatureBox& box,
                                  std::optional<CoeffWindow> window = std::nullopt,
                                  unsigned workers = 0) {
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("generator_uqn: q must lie in (0,1)");
  CoeffWindow w = window ? *window : phi_coeffs_for_q(omega, N, q);
  return detail::build_determinantal(omega, N, q, box, w, workers);
}

// --------------------------------------------------------------------------
// Fusion route (the oracle): only LR coefficients and dimensions.
// --------------------------------------------------------------------------

// Memoizes LR tables modulo the determinant twist (both arguments shifted so
// their last parts vanish).
class LRCache {
 public:
  const LRTable& get(const Signature& alpha, const Signature& gamma) {
    const int n = static_cast<int>(alpha.size());
    Int sa = alpha[n - 1], sc = gamma[n - 1];
    std::vector<Int> ka(n), kc(n);
    for (int i = 0; i < n; ++i) {
      ka[i] = alpha[i] - sa;
      kc[i] = gamma[i] - sc;
    }
    auto key = std::make_pair(ka, kc);
    auto it = memo_.find(key);
    if (it == memo_.end())
      it = memo_.emplace(key, lr_coeffs(Signature(ka), Signature(kc))).first;
    return it->second;
  }

  // Expansion of alpha x gamma with keys shifted back to the caller's frame.
  std::vector<std::pair<Signature, long long>> expand(const Signature& alpha,
                                                      const Signature& gamma) {
    const int n = static_cast<int>(alpha.size());
    Int shift = alpha[n - 1] + gamma[n - 1];
    const LRTable& t = get(alpha, gamma);
    std::vector<std::pair<Signature, long long>> out;
    out.reserve(t.entries.size());
    for (const auto& [beta, c] : t.entries) {
      std::vector<Int> parts = beta.parts;
      for (auto& p : parts) p += shift;
      out.emplace_back(Signature(std::move(parts)), c);
    }
    return out;
  }

 private:
  std::map<std::pair<std::vector<Int>, std::vector<Int>>, LRTable> memo_;
};

using WeightMap = std::map<Signature, double>;

inline void validate_weights(const WeightMap& weights, int N, double tol = 1e-12) {
  if (weights.empty()) throw std::invalid_argument("fusion weights: empty support");
  double total = 0.0;
  for (const auto& [sig, p] : weights) {
    if (static_cast<int>(sig.size()) != N)
      throw std::invalid_argument("fusion weights: support entry of wrong length");
    validate_signature(sig);
    if (p < 0) throw std::invalid_argument("fusion weights: negative weight");
    total += p;
  }
  if (std::fabs(total - 1.0) > tol)
    throw std::invalid_argument("fusion weights: must sum to 1 within tolerance");
}

// Free-space fusion row: Q(alpha, .) for the character with decomposition
// `weights`.
inline KernelRow qrow_fusion(const WeightMap& weights, int N, double q, const Signature& alpha,
                             LRCache& cache) {
  std::map<Signature, double> acc;
  const double da = dq_dim(alpha, N, q);
  for (const auto& [gamma, p] : weights) {
    if (p == 0.0) continue;
    const double dg = dq_dim(gamma, N, q);
    for (const auto& [beta, c] : cache.expand(alpha, gamma))
      acc[beta] += p * static_cast<double>(c) * dq_dim(beta, N, q) / (da * dg);
  }
  KernelRow row(acc.begin(), acc.end());
  std::sort(row.begin(), row.end(),
            [](const auto& a, const auto& b) { return b.first < a.first; });
  return row;
}

inline KernelMatrix generator_fusion(const WeightMap& weights, int N, double q,
                                     const SignatureBox& box, unsigned workers = 0) {
  if (!(q > 0.0 && q <= 1.0))
    throw std::invalid_argument("generator_fusion: q must lie in (0,1]");
  if (box.N != N) throw std::invalid_argument("generator_fusion: box level mismatch");
  validate_weights(weights, N);
  KernelMatrix k;
  k.box = box;
  k.kind = KernelKind::generator;
  k.meta.N = N;
  k.meta.q = q;
  k.meta.route = BuildRoute::fusion;
  k.entries.assign(box.size() * box.size(), 0.0);
  std::vector<LRCache> caches(worker_count(workers));
  // one cache per worker; rows are disjoint so this stays deterministic
  std::size_t chunk = (box.size() + caches.size() - 1) / caches.size();
  parallel_for(box.size(), [&](std::size_t i) {
    LRCache& cache = caches[std::min(i / chunk, caches.size() - 1)];
    for (const auto& [beta, val] : qrow_fusion(weights, N, q, box[i], cache)) {
      auto j = box.find(beta);
      if (j) k.at(i, *j) += val;
    }
    k.at(i, i) -= 1.0;
  }, workers);
  return k;
}

// --------------------------------------------------------------------------
// q^2-Schur measures of Lemma 7.1 and the classical boundary weights; these
// feed the fusion oracle and the CLI `measure` subcommand.
// --------------------------------------------------------------------------

struct MeasureVector {
  SignatureBox box;
  std::vector<double> probs;
  double tail = 0.0;  // certified mass outside the box

  double mass() const {
    double s = 0.0;
    for (double p : probs) s += p;
    return s;
  }
};

inline double q2_schur_weight(const OmegaPoint& omega, int k, double q, const CoeffWindow& w,
                              double phi_prod, const Signature& lam) {
  const std::size_t n = lam.size();
  Matrix<double> m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      m(i, j) = w.at(lam[i] - static_cast<Int>(i + 1) + static_cast<Int>(j + 1));
  double d = det_lu(m);
  if (d == 0.0) return 0.0;
  return d * spec_q2(lam, k, q) / phi_prod;
}

inline MeasureVector q2_schur_measure(const OmegaPoint& omega, int k, double q,
                                      const SignatureBox& box,
                                      std::optional<CoeffWindow> window = std::nullopt) {
  if (box.N != k) throw std::invalid_argument("q2_schur_measure: box level mismatch");
  validate_q_annulus(omega, k, q);
  const double rho = std::pow(q, -2.0 * (k - 1));
  CoeffWindow w = window ? window_for_box(omega, box, *window, rho)
                         : window_for_box(omega, box, phi_coeffs_for_q(omega, k, q), rho);
  const double phi_prod = phi_product_q(omega, k, q);
  MeasureVector mv;
  mv.box = box;
  mv.probs.resize(box.size());
  for (std::size_t i = 0; i < box.size(); ++i)
    mv.probs[i] = q2_schur_weight(omega, k, q, w, phi_prod, box[i]);
  mv.tail = std::max(0.0, 1.0 - mv.mass());
  return mv;
}

}  // namespace gtdyn
