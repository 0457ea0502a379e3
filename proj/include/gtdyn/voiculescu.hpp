#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gtdyn/common.hpp"
#include "gtdyn/linalg.hpp"
#include "gtdyn/rng.hpp"

namespace gtdyn {

// ============================================================================
// Boundary parameters omega = (alpha+-, beta+-, gamma+-) and the function
//   Phi_omega(z) = e^{g+(z-1) + g-(1/z-1)}
//                  * prod_i (1 + b+_i (z-1)) / (1 - a+_i (z-1))
//                  * prod_i (1 + b-_i (1/z-1)) / (1 - a-_i (1/z-1)).
// The gamma+- here are the exponential weights themselves (no delta
// bookkeeping); alpha/beta lists are finite by construction.
// ============================================================================

struct OmegaPoint {
  std::vector<double> alpha_plus, beta_plus, alpha_minus, beta_minus;
  double gamma_plus = 0.0, gamma_minus = 0.0;

  bool is_trivial() const {
    return alpha_plus.empty() && beta_plus.empty() && alpha_minus.empty() &&
           beta_minus.empty() && gamma_plus == 0.0 && gamma_minus == 0.0;
  }
};

inline void validate_omega(const OmegaPoint& w) {
  auto check_list = [](const std::vector<double>& v, const char* name) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!(v[i] >= 0.0))
        throw std::invalid_argument(std::string("omega: ") + name + " entries must be >= 0");
      if (i > 0 && v[i] > v[i - 1])
        throw std::invalid_argument(std::string("omega: ") + name + " must be weakly decreasing");
    }
  };
  check_list(w.alpha_plus, "alpha_plus");
  check_list(w.beta_plus, "beta_plus");
  check_list(w.alpha_minus, "alpha_minus");
  check_list(w.beta_minus, "beta_minus");
  if (!(w.gamma_plus >= 0.0 && w.gamma_minus >= 0.0))
    throw std::invalid_argument("omega: gamma_plus/gamma_minus must be >= 0");
  double b1p = w.beta_plus.empty() ? 0.0 : w.beta_plus[0];
  double b1m = w.beta_minus.empty() ? 0.0 : w.beta_minus[0];
  if (b1p + b1m > 1.0 + 1e-15)
    throw std::invalid_argument("omega: beta+_1 + beta-_1 <= 1 is required");
}

inline nlohmann::json omega_to_json(const OmegaPoint& w) {
  return nlohmann::json{{"alpha_plus", w.alpha_plus},   {"beta_plus", w.beta_plus},
                        {"alpha_minus", w.alpha_minus}, {"beta_minus", w.beta_minus},
                        {"gamma_plus", w.gamma_plus},   {"gamma_minus", w.gamma_minus}};
}

inline OmegaPoint omega_from_json(const nlohmann::json& j) {
  OmegaPoint w;
  w.alpha_plus = j.value("alpha_plus", std::vector<double>{});
  w.beta_plus = j.value("beta_plus", std::vector<double>{});
  w.alpha_minus = j.value("alpha_minus", std::vector<double>{});
  w.beta_minus = j.value("beta_minus", std::vector<double>{});
  w.gamma_plus = j.value("gamma_plus", 0.0);
  w.gamma_minus = j.value("gamma_minus", 0.0);
  validate_omega(w);
  return w;
}

// Radii of the annulus of analyticity: r_minus < |z| < r_plus.
inline double annulus_outer(const OmegaPoint& w) {
  if (w.alpha_plus.empty() || w.alpha_plus[0] == 0.0)
    return std::numeric_limits<double>::infinity();
  return 1.0 + 1.0 / w.alpha_plus[0];
}

inline double annulus_inner(const OmegaPoint& w) {
  if (w.alpha_minus.empty() || w.alpha_minus[0] == 0.0) return 0.0;
  return w.alpha_minus[0] / (1.0 + w.alpha_minus[0]);
}

template <class C>
C phi_eval_t(const OmegaPoint& w, const C& z) {
  if (std::abs(z) == 0.0) throw std::domain_error("phi_eval: z must be nonzero");
  double r = std::abs(z);
  if (!(r < annulus_outer(w)))
    throw std::domain_error("phi_eval: |z| at or beyond the pole 1 + 1/alpha+_1 of an alpha_plus factor");
  if (!(r > annulus_inner(w)))
    throw std::domain_error("phi_eval: |z| at or beyond the pole of an alpha_minus factor");
  const C one(1.0);
  C zm = one / z;
  C val = std::exp(w.gamma_plus * (z - one) + w.gamma_minus * (zm - one));
  for (double b : w.beta_plus) val *= one + b * (z - one);
  for (double a : w.alpha_plus) val /= one - a * (z - one);
  for (double b : w.beta_minus) val *= one + b * (zm - one);
  for (double a : w.alpha_minus) val /= one - a * (zm - one);
  return val;
}

inline std::complex<double> phi_eval(const OmegaPoint& w, std::complex<double> z) {
  return phi_eval_t(w, z);
}

inline double phi_eval(const OmegaPoint& w, double z) {
  return phi_eval_t(w, std::complex<double>(z, 0.0)).real();
}

// ============================================================================
// Coefficient windows: phi_omega(n) on [n_min, n_max] plus an exact leftover
// bound tail_mass = 1 - sum(window). All factor coefficient sequences are
// nonnegative and sum to 1, so truncation is monotone and the leftover is a
// certified upper bound on the mass outside the window.
// ============================================================================

struct CoeffWindow {
  Int n_min = 0, n_max = 0;
  std::vector<double> coeffs;
  double tail_mass = 0.0;

  double at(Int n) const {
    if (n < n_min || n > n_max) return 0.0;
    return coeffs[static_cast<std::size_t>(n - n_min)];
  }
  double sum() const {
    double s = 0.0;
    for (double c : coeffs) s += c;
    return s;
  }
};

namespace detail {

template <class T>
struct SeqT {
  Int lo = 0;
  std::vector<T> c;

  Int hi() const { return lo + static_cast<Int>(c.size()) - 1; }
};

using Seq = SeqT<double>;

template <class T>
SeqT<T> convolve(const SeqT<T>& a, const SeqT<T>& b) {
  SeqT<T> out;
  out.lo = a.lo + b.lo;
  out.c.assign(a.c.size() + b.c.size() - 1, T(0));
  for (std::size_t i = 0; i < a.c.size(); ++i) {
    if (a.c[i] == T(0)) continue;
    for (std::size_t j = 0; j < b.c.size(); ++j) out.c[i + j] += a.c[i] * b.c[j];
  }
  return out;
}

// Per-factor expansions; each is a probability sequence truncated where the
// terms drop below machine dust. Positive-direction factors are cut against
// the tilted weight term * pos_tilt^n: the q-case formulas reweight phi(n) by
// q^{-2(N-1)n}, so an untilted cut would leak mass through the normalizers.
// Negative-direction factors only reach n <= 0 where the tilt helps, so the
// plain cut suffices there.
template <class T = double>
SeqT<T> seq_gamma(double g, int dir, double tilt) {  // e^{g(z-1)}: e^{-g} g^n / n!
  SeqT<T> s;
  s.lo = 0;
  T term = std::exp(T(-g));
  double t = (dir > 0) ? tilt : 1.0;
  double tilted = static_cast<double>(term), peak = tilted;
  s.c.push_back(term);
  for (Int n = 1;; ++n) {
    term *= T(g) / static_cast<T>(n);
    tilted *= t * g / static_cast<double>(n);
    peak = std::max(peak, tilted);
    s.c.push_back(term);
    if (n > static_cast<Int>(g * t) + 4 && tilted < 1e-30 * peak) break;
    if (n > 100000) break;
  }
  if (dir < 0) {
    std::reverse(s.c.begin(), s.c.end());
    s.lo = -(static_cast<Int>(s.c.size()) - 1);
  }
  return s;
}

template <class T = double>
SeqT<T> seq_beta(double b, int dir) {  // 1 + b(z-1): (1-b, b)
  SeqT<T> s;
  if (dir > 0) {
    s.lo = 0;
    s.c = {T(1) - T(b), T(b)};
  } else {
    s.lo = -1;
    s.c = {T(b), T(1) - T(b)};
  }
  return s;
}

template <class T = double>
SeqT<T> seq_alpha(double a, int dir, double tilt) {  // 1/(1-a(z-1)): a^n/(1+a)^{n+1}
  SeqT<T> s;
  s.lo = 0;
  T ratio = T(a) / (T(1) + T(a));
  double t = (dir > 0) ? tilt : 1.0;
  if (static_cast<double>(ratio) * t >= 1.0)
    throw std::domain_error("phi coefficients: alpha factor diverges under the q-tilt "
                            "(annulus condition violated)");
  T term = T(1) / (T(1) + T(a));
  double tilted = static_cast<double>(term);
  s.c.push_back(term);
  while (tilted > 1e-32 && s.c.size() < 200000) {
    term *= ratio;
    tilted *= static_cast<double>(ratio) * t;
    s.c.push_back(term);
  }
  if (dir < 0) {
    std::reverse(s.c.begin(), s.c.end());
    s.lo = -(static_cast<Int>(s.c.size()) - 1);
  }
  return s;
}

template <class T = double>
SeqT<T> phi_full_product(const OmegaPoint& w, double pos_tilt = 1.0) {
  SeqT<T> acc;
  acc.lo = 0;
  acc.c = {T(1)};
  if (w.gamma_plus > 0) acc = convolve(acc, seq_gamma<T>(w.gamma_plus, +1, pos_tilt));
  if (w.gamma_minus > 0) acc = convolve(acc, seq_gamma<T>(w.gamma_minus, -1, pos_tilt));
  for (double b : w.beta_plus)
    if (b > 0) acc = convolve(acc, seq_beta<T>(b, +1));
  for (double b : w.beta_minus)
    if (b > 0) acc = convolve(acc, seq_beta<T>(b, -1));
  for (double a : w.alpha_plus)
    if (a > 0) acc = convolve(acc, seq_alpha<T>(a, +1, pos_tilt));
  for (double a : w.alpha_minus)
    if (a > 0) acc = convolve(acc, seq_alpha<T>(a, -1, pos_tilt));
  return acc;
}

}  // namespace detail

// Factorwise expansion + convolution on a fixed window. pos_tilt > 1 keeps
// enough positive-side factor terms that sums of phi(n) * pos_tilt^n are
// accurate too (the q-case normalizers need this).
inline CoeffWindow phi_coeffs_series(const OmegaPoint& w, Int n_min, Int n_max,
                                     double pos_tilt = 1.0) {
  validate_omega(w);
  if (n_min > n_max) throw std::invalid_argument("phi_coeffs_series: empty window");
  detail::Seq full = detail::phi_full_product(w, pos_tilt);
  CoeffWindow out;
  out.n_min = n_min;
  out.n_max = n_max;
  out.coeffs.assign(static_cast<std::size_t>(n_max - n_min + 1), 0.0);
  for (Int n = n_min; n <= n_max; ++n) {
    if (n < full.lo || n > full.hi()) continue;
    out.coeffs[static_cast<std::size_t>(n - n_min)] = full.c[static_cast<std::size_t>(n - full.lo)];
  }
  out.tail_mass = std::max(0.0, 1.0 - out.sum());
  return out;
}

inline constexpr Int kWindowCap = 4096;

// Smallest symmetric window with certified tail below `tol`.
inline CoeffWindow phi_coeffs_default(const OmegaPoint& w, double tol = 1e-12) {
  validate_omega(w);
  detail::Seq full = detail::phi_full_product(w);
  double total = 0.0;
  for (double c : full.c) total += c;
  double outside = std::max(0.0, 1.0 - total);
  if (outside >= tol)
    throw resource_error("phi_coeffs_default: factor truncation alone exceeds the tail tolerance");
  Int w_lo = std::min<Int>(full.lo, 0), w_hi = std::max<Int>(full.hi(), 0);
  for (Int half = 1;; ++half) {
    Int lo = std::max(w_lo, -half), hi = std::min(w_hi, half);
    double inside = 0.0;
    for (Int n = lo; n <= hi; ++n)
      inside += full.c[static_cast<std::size_t>(n - full.lo)];
    if (1.0 - inside < tol) return phi_coeffs_series(w, lo, hi);
    if (lo == w_lo && hi == w_hi)
      return phi_coeffs_series(w, lo, hi);  // full support; leftover is factor dust
    if (half >= kWindowCap)
      throw resource_error("phi_coeffs_default: window cap |n| <= 4096 exceeded before tail < tol");
  }
}

// Window for the q-deformed kernels at level N: besides the plain tail, the
// positive side is grown until the tilted leftover
//   Phi(rho) - sum_{n <= hi} phi(n) rho^n,   rho = q^{-2(N-1)},
// drops below tol * Phi(rho). Both leftovers are certified (all terms are
// nonnegative and Phi(rho) is evaluated in closed form).
inline CoeffWindow phi_coeffs_for_q(const OmegaPoint& w, int N, double q, double tol = 1e-12);

// Discrete contour integral phi(n) = (1/m) sum_j Phi(e^{2pi i j/m}) e^{-2pi i j n/m}.
inline CoeffWindow phi_coeffs_contour(const OmegaPoint& w, Int n_min, Int n_max, Int m) {
  validate_omega(w);
  if (n_min > n_max) throw std::invalid_argument("phi_coeffs_contour: empty window");
  if (m < 4 * (n_max - n_min + 1))
    throw std::invalid_argument("phi_coeffs_contour: grid size must be >= 4 * window length");
  if (!(annulus_outer(w) > 1.0) || !(annulus_inner(w) < 1.0))
    throw std::domain_error("phi_coeffs_contour: unit circle not inside the annulus of analyticity");
  std::vector<std::complex<double>> vals(static_cast<std::size_t>(m));
  const double twopi = 2.0 * std::acos(-1.0);
  for (Int j = 0; j < m; ++j) {
    double th = twopi * static_cast<double>(j) / static_cast<double>(m);
    vals[static_cast<std::size_t>(j)] = phi_eval(w, std::complex<double>(std::cos(th), std::sin(th)));
  }
  CoeffWindow out;
  out.n_min = n_min;
  out.n_max = n_max;
  out.coeffs.assign(static_cast<std::size_t>(n_max - n_min + 1), 0.0);
  for (Int n = n_min; n <= n_max; ++n) {
    const Int nm = ((n % m) + m) % m;
    std::complex<double> acc(0.0, 0.0);
    for (Int j = 0; j < m; ++j) {
      double th = -twopi * static_cast<double>((j * nm) % m) / static_cast<double>(m);
      acc += vals[static_cast<std::size_t>(j)] * std::complex<double>(std::cos(th), std::sin(th));
    }
    out.coeffs[static_cast<std::size_t>(n - n_min)] = acc.real() / static_cast<double>(m);
  }
  out.tail_mass = std::max(0.0, 1.0 - out.sum());
  return out;
}

// ============================================================================
// Total positivity spot checks: sampled minors det[phi(m_i + j)] >= -tol.
// ============================================================================

struct TotalPositivityReport {
  double worst_minor = std::numeric_limits<double>::infinity();
  std::vector<Int> worst_rows;
  int order = 0;
  long long checked = 0;

  bool ok(double tol) const { return worst_minor >= -tol; }
};

inline TotalPositivityReport check_total_positivity(const CoeffWindow& w, int k, long long trials,
                                                    std::uint64_t seed = 1) {
  if (k < 1) throw std::invalid_argument("check_total_positivity: order must be >= 1");
  TotalPositivityReport rep;
  rep.order = k;
  const Int lo = w.n_min, hi = w.n_max - k;
  if (hi < lo) return rep;
  Rng rng(seed);
  const Int span = hi - lo + 1;
  for (long long t = 0; t < trials; ++t) {
    // strictly decreasing rows m_1 > ... > m_k
    std::vector<Int> rows;
    while (static_cast<int>(rows.size()) < k) {
      Int m = lo + static_cast<Int>(rng.raw() % static_cast<std::uint64_t>(span));
      if (std::find(rows.begin(), rows.end(), m) == rows.end()) rows.push_back(m);
    }
    std::sort(rows.rbegin(), rows.rend());
    Matrix<double> a(static_cast<std::size_t>(k), static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) a(i, j) = w.at(rows[static_cast<std::size_t>(i)] + j + 1);
    double d = det_lu(a);
    ++rep.checked;
    if (d < rep.worst_minor) {
      rep.worst_minor = d;
      rep.worst_rows = rows;
    }
  }
  if (rep.checked == 0) rep.worst_minor = 0.0;
  return rep;
}

// ============================================================================
// Validation of the q-case preconditions (annulus containing 1..q^{-2(N-1)}
// and Phi positive there).
// ============================================================================

inline void validate_q_annulus(const OmegaPoint& w, int N, double q) {
  validate_omega(w);
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("q must lie in (0,1)");
  if (N < 1) throw std::invalid_argument("N must be >= 1");
  double zmax = std::pow(q, -2.0 * (N - 1));
  if (!(zmax < annulus_outer(w))) {
    std::ostringstream os;
    os << "q-annulus condition violated: need alpha+_1 < (q^{-2(N-1)} - 1)^{-1}, got alpha+_1 = "
       << (w.alpha_plus.empty() ? 0.0 : w.alpha_plus[0]) << " with q^{-2(N-1)} = " << zmax;
    throw std::domain_error(os.str());
  }
  for (int i = 1; i <= N; ++i) {
    double z = std::pow(q, -2.0 * (i - 1));
    double v = phi_eval(w, z);
    if (!(v > 0.0)) {
      std::ostringstream os;
      os << "positivity condition violated: Phi_omega(q^{-2(i-1)}) = " << v << " <= 0 at i = " << i;
      throw std::domain_error(os.str());
    }
  }
}

inline CoeffWindow phi_coeffs_for_q(const OmegaPoint& w, int N, double q, double tol) {
  validate_q_annulus(w, N, q);
  const double rho = std::pow(q, -2.0 * (N - 1));
  detail::Seq full = detail::phi_full_product(w, rho);
  const double target = phi_eval(w, rho);

  Int w_lo = std::min<Int>(full.lo, 0), w_hi = std::max<Int>(full.hi(), 0);
  for (Int half = 1;; ++half) {
    Int lo = std::max(w_lo, -half), hi = std::min(w_hi, half);
    double inside = 0.0, tilted = 0.0, weight = std::pow(rho, static_cast<double>(lo));
    for (Int n = lo; n <= hi; ++n) {
      double c = full.c[static_cast<std::size_t>(n - full.lo)];
      inside += c;
      tilted += c * weight;
      weight *= rho;
    }
    bool plain_ok = 1.0 - inside < tol;
    bool tilt_ok = target - tilted < tol * target;
    if ((plain_ok && tilt_ok) || (lo == w_lo && hi == w_hi)) {
      CoeffWindow out = phi_coeffs_series(w, lo, hi, rho);
      return out;
    }
    if (half >= kWindowCap)
      throw resource_error("phi_coeffs_for_q: window cap |n| <= 4096 exceeded before tails < tol");
  }
}

// Support prediction: when only {beta+, alpha-, gamma+ / ...} act on one side
// the coefficients live on a half-line.
inline std::optional<Int> support_upper_bound(const OmegaPoint& w) {
  if (w.gamma_plus > 0) return std::nullopt;
  for (double a : w.alpha_plus)
    if (a > 0) return std::nullopt;
  Int up = 0;
  for (double b : w.beta_plus)
    if (b > 0) ++up;
  return up;
}

inline std::optional<Int> support_lower_bound(const OmegaPoint& w) {
  if (w.gamma_minus > 0) return std::nullopt;
  for (double a : w.alpha_minus)
    if (a > 0) return std::nullopt;
  Int down = 0;
  for (double b : w.beta_minus)
    if (b > 0) ++down;
  return -down;
}

}  // namespace gtdyn
