#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "gtdyn/generators.hpp"
#include "gtdyn/rng.hpp"
#include "gtdyn/signatures.hpp"

namespace gtdyn {

// ============================================================================
// Continuous-time semigroup Q_t = exp(t L) by uniformization:
//   Q_t = e^{-t} sum_k t^k/k! Q^k.
// Q = L + I is already (sub)stochastic, so the uniformization rate is exactly
// 1 and the Poisson tail truncation error is certified.
// ============================================================================

struct PoissonTruncation {
  int terms = 0;     // series truncated after k = terms - 1
  double tail = 0.0; // leftover Poisson mass
};

inline PoissonTruncation poisson_truncation(double t, double tol) {
  if (t < 0) throw std::invalid_argument("poisson_truncation: t must be >= 0");
  PoissonTruncation out;
  double term = std::exp(-t);
  double cum = term;
  int k = 0;
  while (1.0 - cum >= tol && k < 100000) {
    ++k;
    term *= t / static_cast<double>(k);
    cum += term;
  }
  out.terms = k + 1;
  out.tail = std::max(0.0, 1.0 - cum);
  return out;
}

struct Semigroup {
  KernelMatrix matrix;  // kind = transition, at time t
  double t = 0.0;
  int terms = 0;
  double tol = 0.0;
};

inline Semigroup semigroup_at(const KernelMatrix& Q, double t, double tol = 1e-12) {
  if (Q.kind != KernelKind::transition)
    throw std::invalid_argument("semigroup_at: transition kernel expected (use to_transition)");
  if (t < 0) throw std::invalid_argument("semigroup_at: t must be >= 0");
  const std::size_t n = Q.box.size();
  auto trunc = poisson_truncation(t, tol);

  Semigroup out;
  out.t = t;
  out.terms = trunc.terms;
  out.tol = tol;
  out.matrix = Q;
  out.matrix.entries.assign(n * n, 0.0);

  // power = Q^k, accumulated with Poisson(t) weights
  Matrix<double> power(n, n), qm(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      power(i, j) = (i == j) ? 1.0 : 0.0;
      qm(i, j) = Q.at(i, j);
    }
  double weight = std::exp(-t);
  for (int k = 0;; ++k) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) out.matrix.entries[i * n + j] += weight * power(i, j);
    if (k + 1 >= trunc.terms) break;
    power = matmul(power, qm);
    weight *= t / static_cast<double>(k + 1);
  }
  return out;
}

inline std::vector<double> evolve_measure(const std::vector<double>& p0, const KernelMatrix& Qt) {
  const std::size_t n = Qt.box.size();
  if (p0.size() != n) throw std::invalid_argument("evolve_measure: support mismatch");
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (p0[i] == 0.0) continue;
    for (std::size_t j = 0; j < n; ++j) out[j] += p0[i] * Qt.at(i, j);
  }
  return out;
}

// ============================================================================
// Exact trajectory sampling: a Poisson(t_end) number of Q-jumps at uniform
// times (self-loops kept; only state changes are recorded as path points).
// ============================================================================

struct SamplePath {
  std::vector<std::pair<double, Signature>> points;  // (time, state), right continuous
  bool exited = false;  // true when a jump left the truncated box
};

inline SamplePath sample_path(const KernelMatrix& Q, const Signature& start, double t_end,
                              std::uint64_t seed) {
  if (Q.kind != KernelKind::transition)
    throw std::invalid_argument("sample_path: transition kernel expected");
  if (t_end < 0) throw std::invalid_argument("sample_path: t_end must be >= 0");
  auto start_idx = Q.box.find(start);
  if (!start_idx) throw std::invalid_argument("sample_path: start state outside the box");

  Rng rng(seed);
  SamplePath path;
  path.points.emplace_back(0.0, start);
  long long jumps = rng.poisson(t_end);
  std::vector<double> times(static_cast<std::size_t>(jumps));
  for (auto& tm : times) tm = rng.uniform() * t_end;
  std::sort(times.begin(), times.end());

  std::size_t cur = *start_idx;
  const std::size_t n = Q.box.size();
  for (double tm : times) {
    double u = rng.uniform();
    double acc = 0.0;
    std::size_t next = n;
    for (std::size_t j = 0; j < n; ++j) {
      acc += Q.at(cur, j);
      if (u < acc) {
        next = j;
        break;
      }
    }
    if (next == n) {  // fell into the truncation deficit: the jump leaves the box
      path.exited = true;
      return path;
    }
    if (next != cur) {
      cur = next;
      path.points.emplace_back(tm, Q.box[cur]);
    }
  }
  return path;
}

// ============================================================================
// Free-space evolution on sparse measures; rows are generated from the
// determinantal formula on demand and cached. Used where dense boxes would
// be wastefully large (time-t intertwining checks at N = 3).
// ============================================================================

using SparseMeasure = std::map<Signature, double>;

class FreeEvolver {
 public:
  FreeEvolver(OmegaPoint omega, int N, double q, CoeffWindow window)
      : omega_(std::move(omega)), N_(N), q_(q), window_(std::move(window)) {}

  const KernelRow& row(const Signature& lam) {
    auto it = cache_.find(lam);
    if (it == cache_.end())
      it = cache_.emplace(lam, qrow(omega_, N_, q_, window_, lam)).first;
    return it->second;
  }

  // One application of Q; entries below `prune` are dropped and their total
  // is accounted in pruned_mass.
  SparseMeasure apply_q(const SparseMeasure& v, double prune, double& pruned_mass) {
    SparseMeasure out;
    for (const auto& [lam, mass] : v) {
      if (mass == 0.0) continue;
      for (const auto& [mu, p] : row(lam)) out[mu] += mass * p;
    }
    if (prune > 0.0) {
      for (auto it = out.begin(); it != out.end();) {
        if (std::fabs(it->second) < prune) {
          pruned_mass += std::fabs(it->second);
          it = out.erase(it);
        } else {
          ++it;
        }
      }
    }
    return out;
  }

  // v0 exp(tL) by uniformization.
  SparseMeasure evolve(const SparseMeasure& v0, double t, double tol, double prune,
                       double& pruned_mass) {
    auto trunc = poisson_truncation(t, tol);
    SparseMeasure power = v0, out;
    double weight = std::exp(-t);
    for (int k = 0;; ++k) {
      for (const auto& [sig, mass] : power) out[sig] += weight * mass;
      if (k + 1 >= trunc.terms) break;
      power = apply_q(power, prune, pruned_mass);
      weight *= t / static_cast<double>(k + 1);
    }
    return out;
  }

  const CoeffWindow& window() const { return window_; }

 private:
  OmegaPoint omega_;
  int N_;
  double q_;
  CoeffWindow window_;
  std::map<Signature, KernelRow> cache_;
};

}  // namespace gtdyn
