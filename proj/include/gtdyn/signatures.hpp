#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "gtdyn/common.hpp"

namespace gtdyn {

// ============================================================================
// Signatures: weakly decreasing integer vectors (negative parts allowed).
// ============================================================================

struct Signature {
  std::vector<Int> parts;

  Signature() = default;
  explicit Signature(std::vector<Int> p) : parts(std::move(p)) {}
  Signature(std::initializer_list<Int> p) : parts(p) {}

  std::size_t size() const { return parts.size(); }
  Int operator[](std::size_t i) const { return parts[i]; }

  Int sum() const {
    Int s = 0;
    for (Int p : parts) s += p;
    return s;
  }

  bool weakly_decreasing() const {
    for (std::size_t i = 1; i < parts.size(); ++i)
      if (parts[i - 1] < parts[i]) return false;
    return true;
  }

  friend bool operator==(const Signature& a, const Signature& b) { return a.parts == b.parts; }
  friend bool operator!=(const Signature& a, const Signature& b) { return a.parts != b.parts; }
  friend bool operator<(const Signature& a, const Signature& b) { return a.parts < b.parts; }
};

inline void validate_signature(const Signature& s) {
  if (s.size() == 0) throw std::invalid_argument("signature: length must be >= 1");
  if (!s.weakly_decreasing())
    throw std::invalid_argument("signature: parts must be weakly decreasing");
}

// Text encoding "l1,l2,...,lN" used by all CLI I/O.
inline std::string to_string(const Signature& s) {
  std::ostringstream os;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) os << ',';
    os << s.parts[i];
  }
  return os.str();
}

inline Signature parse_signature(const std::string& text) {
  std::vector<Int> parts;
  std::string tok;
  std::istringstream is(text);
  while (std::getline(is, tok, ',')) {
    if (tok.empty()) throw std::invalid_argument("signature text: empty component in '" + text + "'");
    std::size_t pos = 0;
    long long v = std::stoll(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument("signature text: bad integer '" + tok + "'");
    parts.push_back(v);
  }
  Signature s(std::move(parts));
  validate_signature(s);
  return s;
}

struct SignatureHash {
  std::size_t operator()(const Signature& s) const {
    std::size_t h = s.size();
    for (Int p : s.parts) h = h * 1000003u + std::hash<Int>{}(static_cast<Int>(p));
    return h;
  }
};

// ============================================================================
// Interlacing: mu < lam for mu of length N-1, lam of length N.
// ============================================================================

inline bool interlaces(const Signature& mu, const Signature& lam) {
  if (mu.size() + 1 != lam.size())
    throw std::invalid_argument("interlaces: lengths must differ by exactly 1");
  for (std::size_t k = 0; k < mu.size(); ++k)
    if (!(lam[k] >= mu[k] && mu[k] >= lam[k + 1])) return false;
  return true;
}

// ============================================================================
// X-coordinates: x_k(lam) = lam_{n-k+1} - n + k - 1, strictly increasing.
// ============================================================================

struct XConfig {
  std::vector<Int> points;

  std::size_t size() const { return points.size(); }
  Int operator[](std::size_t i) const { return points[i]; }
  friend bool operator==(const XConfig& a, const XConfig& b) { return a.points == b.points; }
};

inline XConfig to_xconfig(const Signature& lam) {
  validate_signature(lam);
  const Int n = static_cast<Int>(lam.size());
  XConfig x;
  x.points.resize(lam.size());
  for (Int k = 1; k <= n; ++k) x.points[k - 1] = lam[n - k] - n + k - 1;
  return x;
}

inline Signature from_xconfig(const XConfig& x) {
  const Int n = static_cast<Int>(x.size());
  if (n == 0) throw std::invalid_argument("xconfig: empty");
  for (Int k = 1; k < n; ++k)
    if (!(x.points[k - 1] < x.points[k]))
      throw std::invalid_argument("xconfig: points must be strictly increasing");
  std::vector<Int> parts(n);
  for (Int k = 1; k <= n; ++k) parts[n - k] = x.points[k - 1] + n - k + 1;
  return Signature(std::move(parts));
}

// mu < lam in x-coordinates: x_1(lam) < x_1(mu) <= x_2(lam) < ... <= x_n(lam).
inline bool x_interlaces(const XConfig& y, const XConfig& x) {
  if (y.size() + 1 != x.size())
    throw std::invalid_argument("x_interlaces: lengths must differ by exactly 1");
  for (std::size_t k = 0; k < y.size(); ++k)
    if (!(x.points[k] < y.points[k] && y.points[k] <= x.points[k + 1])) return false;
  return true;
}

// ============================================================================
// Gelfand-Tsetlin patterns: interlacing towers lam^(1) < ... < lam^(N).
// ============================================================================

struct GTPattern {
  std::vector<Signature> levels;  // levels[n-1] has length n

  std::size_t depth() const { return levels.size(); }
  const Signature& top() const { return levels.back(); }

  friend bool operator==(const GTPattern& a, const GTPattern& b) { return a.levels == b.levels; }
  friend bool operator<(const GTPattern& a, const GTPattern& b) { return a.levels < b.levels; }
};

inline void validate_pattern(const GTPattern& g) {
  if (g.depth() == 0) throw std::invalid_argument("gt pattern: empty");
  for (std::size_t n = 0; n < g.depth(); ++n) {
    if (g.levels[n].size() != n + 1)
      throw std::invalid_argument("gt pattern: level " + std::to_string(n + 1) + " has wrong length");
    validate_signature(g.levels[n]);
    if (n > 0 && !interlaces(g.levels[n - 1], g.levels[n]))
      throw std::invalid_argument("gt pattern: interlacing violated at level " + std::to_string(n + 1));
  }
}

// ============================================================================
// Finite boxes of signatures with a fixed, reproducible enumeration order.
// ============================================================================

struct SignatureBox {
  int N = 0;
  Int lo = 0, hi = 0;
  std::vector<Signature> states;  // lexicographic descending
  std::unordered_map<Signature, std::size_t, SignatureHash> index;

  std::size_t size() const { return states.size(); }
  const Signature& operator[](std::size_t i) const { return states[i]; }

  std::optional<std::size_t> find(const Signature& s) const {
    auto it = index.find(s);
    if (it == index.end()) return std::nullopt;
    return it->second;
  }

  bool contains(const Signature& s) const { return index.count(s) > 0; }
};

inline SignatureBox enumerate_box(int N, Int lo, Int hi) {
  if (N < 1) throw std::invalid_argument("enumerate_box: N must be >= 1");
  if (lo > hi) throw std::invalid_argument("enumerate_box: lo > hi");
  SignatureBox box;
  box.N = N;
  box.lo = lo;
  box.hi = hi;
  std::vector<Int> cur(N);
  // Depth-first with each part running from its upper bound down to lo gives
  // lexicographic-descending order.
  std::function<void(int, Int)> rec = [&](int depth, Int ub) {
    if (depth == N) {
      box.states.emplace_back(cur);
      return;
    }
    for (Int v = ub; v >= lo; --v) {
      cur[depth] = v;
      rec(depth + 1, v);
    }
  };
  rec(0, hi);
  box.index.reserve(box.states.size() * 2);
  for (std::size_t i = 0; i < box.states.size(); ++i) box.index.emplace(box.states[i], i);
  return box;
}

// All mu of length N-1 with mu < lam, lexicographic descending.
inline std::vector<Signature> enumerate_interlacing(const Signature& lam) {
  validate_signature(lam);
  const std::size_t n = lam.size();
  if (n < 2) throw std::invalid_argument("enumerate_interlacing: need length >= 2");
  std::vector<Signature> out;
  std::vector<Int> cur(n - 1);
  std::function<void(std::size_t)> rec = [&](std::size_t k) {
    if (k == n - 1) {
      out.emplace_back(cur);
      return;
    }
    for (Int v = lam[k]; v >= lam[k + 1]; --v) {
      cur[k] = v;
      rec(k + 1);
    }
  };
  rec(0);
  return out;
}

// All lam of length n+1 with mu < lam and parts confined to [lo, hi],
// lexicographic descending.
inline std::vector<Signature> enumerate_interlacing_above(const Signature& mu, Int lo, Int hi) {
  validate_signature(mu);
  const std::size_t n = mu.size();
  std::vector<Signature> out;
  std::vector<Int> cur(n + 1);
  std::function<void(std::size_t)> rec = [&](std::size_t k) {
    if (k == n + 1) {
      out.emplace_back(cur);
      return;
    }
    Int lb = (k < n) ? mu[k] : lo;
    Int ub = (k == 0) ? hi : mu[k - 1];
    lb = std::max(lb, lo);
    ub = std::min(ub, hi);
    for (Int v = ub; v >= lb; --v) {
      cur[k] = v;
      rec(k + 1);
    }
  };
  rec(0);
  return out;
}

}  // namespace gtdyn
