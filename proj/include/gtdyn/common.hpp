#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace gtdyn {

using Int = long long;
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Raised when a certified truncation (coefficient window, state box) would
// have to grow beyond its hard cap.
class resource_error : public std::runtime_error {
 public:
  explicit resource_error(const std::string& what) : std::runtime_error(what) {}
};

// Raised by the strict bialternant route on coincident evaluation points.
class degenerate_point_error : public std::domain_error {
 public:
  explicit degenerate_point_error(const std::string& what) : std::domain_error(what) {}
};

inline double to_double(const Rational& r) { return r.convert_to<double>(); }
inline double to_double(double x) { return x; }

// x^e for integer e of either sign; x must be invertible when e < 0.
template <class T>
T int_pow(const T& x, Int e) {
  if (e < 0) return T(1) / int_pow(x, -e);
  T acc(1);
  T base = x;
  Int n = e;
  while (n > 0) {
    if (n & 1) acc *= base;
    base *= base;
    n >>= 1;
  }
  return acc;
}

inline Rational rational_from_string(const std::string& s) {
  auto slash = s.find('/');
  if (slash == std::string::npos) return Rational(BigInt(s));
  return Rational(BigInt(s.substr(0, slash)), BigInt(s.substr(slash + 1)));
}

}  // namespace gtdyn
