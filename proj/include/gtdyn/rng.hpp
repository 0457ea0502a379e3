#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace gtdyn {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Seeded generator with platform-stable output: uniforms are built from the
// raw 64-bit stream directly, never through std:: distributions, so a given
// (seed, call sequence) reproduces byte-identical results.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Stream k derived from a master seed; trajectories draw independent
  // streams this way so results do not depend on worker scheduling.
  static Rng stream(std::uint64_t master, std::uint64_t k) {
    std::uint64_t s = master ^ (0x5851f42d4c957f2dULL * (k + 1));
    return Rng(splitmix64(s));
  }

  double uniform() {  // in [0, 1)
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  std::uint64_t raw() { return engine_(); }

  // Inversion sampling; exact for the modest means used here.
  long long poisson(double mean) {
    if (mean < 0) throw std::invalid_argument("poisson: negative mean");
    if (mean == 0) return 0;
    double u = uniform();
    double p = std::exp(-mean);
    double cdf = p;
    long long k = 0;
    while (u > cdf && k < 1000000) {
      ++k;
      p *= mean / static_cast<double>(k);
      cdf += p;
    }
    return k;
  }

  // Index into `weights` (nonnegative, not necessarily normalized).
  std::size_t categorical(const std::vector<double>& weights) {
    double total = 0;
    for (double w : weights) total += w;
    if (total <= 0) throw std::domain_error("categorical: nonpositive total weight");
    double u = uniform() * total;
    double acc = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      acc += weights[i];
      if (u < acc) return i;
    }
    return weights.size() - 1;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace gtdyn
