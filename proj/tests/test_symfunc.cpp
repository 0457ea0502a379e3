#include <catch2/catch_amalgamated.hpp>

#include <complex>

#include "gtdyn/rng.hpp"
#include "gtdyn/signatures.hpp"
#include "gtdyn/symfunc.hpp"

using namespace gtdyn;

namespace {

Signature random_signature(Rng& rng, int n, Int span) {
  std::vector<Int> parts(n);
  Int cur = static_cast<Int>(rng.raw() % static_cast<std::uint64_t>(2 * span + 1)) - span;
  for (int i = 0; i < n; ++i) {
    parts[i] = cur;
    cur -= static_cast<Int>(rng.raw() % 3);
  }
  std::sort(parts.rbegin(), parts.rend());
  return Signature(parts);
}

}  // namespace

TEST_CASE("schur evaluation at hand-checked points") {
  CHECK(schur_eval<double>(Signature{0, 0, 0}, {1.7, -0.3, 2.4}) == Catch::Approx(1.0));
  CHECK(schur_eval<double>(Signature{1, 0}, {2.0, 3.0}) == Catch::Approx(5.0));
  CHECK(schur_eval<double>(Signature{1, 1}, {2.0, 3.0}) == Catch::Approx(6.0));

  // exact mode
  CHECK(schur_eval<Rational>(Signature{1, 0}, {Rational(2), Rational(3)}) == Rational(5));
  CHECK(schur_eval<Rational>(Signature{1, 1}, {Rational(2), Rational(3)}) == Rational(6));
  // Laurent case with negative parts: s_{(0,-1)}(x,y) = 1/x + 1/y
  CHECK(schur_eval<Rational>(Signature{0, -1}, {Rational(2), Rational(3)}) ==
        Rational(1, 2) + Rational(1, 3));

  CHECK_THROWS_AS(schur_eval<double>(Signature{1, 0}, {0.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(schur_eval<double>(Signature{1, 0}, {1.0}), std::invalid_argument);
}

TEST_CASE("schur evaluation handles coincident points via divided differences") {
  // s_lam(1,1) should equal dim at N=2
  for (auto lam : {Signature{1, 0}, Signature{3, 1}, Signature{2, -2}}) {
    double got = schur_eval<double>(lam, {1.0, 1.0});
    CHECK(got == Catch::Approx(dim_u_d(lam)).epsilon(1e-10));
  }
  double got3 = schur_eval<double>(Signature{2, 1, 0}, {1.0, 1.0, 1.0});
  CHECK(got3 == Catch::Approx(8.0).epsilon(1e-10));
  // partially coincident points against a hand expansion:
  // s_(1,1,0)(x,y,z) = xy + xz + yz at (2,2,3) = 4 + 6 + 6 = 16
  CHECK(schur_eval<double>(Signature{1, 1, 0}, {2.0, 2.0, 3.0}) == Catch::Approx(16.0));

  CHECK_THROWS_AS(schur_eval<double>(Signature{1, 0}, {1.0, 1.0}, SchurMode::strict_bialternant),
                  degenerate_point_error);
}

TEST_CASE("schur evaluation is symmetric in the points") {
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    Signature lam = random_signature(rng, 3, 3);
    std::vector<double> z = {0.4 + rng.uniform(), 1.1 + rng.uniform(), 2.2 + rng.uniform()};
    double base = schur_eval(lam, z);
    std::vector<double> zp = {z[2], z[0], z[1]};
    CHECK(schur_eval(lam, zp) == Catch::Approx(base).epsilon(1e-10));
  }
}

TEST_CASE("dimension formulas") {
  CHECK(dim_u(Signature{0, 0, 0}, 3) == Rational(1));
  CHECK(dim_u(Signature{1, 0}, 2) == Rational(2));
  CHECK(dim_u(Signature{2, 1, 0}, 3) == Rational(8));
  CHECK_THROWS_AS(dim_u(Signature{1, 0}, 3), std::invalid_argument);

  SECTION("limit consistency with schur_eval near (1,...,1)") {
    for (auto lam : {Signature{2, 0}, Signature{3, -1}}) {
      std::vector<double> z = {1.0 + 1e-7, 1.0 - 0.7e-7};
      CHECK(schur_eval(lam, z) == Catch::Approx(dim_u_d(lam)).margin(1e-6));
    }
  }

  SECTION("branching rule: dim(lam) = sum of dims of interlacing mu") {
    Rng rng(11);
    for (int trial = 0; trial < 200; ++trial) {
      Signature lam = random_signature(rng, 2 + static_cast<int>(rng.raw() % 3), 4);
      Rational total(0);
      for (const auto& mu : enumerate_interlacing(lam)) total += dim_u_exact(mu);
      CHECK(total == dim_u_exact(lam));
    }
  }
}

TEST_CASE("principal specializations") {
  const double q = 0.37;
  CHECK(qdim(Signature{0, 0, 0}, 3, q) == Catch::Approx(1.0));
  CHECK(qdim(Signature{1, 0}, 2, q) == Catch::Approx(q + 1.0 / q));
  CHECK(qdim(Signature{1, 1}, 2, q) == Catch::Approx(1.0));

  CHECK(spec_q2(Signature{0, 0}, 2, q) == Catch::Approx(1.0));
  CHECK(spec_q2(Signature{1, 0}, 2, q) == Catch::Approx(1.0 + std::pow(q, -2.0)));
  CHECK(spec_q2(Signature{1, 1}, 2, q) == Catch::Approx(std::pow(q, -2.0)));

  CHECK_THROWS_AS(qdim(Signature{1, 0}, 2, 1.3), std::invalid_argument);
  CHECK_THROWS_AS(spec_q2(Signature{1, 0}, 2, 0.0), std::invalid_argument);

  SECTION("exact rational specializations") {
    Rational qr(1, 2);
    CHECK(qdim(Signature{1, 0}, 2, qr) == Rational(5, 2));
    CHECK(spec_q2(Signature{1, 1}, 2, qr) == Rational(4));
  }

  SECTION("qdim and spec_q2 agree up to the global factor q^{(N-1)|lam|}") {
    Rng rng(23);
    for (int trial = 0; trial < 200; ++trial) {
      int n = 1 + static_cast<int>(rng.raw() % 3);
      Signature lam = random_signature(rng, n, 4);
      double q2 = 0.15 + 0.8 * rng.uniform();
      double lhs = qdim(lam, n, q2);
      double rhs = std::pow(q2, double((n - 1) * lam.sum())) * spec_q2(lam, n, q2);
      CHECK(lhs == Catch::Approx(rhs).epsilon(1e-9));
    }
  }

  SECTION("specializations match the generic schur evaluation") {
    const double qq = 0.6;
    for (auto lam : {Signature{2, 0}, Signature{1, 1}, Signature{3, -1}}) {
      std::vector<double> pts = {1.0, std::pow(qq, -2.0)};
      CHECK(spec_q2(lam, 2, qq) == Catch::Approx(schur_eval(lam, pts)).epsilon(1e-11));
      std::vector<double> qpts = {qq, 1.0 / qq};
      CHECK(qdim(lam, 2, qq) == Catch::Approx(schur_eval(lam, qpts)).epsilon(1e-11));
    }
  }
}

TEST_CASE("littlewood-richardson coefficients") {
  SECTION("tensoring with the trivial signature") {
    auto t = lr_coeffs(Signature{0, 0}, Signature{2, -1});
    REQUIRE(t.entries.size() == 1);
    CHECK(t.at(Signature{2, -1}) == 1);
  }

  SECTION("pieri: s1 * s1 in two variables") {
    auto t = lr_coeffs(Signature{1, 0}, Signature{1, 0});
    REQUIRE(t.entries.size() == 2);
    CHECK(t.at(Signature{2, 0}) == 1);
    CHECK(t.at(Signature{1, 1}) == 1);
  }

  SECTION("shift invariance") {
    auto base = lr_coeffs(Signature{2, 0}, Signature{1, -1});
    auto shifted = lr_coeffs(Signature{5, 3}, Signature{1, -1});
    REQUIRE(base.entries.size() == shifted.entries.size());
    for (const auto& [beta, c] : base.entries) {
      std::vector<Int> parts = beta.parts;
      for (auto& p : parts) p += 3;
      CHECK(shifted.at(Signature(parts)) == c);
    }
  }

  SECTION("dimension identity: sum_beta N * dim(beta) = dim(alpha) dim(gamma)") {
    Rng rng(31);
    for (int trial = 0; trial < 60; ++trial) {
      int n = 2 + static_cast<int>(rng.raw() % 2);
      Signature alpha = random_signature(rng, n, 2);
      Signature gamma = random_signature(rng, n, 2);
      auto t = lr_coeffs(alpha, gamma);
      Rational total(0);
      for (const auto& [beta, c] : t.entries) total += Rational(c) * dim_u_exact(beta);
      CHECK(total == dim_u_exact(alpha) * dim_u_exact(gamma));
    }
  }

  SECTION("pointwise product identity, exact rational") {
    Rng rng(41);
    std::vector<Rational> z = {Rational(3, 2), Rational(-5, 7)};
    for (int trial = 0; trial < 25; ++trial) {
      Signature alpha = random_signature(rng, 2, 2);
      Signature gamma = random_signature(rng, 2, 2);
      auto t = lr_coeffs(alpha, gamma);
      Rational lhs = schur_eval<Rational>(alpha, z) * schur_eval<Rational>(gamma, z);
      Rational rhs(0);
      for (const auto& [beta, c] : t.entries) rhs += Rational(c) * schur_eval<Rational>(beta, z);
      CHECK(lhs == rhs);
    }
  }

  SECTION("pointwise product identity, float, three variables") {
    Rng rng(43);
    for (int trial = 0; trial < 15; ++trial) {
      Signature alpha = random_signature(rng, 3, 2);
      Signature gamma = random_signature(rng, 3, 2);
      std::vector<double> z = {0.9 + rng.uniform(), 2.0 + rng.uniform(), 3.3 + rng.uniform()};
      auto t = lr_coeffs(alpha, gamma);
      double lhs = schur_eval(alpha, z) * schur_eval(gamma, z);
      double rhs = 0.0;
      for (const auto& [beta, c] : t.entries) rhs += double(c) * schur_eval(beta, z);
      CHECK(rhs == Catch::Approx(lhs).epsilon(1e-10));
    }
  }

  CHECK_THROWS_AS(lr_coeffs(Signature{1, 0}, Signature{1}), std::invalid_argument);
}
