#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>

#include "gtdyn/toeplitz.hpp"

using namespace gtdyn;

namespace {

OmegaPoint beta_plus_only(double b) {
  OmegaPoint w;
  w.beta_plus = {b};
  return w;
}

OmegaPoint mixed_omega() {
  OmegaPoint w;
  w.beta_plus = {0.3};
  w.alpha_minus = {0.2};
  w.gamma_plus = 0.2;
  return w;
}

ToeplitzSpec identity_spec(int n, double q) {
  ToeplitzSpec s;
  s.n = n;
  s.q = q;
  s.t = 1.0L / (static_cast<long double>(q) * q);
  s.f = [](Int m) { return m == 0 ? 1.0L : 0.0L; };
  s.fvals.assign(static_cast<std::size_t>(n), 1.0L);
  return s;
}

}  // namespace

TEST_CASE("n=1 toeplitz kernel reduces to the coefficient sequence") {
  auto w = phi_coeffs_for_q(mixed_omega(), 1, 0.5);
  auto spec = make_spec_psi(mixed_omega(), 1, 0.5, w);
  for (Int x : {-2LL, 0LL, 3LL})
    for (Int y : {-3LL, 0LL, 2LL}) {
      double got = toeplitz_T(spec, XConfig{{x}}, XConfig{{y}});
      CHECK(got == Catch::Approx(w.at(y - x)).margin(1e-15));
    }
}

TEST_CASE("constant F gives the identity kernel") {
  auto spec = identity_spec(3, 0.5);
  auto box = enumerate_box(3, -1, 1);
  for (const auto& lam : box.states)
    for (const auto& mu : box.states) {
      double got = toeplitz_q_entry(spec, lam, mu);
      CHECK(got == Catch::Approx(lam == mu ? 1.0 : 0.0).margin(1e-14));
    }
}

TEST_CASE("toeplitz kernel equals the determinantal transition kernel") {
  for (double q : {0.5, 0.8}) {
    for (const auto& om : {beta_plus_only(0.3), mixed_omega()}) {
      for (int n : {2, 3}) {
        auto w = phi_coeffs_for_q(om, n, q);
        auto spec = make_spec_psi(om, n, q, w);
        double defect = 0.0;
        for (const auto& lam : enumerate_box(n, -2, 2).states)
          for (const auto& [mu, v] : qrow_uqn(om, n, q, w, lam))
            defect = std::max(defect, std::fabs(toeplitz_q_entry(spec, lam, mu) - v));
        CHECK(defect <= 1e-10);
      }
    }
  }
}

TEST_CASE("down kernel with F_n equals the q-link") {
  SECTION("coefficients of F_n are the frozen geometric sequence") {
    double q = 0.5;
    int n = 3;
    auto spec = make_spec_fn(n, q);
    for (Int m = 0; m <= 5; ++m)
      CHECK(static_cast<double>(spec.f(m)) == Catch::Approx(std::pow(q, -2.0 * (n - 1) * m)));
    CHECK(spec.f(-1) == 0.0L);
    CHECK(static_cast<double>(spec.f_virt(2)) == Catch::Approx(std::pow(q, -4.0 * (n - 1))));
  }

  SECTION("kernel equality and hand check") {
    for (double q : {0.5, 0.8}) {
      for (int n : {2, 3}) {
        auto spec = make_spec_fn(n, q);
        double defect = 0.0;
        for (const auto& lam : enumerate_box(n, -2, 2).states)
          for (const auto& mu : enumerate_box(n - 1, -4, 4).states) {
            double direct = toeplitz_link_entry(spec, lam, mu);
            double link = link_entry_uqn(n, q, lam, mu);
            defect = std::max(defect, std::fabs(direct - link));
            if (!interlaces(mu, lam)) CHECK(std::fabs(direct) < 1e-14);
          }
        CHECK(defect <= 1e-10);
      }
    }
    double q = 0.5;
    auto spec = make_spec_fn(2, q);
    CHECK(toeplitz_link_entry(spec, Signature{1, 0}, Signature{1}) ==
          Catch::Approx(q / (q + 1.0 / q)));
  }
}

TEST_CASE("delta kernel: product route equals direct route") {
  SECTION("trivial omega collapses to the link") {
    OmegaPoint trivial;
    double q = 0.5;
    auto d = delta_kernel(2, trivial, q, enumerate_box(2, -2, 2), enumerate_box(1, -2, 2));
    CHECK(d.max_defect < 1e-13);
    auto L = link_uqn<double>(2, q, d.row_box, d.col_box);
    for (std::size_t k = 0; k < d.direct_entries.size(); ++k)
      CHECK(d.direct_entries[k] == Catch::Approx(L.entries[k]).margin(1e-13));
  }

  SECTION("two-route defect on small boxes") {
    for (double q : {0.5, 0.8}) {
      for (int n : {2, 3}) {
        auto d = delta_kernel(n, mixed_omega(), q, enumerate_box(n, -3, 3),
                              enumerate_box(n - 1, -3, 3));
        CHECK(d.max_defect <= 1e-10);
      }
    }
  }

  SECTION("full-space delta rows sum to one") {
    double q = 0.5;
    int n = 2;
    auto w = phi_coeffs_for_q(mixed_omega(), n, q);
    Signature lam{1, 0};
    double total = 0.0;
    for (const auto& [mu, qv] : qrow_uqn(mixed_omega(), n, q, w, lam))
      for (const auto& [nu, lv] : linkrow_uqn(mu, q)) total += qv * lv;
    CHECK(total == Catch::Approx(1.0).margin(1e-10));
  }
}

TEST_CASE("multilevel sampler") {
  SECTION("trivial omega steps in place") {
    OmegaPoint trivial;
    MultilevelSampler s(trivial, 3, 0.5);
    GTPattern g;
    g.levels = {Signature{1}, Signature{1, 0}, Signature{2, 1, -1}};
    Rng rng(42);
    CHECK(s.step(g, rng) == g);
  }

  SECTION("sampled steps satisfy interlacing and are seed-deterministic") {
    MultilevelSampler s(mixed_omega(), 3, 0.5);
    GTPattern g;
    g.levels = {Signature{0}, Signature{0, 0}, Signature{0, 0, 0}};
    Rng r1(7), r2(7);
    GTPattern a = g, b = g;
    for (int k = 0; k < 20; ++k) {
      a = s.step(a, r1);
      b = s.step(b, r2);
      CHECK(a == b);
      CHECK_NOTHROW(validate_pattern(a));
    }
  }

  SECTION("one-step law is a probability law matching the P_N formula") {
    double q = 0.5;
    MultilevelSampler s(beta_plus_only(0.3), 2, q);
    GTPattern state;
    state.levels = {Signature{0}, Signature{1, 0}};
    auto law = s.one_step_law(state);
    double mass = 0.0;
    for (const auto& [pat, p] : law) mass += p;
    CHECK(mass == Catch::Approx(1.0).margin(1e-12));

    PnFormula pn(beta_plus_only(0.3), 2, q, s.window(), -12, 12);
    for (const auto& [pat, p] : law) CHECK(pn.entry(state, pat) == Catch::Approx(p).margin(1e-10));
  }

  SECTION("empirical law approaches the exact law") {
    double q = 0.5;
    MultilevelSampler s(beta_plus_only(0.4), 2, q);
    GTPattern state;
    state.levels = {Signature{0}, Signature{0, 0}};
    auto law = s.one_step_law(state);
    std::map<GTPattern, long long> counts;
    const long long trials = 20000;
    Rng rng(99);
    for (long long k = 0; k < trials; ++k) counts[s.step(state, rng)]++;
    double tv = 0.0;
    for (const auto& [pat, p] : law)
      tv += std::fabs(p - (counts.count(pat) ? static_cast<double>(counts[pat]) / trials : 0.0));
    for (const auto& [pat, c] : counts)
      if (!law.count(pat)) tv += static_cast<double>(c) / trials;
    CHECK(tv / 2 <= 0.03);
  }
}

TEST_CASE("gibbs initialization propagates to the top marginal") {
  // With mu^(1) ~ Lambda(lam^(2), .) the top coordinate of one multilevel step
  // is distributed as Q^{chi_2}(lam^(2), .); checked by exact enumeration.
  double q = 0.5;
  auto om = beta_plus_only(0.3);
  MultilevelSampler s(om, 2, q);
  Signature top{1, 0};
  std::map<Signature, double> top_law;
  for (const auto& [mu1, lv] : linkrow_uqn(top, q)) {
    GTPattern state;
    state.levels = {mu1, top};
    for (const auto& [pat, p] : s.one_step_law(state)) top_law[pat.top()] += lv * p;
  }
  auto w = phi_coeffs_for_q(om, 2, q);
  for (const auto& [mu, qv] : qrow_uqn(om, 2, q, w, top)) {
    CHECK(top_law[mu] == Catch::Approx(qv).margin(1e-10));
    top_law.erase(mu);
  }
  for (const auto& [mu, p] : top_law) CHECK(std::fabs(p) < 1e-12);
}

TEST_CASE("down-chain sampler produces valid patterns") {
  Rng rng(11);
  for (int k = 0; k < 50; ++k) {
    auto g = sample_down_chain(Signature{3, 1, 0}, 0.5, rng);
    CHECK(g.top() == Signature{3, 1, 0});
    CHECK_NOTHROW(validate_pattern(g));
  }
}
