#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "gtdyn/links.hpp"

using namespace gtdyn;

namespace {

OmegaPoint beta_plus_only(double b) {
  OmegaPoint w;
  w.beta_plus = {b};
  return w;
}

OmegaPoint gamma_plus_only(double g) {
  OmegaPoint w;
  w.gamma_plus = g;
  return w;
}

}  // namespace

TEST_CASE("classical link rows are dimension ratios") {
  auto row_box = enumerate_box(2, -1, 2);
  auto col_box = enumerate_box(1, -1, 2);
  auto L = link_un<double>(2, row_box, col_box);

  auto row = [&](const Signature& lam, const Signature& mu) {
    return L.at(row_box.find(lam).value(), col_box.find(mu).value());
  };
  CHECK(row(Signature{0, 0}, Signature{0}) == Catch::Approx(1.0));
  CHECK(row(Signature{1, 0}, Signature{1}) == Catch::Approx(0.5));
  CHECK(row(Signature{1, 0}, Signature{0}) == Catch::Approx(0.5));
  CHECK(row(Signature{2, 0}, Signature{2}) == Catch::Approx(1.0 / 3));
  CHECK(row(Signature{2, 0}, Signature{1}) == Catch::Approx(1.0 / 3));
  CHECK(row(Signature{2, 0}, Signature{0}) == Catch::Approx(1.0 / 3));
  CHECK(row(Signature{1, 1}, Signature{0}) == 0.0);  // not interlacing

  CHECK_THROWS_AS(link_un<double>(2, row_box, enumerate_box(3, 0, 1)), std::invalid_argument);
}

TEST_CASE("classical link row sums are exactly one in rational mode") {
  auto row_box = enumerate_box(3, -2, 2);
  auto col_box = enumerate_box(2, -2, 2);
  auto L = link_un<Rational>(3, row_box, col_box);
  for (std::size_t i = 0; i < row_box.size(); ++i) CHECK(L.row_sum(i) == Rational(1));
}

TEST_CASE("q-deformed link") {
  SECTION("hand-checked entries at n = 2") {
    double q = 0.37;
    auto row_box = enumerate_box(2, -1, 1);
    auto col_box = enumerate_box(1, -1, 1);
    auto L = link_uqn<double>(2, q, row_box, col_box);
    auto at = [&](const Signature& lam, const Signature& mu) {
      return L.at(row_box.find(lam).value(), col_box.find(mu).value());
    };
    CHECK(at(Signature{0, 0}, Signature{0}) == Catch::Approx(1.0));
    CHECK(at(Signature{1, 0}, Signature{1}) == Catch::Approx(q / (q + 1.0 / q)));
    CHECK(at(Signature{1, 0}, Signature{0}) == Catch::Approx((1.0 / q) / (q + 1.0 / q)));
    CHECK_THROWS_AS(link_uqn<double>(2, 1.5, row_box, col_box), std::invalid_argument);
  }

  SECTION("rational mode: row sums exactly one at q = 1/2") {
    Rational q(1, 2);
    auto row_box = enumerate_box(3, -2, 2);
    auto col_box = enumerate_box(2, -2, 2);
    auto L = link_uqn<Rational>(3, q, row_box, col_box);
    for (std::size_t i = 0; i < row_box.size(); ++i) CHECK(L.row_sum(i) == Rational(1));
  }

  SECTION("q to 1 recovers the classical link") {
    auto row_box = enumerate_box(2, -2, 2);
    auto col_box = enumerate_box(1, -2, 2);
    auto Lc = link_un<double>(2, row_box, col_box);
    // continuity: the gap shrinks linearly in 1 - q
    auto La = link_uqn<double>(2, 0.9999, row_box, col_box);
    auto Lb = link_uqn<double>(2, 0.999999, row_box, col_box);
    double gap_a = 0.0, gap_b = 0.0;
    for (std::size_t k = 0; k < Lc.entries.size(); ++k) {
      gap_a = std::max(gap_a, std::fabs(La.entries[k] - Lc.entries[k]));
      gap_b = std::max(gap_b, std::fabs(Lb.entries[k] - Lc.entries[k]));
    }
    CHECK(gap_a < 1e-3);
    CHECK(gap_b < 1e-6);
  }
}

TEST_CASE("boundary kernel") {
  SECTION("trivial omega is a point mass") {
    OmegaPoint trivial;
    auto box = enumerate_box(2, -2, 2);
    auto mv = boundary_link(trivial, 2, box);
    for (std::size_t i = 0; i < box.size(); ++i)
      CHECK(mv.probs[i] == Catch::Approx(box[i] == Signature{0, 0} ? 1.0 : 0.0).margin(1e-14));
  }

  SECTION("pure beta closed forms") {
    double b = 0.3;
    auto box1 = enumerate_box(1, -1, 2);
    auto mv1 = boundary_link(beta_plus_only(b), 1, box1);
    CHECK(mv1.probs[box1.find(Signature{0}).value()] == Catch::Approx(1.0 - b));
    CHECK(mv1.probs[box1.find(Signature{1}).value()] == Catch::Approx(b));

    auto box2 = enumerate_box(2, -1, 2);
    auto mv2 = boundary_link(beta_plus_only(b), 2, box2);
    CHECK(mv2.probs[box2.find(Signature{0, 0}).value()] == Catch::Approx((1 - b) * (1 - b)));
    CHECK(mv2.probs[box2.find(Signature{1, 0}).value()] == Catch::Approx(2 * b * (1 - b)));
    CHECK(mv2.probs[box2.find(Signature{1, 1}).value()] == Catch::Approx(b * b));
    CHECK(mv2.mass() == Catch::Approx(1.0).margin(1e-12));
  }

  SECTION("coherence with the link") {
    OmegaPoint w;
    w.beta_plus = {0.3};
    w.gamma_plus = 0.4;
    auto box2 = enumerate_box(2, -20, 20);
    auto box1 = enumerate_box(1, -20, 20);
    auto up = boundary_link(w, 2, box2);
    auto down = boundary_link(w, 1, box1);
    std::vector<double> composed(box1.size(), 0.0);
    for (std::size_t i = 0; i < box2.size(); ++i) {
      if (up.probs[i] == 0.0) continue;
      for (const auto& [mu, lv] : linkrow_un(box2[i]))
        composed[box1.find(mu).value()] += up.probs[i] * lv;
    }
    for (std::size_t j = 0; j < box1.size(); ++j)
      CHECK(composed[j] == Catch::Approx(down.probs[j]).margin(1e-8));
  }
}

TEST_CASE("intertwining defect") {
  SECTION("trivial omega commutes exactly") {
    OmegaPoint trivial;
    auto boxhi = enumerate_box(2, -2, 2);
    auto boxlo = enumerate_box(1, -2, 2);
    auto Qhi = to_transition(generator_un(trivial, 2, boxhi));
    auto Qlo = to_transition(generator_un(trivial, 1, boxlo));
    auto L = link_un<double>(2, boxhi, boxlo);
    CHECK(verify_intertwine(Qhi, Qlo, L) == 0.0);
  }

  SECTION("classical pure beta") {
    auto boxhi = enumerate_box(2, -6, 6);
    auto boxlo = enumerate_box(1, -6, 6);
    auto Qhi = to_transition(generator_un(beta_plus_only(0.4), 2, boxhi));
    auto Qlo = to_transition(generator_un(beta_plus_only(0.4), 1, boxlo));
    auto L = link_un<double>(2, boxhi, boxlo);
    CHECK(verify_intertwine(Qhi, Qlo, L) <= 1e-10);
  }

  SECTION("quantum gamma") {
    auto w = gamma_plus_only(0.3);
    double q = 0.5;
    auto boxhi = enumerate_box(2, -16, 16);
    auto boxlo = enumerate_box(1, -16, 16);
    auto Qhi = to_transition(generator_uqn(w, 2, q, boxhi));
    auto Qlo = to_transition(generator_uqn(w, 1, q, boxlo));
    auto L = link_uqn<double>(2, q, boxhi, boxlo);
    CHECK(verify_intertwine(Qhi, Qlo, L) <= 1e-8);
  }

  SECTION("shape mismatch is rejected") {
    OmegaPoint trivial;
    auto boxhi = enumerate_box(2, -2, 2);
    auto boxlo = enumerate_box(1, -2, 2);
    auto Qhi = to_transition(generator_un(trivial, 2, boxhi));
    auto Qlo = to_transition(generator_un(trivial, 1, boxlo));
    auto L = link_un<double>(2, boxhi, enumerate_box(1, -1, 1));
    CHECK_THROWS_AS(verify_intertwine(Qhi, Qlo, L), std::invalid_argument);
    CHECK_THROWS_AS(verify_intertwine(generator_un(trivial, 2, boxhi), Qlo,
                                      link_un<double>(2, boxhi, boxlo)),
                    std::invalid_argument);
  }
}
