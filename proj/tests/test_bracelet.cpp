#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "unistoch/bracelet.hpp"
#include "unistoch/randhaar.hpp"

using namespace unistoch;

namespace {

ProbabilityVectorPair pv(std::vector<double> a, std::vector<double> b) { return {std::move(a), std::move(b)}; }

}  // namespace

TEST_CASE("bracelet_pair") {
  auto r = bracelet_pair(pv({1, 0, 0}, {0, 1, 0}));
  CHECK(r.satisfied);
  CHECK(r.margin == 0.0);

  r = bracelet_pair(pv({0, 0.5, 0.5}, {0.5, 0, 0.5}));
  CHECK_FALSE(r.satisfied);
  CHECK(r.worst_index == 2);
  CHECK(r.margin == doctest::Approx(-0.5));

  const double t = 1.0 / 3.0;
  r = bracelet_pair(pv({t, t, t}, {t, t, t}));
  CHECK(r.satisfied);
  CHECK(r.margin == doctest::Approx(t));
}

TEST_CASE("bracelet_pair margin matches the oracle and is symmetric") {
  std::mt19937_64 g(5);
  std::exponential_distribution<double> ex(1.0);
  for (int t = 0; t < 2000; ++t) {
    const std::size_t d = 2 + t % 4;
    std::vector<double> a(d), b(d);
    double sa = 0, sb = 0;
    for (std::size_t j = 0; j < d; ++j) {
      sa += a[j] = ex(g);
      sb += b[j] = ex(g);
    }
    for (std::size_t j = 0; j < d; ++j) {
      a[j] /= sa;
      b[j] /= sb;
    }
    const auto p = pv(a, b);
    const auto r = bracelet_pair(p);
    CHECK(r.margin == doctest::Approx(oracle::bracelet_margin(a, b)).epsilon(1e-12));
    CHECK(r.satisfied == (r.margin >= -1e-10));
    CHECK(bracelet_pair(p.swapped()).satisfied == r.satisfied);
    // At s = 1 the order-s condition is the bracelet condition.
    CHECK(generalized_necessary(p, 1) == r.satisfied);
  }
}

TEST_CASE("is_bracelet_matrix") {
  CHECK(is_bracelet_matrix(validate_bistochastic(Permutation::parse_cycles("(13)", 4).matrix())).satisfied);
  const auto rep = is_bracelet_matrix(fixture::half_offdiagonal());
  CHECK_FALSE(rep.satisfied);
  CHECK(rep.pairs.size() == 6);
  CHECK_FALSE(is_bracelet_matrix(circulant3(0.6, 0.3, 0.1)).satisfied);
}

TEST_CASE("unistochastic3") {
  const double t = 1.0 / 3.0;
  CHECK(unistochastic3(circulant3(t, t, t)));
  CHECK_FALSE(unistochastic3(fixture::half_offdiagonal()));
  CHECK(unistochastic3(circulant3(1.0 / 9, 4.0 / 9, 4.0 / 9)));  // on the boundary
  CHECK_THROWS_AS(unistochastic3(validate_bistochastic(RealMatrix::identity(4))), DimensionError);
}

TEST_CASE("generalized_necessary") {
  CHECK(generalized_necessary(pv({1, 0}, {0, 1}), 5));
  CHECK_FALSE(generalized_necessary(pv({1, 0, 0}, {1, 0, 0}), 2));
  // Example pair fails at s = 1 but passes the order-2 test.
  CHECK_FALSE(generalized_necessary(pv({0, 0.5, 0.5}, {0.5, 0, 0.5}), 1));
  CHECK(generalized_necessary(pv({0, 0.5, 0.5}, {0.5, 0, 0.5}), 2));
}

TEST_CASE("slice_membership") {
  CHECK(slice_membership(0.5, 0.5, 2));
  CHECK_FALSE(slice_membership(0.6, 0.5, 2));
  for (std::size_t s = 1; s <= 6; ++s)
    for (double x : {0.0, 0.13, 0.5, 0.99, 1.0}) {
      CHECK(slice_membership(x, 0.0, s));
      CHECK(slice_membership(0.0, x, s));
    }
  // Snapping: 1/3 computed in floating point is still 1/3 at s = 3.
  CHECK(slice_membership(1.0 / 3.0 + 1e-12, 2.0 / 3.0, 3));
  CHECK_FALSE(slice_membership(1.0 / 3.0 + 1e-6, 2.0 / 3.0, 3));
  std::mt19937_64 g(1);
  std::uniform_real_distribution<double> u(0, 1);
  for (int t = 0; t < 1000; ++t) {
    const double a = u(g), b = u(g);
    const std::size_t s = 1 + t % 7;
    CHECK(slice_membership(a, b, s) == slice_membership(b, a, s));
  }
}

TEST_CASE("match_slice_pattern") {
  auto pat = match_slice_pattern(pv({0.5, 0.5, 0}, {0.5, 0, 0.5}));
  REQUIRE(pat);
  CHECK(pat->shared == 0);
  CHECK(pat->alpha_other == 1);
  CHECK(pat->beta_other == 2);
  pat = match_slice_pattern(pv({0, 0.3, 0.7}, {0.4, 0.6, 0}));
  REQUIRE(pat);
  CHECK(pat->shared == 1);
  CHECK(pat->alpha1 == doctest::Approx(0.3));
  CHECK(pat->beta1 == doctest::Approx(0.6));
  CHECK_FALSE(match_slice_pattern(pv({0.2, 0.3, 0.5}, {0.4, 0.6, 0})));
  CHECK_FALSE(match_slice_pattern(pv({0.5, 0.5, 0}, {0.5, 0.5, 0})));
  CHECK_FALSE(match_slice_pattern(pv({0.5, 0.5}, {0.5, 0.5})));
}

TEST_CASE("E(s) grid matches the integer oracle and the sandwich bounds") {
  for (std::size_t s = 1; s <= 6; ++s) {
    const auto pts = emit_E_set(s, 201);
    CHECK(pts.size() == 201u * 201u);
    std::size_t inside = 0;
    for (const auto& p : pts) {
      inside += p.in_set;
      if (p.in_set) CHECK(p.alpha1 + p.beta1 <= 1.0 + 1e-12);
      if (p.alpha1 + p.beta1 <= 1.0 - 2.0 / static_cast<double>(s) + 1e-12) CHECK(p.in_set);
      if (s == 1) CHECK(p.in_set == (p.alpha1 == 0.0 || p.beta1 == 0.0));
    }
    CHECK(inside == oracle::e_set_count(s, 201));
  }
  auto pts = emit_E_set(2, 6);  // grid step 0.2; (0.4, 0.4) is in E(2)
  CHECK(pts[2 * 6 + 2].alpha1 == doctest::Approx(0.4));
  CHECK(pts[2 * 6 + 2].in_set);
  CHECK_THROWS_AS(emit_E_set(2, 1), ParameterError);
}

TEST_CASE("segment_lattice") {
  const auto id = Permutation::identity(3);
  CHECK(segment_lattice(3, 2, id, Permutation::parse_cycles("123", 3)) == std::vector<double>{0.0, 0.5, 1.0});
  CHECK(segment_lattice(3, 1, id, Permutation::parse_cycles("123", 3)) == std::vector<double>{0.0, 1.0});
  CHECK_THROWS_AS(segment_lattice(3, 2, id, Permutation::parse_cycles("12", 3)), NotApplicableError);
  const auto id4 = Permutation::identity(4);
  CHECK_THROWS_AS(segment_lattice(4, 2, id4, Permutation::parse_cycles("(12)(34)", 4)), NotApplicableError);
  const auto swap = Permutation::parse_cycles("12", 4);
  CHECK(segment_lattice(4, 3, swap, swap.compose(Permutation::parse_cycles("234", 4))).size() == 4);
}

TEST_CASE("screen_pair") {
  CHECK(screen_pair(pv({1}, {1}), 3).reason == "empty");
  CHECK(screen_pair(pv({1}, {1}), 3).verdict == Verdict3::No);
  CHECK(screen_pair(pv({0.3, 0.7}, {0.7, 0.3}), 2).verdict == Verdict3::Yes);
  const auto rigid = screen_pair(pv({0.3, 0.7}, {0.6, 0.4}), 4);
  CHECK(rigid.verdict == Verdict3::No);
  CHECK(rigid.reason == "rigidity");
  CHECK(screen_pair(pv({0.5, 0.5, 0}, {0.5, 0, 0.5}), 2).verdict == Verdict3::Yes);
  CHECK(screen_pair(pv({0.6, 0.4, 0}, {0.6, 0, 0.4}), 2).reason == "slice");
  CHECK(screen_pair(pv({0.6, 0.4, 0}, {0.6, 0, 0.4}), 2).verdict == Verdict3::No);
  CHECK(screen_pair(pv({0.6, 0.4, 0}, {0.6, 0, 0.4}), 1).reason == "bracelet");
  const auto nec = screen_pair(pv({0.9, 0.05, 0.05}, {0.9, 0.05, 0.05}), 2);
  CHECK(nec.verdict == Verdict3::No);
  CHECK(nec.reason == "necessary");
}

TEST_CASE("is_generalized_bracelet_matrix") {
  SUBCASE("s = 1 coincides with the bracelet test") {
    std::mt19937_64 g(3);
    for (int t = 0; t < 200; ++t) {
      const auto b = validate_bistochastic(oracle::random_bistochastic(3, 3, g));
      const auto rep = is_generalized_bracelet_matrix(b, 1);
      CHECK(rep.verdict == (is_bracelet_matrix(b).satisfied ? Verdict3::Yes : Verdict3::No));
    }
  }
  SUBCASE("the 2-unistochastic example is certified at s = 2") {
    CHECK(is_generalized_bracelet_matrix(fixture::half_offdiagonal(), 2).verdict == Verdict3::Yes);
  }
  SUBCASE("lambda = 1/3 on the edge [id, (123)] is rejected at s = 2") {
    const auto b = circulant3(1.0 / 3.0, 2.0 / 3.0, 0.0);
    const auto rep = is_generalized_bracelet_matrix(b, 2);
    CHECK(rep.verdict == Verdict3::No);
    bool via_slice = false;
    for (const auto& p : rep.pairs) via_slice = via_slice || p.screen.reason == "slice";
    CHECK(via_slice);
  }
  SUBCASE("certifier upgrades unknown pairs") {
    const auto b = fixture::star_of_david();
    CHECK(is_generalized_bracelet_matrix(b, 3).verdict == Verdict3::Unknown);
    const auto rep = is_generalized_bracelet_matrix(b, 3, [](const ProbabilityVectorPair&, std::size_t) { return true; });
    CHECK(rep.verdict == Verdict3::Yes);
  }
}

TEST_CASE("generalized unistochastic samples are never rejected by the pair screens") {
  for (auto [d, s] : {std::pair<std::size_t, std::size_t>{3, 1}, {3, 2}, {4, 2}}) {
    Rng rng(100 + d * 10 + s);
    std::size_t rejected = 0;
    for (int t = 0; t < 1000; ++t)
      rejected += is_generalized_bracelet_matrix(sample_mu(d, s, rng), s).verdict == Verdict3::No;
    CHECK(rejected == 0);
  }
}
