#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "unistoch/birkhoff.hpp"
#include "unistoch/blockmaps.hpp"
#include "unistoch/randhaar.hpp"

using namespace unistoch;

TEST_CASE("perfect_matching") {
  const auto w = RealMatrix::from_rows({{0, 1, 0}, {1, 0, 1}, {0, 1, 1}});
  const auto m = perfect_matching(w, 0.5);
  REQUIRE(m);
  for (std::size_t i = 0; i < 3; ++i) CHECK(w(i, (*m)(i)) > 0.5);
  CHECK_FALSE(perfect_matching(RealMatrix::from_rows({{1, 1, 0}, {1, 1, 0}, {1, 1, 0}}), 0.5));
}

TEST_CASE("birkhoff_decompose on simple inputs") {
  const auto c = Permutation::parse_cycles("(1243)", 4);
  auto dec = birkhoff_decompose(validate_bistochastic(c.matrix()));
  REQUIRE(dec.terms.size() == 1);
  CHECK(dec.terms[0].weight == 1.0);
  CHECK(dec.terms[0].perm == c);

  const auto id = Permutation::identity(3), cyc = Permutation::parse_cycles("123", 3);
  dec = birkhoff_decompose(validate_bistochastic(0.5 * id.matrix() + 0.5 * cyc.matrix()));
  REQUIRE(dec.terms.size() == 2);
  CHECK(dec.terms[0].weight == doctest::Approx(0.5));
  CHECK(dec.terms[1].weight == doctest::Approx(0.5));

  const double t = 1.0 / 3.0;
  const auto flat = circulant3(t, t, t);
  dec = birkhoff_decompose(flat);
  CHECK(dec.terms.size() == 3);
  CHECK(max_abs_diff(dec.reconstruct(), flat.entries()) < 1e-15);
}

TEST_CASE("birkhoff_decompose invariants on random mixtures") {
  std::mt19937_64 g(42);
  for (int rep = 0; rep < 1000; ++rep) {
    const std::size_t d = 2 + rep % 5;
    const std::size_t terms = 1 + static_cast<std::size_t>(g() % (d * d));
    const auto b = validate_bistochastic(oracle::random_bistochastic(d, terms, g));
    const auto dec = birkhoff_decompose(b);
    CHECK(dec.terms.size() <= d * d - 2 * d + 2);
    double total = 0.0;
    for (const auto& term : dec.terms) {
      CHECK(term.weight > 0.0);
      total += term.weight;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(max_abs_diff(dec.reconstruct(), b.entries()) <= 1e-10);
  }
}

TEST_CASE("round_to_counts") {
  CHECK(round_to_counts({0.5, 0.5}, 4) == std::vector<std::size_t>{2, 2});
  CHECK(round_to_counts({0.34, 0.33, 0.33}, 2) == std::vector<std::size_t>{1, 1, 0});
  CHECK(round_to_counts({1.0}, 7) == std::vector<std::size_t>{7});
  const auto c = round_to_counts({0.2, 0.3, 0.5}, 9);
  CHECK(c[0] + c[1] + c[2] == 9);
}

TEST_CASE("approximate_by_generalized_unistochastic") {
  SUBCASE("permutation input is reproduced exactly") {
    const auto c = Permutation::parse_cycles("132", 3);
    const auto a = approximate_by_generalized_unistochastic(validate_bistochastic(c.matrix()), 0.1);
    REQUIRE(a.counts.size() == 1);
    CHECK(a.counts[0].second == a.N);
    CHECK(a.achieved_error == 0.0);
  }
  SUBCASE("flat 2x2 with an even N is exact") {
    const auto b = validate_bistochastic(RealMatrix::from_rows({{0.5, 0.5}, {0.5, 0.5}}));
    const auto a = approximate_by_generalized_unistochastic(b, 0.1);
    // Two terms: delta = 0.1 / (2 sqrt 2), N = ceil(1/delta) = 29.
    CHECK(a.N == static_cast<std::size_t>(std::ceil(2.0 * std::sqrt(2.0) / 0.1)));
    CHECK(a.achieved_error <= 1.0 / static_cast<double>(a.N) * 2.0);
    const auto even = approximate_by_generalized_unistochastic(b, 0.1 * 29.0 / 30.0);
    REQUIRE(even.N == 30);
    CHECK(even.achieved_error < 1e-15);
  }
  SUBCASE("random 3x3 inputs, eps = 0.05") {
    std::mt19937_64 g(7);
    for (int rep = 0; rep < 100; ++rep) {
      const auto b = validate_bistochastic(oracle::random_bistochastic(3, 1 + rep % 6, g));
      const auto a = approximate_by_generalized_unistochastic(b, 0.05);
      CHECK(a.achieved_error <= 0.05);
      const double m = static_cast<double>(std::max<std::size_t>(a.counts.size(), 2) - 1);
      CHECK(a.achieved_error <= 2.0 * m * a.delta * std::sqrt(3.0) + 1e-12);
      std::size_t total = 0;
      for (const auto& [perm, k] : a.counts) total += k;
      CHECK(total == a.N);
      CHECK(a.witness.s() == a.N);
      CHECK(max_abs_diff(phi_raw(a.witness.matrix(), 3, a.N), a.target_mixture) <= 1e-12);
    }
  }
  CHECK_THROWS_AS(approximate_by_generalized_unistochastic(validate_bistochastic(RealMatrix::identity(2)), 0.0),
                  ParameterError);
}
