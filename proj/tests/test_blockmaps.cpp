#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "unistoch/blockmaps.hpp"
#include "unistoch/randhaar.hpp"

using namespace unistoch;

TEST_CASE("phi on the worked examples is exact") {
  CHECK(phi(fixture::example_2x2_swap()).entries() == RealMatrix::from_rows({{0, 1}, {1, 0}}));
  CHECK(phi(fixture::example_3x2_perm()).entries() == fixture::half_offdiagonal().entries());
  for (std::size_t d : {2, 3})
    for (std::size_t s : {1, 2, 3})
      CHECK(phi(BlockUnitary(ComplexMatrix::identity(d * s), d, s)).entries() == RealMatrix::identity(d));
}

TEST_CASE("phi agrees with the definition and is bistochastic") {
  Rng rng(21);
  for (auto [d, s] : {std::pair<std::size_t, std::size_t>{2, 1}, {3, 2}, {4, 3}, {2, 5}}) {
    const BlockUnitary u(haar_unitary(d * s, rng), d, s);
    const RealMatrix ref = oracle::phi(u.matrix(), d, s);
    const auto b = phi(u);
    CHECK(max_abs_diff(b.entries(), ref) < 1e-14);
    for (std::size_t i = 0; i < d; ++i) {
      double row = 0.0, col = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        row += b(i, j);
        col += b(j, i);
      }
      CHECK(row == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(col == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("phi_rows restricts to block rows") {
  Rng rng(4);
  const ComplexMatrix m = haar_unitary(6, rng);
  const std::vector<std::size_t> rows{2, 0};
  const auto part = phi_rows(m, 3, 2, rows);
  const auto full = phi_raw(m, 3, 2);
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(part(0, j) == full(2, j));
    CHECK(part(1, j) == full(0, j));
  }
  CHECK_THROWS_AS(phi_raw(m, 4, 2), DimensionError);
}

TEST_CASE("tensor_embed") {
  const auto f = fourier(2);
  const auto v = tensor_embed(f, 3);
  CHECK(v.n() == 6);
  CHECK(is_unitary(v.matrix()));
  CHECK(max_abs_diff(phi(v).entries(), RealMatrix::from_rows({{0.5, 0.5}, {0.5, 0.5}})) < 1e-15);
  CHECK(phi(tensor_embed(BlockUnitary(ComplexMatrix::identity(3), 3, 1), 4)).entries() == RealMatrix::identity(3));
  CHECK_THROWS_AS(tensor_embed(f, 0), ParameterError);
  CHECK_THROWS_AS(tensor_embed(v, 2), DimensionError);
  Rng rng(8);
  for (int t = 0; t < 10; ++t) {
    const BlockUnitary u(haar_unitary(4, rng), 4, 1);
    CHECK(max_abs_diff(phi(tensor_embed(u, 3)).entries(), phi(u).entries()) < 1e-12);
  }
}

TEST_CASE("direct_sum_mix blends images with weights s and t") {
  const auto id3 = BlockUnitary(ComplexMatrix::identity(3), 3, 1);
  const auto mixed = direct_sum_mix(id3, fourier(3));
  const double a = 2.0 / 3.0, b = 1.0 / 6.0;
  CHECK(max_abs_diff(phi(mixed).entries(), RealMatrix::from_rows({{a, b, b}, {b, a, b}, {b, b, a}})) < 1e-15);
  CHECK(max_abs_diff(phi(fixture::star_of_david_witness()).entries(), fixture::star_of_david().entries()) < 1e-15);

  Rng rng(9);
  for (auto [d, s, t] : {std::tuple<std::size_t, std::size_t, std::size_t>{2, 1, 1}, {3, 1, 2}, {3, 2, 2}})
    for (int rep = 0; rep < 100; ++rep) {
      const BlockUnitary u(haar_unitary(d * s, rng), d, s), w(haar_unitary(d * t, rng), d, t);
      const auto m = direct_sum_mix(u, w);
      const RealMatrix expect =
          (1.0 / static_cast<double>(s + t)) * (static_cast<double>(s) * phi(u).entries() + static_cast<double>(t) * phi(w).entries());
      CHECK(max_abs_diff(phi(m).entries(), expect) <= 1e-12);
    }
  CHECK(max_abs_diff(phi(direct_sum_mix(mixed, mixed)).entries(), phi(mixed).entries()) < 1e-15);
  CHECK_THROWS_AS(direct_sum_mix(id3, fourier(2)), DimensionError);
}

TEST_CASE("U_q family") {
  CHECK(u_q(1.0).matrix() == ComplexMatrix::identity(6));
  CHECK(phi(u_q(0.0)).entries() == fixture::half_offdiagonal().entries());
  for (int k = 0; k <= 100; ++k) {
    const double q = k / 100.0;
    const auto u = u_q(q);
    CHECK(unitarity_residual(u.matrix()) <= 1e-12);
    for (const cplx& z : u.matrix().data()) CHECK(z.imag() == 0.0);
    const double off = (1.0 - q * q) / 2.0;
    const RealMatrix expect = RealMatrix::from_rows({{q * q, off, off}, {off, q * q, off}, {off, off, q * q}});
    CHECK(max_abs_diff(phi(u).entries(), expect) <= 1e-12);
  }
  const auto half = phi(u_q(0.5)).entries();
  CHECK(half(0, 0) == doctest::Approx(0.25));
  CHECK(half(0, 1) == doctest::Approx(0.375));
  CHECK_THROWS_AS(u_q(-0.1), ParameterError);
  CHECK_THROWS_AS(u_q(1.1), ParameterError);
}

TEST_CASE("realify") {
  const auto e = realify(fourier(2));
  CHECK(e.target.s() == 2);
  CHECK(max_abs_diff(phi(e.target).entries(), RealMatrix::from_rows({{0.5, 0.5}, {0.5, 0.5}})) < 1e-15);
  for (const cplx& z : e.target.matrix().data()) CHECK(z.imag() == 0.0);

  Rng rng(12);
  for (int t = 0; t < 50; ++t) {
    const BlockUnitary u(haar_unitary(3, rng), 3, 1);
    const auto r = realify(u);
    CHECK(is_unitary(r.target.matrix()));
    CHECK(max_abs_diff(phi(r.target).entries(), phi(u).entries()) <= 1e-10);
  }
  // The flat 3x3 matrix has no real orthogonal preimage at s = 1, but the
  // real image of the Fourier matrix puts it in O_{3,2}.
  const auto flat = realify(fourier(3));
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) CHECK(phi(flat.target)(i, j) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("rational_mixture_witness and permutation_unitary") {
  const auto id = Permutation::identity(3), c = Permutation::parse_cycles("123", 3);
  const std::vector<Permutation> perms{id, c};
  const std::vector<std::size_t> counts{1, 2};
  const auto w = rational_mixture_witness(perms, counts);
  CHECK(w.s() == 3);
  CHECK(is_unitary(w.matrix()));
  const RealMatrix expect = (1.0 / 3.0) * id.matrix() + (2.0 / 3.0) * c.matrix();
  CHECK(max_abs_diff(phi(w).entries(), expect) < 1e-15);
  CHECK(phi(permutation_unitary(c, 2)).entries() == c.matrix());
  const std::vector<std::size_t> zero{0, 0};
  CHECK_THROWS_AS(rational_mixture_witness(perms, zero), ParameterError);
}

TEST_CASE("complete_to_unitary keeps the given rows") {
  Rng rng(13);
  const ComplexMatrix u = haar_unitary(5, rng);
  ComplexMatrix rows(2, 5);
  for (std::size_t r = 0; r < 2; ++r)
    for (std::size_t c = 0; c < 5; ++c) rows(r, c) = u(r, c);
  const auto full = complete_to_unitary(rows);
  CHECK(unitarity_residual(full) < 1e-13);
  for (std::size_t c = 0; c < 5; ++c) CHECK(full(1, c) == rows(1, c));
  ComplexMatrix bad(1, 3, {1.0, 1.0, 0.0});
  CHECK_THROWS_AS(complete_to_unitary(bad), NumericError);
}

TEST_CASE("isometry-based construction is only column stochastic") {
  // 4x2 isometry read as a 2x2 grid of vectors in C^2; squared norms give [[1,1],[0,0]].
  const ComplexMatrix v(4, 2, {1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0});
  CHECK(frobenius_norm_sq(v.adjoint() * v - ComplexMatrix::identity(2)) == 0.0);
  RealMatrix b(2, 2);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) b(i, j) = std::norm(v(2 * i, j)) + std::norm(v(2 * i + 1, j));
  CHECK(b == RealMatrix::from_rows({{1, 1}, {0, 0}}));
  CHECK_THROWS_AS(validate_bistochastic(b), StochasticityError);
}
