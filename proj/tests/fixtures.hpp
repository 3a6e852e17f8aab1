#pragma once

// Matrices quoted from the literature, shared by unit and acceptance tests.

#include "unistoch/blockmaps.hpp"
#include "unistoch/matcore.hpp"

namespace fixture {

using namespace unistoch;

inline ComplexMatrix permutation_from_columns(const std::vector<std::size_t>& col_of_row) {
  ComplexMatrix m(col_of_row.size(), col_of_row.size());
  for (std::size_t r = 0; r < col_of_row.size(); ++r) m(r, col_of_row[r]) = 1.0;
  return m;
}

// 4x4 anti-diagonal permutation; phi_{2,2} gives the 2x2 swap.
inline BlockUnitary example_2x2_swap() { return BlockUnitary(permutation_from_columns({3, 2, 1, 0}), 2, 2); }

// 6x6 permutation (1 3 6 4 2 5); phi_{3,2} gives the 1/2 off-diagonal circulant.
inline BlockUnitary example_3x2_perm() { return BlockUnitary(permutation_from_columns({4, 3, 0, 5, 1, 2}), 3, 2); }

inline BistochasticMatrix half_offdiagonal() {
  return validate_bistochastic(RealMatrix::from_rows({{0, 0.5, 0.5}, {0.5, 0, 0.5}, {0.5, 0.5, 0}}));
}

// Real orthogonal preimage of the circulant (1/9, 4/9, 4/9).
inline BlockUnitary green_point_preimage() {
  const double a = -1.0 / 3.0, b = 2.0 / 3.0;
  return BlockUnitary(ComplexMatrix(3, 3, {a, b, b, b, a, b, b, b, a}), 3, 1);
}

// (2/3) * half_offdiagonal + (1/3) * green point as an element of U_{3,3}.
inline BlockUnitary star_of_david_witness() { return direct_sum_mix(u_q(0.0), green_point_preimage()); }

inline BistochasticMatrix star_of_david() {
  const double p = 1.0 / 27.0, q = 13.0 / 27.0;
  return validate_bistochastic(RealMatrix::from_rows({{p, q, q}, {q, p, q}, {q, q, p}}));
}

}  // namespace fixture
