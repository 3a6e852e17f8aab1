#pragma once

// The block map phi_{d,s} and the constructive recipes for block unitaries:
// tensor embedding, direct-sum mixing, the U_q family and the real
// (orthogonal) embedding.

#include <cstddef>
#include <span>
#include <vector>

#include "unistoch/matcore.hpp"
#include "unistoch/permutation.hpp"

namespace unistoch {

/// Entry (i, j) is ||block(i, j)||_F^2 / s. No validation, so it can be
/// used on iterates that are only approximately unitary.
RealMatrix phi_raw(const ComplexMatrix& m, std::size_t d, std::size_t s);

/// phi restricted to the listed block rows; row r of the result is block
/// row block_rows[r].
RealMatrix phi_rows(const ComplexMatrix& m, std::size_t d, std::size_t s, std::span<const std::size_t> block_rows);

/// phi_{d,s}(u), validated as bistochastic.
BistochasticMatrix phi(const BlockUnitary& u, const Tolerance& tol = {});

/// V = U (x) I_t for an ordinary d x d unitary (block size 1). phi(V) = phi(U).
BlockUnitary tensor_embed(const BlockUnitary& u, std::size_t target_s);

/// Block (i, j) of the result is diag(u_ij, w_ij); grid sizes must agree.
/// phi(result) = (s phi(u) + t phi(w)) / (s + t).
BlockUnitary direct_sum_mix(const BlockUnitary& u, const BlockUnitary& w);

/// Iterated direct_sum_mix over all parts, left to right.
BlockUnitary direct_sum_mix(std::span<const BlockUnitary> parts);

/// The explicit real orthogonal 6x6 matrix, viewed with (d, s) = (3, 2),
/// whose image is the circulant with diagonal q^2 and off-diagonal
/// (1 - q^2) / 2. Requires 0 <= q <= 1.
BlockUnitary u_q(double q);

struct OrthogonalEmbedding {
  BlockUnitary source;
  BlockUnitary target;  // real orthogonal, block size 2s
};

/// Replaces each entry z by [[Re z, Im z], [-Im z, Re z]].
OrthogonalEmbedding realify(const BlockUnitary& u, const Tolerance& tol = {});

/// Normalised d x d Fourier matrix with block size 1.
BlockUnitary fourier(std::size_t d);

/// P_sigma (x) I_s.
BlockUnitary permutation_unitary(const Permutation& sigma, std::size_t s = 1);

/// Witness for the rational mixture sum_k (counts[k] / N) P_{perms[k]} in
/// U_{d,N}, N = sum of counts: the direct sum of P_k (x) I_{counts[k]}.
/// Zero counts are skipped.
BlockUnitary rational_mixture_witness(std::span<const Permutation> perms, std::span<const std::size_t> counts);

/// Extends k orthonormal rows (k x n) to an n x n unitary whose first k rows
/// are the given ones. Throws NumericError if the rows are far from
/// orthonormal.
ComplexMatrix complete_to_unitary(const ComplexMatrix& rows);

}  // namespace unistoch
