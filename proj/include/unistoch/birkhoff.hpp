#pragma once

// Birkhoff-von Neumann decomposition and the constructive rational
// approximation of any bistochastic matrix by a generalized unistochastic one.

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "unistoch/matcore.hpp"
#include "unistoch/permutation.hpp"

namespace unistoch {

struct BirkhoffTerm {
  double weight;
  Permutation perm;
};

struct BirkhoffDecomposition {
  std::size_t d = 0;
  std::vector<BirkhoffTerm> terms;

  RealMatrix reconstruct() const;
};

/// Perfect matching of rows to columns using only entries > threshold, found
/// by augmenting paths with rows and columns scanned in index order. Returns
/// the row -> column assignment, or nullopt if none exists.
std::optional<Permutation> perfect_matching(const RealMatrix& weights, double threshold);

/// Greedy peeling: subtract the smallest matched entry times a permutation
/// found on the support until the residual vanishes. At most d^2 - 2d + 2
/// terms; throws InternalError if the support admits no perfect matching
/// while mass remains.
BirkhoffDecomposition birkhoff_decompose(const BistochasticMatrix& b);

struct RationalApproximation {
  std::size_t N = 0;
  double delta = 0.0;
  std::vector<std::pair<Permutation, std::size_t>> counts;  // k_sigma, summing to N
  BlockUnitary witness;                                      // grid d, block size N
  double achieved_error = 0.0;                               // ||B - phi(witness)||_F
  RealMatrix target_mixture;                                 // sum (k_sigma / N) P_sigma
};

/// For eps > 0, returns N and counts k_sigma with sum_sigma (k_sigma/N) P_sigma
/// within eps of b in Frobenius norm, together with a witness in U_{d,N}.
RationalApproximation approximate_by_generalized_unistochastic(const BistochasticMatrix& b, double eps);

/// Largest-remainder rounding of weights (summing to 1) to counts summing to N.
std::vector<std::size_t> round_to_counts(const std::vector<double>& weights, std::size_t N);

}  // namespace unistoch
