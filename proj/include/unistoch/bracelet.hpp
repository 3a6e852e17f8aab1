#pragma once

// Analytic membership predicates: the classical bracelet condition on pairs
// of probability vectors, its order-s necessary condition, the exact slice
// (ceiling) formula, the E(s) grid scan, the segment lattice, and the
// three-valued generalized bracelet matrix test.

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "unistoch/matcore.hpp"
#include "unistoch/permutation.hpp"

namespace unistoch {

class ProbabilityVectorPair {
 public:
  ProbabilityVectorPair(ProbabilityVector alpha, ProbabilityVector beta);
  ProbabilityVectorPair(std::vector<double> alpha, std::vector<double> beta, const Tolerance& tol = {});

  std::size_t d() const noexcept { return alpha_.size(); }
  const ProbabilityVector& alpha() const noexcept { return alpha_; }
  const ProbabilityVector& beta() const noexcept { return beta_; }
  ProbabilityVectorPair swapped() const { return {beta_, alpha_}; }

 private:
  ProbabilityVector alpha_;
  ProbabilityVector beta_;
};

struct BraceletReport {
  bool satisfied = false;
  std::size_t worst_index = 0;  // index with the most negative margin term
  double margin = 0.0;          // min_i (sum_{j != i} sqrt(a_j b_j) - sqrt(a_i b_i))
};

BraceletReport bracelet_pair(const ProbabilityVectorPair& pair, const Tolerance& tol = {});

enum class Axis { Row, Column };

struct PairBraceletReport {
  Axis axis;
  std::size_t first;
  std::size_t second;
  BraceletReport report;
};

struct BraceletMatrixReport {
  bool satisfied = true;
  double margin = 0.0;  // minimum over all pairs
  std::vector<PairBraceletReport> pairs;
};

/// Checks every unordered row pair, then every unordered column pair.
BraceletMatrixReport is_bracelet_matrix(const BistochasticMatrix& b);

/// Exact decision for U_3 (= L_3). Throws DimensionError unless d == 3.
bool unistochastic3(const BistochasticMatrix& b);

/// Order-s necessary condition: false means (alpha, beta) is certainly not
/// in Brac_{d,s}. Only indices with beta_i >= 1 - 1/s are tested.
bool generalized_necessary(const ProbabilityVectorPair& pair, std::size_t s, const Tolerance& tol = {});

/// ceil(alpha1 s) + ceil(beta1 s) <= s after snapping values within
/// validation_eps of a multiple of 1/s onto it.
bool slice_membership(double alpha1, double beta1, std::size_t s, const Tolerance& tol = {});

/// Support pattern ((a, 1-a, 0), (b, 0, 1-b)) up to a column permutation:
/// both supports have at most two elements and meet in exactly one column.
struct SlicePattern {
  std::size_t shared;       // the common column
  std::size_t alpha_other;  // column carrying 1 - alpha1 (free choice when alpha1 = 1)
  std::size_t beta_other;   // column carrying 1 - beta1
  double alpha1;
  double beta1;
};
std::optional<SlicePattern> match_slice_pattern(const ProbabilityVectorPair& pair, const Tolerance& tol = {});

struct ESetPoint {
  double alpha1;
  double beta1;
  bool in_set;
};

/// Scan of slice_membership over the grid {i/(grid-1)}^2, alpha-major.
std::vector<ESetPoint> emit_E_set(std::size_t s, std::size_t grid, const Tolerance& tol = {});

/// {k/s : k = 0..s}. Throws NotApplicableError unless pi^-1 sigma has a cycle
/// of length >= 3.
std::vector<double> segment_lattice(std::size_t d, std::size_t s, const Permutation& pi, const Permutation& sigma);

enum class Verdict3 { Yes, No, Unknown };
std::string to_string(Verdict3 v);

struct PairScreen {
  Verdict3 verdict = Verdict3::Unknown;
  std::string reason;  // "bracelet", "rigidity", "necessary", "slice", "empty", "solver" or ""
};

/// Analytic classification of a pair for Brac_{d,s}. Yes and No are
/// certified; Unknown means no analytic criterion applies.
PairScreen screen_pair(const ProbabilityVectorPair& pair, std::size_t s, const Tolerance& tol = {});

struct GeneralizedPairReport {
  Axis axis;
  std::size_t first;
  std::size_t second;
  PairScreen screen;
};

struct GeneralizedBraceletReport {
  Verdict3 verdict = Verdict3::Unknown;
  std::vector<GeneralizedPairReport> pairs;
};

/// Returns true when the pair is certified feasible for order s.
using PairCertifier = std::function<bool(const ProbabilityVectorPair&, std::size_t s)>;

/// No if any row/column pair is analytically rejected; Yes if every pair is
/// certified (analytically or by `certifier`); Unknown otherwise.
GeneralizedBraceletReport is_generalized_bracelet_matrix(const BistochasticMatrix& b, std::size_t s,
                                                         const PairCertifier& certifier = {});

}  // namespace unistoch
