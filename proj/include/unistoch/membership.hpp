#pragma once

// Membership in U_{d,s} and pairwise Brac_{d,s} feasibility. Closed forms
// and analytic screens run first; what remains goes to a multi-start
// descent over the unitary group. Only the screens can reject. A failed
// search yields Unknown, never a rejection.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "unistoch/bracelet.hpp"
#include "unistoch/matcore.hpp"

namespace unistoch {

enum class DescentRule {
  Steepest,     // Riemannian gradient with backtracking
  GaussNewton,  // damped Gauss-Newton in tangent coordinates, with backtracking
};

struct SolverConfig {
  std::size_t restarts = 20;
  std::size_t max_iters = 2000;
  double step_init = 0.1;
  double grad_tol = 1e-10;
  std::uint64_t seed = 0;
  std::size_t threads = 1;  // restarts run in batches of this size
  DescentRule rule = DescentRule::GaussNewton;
  bool audit_retraction = false;  // record max ||U*U - I||_F over all iterates

  void validate() const;
};

enum class MembershipStatus { Member, RejectedAnalytic, Unknown };
std::string to_string(MembershipStatus s);

struct MembershipVerdict {
  MembershipStatus status = MembershipStatus::Unknown;
  std::optional<BlockUnitary> certificate;
  double residual = 0.0;  // ||phi(certificate) - target||_F, or best found; NaN for analytic rejections
  std::optional<std::string> rejection_reason;
  std::string method;            // which stage decided: "closed_form", "rational", "solver", ...
  std::size_t restarts_used = 0;
  std::size_t winning_restart = 0;
  std::size_t iterations = 0;    // of the winning (or best) restart
  double max_unitarity_drift = 0.0;  // filled when audit_retraction is set
};

/// Prescribed values for some block rows of phi_{d,s}: row r of `values`
/// is the target for block row rows[r].
struct BlockTarget {
  std::size_t d = 0;
  std::size_t s = 0;
  std::vector<std::size_t> rows;
  RealMatrix values;

  static BlockTarget full(const BistochasticMatrix& b, std::size_t s);
  /// First two block rows carry alpha and beta.
  static BlockTarget pair(const ProbabilityVectorPair& p, std::size_t s);
};

/// f = sum_ij (phi(u)_ij - b_ij)^2 and its Euclidean gradient with respect
/// to conj(U): block (i, j) is (2/s)(phi_ij - b_ij) U_ij, so that
/// df(U)[D] = 2 Re <G, D>.
struct ObjectiveValue {
  double value = 0.0;
  ComplexMatrix gradient;
};
ObjectiveValue objective(const BlockUnitary& u, const BistochasticMatrix& b);
ObjectiveValue objective(const ComplexMatrix& u, const BlockTarget& t);

// Tangent machinery. Steps are U -> qf(U (I + X)) with X skew-Hermitian in
// the orthonormal basis indexed by pairs a < b: first the real
// antisymmetric directions, then the imaginary symmetric ones. Diagonal
// directions leave phi unchanged and are dropped, so there are n(n-1)
// coordinates.
std::size_t tangent_dim(std::size_t n);
ComplexMatrix tangent_basis(std::size_t n, std::size_t k);
ComplexMatrix tangent_matrix(std::size_t n, std::span<const double> x);

/// Residual phi_rows(u) - values, row-major.
std::vector<double> target_residual(const ComplexMatrix& u, const BlockTarget& t);

/// Jacobian of target_residual in tangent coordinates at u, row-major,
/// (rows * d) x tangent_dim(n).
RealMatrix tangent_jacobian(const ComplexMatrix& u, const BlockTarget& t);

/// Unitary factor of the QR decomposition of u (I + X(x)), phases fixed so
/// that R has a positive diagonal.
ComplexMatrix retract(const ComplexMatrix& u, std::span<const double> x);

/// Nearest unitary (polar factor) via SVD.
ComplexMatrix polar_unitary(const ComplexMatrix& m);

/// Pure multi-start search for a preimage of `t`, without screens or
/// closed forms. Member iff the best residual is <= certificate_eps after
/// re-unitarisation; otherwise Unknown with the best residual.
MembershipVerdict solve_target(const BlockTarget& t, const SolverConfig& cfg, const Tolerance& tol = {},
                               const std::optional<ComplexMatrix>& warm_start = std::nullopt);

/// solve_target on the full matrix. Restart 0 starts from the warm start
/// if given, else from the rational mixture nearest to b with denominator s.
MembershipVerdict solve_membership_numerically(const BistochasticMatrix& b, std::size_t s, const SolverConfig& cfg,
                                               const std::optional<BlockUnitary>& warm_start = std::nullopt);

/// Full pipeline: closed forms, analytic screens, then the search.
MembershipVerdict certify_membership(const BistochasticMatrix& b, std::size_t s, const SolverConfig& cfg,
                                     const std::optional<BlockUnitary>& warm_start = std::nullopt);

/// Brac_{d,s} feasibility of (alpha, beta). A Member certificate is a full
/// block unitary whose first two block rows realise the pair.
MembershipVerdict pair_feasibility(const ProbabilityVectorPair& pair, std::size_t s, const SolverConfig& cfg);

/// Certifier for is_generalized_bracelet_matrix backed by pair_feasibility.
PairCertifier pair_certifier(const SolverConfig& cfg);

}  // namespace unistoch
