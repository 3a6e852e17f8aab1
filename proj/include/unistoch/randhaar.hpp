#pragma once

// Haar sampling on U(n), the pushforward measure mu_{d,s}, streaming moment
// estimators with their closed forms, spectra and hypocycloid curves.

#include <array>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "unistoch/matcore.hpp"

namespace unistoch {

/// 64-bit Mersenne twister seeded from (seed, stream). The engine is fully
/// specified by the standard, and normals are produced here rather than by
/// std::normal_distribution, so streams agree across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next() { return eng_(); }
  double uniform();  // [0, 1) with 53 random bits
  double normal();
  cplx complex_normal();  // E|z|^2 = 1

 private:
  std::mt19937_64 eng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Haar-distributed n x n unitary: QR of a complex Ginibre matrix with
/// column j multiplied by R_jj / |R_jj|.
ComplexMatrix haar_unitary(std::size_t n, Rng& rng);

/// phi_{d,s} of a Haar unitary of size ds.
BistochasticMatrix sample_mu(std::size_t d, std::size_t s, Rng& rng);

/// One-pass mean and variance (Welford), mergeable (Chan et al.).
class RunningStats {
 public:
  void push(double x);
  void merge(const RunningStats& other);
  std::size_t count() const noexcept { return n_; }
  double mean() const noexcept { return mean_; }
  double variance() const;  // unbiased
  double standard_error() const;

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

/// One-pass covariance of a pair, mergeable.
class RunningCovariance {
 public:
  void push(double x, double y);
  void merge(const RunningCovariance& other);
  std::size_t count() const noexcept { return n_; }
  double covariance() const;  // unbiased
  double var_x() const;
  double var_y() const;
  double correlation() const;

 private:
  std::size_t n_ = 0;
  double mx_ = 0.0, my_ = 0.0;
  double cxx_ = 0.0, cyy_ = 0.0, cxy_ = 0.0;
};

struct Estimate {
  double value = 0.0;
  double se = 0.0;
};

struct MomentTheory {
  double mean, second, cross_samerow, cross_diag;
};
MomentTheory moment_theory(std::size_t d, std::size_t s);

struct CorrelationTheory {
  double var, cov_line, rho_line, cov_diag, rho_diag;
};
CorrelationTheory correlation_theory(std::size_t d, std::size_t s);

struct MomentReport {
  std::size_t d = 0, s = 0, n = 0, samples = 0;
  std::uint64_t seed = 0;
  Estimate est_mean, est_second, est_cross_row, est_cross_col, est_cross_diag;
  MomentTheory theory{};
};

struct CorrelationReport {
  std::size_t d = 0, s = 0, n = 0, samples = 0;
  std::uint64_t seed = 0;
  Estimate var, cov_row, rho_row, cov_col, rho_col, cov_diag, rho_diag;
  CorrelationTheory theory{};
};

/// Entries used: B_11 (mean, second), B_11 B_21 (same column), B_11 B_12
/// (same row), B_11 B_22 (disjoint). Samples are drawn in a fixed number of
/// batches with their own streams, so results do not depend on `threads`.
MomentReport estimate_moments(std::size_t d, std::size_t s, std::size_t samples, std::uint64_t seed,
                              std::size_t threads = 1);
/// Variance and covariances of the same entries; standard errors of the
/// second-order statistics by delete-one-batch jackknife.
CorrelationReport estimate_correlations(std::size_t d, std::size_t s, std::size_t samples, std::uint64_t seed,
                                        std::size_t threads = 1);

/// Moments of |U_11|^2 for Haar U of size n.
struct HaarMomentReport {
  std::size_t n = 0, samples = 0;
  Estimate abs2, abs4;
  double theory_abs2 = 0.0, theory_abs4 = 0.0;
};
HaarMomentReport estimate_haar_moments(std::size_t n, std::size_t samples, std::uint64_t seed,
                                       std::size_t threads = 1);

/// Eigenvalues of b, sorted by decreasing real part then imaginary part.
std::vector<cplx> spectrum(const BistochasticMatrix& b);

/// z(theta) = ((d-1) e^{i theta} + e^{-i(d-1) theta}) / d at theta = 2 pi k / points.
std::vector<cplx> hypocycloid(std::size_t d, std::size_t points);

/// circulant(l1, l2, l3) = l1 P_id + l2 P_(123) + l3 P_(132).
BistochasticMatrix circulant3(double l1, double l2, double l3, const Tolerance& tol = {});

struct SimplexSample {
  std::array<double, 3> lambda;
  BistochasticMatrix b;
};
/// Uniform (Dirichlet(1,1,1)) points of the simplex spanned by id, (123), (132).
std::vector<SimplexSample> sample_simplex_slice(std::size_t samples, std::uint64_t seed);

}  // namespace unistoch
