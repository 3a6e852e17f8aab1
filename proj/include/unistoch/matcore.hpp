#pragma once

// Validated numeric domain types shared by every unistoch module: dense
// complex/real matrices, the tolerance policy, bistochastic matrices, block
// unitaries and probability vectors.

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace unistoch {

using cplx = std::complex<double>;

/// Base of all domain errors. `kind()` is a stable machine-readable tag.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

struct DimensionError : Error {
  explicit DimensionError(const std::string& w) : Error("dimension", w) {}
};
struct StochasticityError : Error {
  explicit StochasticityError(const std::string& w) : Error("stochasticity", w) {}
};
struct NegativityError : Error {
  explicit NegativityError(const std::string& w) : Error("negativity", w) {}
};
struct ParameterError : Error {
  explicit ParameterError(const std::string& w) : Error("parameter", w) {}
};
struct NotApplicableError : Error {
  explicit NotApplicableError(const std::string& w) : Error("not_applicable", w) {}
};
struct NumericError : Error {
  explicit NumericError(const std::string& w) : Error("numeric", w) {}
};
struct InternalError : Error {
  explicit InternalError(const std::string& w) : Error("internal", w) {}
};

struct Tolerance {
  double validation_eps = 1e-10;  // invariant checks
  double certificate_eps = 1e-8;  // residual threshold for solver certificates
  double stats_sigma = 5.0;       // Monte-Carlo acceptance band, in standard errors

  /// Throws ParameterError unless all fields are positive and
  /// validation_eps <= certificate_eps.
  void validate() const;
};

class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols);
  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries);

  static ComplexMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }

  cplx& operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
  const cplx& operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }

  std::span<cplx> row(std::size_t r) { return {entries_.data() + r * cols_, cols_}; }
  std::span<const cplx> row(std::size_t r) const { return {entries_.data() + r * cols_, cols_}; }
  std::span<const cplx> data() const noexcept { return entries_; }
  std::span<cplx> data() noexcept { return entries_; }

  ComplexMatrix adjoint() const;

  bool operator==(const ComplexMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> entries_;
};

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator*(cplx alpha, const ComplexMatrix& a);

/// a * a^H
ComplexMatrix gram_rows(const ComplexMatrix& a);

class RealMatrix {
 public:
  RealMatrix() = default;
  RealMatrix(std::size_t rows, std::size_t cols);
  RealMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries);
  /// Nested row-major initializer; all rows must have equal length.
  static RealMatrix from_rows(const std::vector<std::vector<double>>& rows);
  static RealMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }
  std::span<const double> data() const noexcept { return entries_; }

  bool operator==(const RealMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> entries_;
};

RealMatrix operator+(const RealMatrix& a, const RealMatrix& b);
RealMatrix operator-(const RealMatrix& a, const RealMatrix& b);
RealMatrix operator*(double alpha, const RealMatrix& a);
double frobenius_norm(const RealMatrix& a);
double max_abs_diff(const RealMatrix& a, const RealMatrix& b);

/// Sum of squared moduli of all entries, i.e. Tr(m m^*).
double frobenius_norm_sq(const ComplexMatrix& m);

/// ||m m^* - I||_F. Equal to ||m^* m - I||_F for square m.
double unitarity_residual(const ComplexMatrix& m);

/// True iff ||m^* m - I||_F <= tol.validation_eps * side. Throws
/// DimensionError on non-square input.
bool is_unitary(const ComplexMatrix& m, const Tolerance& tol = {});

class BistochasticMatrix {
 public:
  std::size_t d() const noexcept { return entries_.rows(); }
  double operator()(std::size_t i, std::size_t j) const { return entries_(i, j); }
  const RealMatrix& entries() const noexcept { return entries_; }
  const Tolerance& tol() const noexcept { return tol_; }
  std::vector<double> row(std::size_t i) const;
  std::vector<double> col(std::size_t j) const;

 private:
  BistochasticMatrix(RealMatrix entries, Tolerance tol)
      : entries_(std::move(entries)), tol_(tol) {}
  friend BistochasticMatrix validate_bistochastic(RealMatrix, const Tolerance&);

  RealMatrix entries_;
  Tolerance tol_;
};

/// Accepts a square matrix with entries >= -validation_eps (clamped to 0)
/// and row/column sums within validation_eps of 1. d must be >= 2.
BistochasticMatrix validate_bistochastic(RealMatrix entries, const Tolerance& tol = {});

/// A ds x ds unitary viewed as a d x d grid of s x s blocks. Indices are
/// zero-based: block_entry(i, j, k, l) is entry (s*i + k, s*j + l).
class BlockUnitary {
 public:
  BlockUnitary(ComplexMatrix m, std::size_t d, std::size_t s, const Tolerance& tol = {});

  /// Skips the O(n^3) unitarity check. Only for constructions that are
  /// unitary by construction (direct sums, tensor products, permutations).
  static BlockUnitary assume_unitary(ComplexMatrix m, std::size_t d, std::size_t s);

  std::size_t d() const noexcept { return d_; }
  std::size_t s() const noexcept { return s_; }
  std::size_t n() const noexcept { return d_ * s_; }
  const ComplexMatrix& matrix() const noexcept { return m_; }

  const cplx& block_entry(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const {
    return m_(s_ * i + k, s_ * j + l);
  }
  ComplexMatrix block(std::size_t i, std::size_t j) const;

 private:
  struct Unchecked {};
  BlockUnitary(Unchecked, ComplexMatrix m, std::size_t d, std::size_t s);

  ComplexMatrix m_;
  std::size_t d_;
  std::size_t s_;
};

class ProbabilityVector {
 public:
  explicit ProbabilityVector(std::vector<double> weights, const Tolerance& tol = {});

  std::size_t size() const noexcept { return w_.size(); }
  double operator[](std::size_t i) const { return w_[i]; }
  std::span<const double> weights() const noexcept { return w_; }

 private:
  std::vector<double> w_;
};

}  // namespace unistoch
