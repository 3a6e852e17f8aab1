#include "unistoch/matcore.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "unistoch/kernels.hpp"

namespace unistoch {

void Tolerance::validate() const {
  if (!(validation_eps > 0.0) || !(certificate_eps > 0.0) || !(stats_sigma > 0.0))
    throw ParameterError("tolerance fields must be strictly positive");
  if (validation_eps > certificate_eps)
    throw ParameterError("validation_eps must not exceed certificate_eps");
}

// ---------------------------------------------------------------------------
// ComplexMatrix

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), entries_(rows * cols, cplx{0.0, 0.0}) {}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (entries_.size() != rows * cols) {
    std::ostringstream msg;
    msg << "complex matrix " << rows << "x" << cols << " given " << entries_.size() << " entries";
    throw DimensionError(msg.str());
  }
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix out(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) out(c, r) = std::conj((*this)(r, c));
  return out;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) throw DimensionError("matrix product shape mismatch");
  ComplexMatrix c(a.rows(), b.cols());
  const auto& k = kernels::active();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    cplx* out = c.row(i).data();
    for (std::size_t p = 0; p < a.cols(); ++p) {
      const cplx alpha = a(i, p);
      if (alpha == cplx{}) continue;
      k.axpy(alpha, b.row(p).data(), out, b.cols());
    }
  }
  return c;
}

ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("matrix sum shape mismatch");
  ComplexMatrix c = a;
  kernels::axpy(1.0, b.data(), c.data());
  return c;
}

ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("matrix difference shape mismatch");
  ComplexMatrix c = a;
  kernels::axpy(-1.0, b.data(), c.data());
  return c;
}

ComplexMatrix operator*(cplx alpha, const ComplexMatrix& a) {
  ComplexMatrix c(a.rows(), a.cols());
  kernels::axpy(alpha, a.data(), c.data());
  return c;
}

ComplexMatrix gram_rows(const ComplexMatrix& a) {
  const std::size_t n = a.rows();
  ComplexMatrix g(n, n);
  const auto& k = kernels::active();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      // (a a^H)_{ij} = sum_k a_ik conj(a_jk)
      const cplx v = k.dotc(a.row(j).data(), a.row(i).data(), a.cols());
      g(i, j) = v;
      g(j, i) = std::conj(v);
    }
  }
  return g;
}

double frobenius_norm_sq(const ComplexMatrix& m) { return kernels::sum_abs2(m.data()); }

double unitarity_residual(const ComplexMatrix& m) {
  if (!m.is_square()) throw DimensionError("unitarity check needs a square matrix");
  ComplexMatrix g = gram_rows(m);
  for (std::size_t i = 0; i < m.rows(); ++i) g(i, i) -= 1.0;
  return std::sqrt(frobenius_norm_sq(g));
}

bool is_unitary(const ComplexMatrix& m, const Tolerance& tol) {
  if (!m.is_square()) throw DimensionError("is_unitary needs a square matrix");
  return unitarity_residual(m) <= tol.validation_eps * static_cast<double>(m.rows());
}

// ---------------------------------------------------------------------------
// RealMatrix

RealMatrix::RealMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), entries_(rows * cols, 0.0) {}

RealMatrix::RealMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (entries_.size() != rows * cols) throw DimensionError("real matrix entry count does not match shape");
}

RealMatrix RealMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.front().size();
  std::vector<double> flat;
  flat.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) throw DimensionError("ragged rows in real matrix");
    flat.insert(flat.end(), row.begin(), row.end());
  }
  return RealMatrix(r, c, std::move(flat));
}

RealMatrix RealMatrix::identity(std::size_t n) {
  RealMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

namespace {
void require_same_shape(const RealMatrix& a, const RealMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("real matrix shape mismatch");
}
}  // namespace

RealMatrix operator+(const RealMatrix& a, const RealMatrix& b) {
  require_same_shape(a, b);
  RealMatrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) + b(i, j);
  return c;
}

RealMatrix operator-(const RealMatrix& a, const RealMatrix& b) {
  require_same_shape(a, b);
  RealMatrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) - b(i, j);
  return c;
}

RealMatrix operator*(double alpha, const RealMatrix& a) {
  RealMatrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = alpha * a(i, j);
  return c;
}

double frobenius_norm(const RealMatrix& a) {
  double acc = 0.0;
  for (double x : a.data()) acc += x * x;
  return std::sqrt(acc);
}

double max_abs_diff(const RealMatrix& a, const RealMatrix& b) {
  require_same_shape(a, b);
  double m = 0.0;
  for (std::size_t k = 0; k < a.data().size(); ++k) m = std::max(m, std::abs(a.data()[k] - b.data()[k]));
  return m;
}

// ---------------------------------------------------------------------------
// BistochasticMatrix

std::vector<double> BistochasticMatrix::row(std::size_t i) const {
  std::vector<double> out(d());
  for (std::size_t j = 0; j < d(); ++j) out[j] = entries_(i, j);
  return out;
}

std::vector<double> BistochasticMatrix::col(std::size_t j) const {
  std::vector<double> out(d());
  for (std::size_t i = 0; i < d(); ++i) out[i] = entries_(i, j);
  return out;
}

BistochasticMatrix validate_bistochastic(RealMatrix entries, const Tolerance& tol) {
  tol.validate();
  if (entries.rows() != entries.cols()) throw DimensionError("bistochastic matrix must be square");
  const std::size_t d = entries.rows();
  if (d < 2) throw DimensionError("bistochastic matrix needs d >= 2");
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      double& x = entries(i, j);
      if (!std::isfinite(x)) throw NegativityError("non-finite entry");
      if (x < -tol.validation_eps) {
        std::ostringstream msg;
        msg << "entry (" << i << "," << j << ") = " << x << " is negative";
        throw NegativityError(msg.str());
      }
      if (x < 0.0) x = 0.0;
    }
  }
  for (std::size_t i = 0; i < d; ++i) {
    double rs = 0.0, cs = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      rs += entries(i, j);
      cs += entries(j, i);
    }
    if (std::abs(rs - 1.0) > tol.validation_eps || std::abs(cs - 1.0) > tol.validation_eps) {
      std::ostringstream msg;
      msg << "row/column " << i << " sums " << rs << "/" << cs << " differ from 1";
      throw StochasticityError(msg.str());
    }
  }
  return BistochasticMatrix(std::move(entries), tol);
}

// ---------------------------------------------------------------------------
// BlockUnitary

BlockUnitary::BlockUnitary(Unchecked, ComplexMatrix m, std::size_t d, std::size_t s)
    : m_(std::move(m)), d_(d), s_(s) {
  if (d_ < 2) throw DimensionError("block grid dimension d must be >= 2");
  if (s_ < 1) throw DimensionError("block size s must be >= 1");
  if (m_.rows() != d_ * s_ || m_.cols() != d_ * s_) {
    std::ostringstream msg;
    msg << "block unitary (d=" << d_ << ", s=" << s_ << ") needs a " << d_ * s_ << "x" << d_ * s_
        << " matrix, got " << m_.rows() << "x" << m_.cols();
    throw DimensionError(msg.str());
  }
}

BlockUnitary::BlockUnitary(ComplexMatrix m, std::size_t d, std::size_t s, const Tolerance& tol)
    : BlockUnitary(Unchecked{}, std::move(m), d, s) {
  const double res = unitarity_residual(m_);
  if (!(res <= tol.validation_eps * static_cast<double>(n()))) {
    std::ostringstream msg;
    msg << "matrix is not unitary: ||U*U - I||_F = " << res;
    throw NumericError(msg.str());
  }
}

BlockUnitary BlockUnitary::assume_unitary(ComplexMatrix m, std::size_t d, std::size_t s) {
  return BlockUnitary(Unchecked{}, std::move(m), d, s);
}

ComplexMatrix BlockUnitary::block(std::size_t i, std::size_t j) const {
  ComplexMatrix b(s_, s_);
  for (std::size_t k = 0; k < s_; ++k)
    for (std::size_t l = 0; l < s_; ++l) b(k, l) = block_entry(i, j, k, l);
  return b;
}

// ---------------------------------------------------------------------------
// ProbabilityVector

ProbabilityVector::ProbabilityVector(std::vector<double> weights, const Tolerance& tol) : w_(std::move(weights)) {
  if (w_.empty()) throw DimensionError("probability vector must be non-empty");
  double sum = 0.0;
  for (double& x : w_) {
    if (!std::isfinite(x) || x < -tol.validation_eps) throw NegativityError("probability weight is negative");
    if (x < 0.0) x = 0.0;
    sum += x;
  }
  if (std::abs(sum - 1.0) > tol.validation_eps) throw StochasticityError("probability weights do not sum to 1");
}

}  // namespace unistoch
