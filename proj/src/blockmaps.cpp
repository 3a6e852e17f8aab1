#include "unistoch/blockmaps.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "unistoch/kernels.hpp"

namespace unistoch {

namespace {

void require_grid(const ComplexMatrix& m, std::size_t d, std::size_t s) {
  if (d < 1 || s < 1 || m.rows() != d * s || m.cols() != d * s) {
    std::ostringstream msg;
    msg << "matrix " << m.rows() << "x" << m.cols() << " is not a " << d << "x" << d << " grid of " << s << "x" << s
        << " blocks";
    throw DimensionError(msg.str());
  }
}

}  // namespace

RealMatrix phi_rows(const ComplexMatrix& m, std::size_t d, std::size_t s, std::span<const std::size_t> block_rows) {
  require_grid(m, d, s);
  const std::size_t n = d * s;
  const auto& k = kernels::active();
  RealMatrix out(block_rows.size(), d);
  std::vector<double> buf(n);
  const double inv_s = 1.0 / static_cast<double>(s);
  for (std::size_t r = 0; r < block_rows.size(); ++r) {
    const std::size_t i = block_rows[r];
    if (i >= d) throw DimensionError("block row index out of range");
    for (std::size_t kk = 0; kk < s; ++kk) {
      k.abs2(m.row(s * i + kk).data(), buf.data(), n);
      for (std::size_t j = 0; j < d; ++j) {
        double acc = 0.0;
        for (std::size_t l = 0; l < s; ++l) acc += buf[s * j + l];
        out(r, j) += acc;
      }
    }
    for (std::size_t j = 0; j < d; ++j) out(r, j) *= inv_s;
  }
  return out;
}

RealMatrix phi_raw(const ComplexMatrix& m, std::size_t d, std::size_t s) {
  std::vector<std::size_t> rows(d);
  for (std::size_t i = 0; i < d; ++i) rows[i] = i;
  return phi_rows(m, d, s, rows);
}

BistochasticMatrix phi(const BlockUnitary& u, const Tolerance& tol) {
  return validate_bistochastic(phi_raw(u.matrix(), u.d(), u.s()), tol);
}

BlockUnitary tensor_embed(const BlockUnitary& u, std::size_t target_s) {
  if (target_s < 1) throw ParameterError("tensor_embed target block size must be >= 1");
  if (u.s() != 1) throw DimensionError("tensor_embed expects block size 1");
  const std::size_t d = u.d();
  const std::size_t t = target_s;
  ComplexMatrix v(d * t, d * t);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      const cplx z = u.matrix()(i, j);
      if (z == cplx{}) continue;
      for (std::size_t k = 0; k < t; ++k) v(i * t + k, j * t + k) = z;
    }
  return BlockUnitary::assume_unitary(std::move(v), d, t);
}

BlockUnitary direct_sum_mix(const BlockUnitary& u, const BlockUnitary& w) {
  if (u.d() != w.d()) throw DimensionError("direct_sum_mix needs equal grid dimensions");
  const std::size_t d = u.d(), s = u.s(), t = w.s(), b = s + t;
  ComplexMatrix out(d * b, d * b);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      for (std::size_t k = 0; k < s; ++k)
        for (std::size_t l = 0; l < s; ++l) out(i * b + k, j * b + l) = u.block_entry(i, j, k, l);
      for (std::size_t k = 0; k < t; ++k)
        for (std::size_t l = 0; l < t; ++l) out(i * b + s + k, j * b + s + l) = w.block_entry(i, j, k, l);
    }
  return BlockUnitary::assume_unitary(std::move(out), d, b);
}

BlockUnitary direct_sum_mix(std::span<const BlockUnitary> parts) {
  if (parts.empty()) throw ParameterError("direct_sum_mix needs at least one part");
  BlockUnitary acc = parts.front();
  for (std::size_t k = 1; k < parts.size(); ++k) acc = direct_sum_mix(acc, parts[k]);
  return acc;
}

BlockUnitary u_q(double q) {
  if (!(q >= 0.0 && q <= 1.0)) throw ParameterError("u_q needs 0 <= q <= 1");
  const double root = std::sqrt(std::max(0.0, 1.0 + 2.0 * q - 3.0 * q * q));
  const double wp = 0.5 * (1.0 - q + root);
  const double wm = 0.5 * (1.0 - q - root);
  // Two interleaved 3x3 circulants: odd indices use (q, w-, w+), even (q, w+, w-).
  const double rows[6][6] = {
      {q, 0, wm, 0, wp, 0}, {0, q, 0, wp, 0, wm}, {wp, 0, q, 0, wm, 0},
      {0, wm, 0, q, 0, wp}, {wm, 0, wp, 0, q, 0}, {0, wp, 0, wm, 0, q},
  };
  ComplexMatrix m(6, 6);
  for (std::size_t r = 0; r < 6; ++r)
    for (std::size_t c = 0; c < 6; ++c) m(r, c) = rows[r][c];
  return BlockUnitary(std::move(m), 3, 2);
}

OrthogonalEmbedding realify(const BlockUnitary& u, const Tolerance& tol) {
  const std::size_t n = u.n();
  ComplexMatrix t(2 * n, 2 * n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      const cplx z = u.matrix()(r, c);
      t(2 * r, 2 * c) = z.real();
      t(2 * r, 2 * c + 1) = z.imag();
      t(2 * r + 1, 2 * c) = -z.imag();
      t(2 * r + 1, 2 * c + 1) = z.real();
    }
  return {u, BlockUnitary(std::move(t), u.d(), 2 * u.s(), tol)};
}

BlockUnitary fourier(std::size_t d) {
  ComplexMatrix f(d, d);
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t k = 0; k < d; ++k) {
      const double angle = 2.0 * std::numbers::pi * static_cast<double>((j * k) % d) / static_cast<double>(d);
      f(j, k) = scale * cplx(std::cos(angle), std::sin(angle));
    }
  return BlockUnitary(std::move(f), d, 1);
}

BlockUnitary permutation_unitary(const Permutation& sigma, std::size_t s) {
  const auto p = BlockUnitary::assume_unitary(sigma.complex_matrix(), sigma.size(), 1);
  return s == 1 ? p : tensor_embed(p, s);
}

BlockUnitary rational_mixture_witness(std::span<const Permutation> perms, std::span<const std::size_t> counts) {
  if (perms.size() != counts.size()) throw DimensionError("one count per permutation required");
  std::vector<BlockUnitary> parts;
  for (std::size_t k = 0; k < perms.size(); ++k)
    if (counts[k] > 0) parts.push_back(permutation_unitary(perms[k], counts[k]));
  if (parts.empty()) throw ParameterError("rational mixture needs a positive count");
  return direct_sum_mix(parts);
}

ComplexMatrix complete_to_unitary(const ComplexMatrix& rows) {
  const std::size_t k = rows.rows(), n = rows.cols();
  if (k > n) throw DimensionError("more rows than columns");
  const auto& ker = kernels::active();
  ComplexMatrix out(n, n);
  for (std::size_t r = 0; r < k; ++r) {
    const double nrm = std::sqrt(ker.sum_abs2(rows.row(r).data(), n));
    if (std::abs(nrm - 1.0) > 1e-6) throw NumericError("rows to complete are not normalised");
    for (std::size_t c = 0; c < n; ++c) out(r, c) = rows(r, c);
  }
  std::vector<cplx> v(n);
  std::size_t filled = k;
  for (std::size_t e = 0; e < n && filled < n; ++e) {
    std::fill(v.begin(), v.end(), cplx{});
    v[e] = 1.0;
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t r = 0; r < filled; ++r) {
        const cplx proj = ker.dotc(out.row(r).data(), v.data(), n);
        ker.axpy(-proj, out.row(r).data(), v.data(), n);
      }
    const double nrm = std::sqrt(ker.sum_abs2(v.data(), n));
    if (nrm < 1e-3) continue;
    for (std::size_t c = 0; c < n; ++c) out(filled, c) = v[c] / nrm;
    ++filled;
  }
  if (filled != n) throw NumericError("could not complete rows to a unitary basis");
  return out;
}

}  // namespace unistoch
