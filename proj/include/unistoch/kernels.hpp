#pragma once

// Data-parallel inner loops over interleaved complex<double> arrays. Each
// kernel has a portable scalar reference and, on x86-64, an AVX2+FMA
// variant. The active table is chosen once at startup from CPUID and can be
// overridden with UNISTOCH_SIMD=scalar|avx2 or select().

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

namespace unistoch::kernels {

using cplx = std::complex<double>;

enum class Isa { Scalar, Avx2 };

struct Table {
  Isa isa;
  // sum_k |x_k|^2
  double (*sum_abs2)(const cplx* x, std::size_t n);
  // out_k = |x_k|^2
  void (*abs2)(const cplx* x, double* out, std::size_t n);
  // sum_k conj(x_k) * y_k
  cplx (*dotc)(const cplx* x, const cplx* y, std::size_t n);
  // y_k += alpha * x_k
  void (*axpy)(cplx alpha, const cplx* x, cplx* y, std::size_t n);
};

bool supported(Isa isa) noexcept;
Isa detected() noexcept;
std::string_view name(Isa isa) noexcept;

/// Table for a specific ISA; throws std::invalid_argument if unsupported here.
const Table& table(Isa isa);

const Table& active() noexcept;
/// Switch the process-wide table. Intended for tests and benchmarking.
void select(Isa isa);

inline double sum_abs2(std::span<const cplx> x) { return active().sum_abs2(x.data(), x.size()); }
inline void abs2(std::span<const cplx> x, std::span<double> out) {
  active().abs2(x.data(), out.data(), x.size());
}
inline cplx dotc(std::span<const cplx> x, std::span<const cplx> y) {
  return active().dotc(x.data(), y.data(), x.size());
}
inline void axpy(cplx alpha, std::span<const cplx> x, std::span<cplx> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}

namespace scalar {
double sum_abs2(const cplx* x, std::size_t n);
void abs2(const cplx* x, double* out, std::size_t n);
cplx dotc(const cplx* x, const cplx* y, std::size_t n);
void axpy(cplx alpha, const cplx* x, cplx* y, std::size_t n);
}  // namespace scalar

#if defined(UNISTOCH_HAVE_AVX2)
namespace avx2 {
double sum_abs2(const cplx* x, std::size_t n);
void abs2(const cplx* x, double* out, std::size_t n);
cplx dotc(const cplx* x, const cplx* y, std::size_t n);
void axpy(cplx alpha, const cplx* x, cplx* y, std::size_t n);
}  // namespace avx2
#endif

}  // namespace unistoch::kernels
