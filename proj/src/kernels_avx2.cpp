// AVX2 + FMA variants. Built with -mavx2 -mfma; only reached through the
// dispatch table after a CPUID check.

#include <immintrin.h>

#include "unistoch/kernels.hpp"

namespace unistoch::kernels::avx2 {
namespace {

inline const double* as_doubles(const cplx* p) { return reinterpret_cast<const double*>(p); }
inline double* as_doubles(cplx* p) { return reinterpret_cast<double*>(p); }

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

double sum_abs2(const cplx* x, std::size_t n) {
  const double* p = as_doubles(x);
  const std::size_t m = 2 * n;
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 8 <= m; k += 8) {
    const __m256d a = _mm256_loadu_pd(p + k);
    const __m256d b = _mm256_loadu_pd(p + k + 4);
    acc0 = _mm256_fmadd_pd(a, a, acc0);
    acc1 = _mm256_fmadd_pd(b, b, acc1);
  }
  for (; k + 4 <= m; k += 4) {
    const __m256d a = _mm256_loadu_pd(p + k);
    acc0 = _mm256_fmadd_pd(a, a, acc0);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; k < m; ++k) acc += p[k] * p[k];
  return acc;
}

void abs2(const cplx* x, double* out, std::size_t n) {
  const double* p = as_doubles(x);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d a = _mm256_loadu_pd(p + 2 * k);
    const __m256d b = _mm256_loadu_pd(p + 2 * k + 4);
    // [|z0|^2, |z2|^2, |z1|^2, |z3|^2] -> reorder lanes 0,2,1,3
    const __m256d h = _mm256_hadd_pd(_mm256_mul_pd(a, a), _mm256_mul_pd(b, b));
    _mm256_storeu_pd(out + k, _mm256_permute4x64_pd(h, 0xD8));
  }
  for (; k < n; ++k) out[k] = x[k].real() * x[k].real() + x[k].imag() * x[k].imag();
}

cplx dotc(const cplx* x, const cplx* y, std::size_t n) {
  const double* px = as_doubles(x);
  const double* py = as_doubles(y);
  __m256d same = _mm256_setzero_pd();   // [xr*yr, xi*yi, ...]
  __m256d cross = _mm256_setzero_pd();  // [xr*yi, xi*yr, ...]
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) {
    const __m256d a = _mm256_loadu_pd(px + 2 * k);
    const __m256d b = _mm256_loadu_pd(py + 2 * k);
    same = _mm256_fmadd_pd(a, b, same);
    cross = _mm256_fmadd_pd(a, _mm256_permute_pd(b, 0x5), cross);
  }
  alignas(32) double s[4], c[4];
  _mm256_store_pd(s, same);
  _mm256_store_pd(c, cross);
  double re = (s[0] + s[2]) + (s[1] + s[3]);
  double im = (c[0] + c[2]) - (c[1] + c[3]);
  for (; k < n; ++k) {
    re += x[k].real() * y[k].real() + x[k].imag() * y[k].imag();
    im += x[k].real() * y[k].imag() - x[k].imag() * y[k].real();
  }
  return {re, im};
}

void axpy(cplx alpha, const cplx* x, cplx* y, std::size_t n) {
  const double* px = as_doubles(x);
  double* py = as_doubles(y);
  const __m256d ar = _mm256_set1_pd(alpha.real());
  const __m256d ai = _mm256_setr_pd(-alpha.imag(), alpha.imag(), -alpha.imag(), alpha.imag());
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) {
    const __m256d a = _mm256_loadu_pd(px + 2 * k);
    __m256d acc = _mm256_loadu_pd(py + 2 * k);
    acc = _mm256_fmadd_pd(ar, a, acc);
    acc = _mm256_fmadd_pd(ai, _mm256_permute_pd(a, 0x5), acc);
    _mm256_storeu_pd(py + 2 * k, acc);
  }
  for (; k < n; ++k) {
    const double xr = x[k].real(), xi = x[k].imag();
    y[k] = {y[k].real() + alpha.real() * xr - alpha.imag() * xi,
            y[k].imag() + alpha.real() * xi + alpha.imag() * xr};
  }
}

}  // namespace unistoch::kernels::avx2
