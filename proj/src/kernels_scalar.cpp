#include "unistoch/kernels.hpp"

namespace unistoch::kernels::scalar {

double sum_abs2(const cplx* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) acc += x[k].real() * x[k].real() + x[k].imag() * x[k].imag();
  return acc;
}

void abs2(const cplx* x, double* out, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) out[k] = x[k].real() * x[k].real() + x[k].imag() * x[k].imag();
}

cplx dotc(const cplx* x, const cplx* y, std::size_t n) {
  double re = 0.0, im = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    re += x[k].real() * y[k].real() + x[k].imag() * y[k].imag();
    im += x[k].real() * y[k].imag() - x[k].imag() * y[k].real();
  }
  return {re, im};
}

void axpy(cplx alpha, const cplx* x, cplx* y, std::size_t n) {
  const double ar = alpha.real(), ai = alpha.imag();
  for (std::size_t k = 0; k < n; ++k) {
    const double xr = x[k].real(), xi = x[k].imag();
    y[k] = {y[k].real() + ar * xr - ai * xi, y[k].imag() + ar * xi + ai * xr};
  }
}

}  // namespace unistoch::kernels::scalar
