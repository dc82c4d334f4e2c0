#include "rnoma/kernels.hpp"

namespace rnoma::kernels::scalar {

cplx inner(const cplx* a, const cplx* b, std::size_t len) {
  double re = 0.0;
  double im = 0.0;
  for (std::size_t k = 0; k < len; ++k) {
    const double ar = a[k].real(), ai = a[k].imag();
    const double br = b[k].real(), bi = b[k].imag();
    re += ar * br + ai * bi;
    im += ar * bi - ai * br;
  }
  return {re, im};
}

double norm2(const cplx* a, std::size_t len) {
  double acc = 0.0;
  for (std::size_t k = 0; k < len; ++k) acc += a[k].real() * a[k].real() + a[k].imag() * a[k].imag();
  return acc;
}

}  // namespace rnoma::kernels::scalar
