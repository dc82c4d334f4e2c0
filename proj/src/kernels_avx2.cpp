#include <immintrin.h>

#include "rnoma/kernels.hpp"

namespace rnoma::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

// Two complex values per register, interleaved [re0 im0 re1 im1].
cplx inner(const cplx* a, const cplx* b, std::size_t len) {
  const double* pa = reinterpret_cast<const double*>(a);
  const double* pb = reinterpret_cast<const double*>(b);
  __m256d acc_re = _mm256_setzero_pd();  // ar*br, ai*bi
  __m256d acc_im = _mm256_setzero_pd();  // ar*bi, ai*br
  std::size_t k = 0;
  for (; k + 2 <= len; k += 2) {
    const __m256d va = _mm256_loadu_pd(pa + 2 * k);
    const __m256d vb = _mm256_loadu_pd(pb + 2 * k);
    const __m256d vb_swap = _mm256_permute_pd(vb, 0b0101);
    acc_re = _mm256_fmadd_pd(va, vb, acc_re);
    acc_im = _mm256_fmadd_pd(va, vb_swap, acc_im);
  }
  double re = hsum(acc_re);
  alignas(32) double parts[4];
  _mm256_store_pd(parts, acc_im);
  double im = (parts[0] - parts[1]) + (parts[2] - parts[3]);
  for (; k < len; ++k) {
    const double ar = a[k].real(), ai = a[k].imag();
    const double br = b[k].real(), bi = b[k].imag();
    re += ar * br + ai * bi;
    im += ar * bi - ai * br;
  }
  return {re, im};
}

double norm2(const cplx* a, std::size_t len) {
  const double* pa = reinterpret_cast<const double*>(a);
  __m256d acc = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 2 <= len; k += 2) {
    const __m256d va = _mm256_loadu_pd(pa + 2 * k);
    acc = _mm256_fmadd_pd(va, va, acc);
  }
  double total = hsum(acc);
  for (; k < len; ++k) total += a[k].real() * a[k].real() + a[k].imag() * a[k].imag();
  return total;
}

}  // namespace rnoma::kernels::avx2
