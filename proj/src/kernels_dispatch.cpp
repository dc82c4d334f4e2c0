#include <atomic>
#include <cstdlib>
#include <cstring>

#include "rnoma/kernels.hpp"

namespace rnoma::kernels {

namespace {

bool detect_avx2() {
#if defined(RNOMA_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa initial_isa() {
  const char* env = std::getenv("RNOMA_SIMD");
  if (env && std::strcmp(env, "scalar") == 0) return Isa::scalar;
  return detect_avx2() ? Isa::avx2 : Isa::scalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

}  // namespace

bool avx2_supported() {
  static const bool supported = detect_avx2();
  return supported;
}

Isa active_isa() { return current().load(std::memory_order_relaxed); }

Isa set_isa(Isa isa) {
  if (isa == Isa::avx2 && !avx2_supported()) isa = Isa::scalar;
  return current().exchange(isa);
}

const char* isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

cplx inner(std::span<const cplx> a, std::span<const cplx> b) {
#if defined(RNOMA_HAVE_AVX2)
  if (active_isa() == Isa::avx2) return avx2::inner(a.data(), b.data(), a.size());
#endif
  return scalar::inner(a.data(), b.data(), a.size());
}

double inner_abs2(std::span<const cplx> a, std::span<const cplx> b) { return std::norm(inner(a, b)); }

double norm2(std::span<const cplx> a) {
#if defined(RNOMA_HAVE_AVX2)
  if (active_isa() == Isa::avx2) return avx2::norm2(a.data(), a.size());
#endif
  return scalar::norm2(a.data(), a.size());
}

void coupling_matrix(std::span<const cplx> h, std::span<const cplx> v, std::size_t n, std::size_t len,
                     std::span<double> out) {
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      out[i * n + j] = inner_abs2(h.subspan(i * len, len), v.subspan(j * len, len));
}

}  // namespace rnoma::kernels
