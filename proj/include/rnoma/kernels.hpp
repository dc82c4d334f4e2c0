#pragma once

// Complex inner-product kernels used by channel construction, beamforming and
// the coupling matrices fed to the power solvers. Each has a scalar reference
// and, on x86-64, an AVX2/FMA variant picked at runtime. RNOMA_SIMD=scalar in
// the environment pins the reference path.

#include <complex>
#include <cstddef>
#include <span>

namespace rnoma {

using cplx = std::complex<double>;

namespace kernels {

enum class Isa { scalar, avx2 };

// |a^H b|^2
double inner_abs2(std::span<const cplx> a, std::span<const cplx> b);
// a^H b
cplx inner(std::span<const cplx> a, std::span<const cplx> b);
// ||a||^2
double norm2(std::span<const cplx> a);
// out[i*n + j] = |h_i^H v_j|^2 for row-major n x len blocks h and v.
void coupling_matrix(std::span<const cplx> h, std::span<const cplx> v, std::size_t n, std::size_t len,
                     std::span<double> out);

Isa active_isa();
bool avx2_supported();
// Returns the previously active ISA. Requesting avx2 on a machine without it
// leaves the scalar path active.
Isa set_isa(Isa isa);
const char* isa_name(Isa isa);

namespace scalar {
cplx inner(const cplx* a, const cplx* b, std::size_t len);
double norm2(const cplx* a, std::size_t len);
}  // namespace scalar

#if defined(RNOMA_HAVE_AVX2)
namespace avx2 {
cplx inner(const cplx* a, const cplx* b, std::size_t len);
double norm2(const cplx* a, std::size_t len);
}  // namespace avx2
#endif

}  // namespace kernels
}  // namespace rnoma
