#pragma once
// Vector kernels over a table field, for the data-parallel inner loops
// (blockwise encoding, Hadamard scalings, Krylov iterations, elimination).
//
// Every operation has a scalar reference implementation and, where the field
// layout allows it, a SIMD variant (AVX2 on x86-64, NEON on aarch64) selected
// once at context-build time:
//
//  * char-2 fields: addition is XOR; scaling by a constant decomposes over
//    the bit planes of the source index with a per-bit table.
//  * F_{q^2} for odd prime q: indices split as a0 + q*a1; products reduce
//    through the degree-2 modulus with Barrett-style u16 modular arithmetic.
//
// Fields outside those shapes (odd non-prime q) fall back to scalar.  SIMD
// and scalar paths are bit-for-bit equivalent and are tested against each
// other.

#include <cstddef>
#include <cstdint>
#include <string>

#include "gsc/ffield.hpp"

namespace gsc {

enum class KernelImpl { Scalar, SimdChar2, SimdOddPrime };

struct KernelCtx {
    const Gf* k = nullptr;
    KernelImpl impl = KernelImpl::Scalar;
    // char-2 data
    uint32_t bits = 0;  // bits per index
    // odd-prime data: order = q^2, modulus z^2 + m1 z + m0 over F_q
    uint16_t q = 0;
    uint16_t neg_m0 = 0, neg_m1 = 0;
    uint16_t div_magic = 0;  // floor(i/q) = (i*div_magic) >> 16 for i < q^2
    uint16_t red_magic = 0;  // v mod q via v - q*((v*red_magic) >> 16), v <= (q-1)^2*(q+1)
};

// Build a kernel context; allow_simd=false forces the scalar path (used by
// the equivalence tests and available for debugging).
KernelCtx make_kernel_ctx(const Gf& k, bool allow_simd = true);

// True when the running CPU supports the compiled SIMD variant.
bool simd_available();
std::string kernel_impl_name(KernelImpl impl);

// dst[i] += src[i]
void vec_add(const KernelCtx& c, uint16_t* dst, const uint16_t* src, size_t n);
// dst[i] -= src[i]
void vec_sub(const KernelCtx& c, uint16_t* dst, const uint16_t* src, size_t n);
// dst[i] += s * src[i]
void vec_axpy(const KernelCtx& c, uint16_t* dst, uint16_t s, const uint16_t* src, size_t n);
// dst[i] = s * src[i]
void vec_scale(const KernelCtx& c, uint16_t* dst, uint16_t s, const uint16_t* src, size_t n);
// dst[i] += a[i] * b[i]
void vec_hadamard_accum(const KernelCtx& c, uint16_t* dst, const uint16_t* a, const uint16_t* b,
                        size_t n);
// dst[i] = a[i] * b[i]
void vec_hadamard(const KernelCtx& c, uint16_t* dst, const uint16_t* a, const uint16_t* b, size_t n);
// <a, b>
uint16_t vec_dot(const KernelCtx& c, const uint16_t* a, const uint16_t* b, size_t n);

// C (r x n) += A (r x m) * B (m x n), all row-major contiguous.
void gemm_accum(const KernelCtx& c, uint16_t* C, const uint16_t* A, const uint16_t* B, size_t r,
                size_t m, size_t n);

namespace detail {
// SIMD entry points (defined in the arch-specific translation unit; the
// scalar TU provides fallbacks when the target is not compiled in).
bool simd_compiled();
bool simd_runtime_ok();
void simd_vec_add_c2(uint16_t* dst, const uint16_t* src, size_t n);
void simd_vec_axpy_c2(const KernelCtx& c, uint16_t* dst, uint16_t s, const uint16_t* src, size_t n,
                      bool accumulate);
void simd_vec_add_odd(const KernelCtx& c, uint16_t* dst, const uint16_t* src, size_t n, bool negate);
void simd_vec_axpy_odd(const KernelCtx& c, uint16_t* dst, uint16_t s, const uint16_t* src, size_t n,
                       bool accumulate);
void simd_vec_hadamard_odd(const KernelCtx& c, uint16_t* dst, const uint16_t* a, const uint16_t* b,
                           size_t n, bool accumulate);
}  // namespace detail

}  // namespace gsc
