// SIMD kernel variants.  Compiled with -mavx2 on x86-64; uses NEON on
// aarch64.  Falls back to never-called stubs elsewhere (the dispatcher checks
// simd_compiled() first).  Semantics must match the scalar reference
// implementations bit for bit; the unit tests compare the two paths.

#include "gsc/kernels.hpp"

#if defined(__AVX2__)
#include <immintrin.h>
#define GSC_SIMD_X86 1
#elif defined(__aarch64__)
#include <arm_neon.h>
#define GSC_SIMD_NEON 1
#endif

namespace gsc::detail {

bool simd_compiled() {
#if defined(GSC_SIMD_X86) || defined(GSC_SIMD_NEON)
    return true;
#else
    return false;
#endif
}

bool simd_runtime_ok() {
#if defined(GSC_SIMD_X86)
    return __builtin_cpu_supports("avx2");
#elif defined(GSC_SIMD_NEON)
    return true;
#else
    return false;
#endif
}

#if defined(GSC_SIMD_X86)

void simd_vec_add_c2(uint16_t* dst, const uint16_t* src, size_t n) {
    size_t i = 0;
    for (; i + 16 <= n; i += 16) {
        __m256i a = _mm256_loadu_si256((const __m256i*)(dst + i));
        __m256i b = _mm256_loadu_si256((const __m256i*)(src + i));
        _mm256_storeu_si256((__m256i*)(dst + i), _mm256_xor_si256(a, b));
    }
    for (; i < n; i++) dst[i] ^= src[i];
}

void simd_vec_axpy_c2(const KernelCtx& c, uint16_t* dst, uint16_t s, const uint16_t* src, size_t n,
                      bool accumulate) {
    const Gf& k = *c.k;
    if (s == 0) {
        if (!accumulate) std::fill(dst, dst + n, (uint16_t)0);
        return;
    }
    // bit-plane decomposition: s * x = xor over set bits b of x of (s * z^b)
    uint16_t tab[16];
    for (uint32_t b = 0; b < c.bits; b++) tab[b] = k.mul(s, (uint16_t)(1u << b));
    size_t i = 0;
    for (; i + 16 <= n; i += 16) {
        __m256i v = _mm256_loadu_si256((const __m256i*)(src + i));
        __m256i acc = accumulate ? _mm256_loadu_si256((const __m256i*)(dst + i))
                                 : _mm256_setzero_si256();
        for (uint32_t b = 0; b < c.bits; b++) {
            // lanes with bit b set become 0xffff
            __m256i mask = _mm256_srai_epi16(_mm256_slli_epi16(v, (int)(15 - b)), 15);
            acc = _mm256_xor_si256(acc, _mm256_and_si256(mask, _mm256_set1_epi16((short)tab[b])));
        }
        _mm256_storeu_si256((__m256i*)(dst + i), acc);
    }
    for (; i < n; i++) {
        uint16_t acc = accumulate ? dst[i] : (uint16_t)0;
        uint16_t x = src[i];
        for (uint32_t b = 0; b < c.bits; b++) {
            if (x & (1u << b)) acc ^= tab[b];
        }
        dst[i] = acc;
    }
}

namespace {

struct OddConsts {
    __m256i q, qm1, div_magic, red_magic, neg_m0, neg_m1;
};

inline OddConsts odd_consts(const KernelCtx& c) {
    return {_mm256_set1_epi16((short)c.q),        _mm256_set1_epi16((short)(c.q - 1)),
            _mm256_set1_epi16((short)c.div_magic), _mm256_set1_epi16((short)c.red_magic),
            _mm256_set1_epi16((short)c.neg_m0),    _mm256_set1_epi16((short)c.neg_m1)};
}

// index -> (a0, a1) with idx = a0 + q*a1
inline void odd_unpack(const OddConsts& oc, __m256i v, __m256i& a0, __m256i& a1) {
    a1 = _mm256_mulhi_epu16(v, oc.div_magic);
    a0 = _mm256_sub_epi16(v, _mm256_mullo_epi16(a1, oc.q));
}

inline __m256i odd_pack(const OddConsts& oc, __m256i a0, __m256i a1) {
    return _mm256_add_epi16(a0, _mm256_mullo_epi16(a1, oc.q));
}

// v mod q for v < 2^13
inline __m256i odd_red(const OddConsts& oc, __m256i v) {
    __m256i t = _mm256_mulhi_epu16(v, oc.red_magic);
    return _mm256_sub_epi16(v, _mm256_mullo_epi16(t, oc.q));
}

// (a + b) mod q for a, b < q (or b <= q)
inline __m256i odd_addred(const OddConsts& oc, __m256i a, __m256i b) {
    __m256i s = _mm256_add_epi16(a, b);
    __m256i ge = _mm256_cmpgt_epi16(s, oc.qm1);
    return _mm256_sub_epi16(s, _mm256_and_si256(ge, oc.q));
}

// full product (a0,a1)*(b0,b1) followed by Barrett reduction of both coords
inline void odd_mul(const OddConsts& oc, __m256i a0, __m256i a1, __m256i b0, __m256i b1,
                    __m256i& p0, __m256i& p1) {
    __m256i a1b1 = _mm256_mullo_epi16(a1, b1);
    p0 = _mm256_add_epi16(_mm256_mullo_epi16(a0, b0), _mm256_mullo_epi16(a1b1, oc.neg_m0));
    p1 = _mm256_add_epi16(_mm256_add_epi16(_mm256_mullo_epi16(a0, b1), _mm256_mullo_epi16(a1, b0)),
                          _mm256_mullo_epi16(a1b1, oc.neg_m1));
    p0 = odd_red(oc, p0);
    p1 = odd_red(oc, p1);
}

}  // namespace

void simd_vec_add_odd(const KernelCtx& c, uint16_t* dst, const uint16_t* src, size_t n,
                      bool negate) {
    const Gf& k = *c.k;
    OddConsts oc = odd_consts(c);
    size_t i = 0;
    for (; i + 16 <= n; i += 16) {
        __m256i x = _mm256_loadu_si256((const __m256i*)(dst + i));
        __m256i y = _mm256_loadu_si256((const __m256i*)(src + i));
        __m256i x0, x1, y0, y1;
        odd_unpack(oc, x, x0, x1);
        odd_unpack(oc, y, y0, y1);
        if (negate) {
            // q - y lands in [1, q]; the conditional subtract in odd_addred
            // folds the q case back to 0
            y0 = _mm256_sub_epi16(oc.q, y0);
            y1 = _mm256_sub_epi16(oc.q, y1);
        }
        __m256i r0 = odd_addred(oc, x0, y0);
        __m256i r1 = odd_addred(oc, x1, y1);
        _mm256_storeu_si256((__m256i*)(dst + i), odd_pack(oc, r0, r1));
    }
    for (; i < n; i++) dst[i] = negate ? k.sub(dst[i], src[i]) : k.add(dst[i], src[i]);
}

void simd_vec_axpy_odd(const KernelCtx& c, uint16_t* dst, uint16_t s, const uint16_t* src, size_t n,
                       bool accumulate) {
    const Gf& k = *c.k;
    if (s == 0) {
        if (!accumulate) std::fill(dst, dst + n, (uint16_t)0);
        return;
    }
    OddConsts oc = odd_consts(c);
    __m256i s0 = _mm256_set1_epi16((short)(s % c.q));
    __m256i s1 = _mm256_set1_epi16((short)(s / c.q));
    size_t i = 0;
    for (; i + 16 <= n; i += 16) {
        __m256i v = _mm256_loadu_si256((const __m256i*)(src + i));
        __m256i a0, a1, p0, p1;
        odd_unpack(oc, v, a0, a1);
        odd_mul(oc, a0, a1, s0, s1, p0, p1);
        if (accumulate) {
            __m256i d = _mm256_loadu_si256((const __m256i*)(dst + i));
            __m256i d0, d1;
            odd_unpack(oc, d, d0, d1);
            p0 = odd_addred(oc, d0, p0);
            p1 = odd_addred(oc, d1, p1);
        }
        _mm256_storeu_si256((__m256i*)(dst + i), odd_pack(oc, p0, p1));
    }
    for (; i < n; i++) {
        uint16_t v = k.mul(s, src[i]);
        dst[i] = accumulate ? k.add(dst[i], v) : v;
    }
}

void simd_vec_hadamard_odd(const KernelCtx& c, uint16_t* dst, const uint16_t* a, const uint16_t* b,
                           size_t n, bool accumulate) {
    const Gf& k = *c.k;
    OddConsts oc = odd_consts(c);
    size_t i = 0;
    for (; i + 16 <= n; i += 16) {
        __m256i x = _mm256_loadu_si256((const __m256i*)(a + i));
        __m256i y = _mm256_loadu_si256((const __m256i*)(b + i));
        __m256i x0, x1, y0, y1, p0, p1;
        odd_unpack(oc, x, x0, x1);
        odd_unpack(oc, y, y0, y1);
        odd_mul(oc, x0, x1, y0, y1, p0, p1);
        if (accumulate) {
            __m256i d = _mm256_loadu_si256((const __m256i*)(dst + i));
            __m256i d0, d1;
            odd_unpack(oc, d, d0, d1);
            p0 = odd_addred(oc, d0, p0);
            p1 = odd_addred(oc, d1, p1);
        }
        _mm256_storeu_si256((__m256i*)(dst + i), odd_pack(oc, p0, p1));
    }
    for (; i < n; i++) {
        uint16_t v = k.mul(a[i], b[i]);
        dst[i] = accumulate ? k.add(dst[i], v) : v;
    }
}

#elif defined(GSC_SIMD_NEON)

void simd_vec_add_c2(uint16_t* dst, const uint16_t* src, size_t n) {
    size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        vst1q_u16(dst + i, veorq_u16(vld1q_u16(dst + i), vld1q_u16(src + i)));
    }
    for (; i < n; i++) dst[i] ^= src[i];
}

void simd_vec_axpy_c2(const KernelCtx& c, uint16_t* dst, uint16_t s, const uint16_t* src, size_t n,
                      bool accumulate) {
    const Gf& k = *c.k;
    if (s == 0) {
        if (!accumulate) std::fill(dst, dst + n, (uint16_t)0);
        return;
    }
    uint16_t tab[16];
    for (uint32_t b = 0; b < c.bits; b++) tab[b] = k.mul(s, (uint16_t)(1u << b));
    size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        uint16x8_t v = vld1q_u16(src + i);
        uint16x8_t acc = accumulate ? vld1q_u16(dst + i) : vdupq_n_u16(0);
        for (uint32_t b = 0; b < c.bits; b++) {
            uint16x8_t bit = vtstq_u16(v, vdupq_n_u16((uint16_t)(1u << b)));
            acc = veorq_u16(acc, vandq_u16(bit, vdupq_n_u16(tab[b])));
        }
        vst1q_u16(dst + i, acc);
    }
    for (; i < n; i++) {
        uint16_t acc = accumulate ? dst[i] : (uint16_t)0;
        for (uint32_t b = 0; b < c.bits; b++) {
            if (src[i] & (1u << b)) acc ^= tab[b];
        }
        dst[i] = acc;
    }
}

namespace {

// (v * magic) >> 16, elementwise, exact for the verified ranges
inline uint16x8_t mulhi_u16(uint16x8_t v, uint16_t magic) {
    uint32x4_t lo = vmull_u16(vget_low_u16(v), vdup_n_u16(magic));
    uint32x4_t hi = vmull_u16(vget_high_u16(v), vdup_n_u16(magic));
    return vcombine_u16(vshrn_n_u32(lo, 16), vshrn_n_u32(hi, 16));
}

inline void odd_unpack(const KernelCtx& c, uint16x8_t v, uint16x8_t& a0, uint16x8_t& a1) {
    a1 = mulhi_u16(v, c.div_magic);
    a0 = vsubq_u16(v, vmulq_u16(a1, vdupq_n_u16(c.q)));
}

inline uint16x8_t odd_pack(const KernelCtx& c, uint16x8_t a0, uint16x8_t a1) {
    return vaddq_u16(a0, vmulq_u16(a1, vdupq_n_u16(c.q)));
}

inline uint16x8_t odd_red(const KernelCtx& c, uint16x8_t v) {
    uint16x8_t t = mulhi_u16(v, c.red_magic);
    return vsubq_u16(v, vmulq_u16(t, vdupq_n_u16(c.q)));
}

inline uint16x8_t odd_addred(const KernelCtx& c, uint16x8_t a, uint16x8_t b) {
    uint16x8_t s = vaddq_u16(a, b);
    uint16x8_t ge = vcgeq_u16(s, vdupq_n_u16(c.q));
    return vsubq_u16(s, vandq_u16(ge, vdupq_n_u16(c.q)));
}

inline void odd_mul(const KernelCtx& c, uint16x8_t a0, uint16x8_t a1, uint16x8_t b0, uint16x8_t b1,
                    uint16x8_t& p0, uint16x8_t& p1) {
    uint16x8_t a1b1 = vmulq_u16(a1, b1);
    p0 = vaddq_u16(vmulq_u16(a0, b0), vmulq_u16(a1b1, vdupq_n_u16(c.neg_m0)));
    p1 = vaddq_u16(vaddq_u16(vmulq_u16(a0, b1), vmulq_u16(a1, b0)),
                   vmulq_u16(a1b1, vdupq_n_u16(c.neg_m1)));
    p0 = odd_red(c, p0);
    p1 = odd_red(c, p1);
}

}  // namespace

void simd_vec_add_odd(const KernelCtx& c, uint16_t* dst, const uint16_t* src, size_t n,
                      bool negate) {
    const Gf& k = *c.k;
    size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        uint16x8_t x = vld1q_u16(dst + i), y = vld1q_u16(src + i);
        uint16x8_t x0, x1, y0, y1;
        odd_unpack(c, x, x0, x1);
        odd_unpack(c, y, y0, y1);
        if (negate) {
            y0 = vsubq_u16(vdupq_n_u16(c.q), y0);
            y1 = vsubq_u16(vdupq_n_u16(c.q), y1);
        }
        vst1q_u16(dst + i, odd_pack(c, odd_addred(c, x0, y0), odd_addred(c, x1, y1)));
    }
    for (; i < n; i++) dst[i] = negate ? k.sub(dst[i], src[i]) : k.add(dst[i], src[i]);
}

void simd_vec_axpy_odd(const KernelCtx& c, uint16_t* dst, uint16_t s, const uint16_t* src, size_t n,
                       bool accumulate) {
    const Gf& k = *c.k;
    if (s == 0) {
        if (!accumulate) std::fill(dst, dst + n, (uint16_t)0);
        return;
    }
    uint16x8_t s0 = vdupq_n_u16((uint16_t)(s % c.q));
    uint16x8_t s1 = vdupq_n_u16((uint16_t)(s / c.q));
    size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        uint16x8_t v = vld1q_u16(src + i);
        uint16x8_t a0, a1, p0, p1;
        odd_unpack(c, v, a0, a1);
        odd_mul(c, a0, a1, s0, s1, p0, p1);
        if (accumulate) {
            uint16x8_t d = vld1q_u16(dst + i);
            uint16x8_t d0, d1;
            odd_unpack(c, d, d0, d1);
            p0 = odd_addred(c, d0, p0);
            p1 = odd_addred(c, d1, p1);
        }
        vst1q_u16(dst + i, odd_pack(c, p0, p1));
    }
    for (; i < n; i++) {
        uint16_t v = k.mul(s, src[i]);
        dst[i] = accumulate ? k.add(dst[i], v) : v;
    }
}

void simd_vec_hadamard_odd(const KernelCtx& c, uint16_t* dst, const uint16_t* a, const uint16_t* b,
                           size_t n, bool accumulate) {
    const Gf& k = *c.k;
    size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        uint16x8_t x = vld1q_u16(a + i), y = vld1q_u16(b + i);
        uint16x8_t x0, x1, y0, y1, p0, p1;
        odd_unpack(c, x, x0, x1);
        odd_unpack(c, y, y0, y1);
        odd_mul(c, x0, x1, y0, y1, p0, p1);
        if (accumulate) {
            uint16x8_t d = vld1q_u16(dst + i);
            uint16x8_t d0, d1;
            odd_unpack(c, d, d0, d1);
            p0 = odd_addred(c, d0, p0);
            p1 = odd_addred(c, d1, p1);
        }
        vst1q_u16(dst + i, odd_pack(c, p0, p1));
    }
    for (; i < n; i++) {
        uint16_t v = k.mul(a[i], b[i]);
        dst[i] = accumulate ? k.add(dst[i], v) : v;
    }
}

#else

void simd_vec_add_c2(uint16_t*, const uint16_t*, size_t) {
    throw std::logic_error("SIMD kernels not compiled");
}
void simd_vec_axpy_c2(const KernelCtx&, uint16_t*, uint16_t, const uint16_t*, size_t, bool) {
    throw std::logic_error("SIMD kernels not compiled");
}
void simd_vec_add_odd(const KernelCtx&, uint16_t*, const uint16_t*, size_t, bool) {
    throw std::logic_error("SIMD kernels not compiled");
}
void simd_vec_axpy_odd(const KernelCtx&, uint16_t*, uint16_t, const uint16_t*, size_t, bool) {
    throw std::logic_error("SIMD kernels not compiled");
}
void simd_vec_hadamard_odd(const KernelCtx&, uint16_t*, const uint16_t*, const uint16_t*, size_t,
                           bool) {
    throw std::logic_error("SIMD kernels not compiled");
}

#endif

}  // namespace gsc::detail
