#include "gsc/kernels.hpp"

namespace gsc {

KernelCtx make_kernel_ctx(const Gf& k, bool allow_simd) {
    KernelCtx c;
    c.k = &k;
    c.impl = KernelImpl::Scalar;
    if (!allow_simd || !detail::simd_compiled() || !detail::simd_runtime_ok()) return c;
    if (k.char2()) {
        c.impl = KernelImpl::SimdChar2;
        uint32_t bits = 0;
        while ((1u << bits) < k.order()) bits++;
        c.bits = bits;
        return c;
    }
    // odd prime q with a degree-2 top modulus: order = q^2, q = p
    if (k.pdeg() == 2 && k.spec().levels.size() == 1) {
        uint32_t q = k.p();
        uint64_t magic = (65536 + q - 1) / q;
        // exact-division check for all indices
        bool ok = magic < 65536;
        for (uint32_t i = 0; ok && i < q * q; i++) {
            if ((i * magic) >> 16 != i / q) ok = false;
        }
        // reduction magic, exact on [0, vmax] where vmax bounds the raw
        // products fed to it: a0*b1 + a1*b0 + neg_m1*a1*b1 <= (q-1)^2*(q+1)
        uint64_t rmagic = (65536 + q - 1) / q;
        uint32_t vmax = (q - 1) * (q - 1) * (q + 1);
        ok = ok && vmax < 65536;
        for (uint32_t v = 0; ok && v <= vmax; v++) {
            if (v - q * ((v * rmagic) >> 16) >= q) ok = false;
        }
        if (ok) {
            c.impl = KernelImpl::SimdOddPrime;
            c.q = (uint16_t)q;
            const auto& mod = k.spec().levels[0].modulus;
            c.neg_m0 = (uint16_t)((q - mod[0] % q) % q);
            c.neg_m1 = (uint16_t)((q - mod[1] % q) % q);
            c.div_magic = (uint16_t)magic;
            c.red_magic = (uint16_t)rmagic;
        }
    }
    return c;
}

bool simd_available() { return detail::simd_compiled() && detail::simd_runtime_ok(); }

std::string kernel_impl_name(KernelImpl impl) {
    switch (impl) {
        case KernelImpl::Scalar: return "scalar";
        case KernelImpl::SimdChar2: return "simd-char2";
        case KernelImpl::SimdOddPrime: return "simd-odd-prime";
    }
    return "?";
}

namespace {

void scalar_add(const Gf& k, uint16_t* dst, const uint16_t* src, size_t n) {
    if (k.char2()) {
        for (size_t i = 0; i < n; i++) dst[i] ^= src[i];
    } else {
        for (size_t i = 0; i < n; i++) dst[i] = k.add(dst[i], src[i]);
    }
}

void scalar_sub(const Gf& k, uint16_t* dst, const uint16_t* src, size_t n) {
    for (size_t i = 0; i < n; i++) dst[i] = k.sub(dst[i], src[i]);
}

void scalar_axpy(const Gf& k, uint16_t* dst, uint16_t s, const uint16_t* src, size_t n,
                 bool accumulate) {
    if (s == 0) {
        if (!accumulate) std::fill(dst, dst + n, (uint16_t)0);
        return;
    }
    uint32_t ls = k.log_of(s);
    for (size_t i = 0; i < n; i++) {
        uint16_t v = src[i] ? k.exp_of(ls + k.log_of(src[i])) : (uint16_t)0;
        dst[i] = accumulate ? k.add(dst[i], v) : v;
    }
}

void scalar_hadamard(const Gf& k, uint16_t* dst, const uint16_t* a, const uint16_t* b, size_t n,
                     bool accumulate) {
    for (size_t i = 0; i < n; i++) {
        uint16_t v = k.mul(a[i], b[i]);
        dst[i] = accumulate ? k.add(dst[i], v) : v;
    }
}

}  // namespace

void vec_add(const KernelCtx& c, uint16_t* dst, const uint16_t* src, size_t n) {
    switch (c.impl) {
        case KernelImpl::SimdChar2: detail::simd_vec_add_c2(dst, src, n); return;
        case KernelImpl::SimdOddPrime: detail::simd_vec_add_odd(c, dst, src, n, false); return;
        default: scalar_add(*c.k, dst, src, n);
    }
}

void vec_sub(const KernelCtx& c, uint16_t* dst, const uint16_t* src, size_t n) {
    switch (c.impl) {
        case KernelImpl::SimdChar2: detail::simd_vec_add_c2(dst, src, n); return;
        case KernelImpl::SimdOddPrime: detail::simd_vec_add_odd(c, dst, src, n, true); return;
        default: scalar_sub(*c.k, dst, src, n);
    }
}

void vec_axpy(const KernelCtx& c, uint16_t* dst, uint16_t s, const uint16_t* src, size_t n) {
    switch (c.impl) {
        case KernelImpl::SimdChar2: detail::simd_vec_axpy_c2(c, dst, s, src, n, true); return;
        case KernelImpl::SimdOddPrime: detail::simd_vec_axpy_odd(c, dst, s, src, n, true); return;
        default: scalar_axpy(*c.k, dst, s, src, n, true);
    }
}

void vec_scale(const KernelCtx& c, uint16_t* dst, uint16_t s, const uint16_t* src, size_t n) {
    switch (c.impl) {
        case KernelImpl::SimdChar2: detail::simd_vec_axpy_c2(c, dst, s, src, n, false); return;
        case KernelImpl::SimdOddPrime: detail::simd_vec_axpy_odd(c, dst, s, src, n, false); return;
        default: scalar_axpy(*c.k, dst, s, src, n, false);
    }
}

void vec_hadamard_accum(const KernelCtx& c, uint16_t* dst, const uint16_t* a, const uint16_t* b,
                        size_t n) {
    if (c.impl == KernelImpl::SimdOddPrime) {
        detail::simd_vec_hadamard_odd(c, dst, a, b, n, true);
        return;
    }
    scalar_hadamard(*c.k, dst, a, b, n, true);
}

void vec_hadamard(const KernelCtx& c, uint16_t* dst, const uint16_t* a, const uint16_t* b,
                  size_t n) {
    if (c.impl == KernelImpl::SimdOddPrime) {
        detail::simd_vec_hadamard_odd(c, dst, a, b, n, false);
        return;
    }
    scalar_hadamard(*c.k, dst, a, b, n, false);
}

uint16_t vec_dot(const KernelCtx& c, const uint16_t* a, const uint16_t* b, size_t n) {
    const Gf& k = *c.k;
    uint16_t acc = 0;
    for (size_t i = 0; i < n; i++) acc = k.add(acc, k.mul(a[i], b[i]));
    return acc;
}

void gemm_accum(const KernelCtx& c, uint16_t* C, const uint16_t* A, const uint16_t* B, size_t r,
                size_t m, size_t n) {
    for (size_t i = 0; i < r; i++) {
        uint16_t* crow = C + i * n;
        const uint16_t* arow = A + i * m;
        for (size_t l = 0; l < m; l++) {
            if (arow[l]) vec_axpy(c, crow, arow[l], B + l * n, n);
        }
    }
}

}  // namespace gsc
