#include <vector>

#include "doctest.h"
#include "gsc/kernels.hpp"
#include "gsc/util.hpp"

using namespace gsc;

namespace {

std::vector<uint16_t> rand_vec(const Gf& k, Rng& r, size_t n) {
    std::vector<uint16_t> v(n);
    for (auto& x : v) x = (uint16_t)r.below_u32(k.order());
    return v;
}

// run every kernel op through both contexts and demand identical output
void check_equivalence(const Gf& k, const KernelCtx& ca, const KernelCtx& cb, uint64_t seed) {
    Rng r(seed);
    const size_t lens[] = {0, 1, 7, 15, 16, 17, 33, 100, 257};
    for (size_t n : lens) {
        auto a = rand_vec(k, r, n);
        auto b = rand_vec(k, r, n);
        uint16_t scalars[] = {0, 1, (uint16_t)r.below_u32(k.order()),
                              (uint16_t)(k.order() - 1)};

        auto da = a, db = a;
        vec_add(ca, da.data(), b.data(), n);
        vec_add(cb, db.data(), b.data(), n);
        CHECK(da == db);

        da = a, db = a;
        vec_sub(ca, da.data(), b.data(), n);
        vec_sub(cb, db.data(), b.data(), n);
        CHECK(da == db);

        for (uint16_t s : scalars) {
            da = a, db = a;
            vec_axpy(ca, da.data(), s, b.data(), n);
            vec_axpy(cb, db.data(), s, b.data(), n);
            CHECK(da == db);

            da = a, db = a;
            vec_scale(ca, da.data(), s, b.data(), n);
            vec_scale(cb, db.data(), s, b.data(), n);
            CHECK(da == db);
        }

        da = a, db = a;
        vec_hadamard(ca, da.data(), a.data(), b.data(), n);
        vec_hadamard(cb, db.data(), a.data(), b.data(), n);
        CHECK(da == db);

        da = a, db = a;
        vec_hadamard_accum(ca, da.data(), a.data(), b.data(), n);
        vec_hadamard_accum(cb, db.data(), a.data(), b.data(), n);
        CHECK(da == db);

        CHECK(vec_dot(ca, a.data(), b.data(), n) == vec_dot(cb, a.data(), b.data(), n));
    }
}

// oracle: plain triple loop
std::vector<uint16_t> gemm_oracle(const Gf& k, const std::vector<uint16_t>& C,
                                  const std::vector<uint16_t>& A, const std::vector<uint16_t>& B,
                                  size_t r, size_t m, size_t n) {
    auto out = C;
    for (size_t i = 0; i < r; i++)
        for (size_t l = 0; l < m; l++)
            for (size_t j = 0; j < n; j++)
                out[i * n + j] = k.add(out[i * n + j], k.mul(A[i * m + l], B[l * n + j]));
    return out;
}

void check_ops_correct(const Gf& k, const KernelCtx& c, uint64_t seed) {
    Rng r(seed);
    size_t n = 73;
    auto a = rand_vec(k, r, n);
    auto b = rand_vec(k, r, n);
    uint16_t s = (uint16_t)r.below_u32(k.order());

    auto d = a;
    vec_add(c, d.data(), b.data(), n);
    for (size_t i = 0; i < n; i++) CHECK(d[i] == k.add(a[i], b[i]));

    d = a;
    vec_sub(c, d.data(), b.data(), n);
    for (size_t i = 0; i < n; i++) CHECK(d[i] == k.sub(a[i], b[i]));

    d = a;
    vec_axpy(c, d.data(), s, b.data(), n);
    for (size_t i = 0; i < n; i++) CHECK(d[i] == k.add(a[i], k.mul(s, b[i])));

    d = a;
    vec_scale(c, d.data(), s, b.data(), n);
    for (size_t i = 0; i < n; i++) CHECK(d[i] == k.mul(s, b[i]));

    d = a;
    vec_hadamard(c, d.data(), a.data(), b.data(), n);
    for (size_t i = 0; i < n; i++) CHECK(d[i] == k.mul(a[i], b[i]));

    uint16_t dot = 0;
    for (size_t i = 0; i < n; i++) dot = k.add(dot, k.mul(a[i], b[i]));
    CHECK(vec_dot(c, a.data(), b.data(), n) == dot);
}

}  // namespace

TEST_CASE("kernel context selection") {
    // char-2 orders use the bit-plane variant, prime-square odd orders the
    // split-index variant, anything else stays scalar
    auto& f4 = *get_fq2(2);
    auto& f121 = *get_fq2(11);
    auto& f81 = *get_fq2(9);

    CHECK(make_kernel_ctx(f4, false).impl == KernelImpl::Scalar);
    if (simd_available()) {
        CHECK(make_kernel_ctx(f4).impl == KernelImpl::SimdChar2);
        CHECK(make_kernel_ctx(f121).impl == KernelImpl::SimdOddPrime);
        CHECK(make_kernel_ctx(*get_fq2(3)).impl == KernelImpl::SimdOddPrime);
        CHECK(make_kernel_ctx(f81).impl == KernelImpl::Scalar);  // q = 9 not prime
        auto c = make_kernel_ctx(f121);
        CHECK(c.q == 11);
        // div magic must split every index exactly
        for (uint32_t i = 0; i < 121; i++) {
            CHECK(((i * (uint32_t)c.div_magic) >> 16) == i / 11);
        }
    }
    CHECK(kernel_impl_name(KernelImpl::Scalar) == "scalar");
}

TEST_CASE("kernel scalar reference matches field ops") {
    uint64_t seed = 0x6b65726e;
    for (uint32_t q : {2u, 4u, 8u, 3u, 5u, 11u, 9u}) {
        auto& k = *get_fq2(q);
        check_ops_correct(k, make_kernel_ctx(k, false), seed + q);
    }
}

TEST_CASE("kernel simd paths match scalar") {
    if (!simd_available()) {
        MESSAGE("no SIMD on this host; dispatch check only");
    }
    uint64_t seed = 0x73696d64;
    for (uint32_t q : {2u, 4u, 8u, 16u, 3u, 5u, 11u, 13u, 9u}) {
        auto& k = *get_fq2(q);
        check_equivalence(k, make_kernel_ctx(k, false), make_kernel_ctx(k, true), seed + q);
    }
}

TEST_CASE("kernel gemm matches triple loop") {
    Rng r(0x67656d6d);
    for (uint32_t q : {4u, 11u}) {
        auto& k = *get_fq2(q);
        for (auto [rr, mm, nn] : {std::tuple<size_t, size_t, size_t>{1, 1, 1},
                                  {3, 5, 4},
                                  {8, 8, 8},
                                  {5, 17, 33}}) {
            auto A = rand_vec(k, r, rr * mm);
            auto B = rand_vec(k, r, mm * nn);
            auto C = rand_vec(k, r, rr * nn);
            auto want = gemm_oracle(k, C, A, B, rr, mm, nn);
            auto got_s = C;
            gemm_accum(make_kernel_ctx(k, false), got_s.data(), A.data(), B.data(), rr, mm, nn);
            CHECK(got_s == want);
            auto got_v = C;
            gemm_accum(make_kernel_ctx(k, true), got_v.data(), A.data(), B.data(), rr, mm, nn);
            CHECK(got_v == want);
        }
    }
}
