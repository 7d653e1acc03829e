#include <algorithm>
#include <map>
#include <vector>

#include "doctest.h"
#include "gsc/localize.hpp"
#include "gsc/tower.hpp"
#include "gsc/util.hpp"

using namespace gsc;

namespace {

long long ipow(long long b, int e) {
    long long r = 1;
    while (e-- > 0) r *= b;
    return r;
}

// random polynomial expression in x_0..x_level and constants, never zero
Tf rand_tf_nz(const TowerCtx& T, Rng& r, int level, int steps) {
    const Gf& k = T.k();
    for (;;) {
        std::vector<Tf> pool;
        for (int t = 0; t <= level; t++) pool.push_back(tf_x(T, t, level));
        pool.push_back(tf_const(T, k.rand_nonzero(r), level));
        for (int s = 0; s < steps; s++) {
            const Tf a = pool[r.below(pool.size())];
            const Tf b = pool[r.below(pool.size())];
            switch ((int)r.below(3)) {
                case 0: pool.push_back(tf_add(T, a, b)); break;
                case 1: pool.push_back(tf_mul(T, a, b)); break;
                default: pool.push_back(tf_add(T, a, tf_const(T, k.rand_elem(r), level))); break;
            }
        }
        if (!tf_is_zero(pool.back())) return pool.back();
    }
}

}  // namespace

TEST_CASE("branches at level zero") {
    for (uint32_t q : {2u, 3u, 4u, 5u}) {
        auto Tp = make_tower(q, 1);
        const TowerCtx& T = *Tp;
        auto bb = bad_branches(T, 0);
        REQUIRE(bb.size() == 1 + q);
        auto om = omega_set(T.k(), q);
        std::sort(om.begin(), om.end());
        size_t npinf = 0;
        std::vector<uint16_t> seen;
        for (const auto& b : bb) {
            CHECK(b.e == 1);
            CHECK(b.resdeg == 1);
            if (b.is_pinf) {
                npinf++;
                continue;
            }
            if (b.base_alpha == 0) {
                CHECK(b.t == 1);  // the coordinate vanishes
            } else {
                CHECK(b.t == 0);
                CHECK(b.alpha == b.base_alpha);
            }
            seen.push_back(b.base_alpha);
        }
        CHECK(npinf == 1);
        std::sort(seen.begin(), seen.end());
        CHECK(seen == om);
    }
}

TEST_CASE("fiber structure at the first level") {
    for (uint32_t q : {2u, 3u, 4u}) {
        auto Tp = make_tower(q, 1);
        const TowerCtx& T = *Tp;
        auto bb = bad_branches(T, 1);
        // infinity: one totally ramified branch
        size_t npinf = 0;
        for (const auto& b : bb)
            if (b.is_pinf) {
                npinf++;
                CHECK(b.e == (long long)q);
                CHECK(b.resdeg == 1);
            }
        CHECK(npinf == 1);
        // over 0 the step splits: one branch per Artin-Schreier root
        std::vector<uint16_t> alphas;
        size_t over0 = 0, vanish = 0;
        for (const auto& b : bb) {
            if (b.is_pinf || b.base_alpha != 0) continue;
            over0++;
            CHECK(b.e == 1);
            CHECK(b.resdeg == 1);
            if (b.t == 2) {
                vanish++;
            } else {
                CHECK(b.t == 1);
                alphas.push_back(b.alpha);
            }
        }
        CHECK(over0 == q);
        CHECK(vanish == 1);
        std::sort(alphas.begin(), alphas.end());
        CHECK(alphas.size() == q - 1);
        CHECK(std::unique(alphas.begin(), alphas.end()) == alphas.end());
        // over a nonzero point of Omega the step is totally ramified
        for (const auto& b : bb) {
            if (b.is_pinf || b.base_alpha == 0) continue;
            CHECK(b.e == (long long)q);
            CHECK(b.resdeg == 1);
            CHECK(b.t == 0);
            CHECK(b.alpha == b.base_alpha);
        }
    }
}

TEST_CASE("fiber degree conservation and determinism") {
    for (auto [q, m] : std::vector<std::pair<uint32_t, int>>{
             {2, 2}, {2, 3}, {2, 4}, {3, 2}, {3, 3}, {4, 2}, {5, 2}}) {
        auto Tp = make_tower(q, m);
        const TowerCtx& T = *Tp;
        auto bb = bad_branches(T, m);
        std::map<std::pair<int, uint16_t>, long long> totals;
        for (const auto& b : bb) {
            totals[{b.base_kind, b.base_alpha}] += b.e * b.resdeg;
            CHECK(b.q == q);
            CHECK(b.m == m);
            if (!b.is_pinf) {
                CHECK(b.t >= 0);
                CHECK(b.t <= m + 1);
            }
        }
        CHECK(totals.size() == 1 + q);
        for (const auto& [base, tot] : totals) CHECK(tot == ipow(q, m));
        // a second enumeration reproduces the same branches
        auto bb2 = bad_branches(T, m);
        REQUIRE(bb2.size() == bb.size());
        for (size_t i = 0; i < bb.size(); i++) {
            CHECK(bb[i].path == bb2[i].path);
            CHECK(bb[i].base_kind == bb2[i].base_kind);
            CHECK(bb[i].base_alpha == bb2[i].base_alpha);
            CHECK(bb[i].e == bb2[i].e);
            CHECK(bb[i].resdeg == bb2[i].resdeg);
            CHECK(bb[i].t == bb2[i].t);
            CHECK(bb[i].alpha == bb2[i].alpha);
        }
    }
}

TEST_CASE("valuations at infinity") {
    for (auto [q, m] : std::vector<std::pair<uint32_t, int>>{{2, 1}, {2, 3}, {3, 2}, {4, 2}}) {
        auto Tp = make_tower(q, m);
        const TowerCtx& T = *Tp;
        Branch pinf = pinf_branch(T, m);
        CHECK(pinf.is_pinf);
        CHECK(pinf.e == ipow(q, m));
        for (int j = 0; j <= m; j++)
            CHECK(weight_of(T, tf_x(T, j, m), pinf) == ipow(q, m - j));
        CHECK(weight_of(T, tf_one(T, m), pinf) == 0);
        // weights add under multiplication
        Tf f = tf_mul(T, tf_pow(T, tf_x(T, 0, m), 2), tf_x(T, m, m));
        CHECK(weight_of(T, f, pinf) == 2 * ipow(q, m) + 1);
        CHECK(weight_of(T, f, m) == 2 * ipow(q, m) + 1);
    }
}

TEST_CASE("valuation arithmetic at finite branches") {
    for (auto [q, m] : std::vector<std::pair<uint32_t, int>>{{2, 2}, {3, 2}}) {
        auto Tp = make_tower(q, m);
        const TowerCtx& T = *Tp;
        auto bb = bad_branches(T, m);
        Rng r(0x6c6f63 + q);
        for (int it = 0; it < 6; it++) {
            Tf f = rand_tf_nz(T, r, m, 4);
            Tf g = rand_tf_nz(T, r, m, 4);
            Tf fg = tf_mul(T, f, g);
            REQUIRE(!tf_is_zero(fg));
            Tf s = tf_add(T, f, g);
            for (auto& b : bb) {
                long long vf = valuation(T, f, b);
                long long vg = valuation(T, g, b);
                CHECK(valuation(T, fg, b) == vf + vg);
                if (!tf_is_zero(s)) CHECK(valuation(T, s, b) >= std::min(vf, vg));
            }
        }
    }
}

TEST_CASE("valuation rejects bad input") {
    auto Tp = make_tower(2, 2);
    const TowerCtx& T = *Tp;
    Branch pinf = pinf_branch(T, 2);
    CHECK_THROWS_AS((void)valuation(T, tf_zero(2), pinf), std::domain_error);
    CHECK_THROWS_AS((void)valuation(T, tf_one(T, 1), pinf), std::invalid_argument);
    CHECK_THROWS_AS((void)bad_branches(T, 3), std::invalid_argument);
    CHECK_THROWS_AS((void)pinf_branch(T, -1), std::invalid_argument);
}

TEST_CASE("branch deepening is stable") {
    auto Tp = make_tower(3, 2);
    const TowerCtx& T = *Tp;
    auto bb = bad_branches(T, 2);
    Tf f = tf_add(T, tf_mul(T, tf_x(T, 1, 2), tf_x(T, 2, 2)), tf_one(T, 2));
    for (auto& b : bb) {
        long long v0 = valuation(T, f, b);
        Branch copy = b;
        branch_ensure(T, copy, 4 * copy.cut);
        CHECK(copy.t == b.t);
        CHECK(copy.alpha == b.alpha);
        CHECK(copy.e == b.e);
        CHECK(copy.resdeg == b.resdeg);
        CHECK(valuation(T, f, copy) == v0);
    }
}

TEST_CASE("regular basis at level zero is plain powers") {
    auto Tp = make_tower(3, 1);
    const TowerCtx& T = *Tp;
    auto rb = regular_basis(T, 0, 2);
    REQUIRE(rb.g.size() == 3);
    for (int s = 0; s <= 2; s++) {
        CHECK(rb.weights[(size_t)s] == 3 + s);
        CHECK(tf_eq(rb.g[(size_t)s], tf_pow(T, tf_x(T, 0, 0), (uint64_t)(3 + s))));
    }
}

TEST_CASE("regular basis hits every weight and stays finite") {
    for (auto [q, m, smax] : std::vector<std::array<int, 3>>{
             {2, 1, 3}, {3, 1, 2}, {4, 1, 7}, {2, 2, 3}}) {
        auto Tp = make_tower((uint32_t)q, m);
        const TowerCtx& T = *Tp;
        auto rb = regular_basis(T, m, smax);
        REQUIRE((int)rb.g.size() == smax + 1);
        Branch pinf = pinf_branch(T, m);
        long long wtop = ipow(q, m + 1);
        for (int s = 0; s <= smax; s++) {
            CHECK(rb.weights[(size_t)s] == wtop + s);
            CHECK(weight_of(T, rb.g[(size_t)s], pinf) == wtop + s);
        }
        // no poles anywhere over the coordinate patch used by codes
        auto pl = code_places(T, m);
        Rng r(0x706c61636573ULL + (uint64_t)q);
        for (int it = 0; it < 24; it++) {
            const uint16_t* pt = pl.place(r.below(pl.n));
            for (const auto& g : rb.g) (void)tf_eval(T, g, pt);
        }
    }
}

TEST_CASE("shifted regular functions: pole table") {
    // shift f -> f[i]; weight at infinity is preserved, branches with small
    // vanishing depth t pick up poles of order r*q^(max(0, 2t-(m+i)))
    for (auto [q, m, i] : std::vector<std::array<int, 3>>{
             {2, 1, 1}, {2, 1, 2}, {2, 2, 1}, {3, 1, 1}}) {
        int M = m + i;
        auto Tp = make_tower((uint32_t)q, M);
        const TowerCtx& T = *Tp;
        auto rb = regular_basis(T, m, std::min(2, (int)ipow(q, m + 1) - 1));
        std::vector<std::pair<Tf, long long>> fs;
        for (size_t s = 0; s < rb.g.size(); s++) fs.emplace_back(rb.g[s], rb.weights[s]);
        fs.emplace_back(tf_pow(T, tf_x(T, 0, m), 2), 2 * ipow(q, m));
        auto bb = bad_branches(T, M);
        for (auto& [f, r] : fs) {
            Tf F = tf_shift(T, f, i);
            REQUIRE(F.level == M);
            for (auto& b : bb) {
                long long v = valuation(T, F, b);
                if (b.is_pinf) {
                    CHECK(v == -r);
                } else if (b.t < i) {
                    long long want = 2 * b.t <= M ? -r : -r * ipow(q, 2 * b.t - M);
                    CHECK(v == want);
                } else {
                    CHECK(v >= 0);
                }
            }
        }
    }
}
