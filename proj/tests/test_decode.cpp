#include <algorithm>
#include <vector>

#include "doctest.h"
#include "gsc/agcode.hpp"
#include "gsc/decode.hpp"
#include "gsc/fastenc.hpp"
#include "gsc/linalg.hpp"
#include "gsc/util.hpp"

using namespace gsc;

namespace {

const CodeInstance& inst3() {
    static CodeInstance C = make_code(4, 2, 2, 3);
    return C;
}

const EvalTable& tab3() {
    static EvalTable t = precompute_tables(inst3());
    return t;
}

std::vector<uint16_t> rand_vec(const Gf& kf, Rng& rng, size_t len) {
    std::vector<uint16_t> v(len);
    for (auto& x : v) x = kf.rand_elem(rng);
    return v;
}

// u_j(P_i) for every place from the naive span encoder, then Horner in y
std::vector<uint16_t> naive_rows(const CodeInstance& C, const std::vector<uint16_t>& y,
                                 const DecoderParams& par, const std::vector<uint16_t>& a) {
    const Gf& kf = C.tower->k();
    size_t N = (size_t)C.par.N;
    std::vector<std::vector<uint16_t>> e(par.w.size());
    size_t off = 0;
    for (size_t j = 0; j < par.w.size(); j++) {
        if (par.w[j] < 0) continue;
        size_t len = (size_t)par.w[j] + 1;
        std::vector<uint16_t> span(a.begin() + (ptrdiff_t)off, a.begin() + (ptrdiff_t)(off + len));
        off += len;
        e[j] = naive_encode_span(C, span);
    }
    std::vector<uint16_t> out(N, 0);
    for (size_t j = par.w.size(); j-- > 0;) {
        for (size_t i = 0; i < N; i++) {
            out[i] = kf.mul(out[i], y[i]);
            if (!e[j].empty()) out[i] = kf.add(out[i], e[j][i]);
        }
    }
    return out;
}

// f_v(P) from the cached evaluations
ExtField::Elem span_at_place(const LiftTables& lt, const std::vector<uint16_t>& v) {
    const Gf& bf = lt.E->base();
    auto acc = lt.E->zero();
    for (size_t r = 0; r < v.size(); r++) {
        if (!v[r]) continue;
        for (size_t i = 0; i < acc.size(); i++)
            acc[i] = bf.add(acc[i], bf.mul(v[r], lt.evals[r][i]));
    }
    return acc;
}

std::vector<uint16_t> flip_some(const Gf& kf, std::vector<uint16_t> y, Rng& rng, int t) {
    auto pos = rng.sample_distinct((uint64_t)y.size(), (size_t)t);
    for (auto p : pos) {
        uint16_t old = y[(size_t)p];
        uint16_t nv = old;
        while (nv == old) nv = kf.rand_elem(rng);
        y[(size_t)p] = nv;
    }
    return y;
}

}  // namespace

TEST_CASE("decoder shapes: derived and explicit") {
    auto P3 = code_params(4, 2, 2, 3);
    auto u = choose_params(P3, DecodeMode::unique);
    CHECK(u.ell == 1);
    CHECK(u.B == 385);
    CHECK(u.w == std::vector<long long>{97, 95});
    CHECK(u.cols() == 194);

    auto l = choose_params(P3, DecodeMode::list);
    CHECK(l.ell == 1);
    CHECK(l.B == 478);
    CHECK(l.w == std::vector<long long>{190, 188});
    CHECK(l.cols() == 380);

    auto P48 = code_params(4, 2, 2, 48);
    auto l48 = choose_params(P48, DecodeMode::list);
    CHECK(l48.ell == 1);
    CHECK(l48.B == 503);
    CHECK(l48.w == std::vector<long long>{215, 168});

    auto P11 = code_params(11, 2, 2, 1);
    auto u11 = choose_params(P11, DecodeMode::unique);
    CHECK(u11.ell == 1);
    CHECK(u11.B == 12221);
    CHECK(u11.w == std::vector<long long>{6655, 6655});
    CHECK(u11.cols() == 13312);  // tight: N + 2 with N + 1 = 13311 needed
    auto l11 = choose_params(P11, DecodeMode::list);
    CHECK(l11.ell == 2);
    CHECK(l11.B == 14956);

    auto P8 = code_params(8, 3, 3, 100);
    auto l8 = choose_params(P8, DecodeMode::list);
    CHECK(l8.ell == 1);
    CHECK(l8.B == 52458);
    CHECK(l8.cols() == 51571);

    // every derived shape is feasible by construction
    for (auto [q, n, k, K] : {std::array<long long, 4>{4, 2, 2, 48},
                              std::array<long long, 4>{5, 2, 2, 225},
                              std::array<long long, 4>{9, 2, 2, 7}}) {
        auto P = code_params((uint32_t)q, (int)n, (int)k, K);
        CHECK(choose_params(P, DecodeMode::unique).cols() >= (size_t)P.N + 1);
        CHECK(choose_params(P, DecodeMode::list).cols() >= (size_t)P.N + 1);
    }

    // explicit shapes validate
    auto e2 = choose_params(P3, 2, 498);
    CHECK(e2.w == std::vector<long long>{66, 64, 62});
    CHECK(e2.cols() == 195);
    CHECK_THROWS_AS(choose_params(P3, 2, 497), std::invalid_argument);  // cols 192 < 193
    CHECK_THROWS_AS(choose_params(P3, 0, 1000), std::invalid_argument);
}

TEST_CASE("black-box rows match naive evaluation") {
    const CodeInstance& C = inst3();
    const EvalTable& t = tab3();
    const Gf& kf = C.tower->k();
    Rng rng(0xb10cb0c5);
    auto par = choose_params(C.par, DecodeMode::list);
    auto y = rand_vec(kf, rng, (size_t)C.par.N);

    for (int it = 0; it < 3; it++) {
        auto a = rand_vec(kf, rng, par.cols());
        CHECK(blackbox_matvec(C, t, y, par, a) == naive_rows(C, y, par, a));
    }
    // unit coefficient vectors hit single family members
    for (size_t idx : {size_t{0}, size_t{190}, size_t{191}, size_t{379}}) {
        std::vector<uint16_t> a(par.cols(), 0);
        a[idx] = 1;
        CHECK(blackbox_matvec(C, t, y, par, a) == naive_rows(C, y, par, a));
    }
    // linearity
    auto a1 = rand_vec(kf, rng, par.cols());
    auto a2 = rand_vec(kf, rng, par.cols());
    auto sum = a1;
    for (size_t i = 0; i < sum.size(); i++) sum[i] = kf.add(sum[i], a2[i]);
    auto m1 = blackbox_matvec(C, t, y, par, a1);
    auto m2 = blackbox_matvec(C, t, y, par, a2);
    auto ms = blackbox_matvec(C, t, y, par, sum);
    for (size_t i = 0; i < ms.size(); i++) CHECK(ms[i] == kf.add(m1[i], m2[i]));

    // the ell = 2 shape as well
    auto par2 = choose_params(C.par, 2, 498);
    auto a = rand_vec(kf, rng, par2.cols());
    CHECK(blackbox_matvec(C, t, y, par2, a) == naive_rows(C, y, par2, a));
}

TEST_CASE("dense and Wiedemann kernels agree on random singular systems") {
    for (uint32_t q : {4u, 11u}) {  // F_16 and F_121
        const Gf& kf = *get_fq2(q);
        auto kc = make_kernel_ctx(kf);
        Rng rng(0x5eed0 + q);
        for (int sys = 0; sys < 25; sys++) {
            size_t rows = 5 + (size_t)rng.below(296);  // up to 300
            size_t cols = rows + 1 + (size_t)rng.below(3);
            std::vector<uint16_t> M(rows * cols);
            for (auto& x : M) x = kf.rand_elem(rng);
            if (sys % 2 == 0) {
                // plant a kernel vector: last column = -(rest * v)
                std::vector<uint16_t> v = rand_vec(kf, rng, cols - 1);
                for (size_t i = 0; i < rows; i++) {
                    uint16_t acc = 0;
                    for (size_t j = 0; j + 1 < cols; j++)
                        acc = kf.add(acc, kf.mul(M[i * cols + j], v[j]));
                    M[i * cols + (cols - 1)] = kf.neg(acc);
                }
            }
            Matvec mv = [&](const std::vector<uint16_t>& x) {
                std::vector<uint16_t> out(rows, 0);
                for (size_t i = 0; i < rows; i++) {
                    uint16_t acc = 0;
                    for (size_t j = 0; j < cols; j++)
                        if (x[j]) acc = kf.add(acc, kf.mul(M[i * cols + j], x[j]));
                    out[i] = acc;
                }
                return out;
            };
            auto wd = wiedemann_nullvector(kc, mv, rows, cols, rng);
            auto dn = dense_nullvector(kc, mv, rows, cols, rng);
            for (auto* x : {&wd, &dn}) {
                CHECK(x->size() == cols);
                CHECK(std::any_of(x->begin(), x->end(), [](uint16_t v) { return v != 0; }));
                auto img = mv(*x);
                CHECK(std::all_of(img.begin(), img.end(), [](uint16_t v) { return v == 0; }));
            }
            if (mat_rank(kc, M, (int)rows, (int)cols) == (int)rows && cols == rows + 1) {
                // one-dimensional kernel: the two vectors are proportional
                size_t p = 0;
                while (wd[p] == 0) p++;
                uint16_t ratio = kf.div(dn[p], wd[p]);
                for (size_t j = 0; j < cols; j++) CHECK(dn[j] == kf.mul(ratio, wd[j]));
            }
        }
    }
}

TEST_CASE("places of prescribed degree satisfy the tower relations") {
    const CodeInstance& C = inst3();
    uint32_t q = C.par.q;
    for (uint32_t D : {1u, 2u, 5u}) {
        Rng rng(0x1ace0 + D);
        auto P = find_place_of_degree(C, D, rng);
        const ExtField& E = *P.E;
        CHECK(E.deg() == D);
        CHECK(P.coords.size() == (size_t)C.par.n + 1);
        for (const auto& x : P.coords) {
            // outside Omega: x^q + x != 0
            CHECK(!E.is_zero(E.add(E.pow(x, q), x)));
        }
        for (int i = 0; i + 1 <= C.par.n; i++) {
            const auto& x = P.coords[(size_t)i];
            const auto& nx = P.coords[(size_t)i + 1];
            // (x_{i+1}^q + x_{i+1}) (x_i^{q-1} + 1) == x_i^q
            auto lhs = E.mul(E.add(E.pow(nx, q), nx), E.add(E.pow(x, q - 1), E.one()));
            CHECK(E.eq(lhs, E.pow(x, q)));
        }
    }
    // determinism per seed
    Rng r1(77), r2(77);
    auto P1 = find_place_of_degree(C, 3, r1);
    auto P2 = find_place_of_degree(C, 3, r2);
    CHECK(P1.E->modulus() == P2.E->modulus());
    CHECK(P1.coords == P2.coords);
}

TEST_CASE("closed-form Artin-Schreier solutions match generic root finding") {
    uint32_t q = 5;
    const Gf& kf = *get_fq2(q);
    auto base = get_field(kf.spec());
    Rng rng(0xa5a5);
    auto mod = irreducible_random(kf, 4, rng);  // p = 5 does not divide m = 8
    ExtField E(base, mod.c);
    int solvable = 0;
    for (int it = 0; it < 40; it++) {
        auto c = E.rand_elem(rng);
        auto fast = artin_schreier_roots(E, q, c);
        // generic path: roots of T^q + T - c
        Poly<ExtField> f;
        f.c.assign((size_t)q + 1, E.zero());
        f.c[0] = E.neg(c);
        f.c[1] = E.one();
        f.c[q] = E.add(f.c[q], E.one());
        Rng r2(0x9e0 + (uint64_t)it);
        auto generic = poly_roots(E, f, r2);
        std::sort(generic.begin(), generic.end(),
                  [&](const auto& a, const auto& b) { return elem_less(E, a, b); });
        CHECK(fast == generic);
        if (!fast.empty()) {
            solvable++;
            CHECK(fast.size() == q);  // full Omega coset
            for (const auto& x : fast) CHECK(E.eq(E.add(E.pow(x, q), x), c));
        }
    }
    CHECK(solvable > 0);  // ~1/q of draws; 40 draws make a miss astronomically rare
}

TEST_CASE("lift tables round trip messages at the guaranteed degree") {
    const CodeInstance& C = inst3();
    const Gf& kf = C.tower->k();
    auto par = choose_params(C.par, DecodeMode::list);
    Rng rng(0x11f7);
    uint32_t D = (uint32_t)(C.par.deg_g + C.par.K);
    CHECK(D == 147);
    auto P = find_place_of_degree(C, D, rng);
    auto lt = build_lift_tables(C, par, P);
    CHECK(lt.D == 147);
    CHECK(lt.rmax == 190);
    CHECK(lt.piv.size() == 3);
    CHECK(std::is_sorted(lt.piv.begin(), lt.piv.end()));

    const ExtField& E = *lt.E;
    // evaluations agree with direct factored evaluation
    for (long long r : {0ll, 1ll, 2ll, 9ll, 190ll}) {
        auto F = f_family_any(C, r);
        CHECK(E.eq(lt.evals[(size_t)r], product_eval_in(*C.tower, F.prod, E, P.coords)));
    }

    for (int it = 0; it < 100; it++) {
        auto msg = rand_vec(kf, rng, (size_t)C.par.K);
        auto z = span_at_place(lt, msg);
        auto back = lift_root(lt, z);
        REQUIRE(back.has_value());
        CHECK(*back == msg);
    }
    // random field elements are essentially never in the 3-dimensional span
    for (int it = 0; it < 5; it++) {
        auto z = E.rand_elem(rng);
        CHECK(!lift_root(lt, z).has_value());
    }
}

TEST_CASE("root finder recovers planted roots over the big field") {
    const CodeInstance& C = inst3();
    const Gf& kf = C.tower->k();
    auto par = choose_params(C.par, DecodeMode::list);
    Rng rng(0x9007);
    auto P = find_place_of_degree(C, (uint32_t)(C.par.deg_g + C.par.K), rng);
    auto lt = build_lift_tables(C, par, P);
    const ExtField& E = *lt.E;

    // H = u (lambda - z1)(lambda - z2) with z_i images of known messages
    auto m1 = rand_vec(kf, rng, (size_t)C.par.K);
    auto m2 = rand_vec(kf, rng, (size_t)C.par.K);
    if (m1 == m2) m2[0] = kf.add(m2[0], 1);
    auto z1 = span_at_place(lt, m1);
    auto z2 = span_at_place(lt, m2);
    Poly<ExtField> h1, h2;
    h1.c = {E.neg(z1), E.one()};
    h2.c = {E.neg(z2), E.one()};
    auto H = poly_mul(E, h1, h2);
    auto u = E.rand_elem(rng);
    if (E.is_zero(u)) u = E.one();
    H = poly_scale(E, u, H);
    auto roots = poly_roots(E, H, rng);
    REQUIRE(roots.size() == 2);
    std::vector<std::vector<uint16_t>> msgs;
    for (const auto& z : roots) {
        auto v = lift_root(lt, z);
        REQUIRE(v.has_value());
        msgs.push_back(*v);
    }
    std::sort(msgs.begin(), msgs.end());
    std::vector<std::vector<uint16_t>> want{m1, m2};
    std::sort(want.begin(), want.end());
    CHECK(msgs == want);

    // arbitrary planted elements, cubic
    auto a = E.rand_elem(rng), b = E.rand_elem(rng), c = E.rand_elem(rng);
    if (E.eq(a, b)) b = E.add(b, E.one());
    if (E.eq(c, a) || E.eq(c, b)) c = E.add(E.add(a, b), E.one());
    Poly<ExtField> f{{E.neg(a), E.one()}};
    Poly<ExtField> g{{E.neg(b), E.one()}};
    Poly<ExtField> h{{E.neg(c), E.one()}};
    auto HH = poly_mul(E, poly_mul(E, f, g), h);
    auto got = poly_roots(E, HH, rng);
    std::vector<ExtField::Elem> want2{a, b, c};
    std::sort(want2.begin(), want2.end(),
              [&](const auto& x, const auto& y) { return elem_less(E, x, y); });
    CHECK(got == want2);
}

TEST_CASE("interpolation vanishes on the received graph at every place") {
    const CodeInstance& C = inst3();
    const EvalTable& t = tab3();
    const Gf& kf = C.tower->k();
    Rng rng(0x1e771);

    auto msg = rand_vec(kf, rng, (size_t)C.par.K);
    auto cw = encode(C, t, msg);
    std::vector<std::pair<const char*, std::vector<uint16_t>>> words;
    words.emplace_back("codeword", cw);
    words.emplace_back("corrupted", flip_some(kf, cw, rng, 30));
    words.emplace_back("random", rand_vec(kf, rng, (size_t)C.par.N));

    for (auto par : {choose_params(C.par, DecodeMode::list), choose_params(C.par, 2, 498)}) {
        for (auto& [name, y] : words) {
            CAPTURE(name);
            auto ip = interpolate(C, t, y, par, rng);
            bool nonzero = false;
            for (auto& uj : ip.u)
                for (auto x : uj) nonzero = nonzero || x != 0;
            CHECK(nonzero);
            // stack the spans back and verify rows through the naive encoder
            std::vector<uint16_t> a;
            for (auto& uj : ip.u) a.insert(a.end(), uj.begin(), uj.end());
            auto rows = naive_rows(C, y, par, a);
            CHECK(std::all_of(rows.begin(), rows.end(), [](uint16_t v) { return v == 0; }));
        }
    }
}

TEST_CASE("list decoding is sound at both explicit shapes") {
    const CodeInstance& C = inst3();
    const EvalTable& t = tab3();
    const Gf& kf = C.tower->k();
    Rng rng(0x50a9d);
    auto parl = choose_params(C.par, DecodeMode::list);
    auto lt = make_lift_tables(C, parl, rng, 32);
    CHECK(lt.D == 32);

    auto msg = rand_vec(kf, rng, (size_t)C.par.K);
    auto cw = encode(C, t, msg);
    std::vector<std::vector<uint16_t>> words{cw, flip_some(kf, cw, rng, 10),
                                             rand_vec(kf, rng, (size_t)C.par.N)};
    for (auto par : {parl, choose_params(C.par, 2, 498)}) {
        for (const auto& y : words) {
            auto out = list_decode(C, t, lt, y, par, rng);
            for (size_t i = 0; i < out.size(); i++) {
                CHECK(out[i].agreement > par.B);
                auto re = encode(C, t, out[i].msg);
                long long agree = 0;
                for (size_t p = 0; p < re.size(); p++) agree += re[p] == y[p];
                CHECK(agree == out[i].agreement);
                if (i) CHECK(out[i - 1].msg < out[i].msg);
            }
            // here B exceeds N, so no word can certify: the sound answer is empty
            CHECK(out.empty());
        }
    }
    // unique mode declines rather than guessing
    CHECK(!unique_decode(C, t, lt, cw, rng).has_value());
}

TEST_CASE("optimistic lifting falls back at degenerate degrees") {
    const CodeInstance& C = inst3();
    auto par = choose_params(C.par, DecodeMode::list);
    Rng rng(0xfa11);
    // degree 1 cannot carry a 3-dimensional span; the guaranteed degree kicks in
    auto lt = make_lift_tables(C, par, rng, 1);
    CHECK(lt.D == 147);
    CHECK(lt.piv.size() == 3);

    Rng r2(0xfa11);
    CHECK_THROWS_AS(build_lift_tables(C, par, find_place_of_degree(C, 1, r2)),
                    PivotDeficiencyError);
}

TEST_CASE("lift sections ride the table file") {
    const CodeInstance& C = inst3();
    const EvalTable& t = tab3();
    const Gf& kf = C.tower->k();
    Rng rng(0x5ec7);
    auto par = choose_params(C.par, DecodeMode::list);
    auto lt = make_lift_tables(C, par, rng, 32);

    auto file = table_serialize(t);
    CHECK(!lift_present(file));
    auto file2 = lift_attach(file, lt);
    CHECK(lift_present(file2));

    // the encoder section still reads back from the combined file
    auto t2 = table_deserialize(file2);
    auto msg = rand_vec(kf, rng, (size_t)C.par.K);
    CHECK(encode(C, t2, msg) == encode(C, t, msg));

    auto back = lift_load(file2, C);
    CHECK(back.q == lt.q);
    CHECK(back.K == lt.K);
    CHECK(back.rmax == lt.rmax);
    CHECK(back.D == lt.D);
    CHECK(back.E->modulus() == lt.E->modulus());
    CHECK(back.coords == lt.coords);
    CHECK(back.evals == lt.evals);
    CHECK(back.L == lt.L);
    CHECK(back.R == lt.R);
    CHECK(back.piv == lt.piv);
    CHECK(back.place_digest == lt.place_digest);

    // and decodes exactly like the in-memory tables
    auto y = flip_some(kf, encode(C, t, msg), rng, 5);
    Rng ra(99), rb(99);
    auto la = list_decode(C, t, lt, y, par, ra);
    auto lb = list_decode(C, t2, back, y, par, rb);
    CHECK(la.size() == lb.size());

    // attach twice replaces rather than duplicates
    auto file3 = lift_attach(file2, lt);
    CHECK(file3 == file2);

    // a flipped byte anywhere is caught before parsing
    for (size_t pos : {size_t{60}, file2.size() / 2, file2.size() - 40}) {
        auto bad = file2;
        bad[pos] ^= 0x40;
        CHECK_THROWS_AS(lift_load(bad, C), IntegrityError);
        CHECK_THROWS_AS(table_deserialize(bad), IntegrityError);
    }

    // tables refuse to load against a different instance
    CodeInstance C5 = make_code(4, 2, 2, 5);
    CHECK_THROWS_AS(lift_load(file2, C5), IntegrityError);
}
