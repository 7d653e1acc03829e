#include <algorithm>
#include <set>
#include <vector>

#include "doctest.h"
#include "gsc/agcode.hpp"
#include "gsc/fastenc.hpp"
#include "gsc/localize.hpp"
#include "gsc/tower.hpp"
#include "gsc/util.hpp"

using namespace gsc;

namespace {

const CodeInstance& inst422() {
    static CodeInstance C = make_code(4, 2, 2, 48);
    return C;
}

const EvalTable& tab422() {
    static EvalTable t = precompute_tables(inst422());
    return t;
}

std::vector<uint16_t> unit_msg(long long K, long long r) {
    std::vector<uint16_t> v((size_t)K, 0);
    v[(size_t)r] = 1;
    return v;
}

std::vector<uint16_t> combo(const Gf& kf, const std::vector<std::vector<uint16_t>>& cols,
                            const std::vector<uint16_t>& msg) {
    std::vector<uint16_t> out(cols[0].size(), 0);
    for (size_t r = 0; r < msg.size(); r++) {
        if (msg[r] == 0) continue;
        for (size_t p = 0; p < out.size(); p++)
            out[p] = kf.add(out[p], kf.mul(msg[r], cols[r][p]));
    }
    return out;
}

std::vector<uint16_t> rand_msg(const Gf& kf, Rng& rng, size_t len) {
    std::vector<uint16_t> v(len);
    for (auto& x : v) x = kf.rand_elem(rng);
    return v;
}

}  // namespace

TEST_CASE("evaluation table construction") {
    const CodeInstance& C = inst422();
    const EvalTable& t = tab422();
    const TowerCtx& T = *C.tower;

    CHECK(t.D == 4);
    CHECK(t.nc == 48);
    CHECK(t.gev.size() == 192);  // q^{2c} (q^2 - q)
    CHECK(t.alphas.size() == 12);
    CHECK(t.place_digest == C.places.digest);

    // entries match direct evaluation
    PlaceList pl1 = code_places(T, 1);
    for (int l = 0; l < 4; l++)
        for (size_t p = 0; p < 48; p++)
            CHECK(t.gev[(size_t)l * 48 + p] == tf_eval(T, C.basis->g[(size_t)l], pl1.place(p)));
    for (int l = 0; l < 4; l++) CHECK(tf_eq(t.gforms[(size_t)l], C.basis->g[(size_t)l]));

    // upper groups partition level-c places by bottom coordinate
    std::set<uint32_t> seen;
    for (size_t a = 0; a < 12; a++) {
        CHECK(t.upper[a].size() == 4);
        for (uint32_t p : t.upper[a]) {
            CHECK(pl1.place(p)[0] == t.alphas[a]);
            seen.insert(p);
        }
    }
    CHECK(seen.size() == 48);

    // glue maps are bijections onto each stage level
    for (int i = 1; i <= 2; i++) {
        std::set<uint32_t> hit;
        size_t total = 0;
        for (size_t a = 0; a < 12; a++) {
            for (uint32_t p : t.lv[(size_t)i - 1].glue[a]) hit.insert(p);
            total += t.lv[(size_t)i - 1].glue[a].size();
        }
        CHECK(total == (i == 1 ? 48u : 192u));
        CHECK(hit.size() == total);
    }
    // stage-2 glue targets carry the right middle coordinate
    for (size_t a = 0; a < 12; a++)
        for (uint32_t p : t.lv[1].glue[a]) CHECK(C.places.place(p)[1] == t.alphas[a]);
}

TEST_CASE("strided block decomposition") {
    Rng rng(0xb10c);
    std::vector<uint16_t> w(16);
    for (auto& x : w) x = (uint16_t)rng.below(16);
    auto blocks = block_decompose(w, 4);
    REQUIRE(blocks.size() == 4);
    for (int l = 0; l < 4; l++) {
        REQUIRE(blocks[(size_t)l].size() == 4);
        for (int j = 0; j < 4; j++) CHECK(blocks[(size_t)l][(size_t)j] == w[(size_t)(j * 4 + l)]);
    }
    // reassembly through iota_l
    std::vector<uint16_t> back(16, 0);
    for (int l = 0; l < 4; l++)
        for (int j = 0; j < 4; j++) back[(size_t)(j * 4 + l)] = blocks[(size_t)l][(size_t)j];
    CHECK(back == w);
    // a standard basis vector lands in exactly one block
    auto eb = block_decompose(unit_msg(64, 23), 4);
    for (int l = 0; l < 4; l++)
        for (int j = 0; j < 16; j++)
            CHECK(eb[(size_t)l][(size_t)j] == ((23 % 4 == l && 23 / 4 == j) ? 1 : 0));
    CHECK_THROWS_AS(block_decompose(std::vector<uint16_t>(8), 4), std::invalid_argument);
    CHECK_THROWS_AS(block_decompose(std::vector<uint16_t>(15), 4), std::invalid_argument);
    CHECK_THROWS_AS(block_decompose({}, 4), std::invalid_argument);

    // consistency with the factored family: psi_2(w) = sum_l psi_1(w^(l)) * g_l
    // shifted one level, checked by evaluation
    const CodeInstance& C = inst422();
    const TowerCtx& T = *C.tower;
    const Gf& kf = T.k();
    std::vector<uint16_t> msg(48, 0);
    std::copy(w.begin(), w.end(), msg.begin());
    auto lhs = naive_encode(C, msg);
    for (size_t i = 0; i < 50; i++) {
        size_t p = (size_t)rng.below(C.places.n);
        const uint16_t* pc = C.places.place(p);
        uint16_t acc = 0;
        for (int l = 0; l < 4; l++) {
            uint16_t inner = 0;
            for (int j = 0; j < 4; j++)
                inner = kf.add(inner, kf.mul(blocks[(size_t)l][(size_t)j], tf_eval(T, C.basis->g[(size_t)j], pc)));
            acc = kf.add(acc, kf.mul(inner, tf_eval(T, C.basis->g[(size_t)l], pc + 1)));
        }
        CHECK(acc == lhs[p]);
    }
}

TEST_CASE("matmul strategies agree") {
    for (uint32_t q : {4u, 11u}) {
        Gf kf(fq2_spec(q));
        KernelCtx kc = make_kernel_ctx(kf);
        Rng rng(0x57a55e + q);
        int trials = q == 4 ? 100 : 12;
        int smax = q == 4 ? 128 : 96;
        for (int trial = 0; trial < trials; trial++) {
            int s = 1 + (int)rng.below((uint64_t)smax);
            auto a = rand_msg(kf, rng, (size_t)s * s), b = rand_msg(kf, rng, (size_t)s * s);
            auto nv = matmul(kc, a, s, s, b, s, MulStrategy::naive);
            auto st = matmul(kc, a, s, s, b, s, MulStrategy::strassen);
            CHECK(nv == st);
        }
        // identity and associativity
        auto a = rand_msg(kf, rng, 70 * 33);
        std::vector<uint16_t> id(33 * 33, 0);
        for (int i = 0; i < 33; i++) id[(size_t)i * 33 + i] = kf.one();
        CHECK(matmul(kc, a, 70, 33, id, 33, MulStrategy::strassen, 8) == a);
        auto b = rand_msg(kf, rng, 33 * 90), c = rand_msg(kf, rng, 90 * 17);
        auto ab_c = matmul(kc, matmul(kc, a, 70, 33, b, 90, MulStrategy::strassen, 8), 70, 90, c, 17,
                           MulStrategy::strassen, 8);
        auto a_bc = matmul(kc, a, 70, 33, matmul(kc, b, 33, 90, c, 17, MulStrategy::strassen, 8), 17,
                           MulStrategy::strassen, 8);
        CHECK(ab_c == a_bc);
        CHECK_THROWS_AS(matmul(kc, a, 70, 33, b, 91, MulStrategy::naive), std::invalid_argument);
        CHECK_THROWS_AS(matmul(kc, a, 70, 33, b, 90, MulStrategy::strassen, 0), std::invalid_argument);
    }
}

TEST_CASE("matrix encoder matches direct evaluation") {
    const CodeInstance& C = inst422();
    const EvalTable& t = tab422();
    const Gf& kf = C.tower->k();
    Rng rng(0xe2c0de);

    std::vector<std::vector<uint16_t>> cols;
    for (long long r = 0; r < 16; r++) cols.push_back(naive_encode(C, unit_msg(48, r)));

    auto w0 = matrix_encode(C, t, unit_msg(16, 0));
    CHECK(w0 == cols[0]);
    for (int trial = 0; trial < 100; trial++) {
        auto v = rand_msg(kf, rng, 16);
        std::vector<uint16_t> vv = v;
        CHECK(matrix_encode(C, t, v) == combo(kf, cols, vv));
    }
    CHECK_THROWS_AS(matrix_encode(C, t, std::vector<uint16_t>(15)), std::invalid_argument);
}

TEST_CASE("matrix encoder over deeper and wider towers") {
    // q=4, n=4, k=2: two stages of width 16
    {
        CodeInstance C = make_code(4, 4, 2, 64);
        EvalTable t = precompute_tables(C);
        const Gf& kf = C.tower->k();
        Rng rng(0xdeeb);
        // sparse support keeps the reference evaluation affordable
        std::vector<long long> support = {0, 1, 15, 16, 17, 63, 64, 200, 255};
        CodeInstance Cfull = make_code(4, 4, 2, 256);
        std::vector<std::vector<uint16_t>> cols;
        for (long long r : support) cols.push_back(naive_encode(Cfull, unit_msg(256, r)));
        for (int trial = 0; trial < 5; trial++) {
            std::vector<uint16_t> v(256, 0), small(support.size());
            for (size_t i = 0; i < support.size(); i++) {
                small[i] = kf.rand_elem(rng);
                v[(size_t)support[i]] = small[i];
            }
            CHECK(matrix_encode(C, t, v) == combo(kf, cols, small));
        }
    }
    // q=5, n=2: odd characteristic
    {
        CodeInstance C = make_code(5, 2, 2, 25);
        EvalTable t = precompute_tables(C);
        const Gf& kf = C.tower->k();
        Rng rng(0x0dd);
        std::vector<std::vector<uint16_t>> cols;
        for (long long r = 0; r < 25; r++) cols.push_back(naive_encode(C, unit_msg(25, r)));
        for (int trial = 0; trial < 20; trial++) {
            auto v = rand_msg(kf, rng, 25);
            CHECK(matrix_encode(C, t, v) == combo(kf, cols, v));
        }
    }
    // q=5, n=3, k=3: three stages
    {
        CodeInstance C = make_code(5, 3, 3, 125);
        EvalTable t = precompute_tables(C);
        const Gf& kf = C.tower->k();
        Rng rng(0x3573);
        std::vector<long long> support = {0, 1, 4, 5, 24, 25, 26, 77, 124};
        std::vector<std::vector<uint16_t>> cols;
        for (long long r : support) cols.push_back(naive_encode(C, unit_msg(125, r)));
        for (int trial = 0; trial < 5; trial++) {
            std::vector<uint16_t> v(125, 0), small(support.size());
            for (size_t i = 0; i < support.size(); i++) {
                small[i] = kf.rand_elem(rng);
                v[(size_t)support[i]] = small[i];
            }
            CHECK(matrix_encode(C, t, v) == combo(kf, cols, small));
        }
    }
}

TEST_CASE("chunked long messages") {
    const CodeInstance& C = inst422();
    const EvalTable& t = tab422();
    const Gf& kf = C.tower->k();
    Rng rng(0xc4a9f);

    // chunk count at maximal K: ceil(48/16) = 3 = q^2-q-kq-k+1 (and under the
    // looser ceiling q^2-(k+1)q = 4)
    CHECK((C.par.kmax + 15) / 16 == 3);
    CHECK(3 <= 4 * 4 - (2 + 1) * 4);

    std::vector<std::vector<uint16_t>> cols;
    for (long long r = 0; r < 48; r++) cols.push_back(naive_encode(C, unit_msg(48, r)));
    for (int trial = 0; trial < 30; trial++) {
        auto v = rand_msg(kf, rng, 48);
        CHECK(encode(C, t, v) == combo(kf, cols, v));
    }
    CHECK_THROWS_AS(encode(C, t, std::vector<uint16_t>(47)), std::invalid_argument);

    // K below one chunk: encode is matrix_encode of the padded message
    CodeInstance C5 = make_code(4, 2, 2, 5);
    EvalTable t5 = precompute_tables(C5);
    auto v5 = rand_msg(kf, rng, 5);
    std::vector<uint16_t> padded(16, 0);
    std::copy(v5.begin(), v5.end(), padded.begin());
    CHECK(encode(C5, t5, v5) == matrix_encode(C5, t5, padded));

    // odd characteristic at full K: 9 chunks deep in the x_0 powers
    CodeInstance Cq5 = make_code(5, 2, 2, 225);
    EvalTable tq5 = precompute_tables(Cq5);
    const Gf& kf5 = Cq5.tower->k();
    CHECK((Cq5.par.K + 24) / 25 == 9);
    std::vector<std::vector<uint16_t>> cols5;
    for (long long r = 0; r < 225; r++) cols5.push_back(naive_encode(Cq5, unit_msg(225, r)));
    for (int trial = 0; trial < 10; trial++) {
        auto v = rand_msg(kf5, rng, 225);
        CHECK(encode(Cq5, tq5, v) == combo(kf5, cols5, v));
    }
}

TEST_CASE("table files round trip") {
    const CodeInstance& C = inst422();
    const EvalTable& t = tab422();
    const Gf& kf = C.tower->k();
    Rng rng(0xf11e);

    auto bytes = table_serialize(t);
    EvalTable u = table_deserialize(bytes);
    table_verify(u, C);
    CHECK(u.q == t.q);
    CHECK(u.gev == t.gev);
    CHECK(u.alphas == t.alphas);
    CHECK(u.upper == t.upper);
    for (int i = 0; i < 2; i++) {
        CHECK(u.lv[(size_t)i].lower == t.lv[(size_t)i].lower);
        CHECK(u.lv[(size_t)i].glue == t.lv[(size_t)i].glue);
    }
    for (int l = 0; l < 4; l++) CHECK(tf_eq(u.gforms[(size_t)l], t.gforms[(size_t)l]));
    auto v = rand_msg(kf, rng, 48);
    CHECK(encode(C, u, v) == encode(C, t, v));

    // single-byte corruption anywhere fails the trailing digest
    for (size_t off : {bytes.size() / 3, bytes.size() / 2, bytes.size() - 40}) {
        auto bad = bytes;
        bad[off] ^= 0x40;
        CHECK_THROWS_AS(table_deserialize(bad), IntegrityError);
    }
    auto bad = bytes;
    bad.back() ^= 1;  // inside the stored digest itself
    CHECK_THROWS_AS(table_deserialize(bad), IntegrityError);
    bad = bytes;
    bad.resize(bytes.size() - 7);
    CHECK_THROWS_AS(table_deserialize(bad), IntegrityError);

    // a well-formed file for the wrong code is rejected at verify time
    CHECK_THROWS_AS(table_verify(t, make_code(5, 2, 2, 25)), std::invalid_argument);
    EvalTable forged = t;
    forged.place_digest[0] ^= 1;
    auto fb = table_serialize(forged);          // fresh trailing digest: loads fine
    EvalTable fu = table_deserialize(fb);
    CHECK_THROWS_AS(table_verify(fu, C), IntegrityError);
    EvalTable forged2 = t;
    forged2.gforms[0] = t.gforms[1];
    CHECK_THROWS_AS(table_verify(forged2, C), IntegrityError);

    // tables depend on (q, n, k) only: they serve any K of the same geometry
    CodeInstance C16 = make_code(4, 2, 2, 16);
    table_verify(u, C16);
    auto v16 = rand_msg(kf, rng, 16);
    CHECK(encode(C16, u, v16) == naive_encode(C16, v16));
}
