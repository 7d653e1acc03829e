#include "gsc/agcode.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "gsc/linalg.hpp"

namespace gsc {
namespace {

long long ipow(long long b, int e) {
    long long r = 1;
    while (e-- > 0) r *= b;
    return r;
}

bool prime_power(uint32_t q) { return q >= 2 && prime_factors_u64(q).size() == 1; }

}  // namespace

CodeParams code_params(uint32_t q, int n, int k, long long K) {
    if (!prime_power(q)) throw std::invalid_argument("agcode: q must be a prime power");
    if (k < 2) throw std::invalid_argument("agcode: k must be at least 2");
    if (n < 1 || n % k)
        throw std::invalid_argument("agcode: k must divide n (got n=" + std::to_string(n) +
                                    ", k=" + std::to_string(k) + ")");
    CodeParams P;
    P.q = q;
    P.n = n;
    P.k = k;
    P.K = K;
    long long qn = ipow(q, n);
    P.N = qn * ((long long)q * q - q);
    P.deg_g = qn * ((long long)k * q + k - 1);
    P.kmax = qn * ((long long)q * q - q - (long long)k * q - k + 1);
    int c = n / k;
    for (int i = 1; i <= k; i++) P.gweight += ipow(q, n - (i - 1) * c + 1);
    if (P.kmax < 1)
        throw std::invalid_argument("agcode: empty admissible range, q^n(q^2-q-kq-k+1) = " +
                                    std::to_string(P.kmax) + " < 1");
    if (K < 1 || K > P.kmax)
        throw std::invalid_argument("agcode: K must lie in [1, q^n(q^2-q-kq-k+1)] = [1, " +
                                    std::to_string(P.kmax) + "]");
    P.dstar = P.N - K - P.deg_g + 1;
    return P;
}

CodeInstance make_code(uint32_t q, int n, int k, long long K) {
    CodeInstance C;
    C.par = code_params(q, n, k, K);
    C.tower = make_tower(q, n);
    int c = n / k;
    C.basis = std::make_shared<const RegularBasis>(
        regular_basis(*C.tower, c, (int)ipow(q, c) - 1));
    C.places = code_places(*C.tower, n);
    if ((long long)C.places.n != C.par.N) throw std::logic_error("agcode: place count mismatch");
    return C;
}

MostlyRegular f_family(const CodeInstance& C, long long r) {
    const CodeParams& P = C.par;
    if (r < 0 || r >= P.K)
        throw std::out_of_range("agcode: message index " + std::to_string(r) +
                                " outside [0, K=" + std::to_string(P.K) + ")");
    return f_family_any(C, r);
}

MostlyRegular f_family_any(const CodeInstance& C, long long r) {
    const CodeParams& P = C.par;
    if (r < 0) throw std::out_of_range("agcode: negative family index");
    MostlyRegular F;
    F.r = r;
    long long qn = ipow(P.q, P.n);
    F.s = r / qn;
    long long t = r % qn;
    int c = P.n / P.k;
    long long d = ipow(P.q, c);
    F.digits.assign(P.k, 0);
    for (int i = P.k - 1; i >= 0; i--) {
        F.digits[i] = (int)(t % d);
        t /= d;
    }
    F.prod.level = P.n;
    if (F.s) F.prod.fs.push_back({tf_x(*C.tower, 0, 0), 0, (uint64_t)F.s});
    for (int i = 0; i < P.k; i++) F.prod.fs.push_back({C.basis->g[F.digits[i]], i * c, 1});
    return F;
}

std::vector<uint16_t> naive_encode(const CodeInstance& C, const std::vector<uint16_t>& v) {
    if ((long long)v.size() != C.par.K)
        throw std::invalid_argument("agcode: message length != K");
    return naive_encode_span(C, v);
}

std::vector<uint16_t> naive_encode_span(const CodeInstance& C, const std::vector<uint16_t>& v) {
    const TowerCtx& T = *C.tower;
    const Gf& kf = T.k();
    std::vector<std::pair<uint16_t, Product>> terms;
    for (long long r = 0; r < (long long)v.size(); r++)
        if (v[r]) terms.emplace_back(v[r], f_family_any(C, r).prod);
    std::vector<uint16_t> out(C.places.n, 0);
    for (size_t i = 0; i < C.places.n; i++) {
        const uint16_t* pc = C.places.place(i);
        uint16_t acc = 0;
        for (const auto& [cf, pr] : terms) acc = kf.add(acc, kf.mul(cf, product_eval(T, pr, pc)));
        out[i] = acc;
    }
    return out;
}

// --- Gilbert-Varshamov comparison ---------------------------------------

namespace {

// q^2-ary entropy at x in (0, 1)
double entropy_q2(double bigq, double x) {
    double lq = std::log(bigq);
    return x * std::log(bigq - 1) / lq - (x * std::log(x) + (1 - x) * std::log1p(-x)) / lq;
}

constexpr double kGvMargin = 1e-12;

}  // namespace

GvReport gv_compare(int k, uint32_t qlo, uint32_t qhi) {
    if (k < 2) throw std::invalid_argument("agcode: k must be at least 2");
    GvReport rep;
    rep.k = k;
    for (uint32_t q = std::max(2u, qlo); q <= qhi; q++) {
        if (!prime_power(q)) continue;
        double bigq = (double)q * q;
        double cc = (double)((long long)k * q + k - 1) / ((double)q * q - q);
        // excess over the line; concave in delta, so grid then ternary search
        auto excess = [&](double x) { return entropy_q2(bigq, x) - x - cc; };
        double lo = 0, hi = std::min(1 - 1 / bigq, 1 - cc);
        double best = -1e300, bx = lo;
        int grid = 2048;
        for (int i = 1; i < grid; i++) {
            double x = lo + (hi - lo) * i / grid;
            double y = excess(x);
            if (y > best) best = y, bx = x;
        }
        double a = std::max(lo, bx - (hi - lo) / grid), b = std::min(hi, bx + (hi - lo) / grid);
        while (b - a > 1e-15) {
            double m1 = a + (b - a) / 3, m2 = b - (b - a) / 3;
            if (excess(m1) < excess(m2))
                a = m1;
            else
                b = m2;
        }
        best = std::max(best, excess((a + b) / 2));
        GvVerdict row;
        row.q = q;
        row.excess = best;
        row.beats = best > kGvMargin;
        rep.rows.push_back(row);
        if (row.beats && !rep.smallest_beating_q) rep.smallest_beating_q = q;
    }
    return rep;
}

// --- k=2 systematic subcode ----------------------------------------------

SystematicSubcode systematic_subcode(const CodeInstance& C) {
    const CodeParams& P = C.par;
    if (P.k != 2) throw std::invalid_argument("agcode: systematic subcode needs k = 2");
    const TowerCtx& T = *C.tower;
    const Gf& kf = T.k();
    int half = P.n / 2;
    long long qh = ipow(P.q, half);
    if (P.K % qh)
        throw std::invalid_argument(
            "agcode: K must be a multiple of q^{n/2} for the tensor split");
    int U = (int)(P.K / qh), V = (int)qh;
    PlaceList ph = code_places(T, half);

    // h_u = x_0^{u div qh} g_{u mod qh} at every half-level place; B always
    // needs the full g range even when U < V
    int W = std::max(U, V);
    Tf x0 = tf_x(T, 0, half);
    std::vector<uint16_t> hv(ph.n * (size_t)W);
    for (int u = 0; u < W; u++) {
        Tf h = tf_mul(T, tf_pow(T, x0, (uint64_t)(u / qh)), C.basis->g[u % qh]);
        for (size_t i = 0; i < ph.n; i++) hv[i * W + u] = tf_eval(T, h, ph.place(i));
    }

    KernelCtx kc = make_kernel_ctx(kf);
    auto om = omega_set(kf, P.q);
    std::vector<char> isom(kf.order(), 0);
    for (uint16_t w : om) isom[w] = 1;

    SystematicSubcode S;
    S.ucols = U;
    S.vcols = V;
    long long bestdim = -1;
    for (uint32_t alpha = 0; alpha < kf.order(); alpha++) {
        if (isom[alpha]) continue;
        std::vector<size_t> bot, top;
        for (size_t i = 0; i < ph.n; i++) {
            const uint16_t* pc = ph.place(i);
            if (pc[half] == alpha) bot.push_back(i);
            if (pc[0] == alpha) top.push_back(i);
        }
        std::vector<uint16_t> A(bot.size() * (size_t)U), B(top.size() * (size_t)V);
        for (size_t i = 0; i < bot.size(); i++)
            std::copy_n(hv.data() + bot[i] * W, U, A.data() + i * U);
        for (size_t i = 0; i < top.size(); i++)
            std::copy_n(hv.data() + top[i] * W, V, B.data() + i * V);
        int r1 = mat_rank(kc, A, (int)bot.size(), U);
        int r2 = mat_rank(kc, B, (int)top.size(), V);
        S.per_alpha.push_back({(uint16_t)alpha, r1, r2});
        S.rank_sum += (long long)r1 * r2;
        if ((long long)r1 * r2 > bestdim) {
            bestdim = (long long)r1 * r2;
            S.alpha = (uint16_t)alpha;
            S.r1 = r1;
            S.r2 = r2;
            S.bot_rows = std::move(bot);
            S.top_rows = std::move(top);
            S.amat = std::move(A);
            S.bmat = std::move(B);
        }
    }
    S.dim = bestdim;

    if (col_reduce(kc, S.amat, (int)S.bot_rows.size(), U, S.ta, S.apiv) != S.r1 ||
        col_reduce(kc, S.bmat, (int)S.top_rows.size(), V, S.tb, S.bpiv) != S.r2)
        throw std::logic_error("agcode: rank drifted between passes");

    // glue (bottom place, top place) into the level-n place and locate it
    int w = P.n + 1;
    std::vector<uint16_t> coords(w);
    auto locate = [&](const uint16_t* cc) {
        size_t lo = 0, hi = C.places.n;
        while (lo < hi) {
            size_t mid = (lo + hi) / 2;
            if (std::lexicographical_compare(C.places.place(mid), C.places.place(mid) + w, cc,
                                             cc + w))
                lo = mid + 1;
            else
                hi = mid;
        }
        if (lo == C.places.n || !std::equal(cc, cc + w, C.places.place(lo)))
            throw std::logic_error("agcode: glued place missing from the code place list");
        return lo;
    };
    S.row_map.resize(S.bot_rows.size() * S.top_rows.size());
    for (size_t bi = 0; bi < S.bot_rows.size(); bi++) {
        std::copy_n(ph.place(S.bot_rows[bi]), half + 1, coords.data());
        for (size_t ti = 0; ti < S.top_rows.size(); ti++) {
            std::copy_n(ph.place(S.top_rows[ti]) + 1, half, coords.data() + half + 1);
            S.row_map[bi * S.top_rows.size() + ti] = locate(coords.data());
        }
    }
    for (int i = 0; i < S.r1; i++)
        for (int j = 0; j < S.r2; j++)
            S.sys_places.push_back(S.row_map[S.apiv[i] * S.top_rows.size() + S.bpiv[j]]);
    return S;
}

}  // namespace gsc
