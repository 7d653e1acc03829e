#include "gsc/decode.hpp"

#include <algorithm>
#include <cmath>

#include "gsc/linalg.hpp"
#include "gsc/tower.hpp"

namespace gsc {

namespace {

long long isqrt_ll(long long x) {
    long long r = (long long)std::sqrt((double)x);
    while (r > 0 && r * r > x) r--;
    while ((r + 1) * (r + 1) <= x) r++;
    return r;
}

DecoderParams shape(const CodeParams& P, int ell, long long B) {
    DecoderParams par;
    par.ell = ell;
    par.B = B;
    par.w.resize((size_t)ell + 1);
    for (int j = 0; j <= ell; j++)
        par.w[(size_t)j] = B - (long long)(ell + 1) * P.deg_g - (P.K - 1) * j;
    return par;
}

std::array<uint8_t, 32> digest_place(const std::vector<uint16_t>& modulus,
                                     const std::vector<ExtField::Elem>& coords) {
    ByteWriter w;
    w.tag("GSPL");
    w.u16_vec(modulus);
    w.u64(coords.size());
    for (const auto& c : coords) w.u16_vec(c);
    return Sha256::digest(w.data().data(), w.data().size());
}

// acc += s * ev coordinatewise over the base field
ExtField::Elem eval_span_at(const LiftTables& lt, const std::vector<uint16_t>& coeffs) {
    const ExtField& E = *lt.E;
    const Gf& bf = E.base();
    if ((long long)coeffs.size() > lt.rmax + 1)
        throw std::invalid_argument("decode: lift tables cover too few family indices");
    auto acc = E.zero();
    for (size_t r = 0; r < coeffs.size(); r++) {
        if (!coeffs[r]) continue;
        const auto& ev = lt.evals[r];
        for (size_t i = 0; i < acc.size(); i++) acc[i] = bf.add(acc[i], bf.mul(coeffs[r], ev[i]));
    }
    return acc;
}

void check_tables(const CodeInstance& C, const LiftTables& lt, const DecoderParams& par,
                  const std::vector<uint16_t>& y) {
    if (lt.q != C.par.q || lt.n != C.par.n || lt.k != C.par.k || lt.K != C.par.K)
        throw std::invalid_argument("decode: lift tables belong to a different code");
    if ((long long)y.size() != C.par.N)
        throw std::invalid_argument("decode: received word length != N");
    if (!par.w.empty() && par.w[0] > lt.rmax)
        throw std::invalid_argument("decode: lift tables cover too few family indices");
}

long long agreement_count(const std::vector<uint16_t>& a, const std::vector<uint16_t>& b) {
    long long n = 0;
    for (size_t i = 0; i < a.size(); i++) n += a[i] == b[i];
    return n;
}

// Berlekamp-Massey: connection polynomial c (c[0] = 1, degree <= L) with
// s_i = -sum_{j=1..L} c[j] s_{i-j} for all i >= L.
std::vector<uint16_t> massey(const Gf& f, const std::vector<uint16_t>& s, int& Lout) {
    std::vector<uint16_t> C{f.one()}, B{f.one()};
    int L = 0, m = 1;
    uint16_t b = f.one();
    for (size_t i = 0; i < s.size(); i++) {
        uint16_t d = s[i];
        for (int j = 1; j <= L && (size_t)j < C.size(); j++)
            d = f.add(d, f.mul(C[(size_t)j], s[i - (size_t)j]));
        if (d == 0) {
            m++;
            continue;
        }
        uint16_t coef = f.div(d, b);
        if (C.size() < B.size() + (size_t)m) C.resize(B.size() + (size_t)m, 0);
        if (2 * L <= (int)i) {
            auto keep = C;
            for (size_t j = 0; j < B.size(); j++)
                C[j + (size_t)m] = f.sub(C[j + (size_t)m], f.mul(coef, B[j]));
            L = (int)i + 1 - L;
            B = std::move(keep);
            b = d;
            m = 1;
        } else {
            for (size_t j = 0; j < B.size(); j++)
                C[j + (size_t)m] = f.sub(C[j + (size_t)m], f.mul(coef, B[j]));
            m++;
        }
    }
    C.resize((size_t)L + 1, 0);
    Lout = L;
    return C;
}

bool all_zero(const std::vector<uint16_t>& v) {
    return std::all_of(v.begin(), v.end(), [](uint16_t x) { return x == 0; });
}

}  // namespace

size_t DecoderParams::cols() const {
    size_t c = 0;
    for (long long wj : w)
        if (wj >= 0) c += (size_t)wj + 1;
    return c;
}

DecoderParams choose_params(const CodeParams& P, DecodeMode mode) {
    DecoderParams par;
    if (mode == DecodeMode::unique) {
        par = shape(P, 1, (P.N + P.K) / 2 + 2 * P.deg_g);
    } else {
        long long a = 2 * P.N, b = P.K - 1 + 2 * P.deg_g;
        long long ell = isqrt_ll(a / b);
        while ((ell + 1) * (ell + 1) * b <= a) ell++;
        while (ell > 1 && ell * ell * b > a) ell--;
        if (ell < 1) ell = 1;
        long long s = isqrt_ll(a * b);
        if (s * s < a * b) s++;
        par = shape(P, (int)ell, s + P.deg_g);
    }
    if (par.cols() < (size_t)P.N + 1)
        throw std::invalid_argument("decode: derived shape infeasible");
    return par;
}

DecoderParams choose_params(const CodeParams& P, int ell, long long B) {
    if (ell < 1) throw std::invalid_argument("decode: ell must be at least 1");
    DecoderParams par = shape(P, ell, B);
    if (par.cols() < (size_t)P.N + 1)
        throw std::invalid_argument("decode: infeasible shape, need sum max(w_j+1, 0) >= N+1");
    return par;
}

std::vector<uint16_t> blackbox_matvec(const CodeInstance& C, const EvalTable& t,
                                      const std::vector<uint16_t>& y, const DecoderParams& par,
                                      const std::vector<uint16_t>& a) {
    size_t N = (size_t)C.par.N;
    if (y.size() != N) throw std::invalid_argument("decode: received word length != N");
    if (a.size() != par.cols())
        throw std::invalid_argument("decode: coefficient vector length mismatch");
    auto kc = make_kernel_ctx(C.tower->k());
    std::vector<std::vector<uint16_t>> e(par.w.size());
    size_t off = 0;
    for (size_t j = 0; j < par.w.size(); j++) {
        if (par.w[j] < 0) continue;
        size_t len = (size_t)par.w[j] + 1;
        std::vector<uint16_t> span(a.begin() + (ptrdiff_t)off, a.begin() + (ptrdiff_t)(off + len));
        off += len;
        e[j] = encode_span(C, t, span);
    }
    std::vector<uint16_t> out(N, 0);
    for (size_t j = par.w.size(); j-- > 0;) {
        vec_hadamard(kc, out.data(), out.data(), y.data(), N);
        if (!e[j].empty()) vec_add(kc, out.data(), e[j].data(), N);
    }
    return out;
}

std::vector<uint16_t> wiedemann_nullvector(const KernelCtx& kc, const Matvec& mv, size_t rows,
                                           size_t cols, Rng& rng, int retry_cap) {
    const Gf& f = *kc.k;
    if (rows >= cols) throw std::invalid_argument("wiedemann: need rows < cols");
    auto apply = [&](const std::vector<uint16_t>& x) {
        auto r = mv(x);
        if (r.size() != rows) throw std::logic_error("wiedemann: operator returned wrong length");
        r.resize(cols, 0);  // square padding with zero rows
        return r;
    };
    for (int trial = 0; trial < retry_cap; trial++) {
        std::vector<uint16_t> u(cols), v(cols);
        for (auto& x : u) x = f.rand_elem(rng);
        for (auto& x : v) x = f.rand_elem(rng);
        // doubly projected Krylov sequence, 2 cols terms
        std::vector<uint16_t> s(2 * cols);
        auto b = v;
        for (size_t i = 0; i < s.size(); i++) {
            s[i] = vec_dot(kc, u.data(), b.data(), cols);
            if (i + 1 < s.size()) b = apply(b);
        }
        int L = 0;
        auto conn = massey(f, s, L);
        // minimal generator g(lambda) = lambda^L conn(1/lambda); strip the
        // lambda power so the trailing factor h has h(0) != 0
        std::vector<uint16_t> g(conn.rbegin(), conn.rend());
        size_t sh = 0;
        while (sh < g.size() && g[sh] == 0) sh++;
        if (sh == g.size()) continue;  // zero sequence; projection lost everything
        std::vector<uint16_t> h(g.begin() + (ptrdiff_t)sh, g.end());
        // w = h(M) v by Horner
        std::vector<uint16_t> w(cols, 0);
        for (size_t i = h.size(); i-- > 0;) {
            if (i + 1 < h.size()) w = apply(w);
            if (h[i]) vec_axpy(kc, w.data(), h[i], v.data(), cols);
        }
        if (all_zero(w)) continue;
        // descend the lambda^sh tail: some tail of w, Mw, M^2 w, .. lands in
        // the kernel when g annihilates v
        bool ok = false;
        for (size_t step = 0; step <= sh + 1; step++) {
            auto z = apply(w);
            if (all_zero(z)) {
                ok = true;
                break;
            }
            w = std::move(z);
        }
        if (ok) return w;
    }
    throw std::runtime_error("wiedemann: retry cap exceeded");
}

std::vector<uint16_t> dense_nullvector(const KernelCtx& kc, const Matvec& mv, size_t rows,
                                       size_t cols, Rng& rng) {
    const Gf& f = *kc.k;
    if (rows >= cols) throw std::invalid_argument("dense_nullvector: need rows < cols");
    std::vector<uint16_t> m(rows * cols);
    std::vector<uint16_t> e(cols, 0);
    for (size_t j = 0; j < cols; j++) {
        e[j] = f.one();
        auto col = mv(e);
        e[j] = 0;
        if (col.size() != rows)
            throw std::logic_error("dense_nullvector: operator returned wrong length");
        for (size_t i = 0; i < rows; i++) m[i * cols + j] = col[i];
    }
    std::vector<int> piv;
    int rank = row_reduce(kc, m, (int)rows, (int)cols, nullptr, &piv);
    std::vector<char> ispiv(cols, 0);
    for (int i = 0; i < rank; i++) ispiv[(size_t)piv[(size_t)i]] = 1;
    std::vector<size_t> freec;
    for (size_t j = 0; j < cols; j++)
        if (!ispiv[j]) freec.push_back(j);
    // random combination of the kernel basis; nonzero because it equals the
    // coefficients on the free coordinates
    std::vector<uint16_t> coef(freec.size());
    for (;;) {
        bool nz = false;
        for (auto& cv : coef) {
            cv = f.rand_elem(rng);
            nz = nz || cv != 0;
        }
        if (nz) break;
    }
    std::vector<uint16_t> x(cols, 0);
    for (size_t j = 0; j < freec.size(); j++) x[freec[j]] = coef[j];
    for (int i = 0; i < rank; i++) {
        uint16_t acc = 0;
        for (size_t j = 0; j < freec.size(); j++)
            if (coef[j]) acc = f.add(acc, f.mul(m[(size_t)i * cols + freec[j]], coef[j]));
        x[(size_t)piv[(size_t)i]] = f.neg(acc);
    }
    auto chk = mv(x);
    if (!all_zero(chk))
        throw std::logic_error("dense_nullvector: elimination produced a non-kernel vector");
    return x;
}

std::vector<uint16_t> kernel_nullvector(const KernelCtx& kc, const Matvec& mv, size_t rows,
                                        size_t cols, Rng& rng) {
    return rows <= 300 ? dense_nullvector(kc, mv, rows, cols, rng)
                       : wiedemann_nullvector(kc, mv, rows, cols, rng);
}

InterpolationPoly interpolate(const CodeInstance& C, const EvalTable& t,
                              const std::vector<uint16_t>& y, const DecoderParams& par, Rng& rng) {
    size_t N = (size_t)C.par.N;
    if (par.ell < 1 || par.w.size() != (size_t)par.ell + 1)
        throw std::invalid_argument("interpolate: malformed shape");
    if (par.cols() < N + 1) throw std::invalid_argument("interpolate: infeasible shape");
    auto kc = make_kernel_ctx(C.tower->k());
    Matvec mv = [&](const std::vector<uint16_t>& a) { return blackbox_matvec(C, t, y, par, a); };
    auto a = kernel_nullvector(kc, mv, N, par.cols(), rng);
    InterpolationPoly ip;
    ip.par = par;
    ip.u.resize(par.w.size());
    size_t off = 0;
    for (size_t j = 0; j < par.w.size(); j++) {
        if (par.w[j] < 0) continue;
        size_t len = (size_t)par.w[j] + 1;
        ip.u[j].assign(a.begin() + (ptrdiff_t)off, a.begin() + (ptrdiff_t)(off + len));
        off += len;
    }
    return ip;
}

BigPlace find_place_of_degree(const CodeInstance& C, uint32_t D, Rng& rng) {
    if (D == 0) throw std::invalid_argument("find_place_of_degree: degree must be positive");
    const TowerCtx& T = *C.tower;
    const Gf& kf = T.k();
    auto base = get_field(kf.spec());
    uint32_t q = C.par.q;
    // a draw lifts through all n levels with probability about q^-n (each
    // level splits completely for roughly one in q candidate places)
    long long cap = 64;
    for (int i = 0; i < C.par.n && cap < (1ll << 20); i++) cap *= (long long)q;
    cap = 64 + cap / 2;
    for (long long attempt = 0; attempt < cap; attempt++) {
        auto mod = irreducible_random(kf, D, rng);
        auto E = std::make_shared<const ExtField>(base, mod.c);
        // x_0 = class of T generates the full degree; reject it inside Omega
        ExtField::Elem a0;
        if (D == 1) {
            a0 = E->from_base(kf.neg(mod.c[0]));
        } else {
            a0 = E->zero();
            a0[1] = kf.one();
        }
        if (E->is_zero(E->add(E->pow(a0, q), a0))) continue;
        std::vector<ExtField::Elem> coords{a0};
        bool ok = true;
        for (int i = 1; i <= C.par.n; i++) {
            const auto& x = coords.back();
            auto xq1 = E->pow(x, q - 1);
            // x outside Omega keeps the denominator x^(q-1) + 1 nonzero and
            // the next coordinate outside Omega as well
            auto rhs = E->mul(E->mul(xq1, x), E->inv(E->add(xq1, E->one())));
            try {
                coords.push_back(solve_artin_schreier(*E, q, rhs));
            } catch (const std::domain_error&) {
                ok = false;
                break;
            }
        }
        if (ok) return {std::move(E), std::move(coords)};
    }
    throw std::runtime_error("find_place_of_degree: attempt cap exceeded");
}

LiftTables build_lift_tables(const CodeInstance& C, const DecoderParams& par, const BigPlace& P) {
    if (!P.E || (int)P.coords.size() != C.par.n + 1)
        throw std::invalid_argument("lift tables: malformed place");
    const TowerCtx& T = *C.tower;
    const ExtField& E = *P.E;
    LiftTables lt;
    lt.q = C.par.q;
    lt.n = C.par.n;
    lt.k = C.par.k;
    lt.K = C.par.K;
    lt.D = E.deg();
    lt.rmax = std::max(par.w.empty() ? 0 : par.w[0], C.par.K - 1);
    lt.E = P.E;
    lt.coords = P.coords;
    lt.evals.reserve((size_t)lt.rmax + 1);
    for (long long r = 0; r <= lt.rmax; r++) {
        auto F = f_family_any(C, r);
        lt.evals.push_back(product_eval_in(T, F.prod, E, P.coords));
    }
    size_t D = lt.D, K = (size_t)C.par.K;
    std::vector<uint16_t> raw(D * K);
    for (size_t r = 0; r < K; r++)
        for (size_t i = 0; i < D; i++) raw[i * K + r] = lt.evals[r][i];
    auto kc = make_kernel_ctx(T.k());
    int rank = col_reduce(kc, raw, (int)D, (int)K, lt.R, lt.piv);
    if ((size_t)rank < K)
        throw PivotDeficiencyError("lift tables: evaluation span has rank " +
                                   std::to_string(rank) + " < K at this place");
    lt.L = mat_mul(kc, raw, (int)D, (int)K, lt.R, (int)K);
    lt.place_digest = digest_place(E.modulus(), P.coords);
    return lt;
}

LiftTables make_lift_tables(const CodeInstance& C, const DecoderParams& par, Rng& rng,
                            uint32_t optimistic_d) {
    if (optimistic_d > 0) {
        try {
            return build_lift_tables(C, par, find_place_of_degree(C, optimistic_d, rng));
        } catch (const PivotDeficiencyError&) {
            // fall through to the guaranteed degree
        }
    }
    uint32_t d = (uint32_t)(C.par.deg_g + C.par.K);
    try {
        return build_lift_tables(C, par, find_place_of_degree(C, d, rng));
    } catch (const PivotDeficiencyError&) {
        throw std::logic_error("lift tables: rank-deficient at the guaranteed degree");
    }
}

std::optional<std::vector<uint16_t>> lift_root(const LiftTables& lt, const ExtField::Elem& z) {
    size_t D = lt.D, K = (size_t)lt.K;
    if (z.size() != D) throw std::invalid_argument("lift_root: element has wrong length");
    const Gf& f = lt.E->base();
    std::vector<uint16_t> y(K);
    for (size_t j = 0; j < K; j++) y[j] = z[(size_t)lt.piv[j]];
    // membership: the echelon columns must reproduce z exactly
    for (size_t i = 0; i < D; i++) {
        uint16_t acc = 0;
        for (size_t j = 0; j < K; j++)
            if (y[j]) acc = f.add(acc, f.mul(lt.L[i * K + j], y[j]));
        if (acc != z[i]) return std::nullopt;
    }
    std::vector<uint16_t> v(K);
    for (size_t i = 0; i < K; i++) {
        uint16_t acc = 0;
        for (size_t j = 0; j < K; j++)
            if (y[j]) acc = f.add(acc, f.mul(lt.R[i * K + j], y[j]));
        v[i] = acc;
    }
    return v;
}

std::vector<Decoded> list_decode(const CodeInstance& C, const EvalTable& t, const LiftTables& lt,
                                 const std::vector<uint16_t>& y, const DecoderParams& par,
                                 Rng& rng) {
    check_tables(C, lt, par, y);
    const ExtField& E = *lt.E;
    for (int attempt = 0; attempt < 8; attempt++) {
        auto ip = interpolate(C, t, y, par, rng);
        Poly<ExtField> H;
        H.c.reserve(ip.u.size());
        for (const auto& uj : ip.u) H.c.push_back(uj.empty() ? E.zero() : eval_span_at(lt, uj));
        H.normalize(E);
        if (H.is_zero()) continue;  // degenerate at P; fresh kernel vector
        auto roots = poly_roots(E, H, rng);
        std::vector<Decoded> out;
        for (const auto& z : roots) {
            auto v = lift_root(lt, z);
            if (!v) continue;
            auto cw = encode(C, t, *v);
            long long agree = agreement_count(cw, y);
            if (agree > par.B) out.push_back({std::move(*v), agree});
        }
        std::sort(out.begin(), out.end(),
                  [](const Decoded& a, const Decoded& b) { return a.msg < b.msg; });
        return out;
    }
    throw std::runtime_error("list_decode: interpolation stayed degenerate at the lift place");
}

std::optional<Decoded> unique_decode(const CodeInstance& C, const EvalTable& t,
                                     const LiftTables& lt, const std::vector<uint16_t>& y,
                                     const DecoderParams& par, Rng& rng) {
    if (par.ell != 1) throw std::invalid_argument("unique_decode: shape must have ell = 1");
    check_tables(C, lt, par, y);
    const ExtField& E = *lt.E;
    for (int attempt = 0; attempt < 8; attempt++) {
        auto ip = interpolate(C, t, y, par, rng);
        auto u1 = ip.u[1].empty() ? E.zero() : eval_span_at(lt, ip.u[1]);
        if (E.is_zero(u1)) continue;  // fresh kernel vector
        auto u0 = ip.u[0].empty() ? E.zero() : eval_span_at(lt, ip.u[0]);
        auto z = E.neg(E.mul(u0, E.inv(u1)));
        auto v = lift_root(lt, z);
        if (!v) return std::nullopt;
        auto cw = encode(C, t, *v);
        long long agree = agreement_count(cw, y);
        if (agree <= par.B) return std::nullopt;
        return Decoded{std::move(*v), agree};
    }
    return std::nullopt;  // u_1 kept vanishing at P; decline
}

std::optional<Decoded> unique_decode(const CodeInstance& C, const EvalTable& t,
                                     const LiftTables& lt, const std::vector<uint16_t>& y,
                                     Rng& rng) {
    return unique_decode(C, t, lt, y, choose_params(C.par, DecodeMode::unique), rng);
}

std::vector<uint8_t> lift_serialize(const LiftTables& lt) {
    ByteWriter w;
    w.tag("GSLD");
    w.u32(1);
    w.u32(lt.q);
    w.u32((uint32_t)lt.n);
    w.u32((uint32_t)lt.k);
    w.u64((uint64_t)lt.K);
    w.u64((uint64_t)lt.rmax);
    w.u32(lt.D);
    w.bytes(lt.place_digest.data(), lt.place_digest.size());
    w.u16_vec(lt.E->modulus());
    for (const auto& c : lt.coords) w.u16_vec(c);
    for (const auto& e : lt.evals) w.u16_vec(e);
    w.u16_vec(lt.L);
    w.u16_vec(lt.R);
    for (int p : lt.piv) w.u32((uint32_t)p);
    return w.take();
}

LiftTables lift_deserialize(const std::vector<uint8_t>& body, const CodeInstance& C) {
    try {
        const Gf& kf = C.tower->k();
        uint32_t order = kf.order();
        auto in_field = [&](const std::vector<uint16_t>& v) {
            for (uint16_t x : v)
                if (x >= order) throw std::runtime_error("element index out of range");
        };
        ByteReader r(body);
        r.expect_tag("GSLD");
        if (r.u32() != 1) throw std::runtime_error("unsupported lift section version");
        LiftTables lt;
        lt.q = r.u32();
        lt.n = (int)r.u32();
        lt.k = (int)r.u32();
        lt.K = (long long)r.u64();
        lt.rmax = (long long)r.u64();
        lt.D = r.u32();
        r.bytes(lt.place_digest.data(), lt.place_digest.size());
        if (lt.q != C.par.q || lt.n != C.par.n || lt.k != C.par.k || lt.K != C.par.K)
            throw std::runtime_error("lift tables belong to a different code");
        if (lt.D < 1 || lt.rmax < C.par.K - 1) throw std::runtime_error("implausible dimensions");
        auto modulus = r.u16_vec();
        in_field(modulus);
        if (modulus.size() != (size_t)lt.D + 1 || modulus.back() != kf.one())
            throw std::runtime_error("bad place modulus");
        lt.E = std::make_shared<const ExtField>(get_field(kf.spec()), modulus);
        lt.coords.resize((size_t)lt.n + 1);
        for (auto& c : lt.coords) {
            c = r.u16_vec();
            in_field(c);
            if (c.size() != lt.D) throw std::runtime_error("bad coordinate length");
        }
        lt.evals.resize((size_t)lt.rmax + 1);
        for (auto& e : lt.evals) {
            e = r.u16_vec();
            in_field(e);
            if (e.size() != lt.D) throw std::runtime_error("bad evaluation length");
        }
        lt.L = r.u16_vec();
        in_field(lt.L);
        if (lt.L.size() != (size_t)lt.D * (size_t)lt.K) throw std::runtime_error("bad echelon size");
        lt.R = r.u16_vec();
        in_field(lt.R);
        if (lt.R.size() != (size_t)lt.K * (size_t)lt.K)
            throw std::runtime_error("bad transform size");
        lt.piv.resize((size_t)lt.K);
        int prev = -1;
        for (auto& p : lt.piv) {
            p = (int)r.u32();
            if (p <= prev || p >= (int)lt.D) throw std::runtime_error("bad pivot sequence");
            prev = p;
        }
        if (!r.at_end()) throw std::runtime_error("trailing bytes");
        if (digest_place(modulus, lt.coords) != lt.place_digest)
            throw std::runtime_error("place digest mismatch");
        return lt;
    } catch (const IntegrityError&) {
        throw;
    } catch (const std::exception& e) {
        throw IntegrityError(std::string("lift section malformed: ") + e.what());
    }
}

std::vector<uint8_t> lift_attach(const std::vector<uint8_t>& table_file, const LiftTables& lt) {
    auto sf = SectionFile::deserialize(table_file);
    sf.put("GSLD", lift_serialize(lt));
    return sf.serialize();
}

bool lift_present(const std::vector<uint8_t>& table_file) {
    return SectionFile::deserialize(table_file).find("GSLD") != nullptr;
}

LiftTables lift_load(const std::vector<uint8_t>& table_file, const CodeInstance& C) {
    auto sf = SectionFile::deserialize(table_file);
    const auto* body = sf.find("GSLD");
    if (!body) throw IntegrityError("file has no lift section");
    return lift_deserialize(*body, C);
}

}  // namespace gsc
