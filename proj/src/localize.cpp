#include "gsc/localize.hpp"

#include <algorithm>
#include <array>
#include <cassert>
#include <functional>
#include <stdexcept>
#include <string>

#include "gsc/kernels.hpp"

namespace gsc {
namespace {

constexpr long long LSINF = 1LL << 50;

struct NeedPrec {};                  // stored terms exhausted; rebuild deeper
struct ProbeChoice { uint32_t n; };  // fresh choice point hit while exploring

using Elem = ExtField::Elem;

// ---------------------------------------------------------------------------
// Laurent series primitives.  Invariants after ls_clamp: lead <= valid, the
// first stored block is nonzero, stored blocks end before valid; an empty co
// means the series is zero at every exponent below valid.

size_t ls_blocks(const ExtField& E, const LSer& s) { return s.co.size() / E.deg(); }

Elem ls_at(const ExtField& E, const LSer& s, long long x) {
    size_t d = E.deg();
    long long i = x - s.lead;
    if (i < 0 || i >= (long long)ls_blocks(E, s)) return E.zero();
    return Elem(s.co.begin() + i * d, s.co.begin() + (i + 1) * d);
}

void ls_clamp(const ExtField& E, LSer& s) {
    size_t d = E.deg();
    if (s.valid > LSINF) s.valid = LSINF;
    long long n = (long long)(s.co.size() / d);
    if (s.lead + n > s.valid) {
        n = std::max<long long>(0, s.valid - s.lead);
        s.co.resize((size_t)n * d);
    }
    long long k = 0;
    while (k < n && E.sp_is_zero(s.co.data() + k * d)) k++;
    if (k == n) {
        s.co.clear();
        s.lead = s.valid;
        return;
    }
    if (k) {
        s.co.erase(s.co.begin(), s.co.begin() + (size_t)(k * d));
        s.lead += k;
        n -= k;
    }
    while (n > 0 && E.sp_is_zero(s.co.data() + (n - 1) * d)) n--;
    s.co.resize((size_t)n * d);
}

// zero up to the given exponent bound
LSer ls_unknown(long long valid) {
    LSer s;
    s.lead = s.valid = std::min(valid, LSINF);
    return s;
}

LSer ls_mono(const ExtField& E, const Elem& c, long long e, long long valid) {
    LSer s;
    s.lead = e;
    s.valid = std::min(valid, LSINF);
    s.co = c;
    ls_clamp(E, s);
    return s;
}

LSer ls_add(const ExtField& E, const LSer& a, const LSer& b) {
    size_t d = E.deg();
    long long valid = std::min(a.valid, b.valid);
    long long la = a.co.empty() ? valid : std::min(a.lead, valid);
    long long lb = b.co.empty() ? valid : std::min(b.lead, valid);
    long long lo = std::min(la, lb);
    long long hi = lo;
    if (!a.co.empty()) hi = std::max(hi, a.lead + (long long)ls_blocks(E, a));
    if (!b.co.empty()) hi = std::max(hi, b.lead + (long long)ls_blocks(E, b));
    hi = std::min(hi, valid);
    LSer r;
    r.lead = lo;
    r.valid = valid;
    if (hi > lo) {
        r.co.assign((size_t)(hi - lo) * d, 0);
        for (long long i = 0; i < (long long)ls_blocks(E, a); i++) {
            long long e = a.lead + i;
            if (e >= lo && e < hi)
                E.sp_add(r.co.data() + (size_t)(e - lo) * d, r.co.data() + (size_t)(e - lo) * d,
                         a.co.data() + (size_t)i * d);
        }
        for (long long i = 0; i < (long long)ls_blocks(E, b); i++) {
            long long e = b.lead + i;
            if (e >= lo && e < hi)
                E.sp_add(r.co.data() + (size_t)(e - lo) * d, r.co.data() + (size_t)(e - lo) * d,
                         b.co.data() + (size_t)i * d);
        }
    }
    ls_clamp(E, r);
    return r;
}

LSer ls_neg(const ExtField& E, LSer s) {
    const Gf& k = E.base();
    for (auto& v : s.co) v = k.neg(v);
    return s;
}

LSer ls_sub(const ExtField& E, const LSer& a, const LSer& b) { return ls_add(E, a, ls_neg(E, b)); }

LSer ls_scale(const ExtField& E, const LSer& s, const Elem& c) {
    if (E.is_zero(c)) return ls_unknown(LSINF);
    size_t d = E.deg();
    LSer r = s;
    for (size_t i = 0; i < ls_blocks(E, s); i++)
        E.sp_mul(r.co.data() + i * d, s.co.data() + i * d, c.data());
    ls_clamp(E, r);
    return r;
}

LSer ls_mul(const ExtField& E, const LSer& a, const LSer& b, long long cut) {
    size_t d = E.deg();
    long long la = a.co.empty() ? a.valid : a.lead;
    long long lb = b.co.empty() ? b.valid : b.lead;
    long long valid = std::min(std::min(a.valid + lb, b.valid + la), std::min(cut, LSINF));
    if (a.co.empty() || b.co.empty()) return ls_unknown(valid);
    LSer r;
    r.lead = a.lead + b.lead;
    r.valid = valid;
    long long n = std::min((long long)(ls_blocks(E, a) + ls_blocks(E, b)) - 1, valid - r.lead);
    if (n <= 0) return ls_unknown(valid);
    r.co.assign((size_t)n * d, 0);
    for (long long i = 0; i < (long long)ls_blocks(E, a); i++) {
        const uint16_t* ai = a.co.data() + (size_t)i * d;
        if (E.sp_is_zero(ai)) continue;
        long long jmax = std::min((long long)ls_blocks(E, b), n - i);
        for (long long j = 0; j < jmax; j++)
            E.sp_madd(r.co.data() + (size_t)(i + j) * d, ai, b.co.data() + (size_t)j * d);
    }
    ls_clamp(E, r);
    return r;
}

LSer ls_inv(const ExtField& E, const LSer& a, long long cut) {
    if (a.co.empty()) throw NeedPrec{};
    size_t d = E.deg();
    long long valid = std::min(a.valid - 2 * a.lead, cut);
    long long n = valid - (-a.lead);
    if (n <= 0) return ls_unknown(valid);
    long long na = (long long)ls_blocks(E, a);
    Elem ia0 = E.inv(ls_at(E, a, a.lead));
    LSer r;
    r.lead = -a.lead;
    r.valid = valid;
    r.co.assign((size_t)n * d, 0);
    std::copy(ia0.begin(), ia0.end(), r.co.begin());
    std::vector<uint16_t> acc(d);
    for (long long k = 1; k < n; k++) {
        std::fill(acc.begin(), acc.end(), 0);
        long long imax = std::min(k, na - 1);
        for (long long i = 1; i <= imax; i++)
            E.sp_madd(acc.data(), a.co.data() + (size_t)i * d, r.co.data() + (size_t)(k - i) * d);
        Elem bk = E.neg(E.mul(ia0, Elem(acc.begin(), acc.end())));
        std::copy(bk.begin(), bk.end(), r.co.begin() + (size_t)(k * d));
    }
    ls_clamp(E, r);
    return r;
}

// q-th power: coefficientwise q-th power with exponents stretched by q
LSer ls_qpow(const ExtField& E, const LSer& a, uint32_t q, long long cut) {
    size_t d = E.deg();
    long long valid = std::min(a.valid >= LSINF / q ? LSINF : q * a.valid, cut);
    if (a.co.empty()) return ls_unknown(valid);
    LSer r;
    r.lead = q * a.lead;
    r.valid = valid;
    long long n = std::min((long long)(ls_blocks(E, a) - 1) * q + 1, valid - r.lead);
    if (n <= 0) return ls_unknown(valid);
    r.co.assign((size_t)n * d, 0);
    for (long long i = 0; i < (long long)ls_blocks(E, a); i++) {
        if (q * i >= n) break;
        Elem c = E.pow(ls_at(E, a, a.lead + i), q);
        std::copy(c.begin(), c.end(), r.co.begin() + (size_t)(q * i) * d);
    }
    ls_clamp(E, r);
    return r;
}

LSer ls_one(const ExtField& E) { return ls_mono(E, E.one(), 0, LSINF); }

LSer ls_pow(const ExtField& E, const LSer& a, long long e, long long cut) {
    if (e < 0) return ls_pow(E, ls_inv(E, a, cut), -e, cut);
    LSer r = ls_one(E);
    LSer b = a;
    unsigned long long u = (unsigned long long)e;
    while (u) {
        if (u & 1) r = ls_mul(E, r, b, cut);
        u >>= 1;
        if (u) b = ls_mul(E, b, b, cut);
    }
    return r;
}

// formal derivative (coefficients times exponent mod p)
LSer ls_deriv(const ExtField& E, const LSer& a) {
    const Gf& k = E.base();
    uint32_t p = k.p();
    size_t d = E.deg();
    LSer r;
    r.lead = a.lead - 1;
    r.valid = a.valid - 1;
    r.co.assign(a.co.size(), 0);
    // scalar v*1 in the prime field, as a table-field element
    std::vector<uint16_t> scal(p, 0);
    for (uint32_t v = 1; v < p; v++) scal[v] = k.add(scal[v - 1], k.one());
    for (long long i = 0; i < (long long)ls_blocks(E, a); i++) {
        long long e = a.lead + i;
        uint16_t s = scal[(uint32_t)(((e % p) + p) % p)];
        if (!s) continue;
        Elem c = E.mul(ls_at(E, a, e), E.from_base(s));
        std::copy(c.begin(), c.end(), r.co.begin() + (size_t)i * d);
    }
    ls_clamp(E, r);
    return r;
}

// S(T): substitution of a series T with positive lead exponent
LSer ls_compose(const ExtField& E, const LSer& S, const LSer& T, long long cut) {
    if (T.co.empty() || T.lead < 1) throw std::logic_error("localize: bad composition parameter");
    long long LT = T.lead;
    long long own = S.valid >= LSINF / LT ? LSINF : S.valid * LT;
    long long valid = std::min(std::min(own, T.valid + (S.lead - 1) * LT), cut);
    size_t d = E.deg();
    LSer acc = ls_unknown(valid);
    if (S.co.empty()) return acc;
    LSer P = ls_pow(E, T, S.lead, cut);
    for (long long i = 0; i < (long long)ls_blocks(E, S); i++) {
        const uint16_t* ci = S.co.data() + (size_t)i * d;
        if (!E.sp_is_zero(ci)) acc = ls_add(E, acc, ls_scale(E, P, Elem(ci, ci + d)));
        if (i + 1 < (long long)ls_blocks(E, S)) P = ls_mul(E, P, T, cut);
    }
    acc.valid = std::min(acc.valid, valid);
    ls_clamp(E, acc);
    return acc;
}

LSer ls_poly_at(const ExtField& E, const Poly<Gf>& p, const LSer& X, long long cut) {
    LSer acc = ls_unknown(LSINF);
    for (int i = p.deg(); i >= 0; i--) {
        acc = ls_mul(E, acc, X, cut);
        if (p.c[(size_t)i]) acc = ls_add(E, acc, ls_mono(E, E.from_base(p.c[(size_t)i]), 0, LSINF));
    }
    return acc;
}

LSer ls_rf_at(const ExtField& E, const RatFun& f, const LSer& X, long long cut) {
    LSer num = ls_poly_at(E, f.num, X, cut);
    LSer den = ls_poly_at(E, f.den, X, cut);
    return ls_mul(E, num, ls_inv(E, den, cut), cut);
}

Elem qth_root(const ExtField& E, Elem a, uint32_t q) {
    for (uint32_t t = q; t > 1; t /= E.p()) a = E.frobp_inv(a);
    return a;
}

// ---------------------------------------------------------------------------
// Branch construction

struct BState {
    const TowerCtx* T = nullptr;
    uint32_t q = 0;
    int m = 0;
    std::shared_ptr<const ExtField> E;
    std::vector<LSer> x;
    long long cut = 0;
    long long e = 1;
    const std::vector<uint32_t>* path = nullptr;
    size_t pos = 0;
    bool probing = false;
};

uint32_t choose(BState& st, uint32_t n) {
    if (st.path && st.pos < st.path->size()) {
        uint32_t c = (*st.path)[st.pos++];
        if (c >= n) throw std::logic_error("localize: invalid choice in replay path");
        return c;
    }
    if (st.probing) throw ProbeChoice{n};
    throw std::logic_error("localize: replay path exhausted");
}

// Grow the residue field by a factor p (flattened over F_{q^2}), remapping
// every stored series through the minimal root of the old modulus.
void extend_residue(BState& st, const std::vector<LSer*>& extra, std::vector<Elem*> elems) {
    const Gf& k = st.T->k();
    uint32_t dold = st.E->deg();
    uint32_t dnew = dold * k.p();
    auto E2 = std::make_shared<const ExtField>(st.T->kp, first_irreducible(k, dnew).c);
    std::vector<Elem> pw(dold);  // powers of the embedded old generator
    if (dold > 1) {
        std::vector<Elem> mc;
        for (uint16_t c : st.E->modulus()) mc.push_back(E2->from_base(c));
        Poly<ExtField> mp = Poly<ExtField>::from(std::move(mc), *E2);
        Rng rng(0x6c6f63656d62ULL ^ dnew);
        auto roots = poly_roots(*E2, mp, rng);
        if (roots.size() != dold) throw std::logic_error("localize: modulus failed to split");
        std::sort(roots.begin(), roots.end(),
                  [&](const Elem& a, const Elem& b) { return elem_less(*E2, a, b); });
        pw[0] = E2->one();
        for (uint32_t i = 1; i < dold; i++) pw[i] = E2->mul(pw[i - 1], roots[0]);
    } else {
        pw[0] = E2->one();
    }
    auto remap = [&](const uint16_t* blk) {
        Elem out = E2->zero();
        for (uint32_t i = 0; i < dold; i++) {
            if (!blk[i]) continue;
            Elem t = pw[i];
            for (auto& v : t) v = k.mul(v, blk[i]);
            out = E2->add(out, t);
        }
        return out;
    };
    auto remap_ser = [&](LSer& s) {
        size_t n = ls_blocks(*st.E, s);
        std::vector<uint16_t> co(n * dnew);
        for (size_t i = 0; i < n; i++) {
            Elem c = remap(s.co.data() + i * dold);
            std::copy(c.begin(), c.end(), co.begin() + i * dnew);
        }
        s.co = std::move(co);
    };
    for (auto& s : st.x) remap_ser(s);
    for (auto* s : extra) remap_ser(*s);
    for (auto* c : elems) *c = remap(c->data());
    st.E = E2;
}

// Totally ramified step: the residual pole profile is tau^{-1}; switch to the
// uniformizer sigma of the extension by solving r(T(sigma)) = sigma^{-q} +
// sigma^{-1} for the reparameterization T (Newton; tame because dr has a
// tau^{-2} term), recompose every stored series, and add sigma^{-1} to y.
void wild_step(BState& st, const LSer& r, LSer& y, LSer& c) {
    const ExtField& E = *st.E;
    uint32_t q = st.q;
    long long newcut = st.cut * q;
    LSer rhs = ls_add(E, ls_mono(E, E.one(), -(long long)q, LSINF), ls_mono(E, E.one(), -1, LSINF));
    LSer dr = ls_deriv(E, r);
    if (dr.co.empty() || dr.lead != -2) throw std::logic_error("localize: degenerate wild residual");
    LSer T = ls_mono(E, ls_at(E, r, -1), q, LSINF);
    for (int it = 0;; it++) {
        if (it > 200) throw std::logic_error("localize: reparameterization failed to converge");
        LSer G = ls_sub(E, ls_compose(E, r, T, newcut), rhs);
        if (G.co.empty()) break;
        LSer delta = ls_mul(E, G, ls_inv(E, ls_compose(E, dr, T, newcut), newcut), newcut);
        if (delta.lead <= T.lead) throw std::logic_error("localize: reparameterization diverged");
        T = ls_sub(E, T, delta);
    }
    for (auto& s : st.x) s = ls_compose(E, s, T, newcut);
    y = ls_compose(E, y, T, newcut);
    c = ls_compose(E, c, T, newcut);
    st.cut = newcut;
    st.e *= q;
    y = ls_add(E, y, ls_mono(E, E.one(), -1, LSINF));
}

// Frobenius of the field with p^pd elements, inside an extension.
Elem frob_iter(const ExtField& E, Elem a, uint32_t pd) {
    for (uint32_t i = 0; i < pd; i++) a = E.frobp(a);
    return a;
}

void constant_step(BState& st, LSer& y, LSer& c, Elem c0) {
    uint32_t q = st.q;
    auto roots = artin_schreier_roots(*st.E, q, c0);
    if (!roots.empty() && roots.size() != q)
        throw std::logic_error("localize: partial Artin-Schreier root set");
    if (roots.empty()) {
        // inert: roots live in the degree-p extension and regroup into
        // Frobenius orbits over the old field, one place per orbit
        uint32_t pdold = st.E->pdeg();
        extend_residue(st, {&y, &c}, {&c0});
        roots = artin_schreier_roots(*st.E, q, c0);
        if (roots.size() != q) throw std::logic_error("localize: extension did not split");
        std::vector<std::vector<Elem>> orbits;
        std::vector<bool> used(roots.size(), false);
        for (size_t i = 0; i < roots.size(); i++) {
            if (used[i]) continue;
            std::vector<Elem> orb{roots[i]};
            used[i] = true;
            for (Elem f = frob_iter(*st.E, roots[i], pdold); !st.E->eq(f, roots[i]);
                 f = frob_iter(*st.E, f, pdold)) {
                auto it = std::find(roots.begin(), roots.end(), f);
                if (it == roots.end() || used[(size_t)(it - roots.begin())])
                    throw std::logic_error("localize: broken Frobenius orbit");
                used[(size_t)(it - roots.begin())] = true;
                orb.push_back(f);
            }
            if (orb.size() != st.E->p())
                throw std::logic_error("localize: orbit size differs from the characteristic");
            orbits.push_back(std::move(orb));
        }
        uint32_t i = choose(st, (uint32_t)orbits.size());
        y = ls_add(*st.E, y, ls_mono(*st.E, orbits[i][0], 0, LSINF));
        return;
    }
    uint32_t i = choose(st, q);
    y = ls_add(*st.E, y, ls_mono(*st.E, roots[i], 0, LSINF));
}

LSer solve_level(BState& st, LSer c) {
    const uint32_t q = st.q;
    LSer y = ls_unknown(LSINF);
    bool cdone = false;
    for (int guard = 0;; guard++) {
        if (guard > 4096) throw std::logic_error("localize: lift did not terminate");
        const ExtField& E = *st.E;
        LSer r = ls_sub(E, c, ls_add(E, ls_qpow(E, y, q, st.cut), y));
        if (r.co.empty() && r.valid <= 0) throw NeedPrec{};
        if (!r.co.empty() && r.lead < 0) {
            if (r.lead % (long long)q == 0) {
                // exact extraction: q-th roots are unique in characteristic p
                Elem rt = qth_root(E, ls_at(E, r, r.lead), q);
                y = ls_add(E, y, ls_mono(E, rt, r.lead / q, LSINF));
                continue;
            }
            if (r.lead != -1) throw std::logic_error("localize: unexpected ramification profile");
            wild_step(st, r, y, c);
            cdone = true;  // the ramified solution is already complete at order zero
            continue;
        }
        if (!cdone) {
            Elem c0 = (!r.co.empty() && r.lead == 0) ? ls_at(*st.E, r, 0) : st.E->zero();
            constant_step(st, y, c, c0);
            cdone = true;
            continue;
        }
        if (r.co.empty()) break;  // solved to the available precision
        if (r.lead < 1) throw std::logic_error("localize: constant residue after constant step");
        // tail: z = r - r^q + r^{q^2} - ... solves z^q + z = r
        LSer z = ls_unknown(LSINF), term = r;
        for (bool neg = false;; neg = !neg) {
            z = neg ? ls_sub(E, z, term) : ls_add(E, z, term);
            if (term.co.empty()) break;  // final add propagates the known bound
            term = ls_qpow(E, term, q, st.cut);
        }
        y = ls_add(E, y, z);
    }
    return y;
}

// series of u_j = x^q/(x^{q-1}+1) from the series of x = x_j
LSer u_series(const BState& st, const LSer& x) {
    const ExtField& E = *st.E;
    LSer xq = ls_qpow(E, x, st.q, st.cut);
    LSer xq1 = ls_mul(E, xq, ls_inv(E, x, st.cut), st.cut);
    LSer den = ls_add(E, xq1, ls_one(E));
    return ls_mul(E, xq, ls_inv(E, den, st.cut), st.cut);
}

void classify(const TowerCtx& T, Branch& b) {
    if (b.base_kind == 0) {
        b.is_pinf = true;
        b.t = -1;
        return;
    }
    const auto om = omega_set(T.k(), T.q);
    for (int j = 0; j <= b.m; j++) {
        const LSer& s = b.x[(size_t)j];
        if (s.co.empty()) {
            if (s.valid <= 0) throw NeedPrec{};
            continue;  // vanishes at the place
        }
        if (s.lead > 0) continue;
        if (s.lead < 0) throw std::logic_error("localize: pole below the first nonzero level");
        Elem c0 = ls_at(*b.E, s, 0);
        uint16_t g = c0[0];
        for (size_t i = 1; i < c0.size(); i++)
            if (c0[i]) throw std::logic_error("localize: irrational branch constant");
        if (!g || std::find(om.begin(), om.end(), g) == om.end())
            throw std::logic_error("localize: branch constant outside Omega");
        b.t = j;
        b.alpha = g;
        return;
    }
    b.t = b.m + 1;
    b.alpha = 0;
}

Branch build_branch(const TowerCtx& T, int m, int base_kind, uint16_t alpha,
                    const std::vector<uint32_t>& path, bool probing, long long prec) {
    BState st;
    st.T = &T;
    st.q = T.q;
    st.m = m;
    st.E = std::make_shared<const ExtField>(T.kp, first_irreducible(T.k(), 1).c);
    st.cut = prec;
    st.path = &path;
    st.probing = probing;
    if (base_kind == 0) {
        st.x.push_back(ls_mono(*st.E, st.E->one(), -1, LSINF));
    } else {
        LSer x0;
        x0.lead = 0;
        x0.valid = LSINF;
        x0.co = st.E->from_base(alpha);
        Elem one = st.E->one();
        x0.co.insert(x0.co.end(), one.begin(), one.end());
        ls_clamp(*st.E, x0);
        st.x.push_back(x0);
    }
    for (int j = 1; j <= m; j++) {
        LSer c = u_series(st, st.x.back());
        st.x.push_back(solve_level(st, c));
    }
    if (st.pos != path.size()) throw std::logic_error("localize: overlong replay path");
    Branch b;
    b.q = st.q;
    b.m = m;
    b.base_kind = base_kind;
    b.base_alpha = alpha;
    b.path = path;
    b.e = st.e;
    b.resdeg = st.E->deg();
    b.E = st.E;
    b.x = std::move(st.x);
    b.cut = st.cut;
    b.base_prec = prec;
    classify(T, b);
    return b;
}

void explore(const TowerCtx& T, int m, int base_kind, uint16_t alpha, long long prec,
             std::vector<uint32_t>& path, std::vector<Branch>& out) {
    try {
        out.push_back(build_branch(T, m, base_kind, alpha, path, true, prec));
    } catch (const ProbeChoice& pc) {
        for (uint32_t i = 0; i < pc.n; i++) {
            path.push_back(i);
            explore(T, m, base_kind, alpha, prec, path, out);
            path.pop_back();
        }
    }
}

LSer tf_ser(const TowerCtx& T, const Tf& f, const Branch& b, long long cut) {
    const ExtField& E = *b.E;
    LSer acc = ls_unknown(LSINF);
    for (const auto& [ev, rf] : f.c) {
        LSer term = ls_rf_at(E, rf, b.x[0], cut);
        for (size_t s = 0; s < ev.size(); s++)
            if (ev[s]) term = ls_mul(E, term, ls_pow(E, b.x[s + 1], ev[s], cut), cut);
        acc = ls_add(E, acc, term);
    }
    return acc;
}

// defining relations hold on the branch, to the stored precision
void check_relations(const TowerCtx& T, const Branch& b) {
    BState st;
    st.T = &T;
    st.q = T.q;
    st.m = b.m;
    st.E = b.E;
    st.cut = b.cut;
    for (int j = 0; j + 1 <= b.m; j++) {
        const ExtField& E = *b.E;
        LSer u = u_series(st, b.x[(size_t)j]);
        LSer lhs = ls_add(E, ls_qpow(E, b.x[(size_t)j + 1], T.q, b.cut), b.x[(size_t)j + 1]);
        LSer res = ls_sub(E, lhs, u);
        if (!res.co.empty()) throw std::logic_error("localize: branch violates the tower relation");
        if (res.valid <= 0) throw NeedPrec{};
    }
}

}  // namespace

std::vector<Branch> bad_branches(const TowerCtx& T, int m, long long prec) {
    if (m < 0 || m > T.mmax) throw std::invalid_argument("bad_branches: level out of range");
    long long qm = 1;
    for (int i = 0; i < m; i++) qm *= T.q;
    auto om = omega_set(T.k(), T.q);
    std::sort(om.begin(), om.end());
    for (int attempt = 0; attempt < 12; attempt++, prec *= 2) {
        try {
            std::vector<Branch> out;
            std::vector<std::pair<int, uint16_t>> bases;
            bases.emplace_back(0, 0);
            for (uint16_t w : om) bases.emplace_back(1, w);
            for (auto [bk, alpha] : bases) {
                size_t first = out.size();
                std::vector<uint32_t> path;
                explore(T, m, bk, alpha, prec, path, out);
                long long total = 0;
                for (size_t i = first; i < out.size(); i++) total += out[i].e * out[i].resdeg;
                if (total != qm)
                    throw std::logic_error("localize: fiber degrees do not sum to q^m");
                if (bk == 0 && out.size() - first != 1)
                    throw std::logic_error("localize: several branches over infinity");
            }
            for (auto& b : out) check_relations(T, b);
            return out;
        } catch (const NeedPrec&) {
        }
    }
    throw std::logic_error("bad_branches: precision cap exceeded");
}

Branch pinf_branch(const TowerCtx& T, int m, long long prec) {
    if (m < 0 || m > T.mmax) throw std::invalid_argument("pinf_branch: level out of range");
    for (int attempt = 0; attempt < 12; attempt++, prec *= 2) {
        try {
            std::vector<uint32_t> path;
            Branch b = build_branch(T, m, 0, 0, path, true, prec);
            check_relations(T, b);
            return b;
        } catch (const NeedPrec&) {
        } catch (const ProbeChoice&) {
            throw std::logic_error("pinf_branch: unexpected choice point");
        }
    }
    throw std::logic_error("pinf_branch: precision cap exceeded");
}

void branch_ensure(const TowerCtx& T, Branch& b, long long cut) {
    while (b.cut < cut) {
        Branch nb = build_branch(T, b.m, b.base_kind, b.base_alpha, b.path, false, b.base_prec * 2);
        if (nb.t != b.t || nb.alpha != b.alpha || nb.e != b.e || nb.resdeg != b.resdeg)
            throw std::logic_error("branch_ensure: replay produced a different branch");
        b = std::move(nb);
    }
}

long long valuation(const TowerCtx& T, const Tf& f, Branch& b) {
    if (f.level != b.m) throw std::invalid_argument("valuation: level mismatch");
    if (tf_is_zero(f)) throw std::domain_error("valuation: zero function");
    for (int tries = 0; tries < 16; tries++) {
        bool more = false;
        try {
            LSer s = tf_ser(T, f, b, b.cut);
            if (!s.co.empty()) return s.lead;
            more = true;
        } catch (const NeedPrec&) {
            more = true;
        }
        if (more) branch_ensure(T, b, 2 * std::max<long long>(b.cut, 1));
    }
    throw std::logic_error("valuation: precision cap exceeded");
}

long long weight_of(const TowerCtx& T, const Tf& f, Branch& pinf) {
    if (!pinf.is_pinf) throw std::invalid_argument("weight_of: not the infinite branch");
    return -valuation(T, f, pinf);
}

long long weight_of(const TowerCtx& T, const Tf& f, int m) {
    Branch b = pinf_branch(T, m);
    return weight_of(T, f, b);
}

// ---------------------------------------------------------------------------
// regular_basis

namespace {

struct Cand {
    int a = 0;
    std::array<int, 9> e{}, cb{};  // indexed by level, 1..m
    long long w = 0;
};

Tf cand_tf(const TowerCtx& T, int m, const Cand& cd) {
    Tf f = tf_pow(T, tf_x(T, 0, m), (uint64_t)cd.a);
    for (int j = 1; j <= m; j++) {
        if (cd.e[(size_t)j]) f = tf_mul(T, f, tf_pow(T, tf_x(T, j, m), (uint64_t)cd.e[(size_t)j]));
        if (cd.cb[(size_t)j]) {
            Tf tinv = tf_mul(T, tf_x(T, j, m), tf_embed(T, T.I[(size_t)j - 1], m));
            f = tf_mul(T, f, tf_pow(T, tinv, (uint64_t)cd.cb[(size_t)j]));
        }
    }
    return f;
}

struct GfMat {
    size_t r = 0, c = 0;
    std::vector<uint16_t> a;
    GfMat() = default;
    GfMat(size_t r_, size_t c_) : r(r_), c(c_), a(r_ * c_, 0) {}
    uint16_t* row(size_t i) { return a.data() + i * c; }
    const uint16_t* row(size_t i) const { return a.data() + i * c; }
};

// rows spanning {v : v M = 0}
std::vector<std::vector<uint16_t>> left_kernel(const Gf& k, const KernelCtx& kc, const GfMat& M) {
    size_t w = M.c + M.r;
    GfMat A(M.r, w);
    for (size_t i = 0; i < M.r; i++) {
        std::copy(M.row(i), M.row(i) + M.c, A.row(i));
        A.row(i)[M.c + i] = k.one();
    }
    size_t pr = 0;
    for (size_t col = 0; col < M.c && pr < M.r; col++) {
        size_t piv = pr;
        while (piv < M.r && !A.row(piv)[col]) piv++;
        if (piv == M.r) continue;
        if (piv != pr) std::swap_ranges(A.row(piv), A.row(piv) + w, A.row(pr));
        uint16_t inv = k.inv(A.row(pr)[col]);
        vec_scale(kc, A.row(pr), inv, A.row(pr), w);
        for (size_t i = 0; i < M.r; i++) {
            if (i == pr || !A.row(i)[col]) continue;
            vec_axpy(kc, A.row(i), k.neg(A.row(i)[col]), A.row(pr), w);
        }
        pr++;
    }
    std::vector<std::vector<uint16_t>> out;
    for (size_t i = pr; i < M.r; i++)
        out.emplace_back(A.row(i) + M.c, A.row(i) + w);
    return out;
}

}  // namespace

RegularBasis regular_basis(const TowerCtx& T, int m, int smax) {
    if (m < 0 || m > T.mmax) throw std::invalid_argument("regular_basis: level out of range");
    if (smax < 0) throw std::invalid_argument("regular_basis: negative range");
    if (m > 8) throw std::invalid_argument("regular_basis: level too deep");
    const Gf& k = T.k();
    const uint32_t q = T.q;
    KernelCtx kc = make_kernel_ctx(k);
    long long qm = 1;
    for (int i = 0; i < m; i++) qm *= q;
    if (smax >= qm * (long long)q)
        throw std::invalid_argument("regular_basis: range exceeds one pole block");
    const long long wtop = qm * (long long)q;  // q^{m+1}
    const long long wmax = wtop + smax;

    auto branches = bad_branches(T, m);
    size_t ip = branches.size();
    for (size_t i = 0; i < branches.size(); i++)
        if (branches[i].is_pinf) ip = i;
    Branch& pinf = branches[ip];
    if (pinf.resdeg != 1) throw std::logic_error("regular_basis: infinite place not rational");

    // exact coordinate data per branch: vx[j] = v(x_j), vt[j] = v(x_j^{q-1}+1)
    int abound = (int)q + smax, cbound = 2;
    for (int attempt = 0;; attempt++) {
        if (attempt > 3) throw std::logic_error("regular_basis: candidate bounds exhausted");

        std::vector<Cand> cands;
        std::vector<int> e(m + 1, 0), cb(m + 1, 0);
        // weight of a monomial is linear in the exponents
        std::vector<long long> wx(m + 1), wt(m + 1);
        for (int j = 0; j <= m; j++) {
            long long pj = 1;
            for (int i = 0; i < m - j; i++) pj *= q;
            wx[(size_t)j] = pj;                     // -v at infinity of x_j
            wt[(size_t)j] = -(long long)(q - 1) * pj;  // of (x_j^{q-1}+1)^{-1}
        }
        std::function<void(int)> gen = [&](int j) {
            if (j > m) {
                for (int a = 0; a <= abound; a++) {
                    Cand cd;
                    cd.a = a;
                    cd.w = a * wx[0];
                    for (int i = 1; i <= m; i++) {
                        cd.e[(size_t)i] = e[(size_t)i];
                        cd.cb[(size_t)i] = cb[(size_t)i];
                        cd.w += e[(size_t)i] * wx[(size_t)i] + cb[(size_t)i] * wt[(size_t)i];
                    }
                    if (cd.w <= wmax) cands.push_back(cd);
                }
                return;
            }
            for (e[(size_t)j] = 0; e[(size_t)j] < (int)q; e[(size_t)j]++)
                for (cb[(size_t)j] = 0; cb[(size_t)j] <= cbound; cb[(size_t)j]++) gen(j + 1);
        };
        if (m >= 1)
            gen(1);
        else
            gen(m + 1);
        size_t nc = cands.size();
        int amax = 0;
        std::array<int, 9> emax{}, cmax{};
        for (const auto& cd : cands) {
            amax = std::max(amax, cd.a);
            for (int j = 1; j <= m; j++) {
                emax[(size_t)j] = std::max(emax[(size_t)j], cd.e[(size_t)j]);
                cmax[(size_t)j] = std::max(cmax[(size_t)j], cd.cb[(size_t)j]);
            }
        }

        // negative tails at every finite bad branch
        std::vector<size_t> colw;
        size_t ncols = 0;
        std::vector<GfMat> tails;
        for (size_t bi = 0; bi < branches.size(); bi++) {
            if (bi == ip) {
                colw.push_back(0);
                tails.emplace_back();
                continue;
            }
            Branch& b = branches[bi];
            for (;;) {
                // exact monomial valuations bound the window
                std::vector<long long> vx(m + 1), vt(m + 1, 0);
                bool shallow = false;
                {
                    auto keep = b.E;
                    const ExtField& E = *keep;
                    for (int j = 0; j <= m; j++) {
                        if (b.x[(size_t)j].co.empty()) { shallow = true; break; }
                        vx[(size_t)j] = b.x[(size_t)j].lead;
                        if (!j) continue;
                        LSer t = ls_add(E,
                                        ls_mul(E, ls_qpow(E, b.x[(size_t)j], q, b.cut),
                                               ls_inv(E, b.x[(size_t)j], b.cut), b.cut),
                                        ls_one(E));
                        if (t.co.empty()) { shallow = true; break; }
                        vt[(size_t)j] = -t.lead;
                    }
                }
                if (shallow) {
                    branch_ensure(T, b, 2 * b.cut);
                    continue;
                }
                // truncation must budget for the validity a chained product
                // loses to each factor's pole, not just the output window
                auto neg = [](long long v) { return v < 0 ? -v : 0; };
                long long wmin = 0, loss = 0;
                for (const auto& cd : cands) {
                    long long v = cd.a * vx[0], l = cd.a * neg(vx[0]);
                    for (int j = 1; j <= m; j++) {
                        v += cd.e[(size_t)j] * vx[(size_t)j] + cd.cb[(size_t)j] * vt[(size_t)j];
                        l += cd.e[(size_t)j] * neg(vx[(size_t)j]) +
                             cd.cb[(size_t)j] * neg(vt[(size_t)j]);
                    }
                    wmin = std::min(wmin, v);
                    loss = std::max(loss, l);
                }
                long long depth = 1 - wmin;
                branch_ensure(T, b, std::max<long long>(2 * (loss + depth) + 16, b.base_prec));
                long long cutb = loss + 2;
                auto keep = b.E;
                const ExtField& E = *keep;
                size_t d = E.deg();
                // cached powers of the factors, truncated at exponent 1
                std::vector<std::vector<LSer>> xp(m + 1), tp(m + 1);
                size_t W = (size_t)(-wmin) * d;
                GfMat M(nc, W);
                bool ok = true;
                try {
                    for (int j = 0; j <= m; j++) {
                        int xb = j == 0 ? amax : emax[(size_t)j];
                        xp[(size_t)j].push_back(ls_one(E));
                        for (int t = 1; t <= xb; t++)
                            xp[(size_t)j].push_back(
                                ls_mul(E, xp[(size_t)j].back(), b.x[(size_t)j], cutb));
                        if (j >= 1) {
                            LSer tj = ls_add(E,
                                             ls_mul(E, ls_qpow(E, b.x[(size_t)j], q, b.cut),
                                                    ls_inv(E, b.x[(size_t)j], b.cut), b.cut),
                                             ls_one(E));
                            LSer ti = ls_inv(E, tj, cutb);
                            tp[(size_t)j].push_back(ls_one(E));
                            for (int t = 1; t <= cmax[(size_t)j]; t++)
                                tp[(size_t)j].push_back(ls_mul(E, tp[(size_t)j].back(), ti, cutb));
                        }
                    }
                    for (size_t ci = 0; ci < nc && ok; ci++) {
                        const Cand& cd = cands[ci];
                        LSer s = xp[0][(size_t)cd.a];
                        for (int j = 1; j <= m; j++) {
                            if (cd.e[(size_t)j])
                                s = ls_mul(E, s, xp[(size_t)j][(size_t)cd.e[(size_t)j]], cutb);
                            if (cd.cb[(size_t)j])
                                s = ls_mul(E, s, tp[(size_t)j][(size_t)cd.cb[(size_t)j]], cutb);
                        }
                        if (s.valid < 1) { ok = false; break; }
                        for (long long x = std::max(s.lead, wmin); x < 0; x++) {
                            Elem cf = ls_at(E, s, x);
                            std::copy(cf.begin(), cf.end(), M.row(ci) + (size_t)(x - wmin) * d);
                        }
                    }
                } catch (const NeedPrec&) {
                    ok = false;
                }
                if (!ok) {
                    branch_ensure(T, b, 2 * b.cut);
                    continue;
                }
                colw.push_back(W);
                ncols += W;
                tails.push_back(std::move(M));
                break;
            }
        }

        // the kernel of the stacked tail matrix = combinations regular away
        // from infinity
        GfMat M(nc, ncols);
        size_t off = 0;
        for (size_t bi = 0; bi < branches.size(); bi++) {
            if (!colw[bi]) continue;
            for (size_t ci = 0; ci < nc; ci++)
                std::copy(tails[bi].row(ci), tails[bi].row(ci) + colw[bi], M.row(ci) + off);
            off += colw[bi];
        }
        auto ker = left_kernel(k, kc, M);
        size_t nk = ker.size();

        // expansions at infinity, window [-wmax, 0]; same loss budget as above
        // (x_j all have poles there, the inverted tower factors have zeros)
        size_t WI = (size_t)wmax + 1;
        GfMat Tinf(nc, WI);
        long long iloss = 0;
        for (const auto& cd : cands) {
            long long l = cd.a * wx[0];
            for (int j = 1; j <= m; j++) l += cd.e[(size_t)j] * wx[(size_t)j];
            iloss = std::max(iloss, l);
        }
        branch_ensure(T, pinf, 2 * (iloss + wmax) + 32);
        for (;;) {
            auto keep = pinf.E;
            const ExtField& E = *keep;
            long long cutb = iloss + 2;
            bool redo = false;
            try {
                std::vector<std::vector<LSer>> xp(m + 1), tp(m + 1);
                for (int j = 0; j <= m; j++) {
                    int xb = j == 0 ? amax : emax[(size_t)j];
                    xp[(size_t)j].push_back(ls_one(E));
                    for (int t = 1; t <= xb; t++)
                        xp[(size_t)j].push_back(
                            ls_mul(E, xp[(size_t)j].back(), pinf.x[(size_t)j], cutb));
                    if (j >= 1) {
                        LSer tj = ls_add(E,
                                         ls_mul(E, ls_qpow(E, pinf.x[(size_t)j], q, pinf.cut),
                                                ls_inv(E, pinf.x[(size_t)j], pinf.cut), pinf.cut),
                                         ls_one(E));
                        LSer ti = ls_inv(E, tj, cutb);
                        tp[(size_t)j].push_back(ls_one(E));
                        for (int t = 1; t <= cmax[(size_t)j]; t++)
                            tp[(size_t)j].push_back(ls_mul(E, tp[(size_t)j].back(), ti, cutb));
                    }
                }
                for (size_t ci = 0; ci < nc; ci++) {
                    const Cand& cd = cands[ci];
                    LSer s = xp[0][(size_t)cd.a];
                    for (int j = 1; j <= m; j++) {
                        if (cd.e[(size_t)j])
                            s = ls_mul(E, s, xp[(size_t)j][(size_t)cd.e[(size_t)j]], cutb);
                        if (cd.cb[(size_t)j])
                            s = ls_mul(E, s, tp[(size_t)j][(size_t)cd.cb[(size_t)j]], cutb);
                    }
                    if (s.valid < 1) throw NeedPrec{};
                    for (long long x = std::max(s.lead, -wmax); x <= 0; x++)
                        Tinf.row(ci)[(size_t)(x + wmax)] = ls_at(E, s, x)[0];
                }
            } catch (const NeedPrec&) {
                redo = true;
            }
            if (!redo) break;
            branch_ensure(T, pinf, 2 * pinf.cut);
        }

        // triangularize the kernel by pole order at infinity
        std::vector<uint16_t> kflat(nk * nc, 0);
        for (size_t i = 0; i < nk; i++)
            std::copy(ker[i].begin(), ker[i].end(), kflat.begin() + i * nc);
        GfMat B(nk, WI);
        gemm_accum(kc, B.a.data(), kflat.data(), Tinf.a.data(), nk, nc, WI);

        std::vector<std::vector<uint16_t>> kcomb = ker;  // row ops mirror into candidate space
        std::vector<long long> pivot_of(WI, -1);
        size_t pr = 0;
        for (size_t col = 0; col < WI && pr < nk; col++) {
            size_t piv = pr;
            while (piv < nk && !B.row(piv)[col]) piv++;
            if (piv == nk) continue;
            if (piv != pr) {
                std::swap_ranges(B.row(piv), B.row(piv) + WI, B.row(pr));
                std::swap(kcomb[piv], kcomb[pr]);
            }
            uint16_t inv = k.inv(B.row(pr)[col]);
            vec_scale(kc, B.row(pr), inv, B.row(pr), WI);
            vec_scale(kc, kcomb[pr].data(), inv, kcomb[pr].data(), nc);
            for (size_t i = 0; i < nk; i++) {
                if (i == pr || !B.row(i)[col]) continue;
                uint16_t s = k.neg(B.row(i)[col]);
                vec_axpy(kc, B.row(i), s, B.row(pr), WI);
                vec_axpy(kc, kcomb[i].data(), s, kcomb[pr].data(), nc);
            }
            pivot_of[col] = (long long)pr;
            pr++;
        }

        RegularBasis rb;
        rb.level = m;
        bool missing = false;
        for (int s = 0; s <= smax && !missing; s++) {
            long long col = -(wtop + s) + wmax;  // exponent -(q^{m+1}+s)
            if (col < 0 || pivot_of[(size_t)col] < 0) {
                missing = true;
                break;
            }
            const auto& comb = kcomb[(size_t)pivot_of[(size_t)col]];
            Tf g = tf_zero(m);
            for (size_t ci = 0; ci < nc; ci++) {
                if (!comb[ci]) continue;
                Tf t = cand_tf(T, m, cands[ci]);
                g = tf_add(T, g, tf_mul(T, t, tf_const(T, comb[ci], m)));
            }
            rb.g.push_back(std::move(g));
            rb.weights.push_back(wtop + s);
        }
        if (missing) {
            abound *= 2;
            cbound *= 2;
            continue;
        }

        // round-trip through the valuation engine
        for (int s = 0; s <= smax; s++) {
            if (weight_of(T, rb.g[(size_t)s], pinf) != wtop + s)
                throw std::logic_error("regular_basis: weight verification failed");
            for (size_t bi = 0; bi < branches.size(); bi++) {
                if (bi == ip) continue;
                if (valuation(T, rb.g[(size_t)s], branches[bi]) < 0)
                    throw std::logic_error("regular_basis: pole at a finite bad place");
            }
        }
        return rb;
    }
}

}  // namespace gsc
