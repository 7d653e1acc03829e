#include "gsc/tower.hpp"

#include <algorithm>

namespace gsc {

namespace {

Poly<Gf> poly_one_() { return Poly<Gf>{{1}}; }

Poly<Gf> poly_xn(uint32_t n) {
    Poly<Gf> p;
    p.c.assign(n + 1, 0);
    p.c[n] = 1;
    return p;
}

// t(x) = x^{q-1} + 1, the denominator of the defining relation
Poly<Gf> poly_t(uint32_t q) {
    Poly<Gf> p;
    p.c.assign(q, 0);
    p.c[0] = 1;
    p.c[q - 1] = 1;
    return p;
}

}  // namespace

// ---------------------------------------------------------------------------
// RatFun

RatFun rf_make(const Gf& k, Poly<Gf> num, Poly<Gf> den) {
    if (den.is_zero()) throw ZeroDivisorError("tower: zero denominator");
    if (num.is_zero()) return {Poly<Gf>::zero(), poly_one_()};
    Poly<Gf> g = poly_gcd(k, num, den);
    if (g.deg() > 0) {
        num = poly_divmod(k, num, g).first;
        den = poly_divmod(k, den, g).first;
    }
    auto lead = den.lead(k);
    if (!k.eq(lead, k.one())) {
        auto li = k.inv(lead);
        num = poly_scale(k, li, num);
        den = poly_scale(k, li, den);
    }
    return {std::move(num), std::move(den)};
}

RatFun rf_zero() { return {Poly<Gf>::zero(), poly_one_()}; }
RatFun rf_one(const Gf& k) { return rf_const(k, k.one()); }

RatFun rf_const(const Gf& k, uint16_t c) {
    if (k.is_zero(c)) return rf_zero();
    return {Poly<Gf>{{c}}, poly_one_()};
}

RatFun rf_poly(const Gf& k, Poly<Gf> p) {
    p.normalize(k);
    return {std::move(p), poly_one_()};
}

RatFun rf_add(const Gf& k, const RatFun& a, const RatFun& b) {
    return rf_make(k,
                   poly_add(k, poly_mul(k, a.num, b.den), poly_mul(k, b.num, a.den)),
                   poly_mul(k, a.den, b.den));
}

RatFun rf_sub(const Gf& k, const RatFun& a, const RatFun& b) {
    return rf_add(k, a, rf_neg(k, b));
}

RatFun rf_mul(const Gf& k, const RatFun& a, const RatFun& b) {
    return rf_make(k, poly_mul(k, a.num, b.num), poly_mul(k, a.den, b.den));
}

RatFun rf_div(const Gf& k, const RatFun& a, const RatFun& b) {
    return rf_make(k, poly_mul(k, a.num, b.den), poly_mul(k, a.den, b.num));
}

RatFun rf_neg(const Gf& k, const RatFun& a) {
    RatFun r = a;
    for (auto& c : r.num.c) c = k.neg(c);
    return r;
}

bool rf_is_zero(const RatFun& a) { return a.num.is_zero(); }

bool rf_eq(const RatFun& a, const RatFun& b) { return a.num.c == b.num.c && a.den.c == b.den.c; }

// ---------------------------------------------------------------------------
// canonical forms

namespace {

void add_into(const Gf& k, std::map<ExpVec, RatFun>& m, const ExpVec& e, const RatFun& cf) {
    if (rf_is_zero(cf)) return;
    auto it = m.find(e);
    if (it == m.end()) {
        m.emplace(e, cf);
    } else {
        it->second = rf_add(k, it->second, cf);
        if (rf_is_zero(it->second)) m.erase(it);
    }
}

// Rewrite every x_{i+1}^{e} with e >= q through x_{i+1}^q = -x_{i+1} + u_i
// until all exponents are < q.  Terms strictly decrease in the reverse-lex
// well-order on exponent tuples, so this terminates.
std::map<ExpVec, RatFun> reduce_terms(const TowerCtx& T,
                                      std::vector<std::pair<ExpVec, RatFun>> work) {
    const Gf& k = T.k();
    std::map<ExpVec, RatFun> out;
    while (!work.empty()) {
        auto [e, cf] = std::move(work.back());
        work.pop_back();
        if (rf_is_zero(cf)) continue;
        int bad = -1;
        for (int i = (int)e.size() - 1; i >= 0; i--) {
            if (e[i] >= T.q) {
                bad = i;
                break;
            }
        }
        if (bad < 0) {
            add_into(k, out, e, cf);
            continue;
        }
        ExpVec e2 = e;
        e2[bad] -= (uint16_t)T.q;
        ExpVec ea = e2;
        ea[bad] += 1;
        work.emplace_back(std::move(ea), rf_neg(k, cf));
        for (const auto& [eu, cu] : T.u[bad].c) {
            ExpVec eb = e2;
            for (size_t t = 0; t < eu.size(); t++) eb[t] += eu[t];
            work.emplace_back(std::move(eb), rf_mul(k, cf, cu));
        }
    }
    return out;
}

void require_level(const Tf& a, const Tf& b) {
    if (a.level != b.level) throw std::invalid_argument("tower: level mismatch");
}

}  // namespace

Tf tf_zero(int level) { return {level, {}}; }

Tf tf_one(const TowerCtx& T, int level) { return tf_const(T, T.k().one(), level); }

Tf tf_const(const TowerCtx& T, uint16_t v, int level) {
    return tf_coeff(T, rf_const(T.k(), v), level);
}

Tf tf_coeff(const TowerCtx&, RatFun f, int level) {
    Tf r{level, {}};
    if (!rf_is_zero(f)) r.c.emplace(ExpVec((size_t)level, 0), std::move(f));
    return r;
}

Tf tf_x(const TowerCtx& T, int t, int level) {
    if (t < 0 || t > level) throw std::invalid_argument("tower: generator index out of range");
    if (t == 0) return tf_coeff(T, rf_poly(T.k(), poly_xn(1)), level);
    Tf r{level, {}};
    ExpVec e((size_t)level, 0);
    e[t - 1] = 1;
    r.c.emplace(std::move(e), rf_one(T.k()));
    return r;
}

Tf tf_embed(const TowerCtx&, const Tf& f, int level) {
    if (level < f.level) throw std::invalid_argument("tower: embed to lower level");
    Tf r{level, {}};
    for (const auto& [e, cf] : f.c) {
        ExpVec e2 = e;
        e2.resize((size_t)level, 0);
        r.c.emplace(std::move(e2), cf);
    }
    return r;
}

Tf tf_add(const TowerCtx& T, const Tf& a, const Tf& b) {
    require_level(a, b);
    Tf r = a;
    for (const auto& [e, cf] : b.c) add_into(T.k(), r.c, e, cf);
    return r;
}

Tf tf_sub(const TowerCtx& T, const Tf& a, const Tf& b) { return tf_add(T, a, tf_neg(T, b)); }

Tf tf_neg(const TowerCtx& T, const Tf& a) {
    Tf r = a;
    for (auto& [e, cf] : r.c) cf = rf_neg(T.k(), cf);
    return r;
}

Tf tf_mul(const TowerCtx& T, const Tf& a, const Tf& b) {
    require_level(a, b);
    const Gf& k = T.k();
    std::vector<std::pair<ExpVec, RatFun>> work;
    work.reserve(a.c.size() * b.c.size());
    for (const auto& [ea, ca] : a.c) {
        for (const auto& [eb, cb] : b.c) {
            ExpVec e = ea;
            for (size_t i = 0; i < e.size(); i++) e[i] += eb[i];
            work.emplace_back(std::move(e), rf_mul(k, ca, cb));
        }
    }
    return {a.level, reduce_terms(T, std::move(work))};
}

Tf tf_pow(const TowerCtx& T, const Tf& a, uint64_t e) {
    Tf r = tf_one(T, a.level);
    Tf base = a;
    while (e) {
        if (e & 1) r = tf_mul(T, r, base);
        e >>= 1;
        if (e) base = tf_mul(T, base, base);
    }
    return r;
}

bool tf_is_zero(const Tf& a) { return a.c.empty(); }

bool tf_eq(const Tf& a, const Tf& b) {
    if (a.level != b.level || a.c.size() != b.c.size()) return false;
    auto ia = a.c.begin();
    auto ib = b.c.begin();
    for (; ia != a.c.end(); ++ia, ++ib) {
        if (ia->first != ib->first || !rf_eq(ia->second, ib->second)) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// context

std::shared_ptr<const TowerCtx> make_tower(uint32_t q, int mmax) {
    if (mmax < 0) throw std::invalid_argument("tower: negative level");
    auto ctx = std::make_shared<TowerCtx>();
    ctx->q = q;
    ctx->mmax = mmax;
    ctx->kp = get_fq2(q);
    const Gf& k = *ctx->kp;
    TowerCtx& T = *ctx;

    Poly<Gf> t0 = poly_t(q);
    T.u.push_back(tf_coeff(T, rf_make(k, poly_xn(q), t0), 0));
    T.I.push_back(tf_coeff(T, rf_make(k, t0, poly_xn(q)), 0));
    T.X.push_back(tf_coeff(T, rf_make(k, poly_one_(), poly_xn(1)), 0));

    for (int j = 1; j <= mmax; j++) {
        // t(x_j) as a polynomial term
        Tf tj = tf_add(T, tf_pow(T, tf_x(T, j, j), q - 1), tf_one(T, j));
        Tf Xj = tf_mul(T, tj, tf_embed(T, T.I[j - 1], j));
        if (!tf_eq(tf_mul(T, Xj, tf_x(T, j, j)), tf_one(T, j)))
            throw std::logic_error("tower: 1/x_j closed form failed");
        T.X.push_back(std::move(Xj));
        if (j < mmax) {
            Tf xj = tf_x(T, j, j);
            Tf uj = tf_mul(T, tf_pow(T, xj, q + 1), tf_embed(T, T.I[j - 1], j));
            Tf Ij = tf_mul(T, tf_embed(T, T.u[j - 1], j), tf_pow(T, T.X[j], q + 1));
            if (!tf_eq(tf_mul(T, uj, Ij), tf_one(T, j)))
                throw std::logic_error("tower: 1/u_j closed form failed");
            // the defining relation itself: x_j^q + x_j = u_{j-1}
            if (!tf_eq(tf_add(T, tf_pow(T, xj, q), xj), tf_embed(T, T.u[j - 1], j)))
                throw std::logic_error("tower: defining relation failed");
            T.u.push_back(std::move(uj));
            T.I.push_back(std::move(Ij));
        }
    }
    return ctx;
}

// ---------------------------------------------------------------------------
// shift and phi

namespace {

// den must be c * x^A * (x^{q-1}+1)^B; returns false otherwise
bool special_den(const Gf& k, Poly<Gf> den, uint32_t q, uint32_t& A, uint32_t& B) {
    A = B = 0;
    if (den.is_zero()) return false;
    size_t low = 0;
    while (low < den.c.size() && k.is_zero(den.c[low])) low++;
    A = (uint32_t)low;
    den.c.erase(den.c.begin(), den.c.begin() + low);
    Poly<Gf> t = poly_t(q);
    while (den.deg() >= t.deg()) {
        auto [qq, rr] = poly_divmod(k, den, t);
        if (!rr.is_zero()) return false;
        den = std::move(qq);
        B++;
    }
    return den.deg() == 0;
}

}  // namespace

Tf tf_shift(const TowerCtx& T, const Tf& f, int i) {
    if (i < 0) throw std::invalid_argument("tower: negative shift");
    int target = f.level + i;
    if (target > T.mmax) throw std::invalid_argument("tower: shift exceeds context level");
    if (i == 0) return f;
    if (tf_is_zero(f)) return tf_zero(target);
    const Gf& k = T.k();

    // clear coefficient denominators to a single D(x_0) = x^Amax * t^Bmax
    uint32_t Amax = 0, Bmax = 0;
    for (const auto& [e, cf] : f.c) {
        uint32_t A, B;
        if (!special_den(k, cf.den, T.q, A, B))
            throw std::domain_error("tower: shift needs x_0^a (x_0^{q-1}+1)^b denominators");
        Amax = std::max(Amax, A);
        Bmax = std::max(Bmax, B);
    }
    Poly<Gf> t = poly_t(T.q);
    std::vector<std::pair<ExpVec, RatFun>> work;
    for (const auto& [e, cf] : f.c) {
        uint32_t A = 0, B = 0;
        special_den(k, cf.den, T.q, A, B);
        Poly<Gf> P = poly_mul(k, cf.num, poly_xn(Amax - A));
        // denominators are monic, so the cleared numerator needs no constant fix
        for (uint32_t b = B; b < Bmax; b++) P = poly_mul(k, P, t);
        for (size_t d = 0; d < P.c.size(); d++) {
            if (k.is_zero(P.c[d])) continue;
            ExpVec en((size_t)target, 0);
            en[i - 1] = (uint16_t)d;  // x_0^d -> x_i^d
            for (size_t s = 0; s < e.size(); s++) en[s + i] = e[s];
            work.emplace_back(std::move(en), rf_const(k, P.c[d]));
        }
    }
    Tf r{target, reduce_terms(T, std::move(work))};

    // divide by D(x_i): 1/x_i = X_i and 1/t(x_i) = x_i * I_{i-1}
    if (Amax) r = tf_mul(T, r, tf_pow(T, tf_embed(T, T.X[i], target), Amax));
    if (Bmax) {
        Tf tinv = tf_mul(T, tf_x(T, i, target), tf_embed(T, T.I[i - 1], target));
        r = tf_mul(T, r, tf_pow(T, tinv, Bmax));
    }
    return r;
}

Tf tf_phi(const TowerCtx& T, const Tf& f) {
    const Gf& k = T.k();
    int j = f.level;
    if (j > T.mmax) throw std::invalid_argument("tower: level exceeds context");

    auto rev = [&](const Poly<Gf>& p) {
        Poly<Gf> r;
        r.c.assign(p.c.rbegin(), p.c.rend());
        r.normalize(k);
        return r;
    };

    if (j == 0) {
        // pure substitution x_0 -> 1/x_0 on the coefficient
        Tf r = tf_zero(0);
        for (const auto& [e, cf] : f.c) {
            int delta = cf.den.deg() - cf.num.deg();
            Poly<Gf> num = rev(cf.num), den = rev(cf.den);
            if (delta >= 0)
                num = poly_mul(k, num, poly_xn((uint32_t)delta));
            else
                den = poly_mul(k, den, poly_xn((uint32_t)-delta));
            r = tf_add(T, r, tf_coeff(T, rf_make(k, num, den), 0));
        }
        return r;
    }

    Tf acc = tf_zero(j);
    for (const auto& [e, cf] : f.c) {
        uint32_t A, B;
        if (!special_den(k, cf.den, T.q, A, B))
            throw std::domain_error("tower: phi needs x_0^a (x_0^{q-1}+1)^b denominators");
        // g(1/x_j)/h(1/x_j) = rev(g)(x_j) * x_j^{deg h - deg g} * t(x_j)^{-B}
        // (rev of the special-form h is t^B, since x^A reverses to 1)
        Poly<Gf> rg = rev(cf.num);
        int delta = cf.den.deg() - cf.num.deg();
        std::vector<std::pair<ExpVec, RatFun>> work;
        for (size_t d = 0; d < rg.c.size(); d++) {
            if (k.is_zero(rg.c[d])) continue;
            ExpVec en((size_t)j, 0);
            en[j - 1] = (uint16_t)d;
            work.emplace_back(std::move(en), rf_const(k, rg.c[d]));
        }
        Tf term{j, reduce_terms(T, std::move(work))};
        if (delta > 0)
            term = tf_mul(T, term, tf_pow(T, tf_x(T, j, j), (uint64_t)delta));
        else if (delta < 0)
            term = tf_mul(T, term, tf_pow(T, tf_embed(T, T.X[j], j), (uint64_t)-delta));
        if (B) {
            Tf tinv = tf_mul(T, tf_x(T, j, j), tf_embed(T, T.I[j - 1], j));
            term = tf_mul(T, term, tf_pow(T, tinv, B));
        }
        // monomial part: x_t -> 1/x_{j-t}
        for (size_t s = 0; s < e.size(); s++) {
            if (!e[s]) continue;
            int src = (int)s + 1;  // exponent of x_src
            term = tf_mul(T, term, tf_pow(T, tf_embed(T, T.X[j - src], j), e[s]));
        }
        acc = tf_add(T, acc, term);
    }
    return acc;
}

// ---------------------------------------------------------------------------
// places and evaluation

PlaceList code_places(const TowerCtx& T, int m) {
    if (m < 0) throw std::invalid_argument("tower: negative level");
    const Gf& k = T.k();
    uint32_t q = T.q, Q = k.order();

    std::vector<char> in_omega(Q, 0);
    for (auto w : omega_set(k, q)) in_omega[w] = 1;

    // fibers of y -> y^q + y, each of size q; roots ascending
    std::vector<std::vector<uint16_t>> fiber(Q);
    for (uint32_t y = 0; y < Q; y++) fiber[k.add(k.pow((uint16_t)y, q), (uint16_t)y)].push_back((uint16_t)y);

    auto rhs = [&](uint16_t a) {
        // u(a) = a^q / (a^{q-1} + 1); a outside Omega keeps this finite
        return k.div(k.pow(a, q), k.add(k.pow(a, q - 1), k.one()));
    };

    PlaceList L;
    L.level = m;
    std::vector<uint16_t> cur((size_t)m + 1);
    auto emit = [&](auto&& self, int t) -> void {
        if (t == m + 1) {
            L.coords.insert(L.coords.end(), cur.begin(), cur.end());
            return;
        }
        const auto& fib = fiber[rhs(cur[t - 1])];
        if (fib.size() != q) throw std::logic_error("tower: place fiber not fully split");
        for (auto y : fib) {
            if (in_omega[y]) throw std::logic_error("tower: place fiber hits Omega");
            cur[t] = y;
            self(self, t + 1);
        }
    };
    for (uint32_t a = 0; a < Q; a++) {
        if (in_omega[a]) continue;
        cur[0] = (uint16_t)a;
        emit(emit, 1);
    }
    L.n = L.coords.size() / ((size_t)m + 1);

    size_t want = Q - q;
    for (int t = 0; t < m; t++) want *= q;
    if (L.n != want) throw std::logic_error("tower: place count mismatch");

    ByteWriter w;
    for (auto c : L.coords) w.u16(c);
    Sha256 h;
    h.update(w.data().data(), w.data().size());
    L.digest = h.finish();
    return L;
}

uint16_t tf_eval(const TowerCtx& T, const Tf& f, const uint16_t* coords) {
    std::vector<uint16_t> v(coords, coords + f.level + 1);
    return tf_eval_in(T, f, T.k(), v);
}

Tf product_expand(const TowerCtx& T, const Product& p) {
    Tf r = tf_one(T, p.level);
    for (const auto& fc : p.fs) {
        if (fc.off + fc.base.level > p.level)
            throw std::invalid_argument("tower: factor exceeds product level");
        Tf s = tf_embed(T, tf_shift(T, fc.base, fc.off), p.level);
        r = tf_mul(T, r, tf_pow(T, s, fc.exp));
    }
    return r;
}

uint16_t product_eval(const TowerCtx& T, const Product& p, const uint16_t* coords) {
    const Gf& k = T.k();
    uint16_t acc = k.one();
    for (const auto& fc : p.fs) {
        if (fc.off + fc.base.level > p.level)
            throw std::invalid_argument("tower: factor exceeds product level");
        acc = k.mul(acc, k.pow(tf_eval(T, fc.base, coords + fc.off), fc.exp));
    }
    return acc;
}

void tf_serialize(ByteWriter& w, const Tf& f) {
    w.u32((uint32_t)f.level);
    w.u32((uint32_t)f.c.size());
    for (const auto& [e, rf] : f.c) {
        w.u16_vec(e);
        w.u16_vec(rf.num.c);
        w.u16_vec(rf.den.c);
    }
}

Tf tf_deserialize(const Gf& k, ByteReader& r) {
    Tf f;
    f.level = (int)r.u32();
    if (f.level < 0 || f.level > 64) throw std::runtime_error("tower function: bad level");
    uint32_t nterms = r.u32();
    for (uint32_t t = 0; t < nterms; t++) {
        ExpVec e = r.u16_vec();
        if ((int)e.size() != f.level) throw std::runtime_error("tower function: bad exponent vector");
        for (uint16_t x : e)
            if (x >= k.spec().order()) throw std::runtime_error("tower function: exponent out of range");
        Poly<Gf> num = Poly<Gf>::from(r.u16_vec(), k);
        Poly<Gf> den = Poly<Gf>::from(r.u16_vec(), k);
        RatFun rf = rf_make(k, std::move(num), std::move(den));
        if (!rf_is_zero(rf)) f.c.emplace(std::move(e), std::move(rf));
    }
    return f;
}

}  // namespace gsc
