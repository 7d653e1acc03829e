#include "gsc/ffield.hpp"

#include <map>
#include <mutex>

namespace gsc {

bool is_prime_u64(uint64_t n) {
    if (n < 2) return false;
    if (n % 2 == 0) return n == 2;
    if (n % 3 == 0) return n == 3;
    for (uint64_t d = 5; d * d <= n; d += 6) {
        if (n % d == 0 || n % (d + 2) == 0) return false;
    }
    return true;
}

std::vector<uint64_t> prime_factors_u64(uint64_t n) {
    std::vector<uint64_t> out;
    for (uint64_t d = 2; d * d <= n; d += (d == 2 ? 1 : 2)) {
        if (n % d == 0) {
            out.push_back(d);
            while (n % d == 0) n /= d;
        }
    }
    if (n > 1) out.push_back(n);
    return out;
}

// ---------------------------------------------------------------------------
// Slow index arithmetic over a FieldSpec chain.  Used only while building
// tables and searching for chain moduli; everything hot goes through Gf.

namespace {

struct SlowCtx {
    uint32_t p = 2;
    struct Lv {
        uint32_t d;
        std::vector<uint16_t> mod;  // monic, indices one level down
        uint64_t sub;               // order one level down
        uint64_t order;
    };
    std::vector<Lv> lv;

    static SlowCtx from(uint32_t p, const std::vector<FieldLevel>& levels) {
        SlowCtx c;
        c.p = p;
        uint64_t cur = p;
        for (const auto& l : levels) {
            Lv v;
            v.d = l.degree;
            v.mod = l.modulus;
            v.sub = cur;
            uint64_t o = 1;
            for (uint32_t i = 0; i < l.degree; i++) o *= cur;
            v.order = o;
            cur = o;
            c.lv.push_back(std::move(v));
        }
        return c;
    }

    int top() const { return (int)lv.size() - 1; }
    uint64_t order(int L) const { return L < 0 ? p : lv[(size_t)L].order; }

    uint64_t add(int L, uint64_t a, uint64_t b) const {
        if (L < 0) return (a + b) % p;
        const auto& l = lv[(size_t)L];
        uint64_t out = 0, m = 1;
        for (uint32_t i = 0; i < l.d; i++) {
            out += add(L - 1, a % l.sub, b % l.sub) * m;
            a /= l.sub;
            b /= l.sub;
            m *= l.sub;
        }
        return out;
    }
    uint64_t neg(int L, uint64_t a) const {
        if (L < 0) return (p - a) % p;
        const auto& l = lv[(size_t)L];
        uint64_t out = 0, m = 1;
        for (uint32_t i = 0; i < l.d; i++) {
            out += neg(L - 1, a % l.sub) * m;
            a /= l.sub;
            m *= l.sub;
        }
        return out;
    }
    uint64_t sub_(int L, uint64_t a, uint64_t b) const { return add(L, a, neg(L, b)); }

    uint64_t mul(int L, uint64_t a, uint64_t b) const {
        if (L < 0) return a * b % p;
        const auto& l = lv[(size_t)L];
        if (a == 0 || b == 0) return 0;
        std::vector<uint64_t> da(l.d), db(l.d), prod(2 * l.d - 1, 0);
        for (uint32_t i = 0; i < l.d; i++) {
            da[i] = a % l.sub;
            a /= l.sub;
            db[i] = b % l.sub;
            b /= l.sub;
        }
        for (uint32_t i = 0; i < l.d; i++) {
            if (da[i] == 0) continue;
            for (uint32_t j = 0; j < l.d; j++)
                prod[i + j] = add(L - 1, prod[i + j], mul(L - 1, da[i], db[j]));
        }
        // reduce by the monic modulus
        for (size_t i = prod.size(); i-- > l.d;) {
            uint64_t c = prod[i];
            if (c == 0) continue;
            prod[i] = 0;
            for (uint32_t j = 0; j < l.d; j++)
                prod[i - l.d + j] = sub_(L - 1, prod[i - l.d + j], mul(L - 1, c, l.mod[j]));
        }
        uint64_t out = 0, m = 1;
        for (uint32_t i = 0; i < l.d; i++) {
            out += prod[i] * m;
            m *= l.sub;
        }
        return out;
    }

    uint64_t pow(int L, uint64_t a, uint64_t e) const {
        uint64_t r = 1;
        while (e) {
            if (e & 1) r = mul(L, r, a);
            a = mul(L, a, a);
            e >>= 1;
        }
        return r;
    }
};

// polynomial remainder over SlowCtx level L (coefficients are indices)
std::vector<uint64_t> slow_poly_rem(const SlowCtx& c, int L, std::vector<uint64_t> a,
                                    const std::vector<uint64_t>& b) {
    // b monic
    size_t db = b.size() - 1;
    while (a.size() > db) {
        uint64_t lead = a.back();
        size_t sh = a.size() - 1 - db;
        if (lead != 0) {
            for (size_t j = 0; j <= db; j++)
                a[sh + j] = c.sub_(L, a[sh + j], c.mul(L, lead, b[j]));
        }
        a.pop_back();
    }
    while (!a.empty() && a.back() == 0) a.pop_back();
    return a;
}

bool slow_is_irreducible(const SlowCtx& c, int L, const std::vector<uint64_t>& f) {
    // brute force: no monic divisor of degree <= deg(f)/2
    size_t d = f.size() - 1;
    if (d == 1) return true;
    uint64_t s = c.order(L);
    for (size_t e = 1; e <= d / 2; e++) {
        uint64_t count = 1;
        for (size_t i = 0; i < e; i++) count *= s;
        for (uint64_t v = 0; v < count; v++) {
            std::vector<uint64_t> g(e + 1);
            uint64_t t = v;
            for (size_t i = 0; i < e; i++) {
                g[i] = t % s;
                t /= s;
            }
            g[e] = 1;
            if (slow_poly_rem(c, L, f, g).empty()) return false;
        }
    }
    return true;
}

}  // namespace

// ---------------------------------------------------------------------------
// FieldSpec

uint64_t FieldSpec::order() const {
    uint64_t o = p;
    for (const auto& l : levels) {
        uint64_t v = 1;
        for (uint32_t i = 0; i < l.degree; i++) {
            v *= o;
            if (v > (1ULL << 48)) throw std::overflow_error("field order too large");
        }
        o = v;
    }
    return o;
}

FieldSpec FieldSpec::make(uint32_t p, const std::vector<uint32_t>& degrees) {
    if (!is_prime_u64(p)) throw std::invalid_argument("field_make: p must be prime");
    FieldSpec spec;
    spec.p = p;
    uint64_t order = p;
    for (uint32_t d : degrees) {
        if (d == 0) throw std::invalid_argument("field_make: degree must be positive");
        uint64_t next = 1;
        for (uint32_t i = 0; i < d; i++) {
            next *= order;
            if (next > 65536) throw std::invalid_argument("field_make: order exceeds table budget (65536)");
        }
        SlowCtx ctx = SlowCtx::from(p, spec.levels);
        int L = ctx.top();
        // first monic irreducible of degree d in index order
        uint64_t count = 1;
        for (uint32_t i = 0; i < d; i++) count *= order;
        bool found = false;
        for (uint64_t v = 0; v < count && !found; v++) {
            std::vector<uint64_t> f(d + 1);
            uint64_t t = v;
            for (uint32_t i = 0; i < d; i++) {
                f[i] = t % order;
                t /= order;
            }
            f[d] = 1;
            if (slow_is_irreducible(ctx, L, f)) {
                FieldLevel lvl;
                lvl.degree = d;
                lvl.modulus.assign(f.begin(), f.end());
                spec.levels.push_back(std::move(lvl));
                found = true;
            }
        }
        if (!found) throw std::logic_error("field_make: no irreducible found (impossible)");
        order = next;
    }
    return spec;
}

void FieldSpec::serialize(ByteWriter& w) const {
    w.u32(p);
    w.u32((uint32_t)levels.size());
    for (const auto& l : levels) {
        w.u32(l.degree);
        w.u16_vec(l.modulus);
    }
}

FieldSpec FieldSpec::deserialize(ByteReader& r) {
    FieldSpec s;
    s.p = r.u32();
    uint32_t n = r.u32();
    for (uint32_t i = 0; i < n; i++) {
        FieldLevel l;
        l.degree = r.u32();
        l.modulus = r.u16_vec();
        if (l.modulus.size() != l.degree + 1) throw std::runtime_error("bad field level encoding");
        s.levels.push_back(std::move(l));
    }
    return s;
}

FieldSpec fq2_spec(uint32_t q) {
    if (q < 2) throw std::invalid_argument("q must be at least 2");
    uint32_t p = 0;
    for (uint32_t d = 2; d <= q; d++) {
        if (q % d == 0) {
            p = d;
            break;
        }
    }
    uint32_t a = 0;
    uint32_t t = q;
    while (t % p == 0) {
        t /= p;
        a++;
    }
    if (t != 1 || !is_prime_u64(p)) throw std::invalid_argument("q must be a prime power");
    std::vector<uint32_t> degrees;
    if (a > 1) degrees.push_back(a);
    degrees.push_back(2);
    return FieldSpec::make(p, degrees);
}

// ---------------------------------------------------------------------------
// Gf

Gf::Gf(const FieldSpec& spec) : spec_(spec) {
    p_ = spec.p;
    uint64_t order = spec.order();
    if (order > 65536) throw std::invalid_argument("Gf: order exceeds 65536");
    order_ = (uint32_t)order;
    pdeg_ = 1;
    for (const auto& l : spec.levels) pdeg_ *= l.degree;
    char2_ = (p_ == 2);

    SlowCtx ctx = SlowCtx::from(spec.p, spec.levels);
    int L = ctx.top();

    neg_tab_.resize(order_);
    for (uint32_t a = 0; a < order_; a++) {
        // negation is coefficientwise over F_p regardless of the chain
        uint64_t x = a, out = 0, m = 1;
        while (x) {
            out += ((p_ - x % p_) % p_) * m;
            x /= p_;
            m *= p_;
        }
        neg_tab_[a] = (uint16_t)out;
    }

    if (!char2_ && order_ <= 2048) {
        add_tab_.resize((size_t)order_ * order_);
        for (uint32_t a = 0; a < order_; a++)
            for (uint32_t b = 0; b < order_; b++) add_tab_[(size_t)a * order_ + b] = add_slow((uint16_t)a, (uint16_t)b);
    }

    // exp/log via the smallest generator
    exp_.assign(2 * (size_t)(order_ - 1), 0);
    log_.assign(order_, 0);
    if (order_ == 2) {
        exp_[0] = 1;
        exp_[1] = 1;
        log_[1] = 0;
        return;
    }
    auto primes = prime_factors_u64(order_ - 1);
    uint32_t g = 0;
    for (uint32_t cand = 2; cand < order_; cand++) {
        bool ok = true;
        for (uint64_t ell : primes) {
            if (ctx.pow(L, cand, (order_ - 1) / ell) == 1) {
                ok = false;
                break;
            }
        }
        if (ok) {
            g = cand;
            break;
        }
    }
    if (g == 0) throw std::logic_error("Gf: no generator found (impossible)");
    uint64_t cur = 1;
    for (uint32_t i = 0; i < order_ - 1; i++) {
        exp_[i] = (uint16_t)cur;
        exp_[i + order_ - 1] = (uint16_t)cur;
        log_[cur] = (uint16_t)i;
        cur = ctx.mul(L, cur, g);
    }
    if (cur != 1) throw std::logic_error("Gf: generator order mismatch");
}

Gf::Elem Gf::add_slow(Elem a, Elem b) const {
    uint64_t x = a, y = b, out = 0, m = 1;
    while (x || y) {
        out += ((x % p_) + (y % p_)) % p_ * m;
        x /= p_;
        y /= p_;
        m *= p_;
    }
    return (Elem)out;
}

namespace {
std::mutex g_field_mutex;
std::map<std::vector<uint8_t>, std::shared_ptr<const Gf>>& field_cache() {
    static std::map<std::vector<uint8_t>, std::shared_ptr<const Gf>> cache;
    return cache;
}
}  // namespace

std::shared_ptr<const Gf> get_field(const FieldSpec& spec) {
    ByteWriter w;
    spec.serialize(w);
    std::lock_guard<std::mutex> lock(g_field_mutex);
    auto& cache = field_cache();
    auto it = cache.find(w.data());
    if (it != cache.end()) return it->second;
    auto f = std::make_shared<const Gf>(spec);
    cache[w.data()] = f;
    return f;
}

std::shared_ptr<const Gf> get_fq2(uint32_t q) { return get_field(fq2_spec(q)); }

std::vector<uint16_t> omega_set(const Gf& f, uint32_t q) {
    if ((uint64_t)q * q != f.order()) throw std::invalid_argument("omega_set: field order is not q^2");
    std::vector<uint16_t> out;
    for (uint32_t a = 0; a < f.order(); a++) {
        uint16_t x = (uint16_t)a;
        if (f.add(f.pow(x, q), x) == 0) out.push_back(x);
    }
    if (out.size() != q) throw std::logic_error("omega_set: expected exactly q elements");
    return out;
}

// ---------------------------------------------------------------------------
// Karatsuba over Gf coefficient arrays

namespace {
constexpr size_t KARAT_MIN = 24;

// out (len 2n-1, pre-zeroed) += a*b, both length n
void kmul(const Gf& k, const uint16_t* a, const uint16_t* b, size_t n, uint16_t* out) {
    if (n <= KARAT_MIN) {
        for (size_t i = 0; i < n; i++) {
            if (a[i] == 0) continue;
            for (size_t j = 0; j < n; j++) {
                if (b[j]) out[i + j] = k.add(out[i + j], k.mul(a[i], b[j]));
            }
        }
        return;
    }
    size_t n0 = n / 2, n1 = n - n0;
    // a = a0 + T^n0 a1 with |a0|=n0, |a1|=n1
    std::vector<uint16_t> as(n1, 0), bs(n1, 0), z0(2 * n0 - 1, 0), z2(2 * n1 - 1, 0), z1(2 * n1 - 1, 0);
    for (size_t i = 0; i < n0; i++) {
        as[i] = k.add(a[i], a[n0 + i]);
        bs[i] = k.add(b[i], b[n0 + i]);
    }
    for (size_t i = n0; i < n1; i++) {
        as[i] = a[n0 + i];
        bs[i] = b[n0 + i];
    }
    kmul(k, a, b, n0, z0.data());
    kmul(k, a + n0, b + n0, n1, z2.data());
    kmul(k, as.data(), bs.data(), n1, z1.data());
    // z1 -= z0 + z2
    for (size_t i = 0; i < z0.size(); i++) z1[i] = k.sub(z1[i], z0[i]);
    for (size_t i = 0; i < z2.size(); i++) z1[i] = k.sub(z1[i], z2[i]);
    for (size_t i = 0; i < z0.size(); i++) out[i] = k.add(out[i], z0[i]);
    for (size_t i = 0; i < z1.size(); i++) out[n0 + i] = k.add(out[n0 + i], z1[i]);
    for (size_t i = 0; i < z2.size(); i++) out[2 * n0 + i] = k.add(out[2 * n0 + i], z2[i]);
}
}  // namespace

// ---------------------------------------------------------------------------
// ExtField

ExtField::ExtField(std::shared_ptr<const Gf> base, std::vector<uint16_t> modulus)
    : base_(std::move(base)), mod_(std::move(modulus)) {
    if (mod_.size() < 2) throw std::invalid_argument("ExtField: modulus must have degree >= 1");
    if (mod_.back() != base_->one()) throw std::invalid_argument("ExtField: modulus must be monic");
    d_ = (uint32_t)mod_.size() - 1;
    pdeg_ = base_->pdeg() * d_;
    if (d_ > 1 && d_ <= 48) {
        // T^(d+i) mod m for i in [0, d-2]
        red_rows_.assign((size_t)(d_ - 1) * d_, 0);
        std::vector<uint16_t> cur(mod_.begin(), mod_.end() - 1);  // T^d mod m = -low part
        for (auto& x : cur) x = base_->neg(x);
        for (uint32_t i = 0; i + 1 < d_; i++) {
            std::copy(cur.begin(), cur.end(), red_rows_.begin() + (size_t)i * d_);
            // multiply cur by T mod m
            uint16_t top = cur[d_ - 1];
            for (uint32_t j = d_ - 1; j > 0; j--) cur[j] = cur[j - 1];
            cur[0] = 0;
            if (top) {
                for (uint32_t j = 0; j < d_; j++)
                    cur[j] = base_->sub(cur[j], base_->mul(top, mod_[j]));
            }
        }
    }
}

ExtField::Elem ExtField::add(const Elem& a, const Elem& b) const {
    Elem r(d_);
    for (uint32_t i = 0; i < d_; i++) r[i] = base_->add(a[i], b[i]);
    return r;
}
ExtField::Elem ExtField::sub(const Elem& a, const Elem& b) const {
    Elem r(d_);
    for (uint32_t i = 0; i < d_; i++) r[i] = base_->sub(a[i], b[i]);
    return r;
}
ExtField::Elem ExtField::neg(const Elem& a) const {
    Elem r(d_);
    for (uint32_t i = 0; i < d_; i++) r[i] = base_->neg(a[i]);
    return r;
}

void ExtField::reduce_full(std::vector<uint16_t>& prod) const {
    const Gf& k = *base_;
    prod.resize(2 * (size_t)d_ - 1, 0);
    if (d_ == 1) {
        prod.resize(1);
        return;
    }
    if (!red_rows_.empty()) {
        for (uint32_t i = 0; i + 1 < d_; i++) {
            uint16_t c = prod[d_ + i];
            if (!c) continue;
            const uint16_t* row = red_rows_.data() + (size_t)i * d_;
            for (uint32_t j = 0; j < d_; j++) prod[j] = k.add(prod[j], k.mul(c, row[j]));
        }
        prod.resize(d_);
        return;
    }
    // Barrett-style: Q = P div m via reversed-series inverse, R = P - Q*m.
    // minv = rev(m)^(-1) mod T^(d-1), computed lazily below.
    auto& minv = barrett_minv_;
    if (minv.empty()) {
        // Newton iteration for the inverse of rev(m) (unit constant term)
        std::vector<uint16_t> rm(mod_.rbegin(), mod_.rend());
        size_t want = d_ - 1;
        std::vector<uint16_t> v{base_->inv(rm[0])};
        while (v.size() < want) {
            size_t nl = std::min(want, v.size() * 2);
            // w = rm*v mod T^nl
            size_t n = nl;
            std::vector<uint16_t> av(n, 0), bv(n, 0), w(2 * n - 1, 0);
            for (size_t i = 0; i < n && i < rm.size(); i++) av[i] = rm[i];
            for (size_t i = 0; i < n && i < v.size(); i++) bv[i] = v[i];
            kmul(k, av.data(), bv.data(), n, w.data());
            w.resize(nl);
            // v' = v*(2 - w) mod T^nl
            std::vector<uint16_t> two_minus(nl, 0);
            for (size_t i = 0; i < nl; i++) two_minus[i] = k.neg(w[i]);
            two_minus[0] = k.add(two_minus[0], k.add(k.one(), k.one()));
            std::vector<uint16_t> av2(nl, 0), res(2 * nl - 1, 0);
            for (size_t i = 0; i < v.size(); i++) av2[i] = v[i];
            kmul(k, av2.data(), two_minus.data(), nl, res.data());
            res.resize(nl);
            v = std::move(res);
        }
        v.resize(want);
        minv = std::move(v);
    }
    // rev(P) has length 2d-1
    std::vector<uint16_t> rp(prod.rbegin(), prod.rend());
    size_t n = d_ - 1;  // quotient has <= d-1 coefficients
    std::vector<uint16_t> rq(2 * n - 1 > 0 ? 2 * n - 1 : 1, 0);
    {
        std::vector<uint16_t> av(n, 0), bv(n, 0);
        for (size_t i = 0; i < n && i < rp.size(); i++) av[i] = rp[i];
        for (size_t i = 0; i < n && i < minv.size(); i++) bv[i] = minv[i];
        if (n > 0) kmul(k, av.data(), bv.data(), n, rq.data());
    }
    rq.resize(n);
    std::vector<uint16_t> q(rq.rbegin(), rq.rend());  // quotient, low-to-high
    // R = P - q*m, low d coefficients
    size_t qm_n = std::max(q.size(), mod_.size());
    std::vector<uint16_t> qa(qm_n, 0), ma(qm_n, 0), qm(2 * qm_n - 1, 0);
    for (size_t i = 0; i < q.size(); i++) qa[i] = q[i];
    for (size_t i = 0; i < mod_.size(); i++) ma[i] = mod_[i];
    kmul(k, qa.data(), ma.data(), qm_n, qm.data());
    std::vector<uint16_t> r(d_, 0);
    for (uint32_t i = 0; i < d_; i++) r[i] = k.sub(prod[i], i < qm.size() ? qm[i] : 0);
    prod = std::move(r);
}

ExtField::Elem ExtField::mul(const Elem& a, const Elem& b) const {
    if (d_ == 1) return Elem{base_->mul(a[0], b[0])};
    std::vector<uint16_t> prod(2 * (size_t)d_ - 1, 0);
    kmul(*base_, a.data(), b.data(), d_, prod.data());
    reduce_full(prod);
    return prod;
}

ExtField::Elem ExtField::inv(const Elem& a) const {
    if (is_zero(a)) throw std::domain_error("ExtField::inv of zero");
    if (d_ == 1) return Elem{base_->inv(a[0])};
    const Gf& k = *base_;
    // extended Euclid: r0 = modulus, r1 = a
    Poly<Gf> r0 = Poly<Gf>::from(std::vector<uint16_t>(mod_.begin(), mod_.end()), k);
    Poly<Gf> r1 = Poly<Gf>::from(std::vector<uint16_t>(a.begin(), a.end()), k);
    Poly<Gf> s0, s1;
    s1.c = {k.one()};
    while (r1.deg() > 0) {
        auto [q, r2] = poly_divmod(k, r0, r1);
        auto s2 = poly_sub(k, s0, poly_mul(k, q, s1));
        r0 = std::move(r1);
        r1 = std::move(r2);
        s0 = std::move(s1);
        s1 = std::move(s2);
    }
    if (r1.is_zero())
        throw ZeroDivisorError("ExtField::inv: zero divisor (modulus not irreducible)");
    auto c = k.inv(r1.c[0]);
    Elem out(d_, 0);
    for (size_t i = 0; i < s1.c.size(); i++) out[i] = k.mul(s1.c[i], c);
    return out;
}

ExtField::Elem ExtField::pow(const Elem& a, uint64_t e) const {
    Elem r = one(), b = a;
    while (e) {
        if (e & 1) r = mul(r, b);
        b = mul(b, b);
        e >>= 1;
    }
    return r;
}

ExtField::Elem ExtField::frobp_inv(const Elem& a) const {
    // x -> x^p is a bijection with x^(p^pdeg) = x, so the inverse is the
    // Frobenius iterated pdeg-1 more times.  (It is only F_p-linear, so a
    // matrix over the base field would be wrong.)
    Elem r = a;
    for (uint32_t i = 0; i + 1 < pdeg_; i++) r = frobp(r);
    return r;
}

void ExtField::sp_add(uint16_t* dst, const uint16_t* a, const uint16_t* b) const {
    for (uint32_t i = 0; i < d_; i++) dst[i] = base_->add(a[i], b[i]);
}
void ExtField::sp_sub(uint16_t* dst, const uint16_t* a, const uint16_t* b) const {
    for (uint32_t i = 0; i < d_; i++) dst[i] = base_->sub(a[i], b[i]);
}
bool ExtField::sp_is_zero(const uint16_t* a) const {
    for (uint32_t i = 0; i < d_; i++)
        if (a[i]) return false;
    return true;
}
void ExtField::sp_mul(uint16_t* dst, const uint16_t* a, const uint16_t* b) const {
    const Gf& k = *base_;
    if (d_ == 1) {
        dst[0] = k.mul(a[0], b[0]);
        return;
    }
    if (d_ > 32) throw std::logic_error("sp_mul: span kernels support degree <= 32 only");
    uint16_t prod[63] = {0};
    for (uint32_t i = 0; i < d_; i++) {
        if (!a[i]) continue;
        for (uint32_t j = 0; j < d_; j++)
            if (b[j]) prod[i + j] = k.add(prod[i + j], k.mul(a[i], b[j]));
    }
    for (uint32_t i = d_ - 1; i-- > 0;) {
        uint16_t c = prod[d_ + i];
        if (!c) continue;
        const uint16_t* row = red_rows_.data() + (size_t)i * d_;
        for (uint32_t j = 0; j < d_; j++) prod[j] = k.add(prod[j], k.mul(c, row[j]));
    }
    for (uint32_t i = 0; i < d_; i++) dst[i] = prod[i];
}
void ExtField::sp_madd(uint16_t* dst, const uint16_t* a, const uint16_t* b) const {
    if (d_ == 1) {
        dst[0] = base_->add(dst[0], base_->mul(a[0], b[0]));
        return;
    }
    uint16_t tmp[32];
    sp_mul(tmp, a, b);
    for (uint32_t i = 0; i < d_; i++) dst[i] = base_->add(dst[i], tmp[i]);
}

void ExtField::serialize(ByteWriter& w) const {
    base_->spec().serialize(w);
    w.u16_vec(mod_);
}

// ---------------------------------------------------------------------------
// Irreducibility over Gf

namespace {
// x -> x^(|F|) in base[T]/f using ExtField arithmetic (f need not be irreducible)
ExtField::Elem ext_frob_once(const ExtField& E, const ExtField::Elem& x) {
    return E.pow(x, E.base().order());
}

Poly<Gf> elem_to_poly(const Gf& k, const ExtField::Elem& e) {
    return Poly<Gf>::from(std::vector<uint16_t>(e.begin(), e.end()), k);
}
}  // namespace

bool poly_is_irreducible(const Gf& k, const Poly<Gf>& f) {
    int n = f.deg();
    if (n <= 0) return false;
    if (n == 1) return true;
    if (k.is_zero(f.c[0])) return false;  // divisible by T
    auto fm = poly_monic(k, f);
    auto base = get_field(k.spec());
    ExtField E(base, fm.c);
    ExtField::Elem tee = E.zero();
    tee[1] = k.one();
    // gcd(T^(|F|^(n/r)) - T, f) must be 1 for every prime r | n, and
    // T^(|F|^n) == T.  One shared Frobenius chain with checkpoints at the
    // ascending n/r instead of a fresh chain per prime.
    std::vector<uint32_t> stops;
    for (uint64_t r : prime_factors_u64((uint64_t)n)) stops.push_back((uint32_t)(n / (int)r));
    std::sort(stops.begin(), stops.end());
    ExtField::Elem h = tee;
    uint32_t at = 0;
    for (uint32_t s : stops) {
        for (; at < s; at++) h = ext_frob_once(E, h);
        auto diff = h;
        diff[1] = k.sub(diff[1], k.one());
        auto g = poly_gcd(k, elem_to_poly(k, diff), fm);
        if (g.deg() != 0) return false;
    }
    for (; at < (uint32_t)n; at++) h = ext_frob_once(E, h);
    return h == tee;
}

Poly<Gf> first_irreducible(const Gf& k, uint32_t d) {
    if (d == 0) throw std::invalid_argument("first_irreducible: degree must be positive");
    uint64_t count = 1;
    for (uint32_t i = 0; i < d; i++) {
        count *= k.order();
        if (count > (1ULL << 40)) throw std::invalid_argument("first_irreducible: search space too large");
    }
    for (uint64_t v = 0; v < count; v++) {
        Poly<Gf> f;
        f.c.assign(d + 1, 0);
        uint64_t t = v;
        for (uint32_t i = 0; i < d; i++) {
            f.c[i] = (uint16_t)(t % k.order());
            t /= k.order();
        }
        f.c[d] = k.one();
        if (poly_is_irreducible(k, f)) return f;
    }
    throw std::logic_error("first_irreducible: none found (impossible)");
}

Poly<Gf> irreducible_random(const Gf& k, uint32_t d, Rng& rng) {
    if (d == 0) throw std::invalid_argument("irreducible_random: degree must be positive");
    if (d == 1) {
        Poly<Gf> f;
        f.c = {k.rand_elem(rng), k.one()};
        return f;
    }
    auto base = get_field(k.spec());
    uint64_t cap = 64ULL * d + 256;
    for (uint64_t attempt = 0; attempt < cap; attempt++) {
        Poly<Gf> f;
        f.c.assign(d + 1, 0);
        for (uint32_t i = 0; i < d; i++) f.c[i] = k.rand_elem(rng);
        f.c[d] = k.one();
        if (k.is_zero(f.c[0])) continue;
        // screen out small factors with a gcd ladder before the full test;
        // deeper ladders pay off at large d where a full test costs ~d
        // Frobenius steps
        ExtField E(base, f.c);
        ExtField::Elem tee = E.zero();
        tee[1] = k.one();
        ExtField::Elem h = tee;
        bool rejected = false;
        uint32_t ladder = std::min<uint32_t>(std::max<uint32_t>(8, d / 4), d - 1);
        for (uint32_t j = 1; j <= ladder; j++) {
            h = ext_frob_once(E, h);
            auto diff = h;
            diff[1] = k.sub(diff[1], k.one());
            auto g = poly_gcd(k, elem_to_poly(k, diff), f);
            if (g.deg() != 0) {
                rejected = true;
                break;
            }
        }
        if (rejected) continue;
        if (poly_is_irreducible(k, f)) return f;
    }
    throw std::runtime_error("irreducible_random: attempt cap exceeded");
}

}  // namespace gsc
