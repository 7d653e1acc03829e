#pragma once
// Template bodies for the polynomial utilities declared in ffield.hpp.
// Not meant to be included directly.

#include <algorithm>
#include <type_traits>

namespace gsc {

// Canonical element order: Gf indices compare numerically; extension elements
// compare as base-order integers (top coefficient is the most significant).
template <class F>
bool elem_less(const F&, const typename F::Elem& a, const typename F::Elem& b) {
    if constexpr (std::is_integral_v<typename F::Elem>) {
        return a < b;
    } else {
        if (a.size() != b.size()) return a.size() < b.size();
        for (size_t i = a.size(); i-- > 0;) {
            if (a[i] != b[i]) return a[i] < b[i];
        }
        return false;
    }
}

template <class F>
Poly<F> poly_add(const F& k, const Poly<F>& a, const Poly<F>& b) {
    Poly<F> r;
    r.c.resize(std::max(a.c.size(), b.c.size()), k.zero());
    for (size_t i = 0; i < a.c.size(); i++) r.c[i] = a.c[i];
    for (size_t i = 0; i < b.c.size(); i++) r.c[i] = k.add(r.c[i], b.c[i]);
    r.normalize(k);
    return r;
}

template <class F>
Poly<F> poly_sub(const F& k, const Poly<F>& a, const Poly<F>& b) {
    Poly<F> r;
    r.c.resize(std::max(a.c.size(), b.c.size()), k.zero());
    for (size_t i = 0; i < a.c.size(); i++) r.c[i] = a.c[i];
    for (size_t i = 0; i < b.c.size(); i++) r.c[i] = k.sub(r.c[i], b.c[i]);
    r.normalize(k);
    return r;
}

template <class F>
Poly<F> poly_scale(const F& k, const typename F::Elem& s, const Poly<F>& a) {
    if (k.is_zero(s)) return {};
    Poly<F> r = a;
    for (auto& x : r.c) x = k.mul(x, s);
    r.normalize(k);
    return r;
}

template <class F>
Poly<F> poly_mul(const F& k, const Poly<F>& a, const Poly<F>& b) {
    if (a.is_zero() || b.is_zero()) return {};
    Poly<F> r;
    r.c.assign(a.c.size() + b.c.size() - 1, k.zero());
    for (size_t i = 0; i < a.c.size(); i++) {
        if (k.is_zero(a.c[i])) continue;
        for (size_t j = 0; j < b.c.size(); j++)
            r.c[i + j] = k.add(r.c[i + j], k.mul(a.c[i], b.c[j]));
    }
    r.normalize(k);
    return r;
}

template <class F>
std::pair<Poly<F>, Poly<F>> poly_divmod(const F& k, const Poly<F>& a, const Poly<F>& b) {
    if (b.is_zero()) throw std::domain_error("polynomial division by zero");
    if (a.deg() < b.deg()) return {{}, a};
    Poly<F> rem = a;
    Poly<F> quot;
    quot.c.assign((size_t)(a.deg() - b.deg() + 1), k.zero());
    auto lead_inv = k.inv(b.c.back());
    for (int i = a.deg(); i >= b.deg(); i--) {
        if (k.is_zero(rem.c[(size_t)i])) continue;
        auto q = k.mul(rem.c[(size_t)i], lead_inv);
        quot.c[(size_t)(i - b.deg())] = q;
        for (int j = 0; j <= b.deg(); j++) {
            size_t idx = (size_t)(i - b.deg() + j);
            rem.c[idx] = k.sub(rem.c[idx], k.mul(q, b.c[(size_t)j]));
        }
    }
    rem.normalize(k);
    quot.normalize(k);
    return {quot, rem};
}

template <class F>
Poly<F> poly_mod(const F& k, const Poly<F>& a, const Poly<F>& b) {
    return poly_divmod(k, a, b).second;
}

template <class F>
Poly<F> poly_monic(const F& k, const Poly<F>& a) {
    if (a.is_zero()) return a;
    return poly_scale(k, k.inv(a.c.back()), a);
}

template <class F>
Poly<F> poly_gcd(const F& k, Poly<F> a, Poly<F> b) {
    while (!b.is_zero()) {
        auto r = poly_mod(k, a, b);
        a = std::move(b);
        b = std::move(r);
    }
    return poly_monic(k, a);
}

template <class F>
typename F::Elem poly_eval(const F& k, const Poly<F>& a, const typename F::Elem& x) {
    auto acc = k.zero();
    for (size_t i = a.c.size(); i-- > 0;) acc = k.add(k.mul(acc, x), a.c[i]);
    return acc;
}

template <class F>
Poly<F> poly_mulmod(const F& k, const Poly<F>& a, const Poly<F>& b, const Poly<F>& m) {
    return poly_mod(k, poly_mul(k, a, b), m);
}

template <class F>
Poly<F> poly_powmod(const F& k, Poly<F> a, uint64_t e, const Poly<F>& m) {
    Poly<F> r;
    r.c = {k.one()};
    a = poly_mod(k, a, m);
    while (e) {
        if (e & 1) r = poly_mulmod(k, r, a, m);
        a = poly_mulmod(k, a, a, m);
        e >>= 1;
    }
    return r;
}

template <class F>
Poly<F> poly_field_frob_mod(const F& k, Poly<F> a, uint32_t levels, const Poly<F>& m) {
    for (uint32_t l = 0; l < levels; l++)
        for (uint32_t i = 0; i < k.pdeg(); i++) a = poly_powmod(k, a, k.p(), m);
    return a;
}

namespace detail {

template <class F>
void roots_split(const F& k, const Poly<F>& g, Rng& rng,
                 std::vector<typename F::Elem>& out) {
    if (g.deg() <= 0) return;
    if (g.deg() == 1) {
        // monic T + c0  ->  root -c0
        out.push_back(k.neg(g.c[0]));
        return;
    }
    Poly<F> tee;
    tee.c = {k.zero(), k.one()};
    for (int attempt = 0; attempt < 256; attempt++) {
        Poly<F> b;
        if (k.p() == 2) {
            // F_2-trace of a random multiple of T, evaluated componentwise.
            // g splits into linear factors over F, so each component field is
            // F itself and the trace runs over pdeg() squarings.
            Poly<F> y;
            y.c = {k.zero(), k.rand_elem(rng)};
            y = poly_mod(k, y, g);
            Poly<F> acc = y;
            uint64_t e2 = (uint64_t)k.pdeg();
            for (uint64_t i = 1; i < e2; i++) {
                y = poly_mulmod(k, y, y, g);
                acc = poly_add(k, acc, y);
            }
            b = acc;
        } else {
            // (T + r)^((|F|-1)/2) - 1 via the norm chain, no big exponents.
            Poly<F> y;
            y.c = {k.rand_elem(rng), k.one()};
            Poly<F> z = y, acc = y;
            for (uint32_t i = 1; i < k.pdeg(); i++) {
                z = poly_powmod(k, z, k.p(), g);
                acc = poly_mulmod(k, acc, z, g);
            }
            b = poly_powmod(k, acc, (k.p() - 1) / 2, g);
            Poly<F> one;
            one.c = {k.one()};
            b = poly_sub(k, b, one);
        }
        auto h = poly_gcd(k, g, b);
        if (h.deg() > 0 && h.deg() < g.deg()) {
            auto rest = poly_divmod(k, g, h).first;
            roots_split(k, h, rng, out);
            roots_split(k, rest, rng, out);
            return;
        }
    }
    throw std::runtime_error("equal-degree splitting failed to converge");
}

}  // namespace detail

template <class F>
std::vector<typename F::Elem> poly_roots(const F& k, const Poly<F>& f, Rng& rng) {
    if (f.is_zero()) throw std::invalid_argument("poly_roots: zero polynomial");
    std::vector<typename F::Elem> out;
    Poly<F> g = f;
    // split off T-factors
    size_t tpow = 0;
    while (!g.c.empty() && k.is_zero(g.c[0])) {
        g.c.erase(g.c.begin());
        tpow++;
    }
    if (tpow > 0) out.push_back(k.zero());
    if (g.deg() >= 1) {
        Poly<F> tee;
        tee.c = {k.zero(), k.one()};
        auto h = poly_field_frob_mod(k, tee, 1, g);
        auto lin = poly_gcd(k, g, poly_sub(k, h, tee));
        detail::roots_split(k, lin, rng, out);
    }
    std::sort(out.begin(), out.end(),
              [&](const auto& a, const auto& b) { return elem_less(k, a, b); });
    return out;
}

template <class F>
std::vector<typename F::Elem> artin_schreier_roots(const F& k, uint32_t q,
                                                   const typename F::Elem& c) {
    std::vector<typename F::Elem> out;
    if constexpr (std::is_same_v<F, Gf>) {
        for (uint32_t a = 0; a < k.order(); a++) {
            auto x = (typename F::Elem)a;
            if (k.eq(k.add(k.pow(x, q), x), c)) out.push_back(x);
        }
    } else {
        // Closed form for odd characteristic when the q-Frobenius has even
        // order m with p never dividing m and the base field is F_{q^2}: with
        // y_j = c^{q^j}, the alternating sum A = sum (-1)^j y_j vanishes
        // exactly when a root exists, and then
        //     x = -(1/m) * sum_{j<m} (-1)^j j y_j
        // solves x^q + x = c (telescoping under the Frobenius); the full root
        // set is x + Omega.  Linear in m where generic root finding pays a
        // full equal-degree factorization in the big field.
        const Gf& bf = k.base();
        uint32_t p = k.p();
        uint32_t a = 0;
        {
            uint64_t t = 1;
            while (t < q) {
                t *= p;
                a++;
            }
            if (t != q) a = 0;
        }
        if (p != 2 && a && k.pdeg() % a == 0 && bf.order() == (uint64_t)q * q) {
            uint32_t m = k.pdeg() / a;
            if (m % 2 == 0 && m % p != 0) {
                uint16_t lam = bf.neg(bf.inv((uint16_t)(m % p)));
                typename F::Elem y = c, acc = k.zero(), alt = k.zero();
                for (uint32_t j = 0; j < m; j++) {
                    if (j) y = k.pow(y, q);
                    uint16_t t = bf.mul(lam, (uint16_t)(j % p));
                    if (j & 1) t = bf.neg(t);
                    for (size_t i = 0; i < y.size(); i++) {
                        acc[i] = bf.add(acc[i], bf.mul(t, y[i]));
                        alt[i] = (j & 1) ? bf.sub(alt[i], y[i]) : bf.add(alt[i], y[i]);
                    }
                }
                if (!k.is_zero(alt)) return out;
                if (!k.eq(k.add(k.pow(acc, q), acc), c))
                    throw std::logic_error("artin_schreier_roots: closed form failed");
                for (uint16_t w : omega_set(bf, q)) out.push_back(k.add(acc, k.from_base(w)));
                std::sort(out.begin(), out.end(),
                          [&](const auto& x, const auto& z) { return elem_less(k, x, z); });
                return out;
            }
        }
        // T^q + T - c; CZ root finding with a seed derived from c so the
        // result is reproducible.
        Poly<F> f;
        f.c.assign((size_t)q + 1, k.zero());
        f.c[0] = k.neg(c);
        f.c[1] = k.add(f.c.size() > 1 ? f.c[1] : k.zero(), k.one());
        f.c[q] = k.add(f.c[q], k.one());
        f.normalize(k);
        uint64_t seed = 0x41535253u;  // "ASRS"
        for (auto x : c) seed = splitmix64(seed ^ x);
        Rng rng(seed);
        out = poly_roots(k, f, rng);
        std::sort(out.begin(), out.end(),
                  [&](const auto& a, const auto& b) { return elem_less(k, a, b); });
    }
    return out;
}

template <class F>
typename F::Elem solve_artin_schreier(const F& k, uint32_t q, const typename F::Elem& c) {
    auto roots = artin_schreier_roots(k, q, c);
    if (roots.empty()) throw std::domain_error("Artin-Schreier equation has no root in this field");
    return roots.front();
}

}  // namespace gsc
