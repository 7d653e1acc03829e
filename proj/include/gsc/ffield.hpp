#pragma once
// Finite fields in two flavours:
//
//  * Gf       -- a small field (order <= 65536) with full log/exp tables.
//               Elements are dense uint16_t indices: the index is the integer
//               value of the element's coefficient vector over F_p, low digit
//               first, in base p.  Index order is the canonical element order
//               used everywhere (serialization, deterministic choices).
//  * ExtField -- F_{t^D} as polynomials over a Gf of order t, for extensions
//               too large to tabulate (residue fields of high-degree places).
//
// A field is described by a FieldSpec: the characteristic p plus a chain of
// extension degrees with explicit moduli.  Construction is deterministic, so
// two runs (or two machines) agree on every element index.

#include <cstdint>
#include <memory>
#include <vector>

#include "gsc/util.hpp"

namespace gsc {

// Raised when a Las Vegas construction hits a non-invertible element (e.g. a
// candidate modulus turned out reducible); callers retry with fresh
// randomness.
struct ZeroDivisorError : std::domain_error {
    using std::domain_error::domain_error;
};

bool is_prime_u64(uint64_t n);
std::vector<uint64_t> prime_factors_u64(uint64_t n);  // distinct primes, ascending

// ---------------------------------------------------------------------------
// FieldSpec

struct FieldLevel {
    uint32_t degree = 1;
    // Monic modulus of length degree+1; entries are element indices of the
    // field one level down.
    std::vector<uint16_t> modulus;
    bool operator==(const FieldLevel&) const = default;
};

struct FieldSpec {
    uint32_t p = 2;
    std::vector<FieldLevel> levels;

    bool operator==(const FieldSpec&) const = default;

    uint64_t order() const;

    // Builds the spec whose modulus at each level is the first monic
    // irreducible in index order (coefficient vectors read as base-p integers,
    // low digit first).  Throws std::invalid_argument for non-prime p, a zero
    // degree, or a total order above 65536.
    static FieldSpec make(uint32_t p, const std::vector<uint32_t>& degrees);

    void serialize(ByteWriter& w) const;
    static FieldSpec deserialize(ByteReader& r);
};

// Spec for F_{q^2} given q = p^a: degrees {a, 2} (just {2} when q is prime).
FieldSpec fq2_spec(uint32_t q);

// ---------------------------------------------------------------------------
// Gf

class Gf {
public:
    using Elem = uint16_t;

    explicit Gf(const FieldSpec& spec);

    const FieldSpec& spec() const { return spec_; }
    uint32_t p() const { return p_; }
    uint32_t order() const { return order_; }
    uint32_t pdeg() const { return pdeg_; }  // degree over F_p

    Elem zero() const { return 0; }
    Elem one() const { return order_ > 1 ? 1 : 0; }
    bool is_zero(Elem a) const { return a == 0; }
    bool eq(Elem a, Elem b) const { return a == b; }

    Elem add(Elem a, Elem b) const {
        if (char2_) return a ^ b;
        if (!add_tab_.empty()) return add_tab_[(size_t)a * order_ + b];
        return add_slow(a, b);
    }
    Elem neg(Elem a) const { return neg_tab_[a]; }
    Elem sub(Elem a, Elem b) const { return add(a, neg(b)); }
    Elem mul(Elem a, Elem b) const {
        if (a == 0 || b == 0) return 0;
        return exp_[(uint32_t)log_[a] + log_[b]];
    }
    Elem inv(Elem a) const {
        if (a == 0) throw std::domain_error("Gf::inv of zero");
        return exp_[order_ - 1 - log_[a]];
    }
    Elem div(Elem a, Elem b) const { return mul(a, inv(b)); }
    Elem pow(Elem a, uint64_t e) const {
        if (a == 0) return e == 0 ? one() : 0;
        uint64_t r = (uint64_t)log_[a] * (e % (order_ - 1)) % (order_ - 1);
        return exp_[r];
    }
    Elem frob(Elem a) const { return pow(a, p_); }

    Elem rand_elem(Rng& rng) const { return (Elem)rng.below(order_); }
    Elem rand_nonzero(Rng& rng) const { return (Elem)(1 + rng.below(order_ - 1)); }

    uint16_t log_of(Elem a) const {
        if (a == 0) throw std::domain_error("Gf::log of zero");
        return log_[a];
    }
    Elem exp_of(uint32_t e) const { return exp_[e % (order_ - 1)]; }
    Elem generator() const { return exp_[1]; }

    bool char2() const { return char2_; }

private:
    Elem add_slow(Elem a, Elem b) const;

    FieldSpec spec_;
    uint32_t p_, order_, pdeg_;
    bool char2_;
    std::vector<uint16_t> exp_;  // length 2*(order-1); exp_[i] = g^i
    std::vector<uint16_t> log_;
    std::vector<uint16_t> neg_tab_;
    std::vector<uint16_t> add_tab_;  // order^2 entries when order is small
};

// Shared, cached construction (table building costs ~tens of ms).
std::shared_ptr<const Gf> get_field(const FieldSpec& spec);
std::shared_ptr<const Gf> get_fq2(uint32_t q);

// All alpha in F_{q^2} with alpha^q + alpha = 0, ascending index order.
// Precondition: field order is q^2.
std::vector<uint16_t> omega_set(const Gf& f, uint32_t q);

// ---------------------------------------------------------------------------
// Dense univariate polynomials over an arbitrary field (templated on the
// field context, which is passed explicitly in the style of a handle).
// Coefficients are stored low-to-high and kept normalized: empty vector means
// zero, otherwise the top coefficient is nonzero.

template <class F>
struct Poly {
    using E = typename F::Elem;
    std::vector<E> c;

    static Poly zero() { return {}; }
    static Poly from(std::vector<E> v, const F& k) {
        Poly p{std::move(v)};
        p.normalize(k);
        return p;
    }
    void normalize(const F& k) {
        while (!c.empty() && k.is_zero(c.back())) c.pop_back();
    }
    int deg() const { return (int)c.size() - 1; }
    bool is_zero() const { return c.empty(); }
    typename F::Elem lead(const F& k) const { return c.empty() ? k.zero() : c.back(); }
};

// ---------------------------------------------------------------------------
// ExtField: F = base[T] / (modulus), elements are coefficient vectors of
// fixed length deg(modulus).  Multiplication switches to Karatsuba with
// Barrett-style reduction once the degree warrants it.

class ExtField {
public:
    using Elem = std::vector<uint16_t>;

    ExtField(std::shared_ptr<const Gf> base, std::vector<uint16_t> modulus);

    const Gf& base() const { return *base_; }
    std::shared_ptr<const Gf> base_ptr() const { return base_; }
    const std::vector<uint16_t>& modulus() const { return mod_; }
    uint32_t deg() const { return d_; }
    uint32_t p() const { return base_->p(); }
    uint32_t pdeg() const { return pdeg_; }  // degree over F_p

    Elem zero() const { return Elem(d_, 0); }
    Elem one() const { return from_base(base_->one()); }
    Elem from_base(uint16_t a) const {
        Elem e(d_, 0);
        e[0] = a;
        return e;
    }
    bool is_zero(const Elem& a) const {
        for (auto x : a)
            if (x) return false;
        return true;
    }
    bool eq(const Elem& a, const Elem& b) const { return a == b; }

    Elem add(const Elem& a, const Elem& b) const;
    Elem sub(const Elem& a, const Elem& b) const;
    Elem neg(const Elem& a) const;
    Elem mul(const Elem& a, const Elem& b) const;
    Elem inv(const Elem& a) const;
    Elem div(const Elem& a, const Elem& b) const { return mul(a, inv(b)); }
    Elem pow(const Elem& a, uint64_t e) const;
    Elem frobp(const Elem& a) const { return pow(a, p()); }
    // Inverse of x -> x^p (bijective: x^(p^pdeg) = x, so apply x -> x^p
    // pdeg-1 more times).
    Elem frobp_inv(const Elem& a) const;

    Elem rand_elem(Rng& rng) const {
        Elem e(d_);
        for (auto& x : e) x = (uint16_t)rng.below(base_->order());
        return e;
    }

    // Span-based kernels used by the series layer: operate on raw coefficient
    // blocks of length deg() without allocating.
    void sp_add(uint16_t* dst, const uint16_t* a, const uint16_t* b) const;
    void sp_sub(uint16_t* dst, const uint16_t* a, const uint16_t* b) const;
    void sp_mul(uint16_t* dst, const uint16_t* a, const uint16_t* b) const;
    void sp_madd(uint16_t* dst, const uint16_t* a, const uint16_t* b) const;  // dst += a*b
    bool sp_is_zero(const uint16_t* a) const;

    void serialize(ByteWriter& w) const;

private:
    void reduce_full(std::vector<uint16_t>& prod) const;  // length 2d-1 -> d

    std::shared_ptr<const Gf> base_;
    std::vector<uint16_t> mod_;  // monic, length d+1
    uint32_t d_, pdeg_;
    std::vector<uint16_t> red_rows_;            // T^(d+i) mod m, i < d-1 (small-degree path)
    mutable std::vector<uint16_t> barrett_minv_;  // rev(m)^(-1) mod T^(d-1) (large-degree path)
};

// ---------------------------------------------------------------------------
// Polynomial algorithms (work for F = Gf or ExtField).

template <class F>
Poly<F> poly_add(const F& k, const Poly<F>& a, const Poly<F>& b);
template <class F>
Poly<F> poly_sub(const F& k, const Poly<F>& a, const Poly<F>& b);
template <class F>
Poly<F> poly_mul(const F& k, const Poly<F>& a, const Poly<F>& b);
template <class F>
Poly<F> poly_scale(const F& k, const typename F::Elem& s, const Poly<F>& a);
// quotient/remainder; divisor must be nonzero
template <class F>
std::pair<Poly<F>, Poly<F>> poly_divmod(const F& k, const Poly<F>& a, const Poly<F>& b);
template <class F>
Poly<F> poly_mod(const F& k, const Poly<F>& a, const Poly<F>& b);
template <class F>
Poly<F> poly_gcd(const F& k, Poly<F> a, Poly<F> b);  // monic or zero
template <class F>
Poly<F> poly_monic(const F& k, const Poly<F>& a);
template <class F>
typename F::Elem poly_eval(const F& k, const Poly<F>& a, const typename F::Elem& x);
template <class F>
Poly<F> poly_mulmod(const F& k, const Poly<F>& a, const Poly<F>& b, const Poly<F>& m);
template <class F>
Poly<F> poly_powmod(const F& k, Poly<F> a, uint64_t e, const Poly<F>& m);
// x^(|F|^levels) mod m, via repeated p-th powers
template <class F>
Poly<F> poly_field_frob_mod(const F& k, Poly<F> a, uint32_t levels, const Poly<F>& m);

// Distinct roots in F, unordered multiplicity-free, deterministic for a fixed
// rng seed (Cantor-Zassenhaus equal-degree splitting inside).
template <class F>
std::vector<typename F::Elem> poly_roots(const F& k, const Poly<F>& f, Rng& rng);

// Deterministic irreducibility over a table field (Rabin's test).
bool poly_is_irreducible(const Gf& k, const Poly<Gf>& f);

// First monic irreducible of degree d in index order over a Gf.
Poly<Gf> first_irreducible(const Gf& k, uint32_t d);

// Uniform random monic irreducible of degree d over a Gf, with cheap
// small-factor screening before the full confirmation.  Las Vegas.
Poly<Gf> irreducible_random(const Gf& k, uint32_t d, Rng& rng);

// All roots of T^q + T = c in the given field, ascending; may be empty.
template <class F>
std::vector<typename F::Elem> artin_schreier_roots(const F& k, uint32_t q,
                                                   const typename F::Elem& c);

// First root in element order; throws std::domain_error if none exists.
template <class F>
typename F::Elem solve_artin_schreier(const F& k, uint32_t q, const typename F::Elem& c);

// Canonical element comparison (index order / base-order integer order).
template <class F>
bool elem_less(const F& k, const typename F::Elem& a, const typename F::Elem& b);

}  // namespace gsc

#include "gsc/detail/poly_impl.hpp"
