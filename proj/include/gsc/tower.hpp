#pragma once
// Exact arithmetic in the recursive tower over F_{q^2}:
//
//   F_0 = F_{q^2}(x_0),  F_{j+1} = F_j(x_{j+1}),
//   x_{j+1}^q + x_{j+1} = x_j^q / (x_j^{q-1} + 1).
//
// A tower function at level m is stored in the canonical basis
// {x_1^{e_1} ... x_m^{e_m} : 0 <= e_i < q} over F_{q^2}(x_0), with
// coefficients kept as reduced fractions of x_0-polynomials (monic
// denominators).  Since each step is a degree-q extension this basis is a
// basis, so canonical forms are unique and equality is decidable.
//
// The context precomputes, per level j, closed canonical forms for
//   u_j = x_j^q/(x_j^{q-1}+1)   (right side of the defining relation),
//   X_j = 1/x_j,  I_j = 1/u_j,
// built from the identities x_j^{q-1}+1 = u_{j-1}/x_j and
// 1/(x_j^{q-1}+1) = x_j * I_{j-1}.  Products reduce any x_i^q via
// x_i^q = -x_i + u_{i-1}.

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <vector>

#include "gsc/ffield.hpp"

namespace gsc {

// reduced fraction num/den of polynomials over F_{q^2}; den monic, nonzero
struct RatFun {
    Poly<Gf> num, den;
};

RatFun rf_make(const Gf& k, Poly<Gf> num, Poly<Gf> den);
RatFun rf_zero();
RatFun rf_one(const Gf& k);
RatFun rf_const(const Gf& k, uint16_t c);
RatFun rf_poly(const Gf& k, Poly<Gf> p);
RatFun rf_add(const Gf& k, const RatFun& a, const RatFun& b);
RatFun rf_sub(const Gf& k, const RatFun& a, const RatFun& b);
RatFun rf_mul(const Gf& k, const RatFun& a, const RatFun& b);
RatFun rf_div(const Gf& k, const RatFun& a, const RatFun& b);
RatFun rf_neg(const Gf& k, const RatFun& a);
bool rf_is_zero(const RatFun& a);
bool rf_eq(const RatFun& a, const RatFun& b);

// exponents of x_1..x_m; entry i is the exponent of x_{i+1}
using ExpVec = std::vector<uint16_t>;

struct Tf {
    int level = 0;
    std::map<ExpVec, RatFun> c;  // canonical form; no zero coefficients stored
};

struct TowerCtx {
    uint32_t q = 0;
    int mmax = 0;
    std::shared_ptr<const Gf> kp;  // F_{q^2}
    const Gf& k() const { return *kp; }
    // closed forms at level j (u[j], I[j] for j < mmax; X[j] for j <= mmax)
    std::vector<Tf> u, I, X;
};

// Builds the context and verifies x_j*X_j = 1 and u_j*I_j = 1 canonically.
std::shared_ptr<const TowerCtx> make_tower(uint32_t q, int mmax);

Tf tf_zero(int level);
Tf tf_one(const TowerCtx& T, int level);
Tf tf_const(const TowerCtx& T, uint16_t v, int level);
Tf tf_coeff(const TowerCtx& T, RatFun f, int level);  // element of F_{q^2}(x_0)
Tf tf_x(const TowerCtx& T, int t, int level);         // the generator x_t
Tf tf_embed(const TowerCtx& T, const Tf& f, int level);

Tf tf_add(const TowerCtx& T, const Tf& a, const Tf& b);
Tf tf_sub(const TowerCtx& T, const Tf& a, const Tf& b);
Tf tf_neg(const TowerCtx& T, const Tf& a);
Tf tf_mul(const TowerCtx& T, const Tf& a, const Tf& b);
Tf tf_pow(const TowerCtx& T, const Tf& a, uint64_t e);
bool tf_is_zero(const Tf& a);
bool tf_eq(const Tf& a, const Tf& b);

// Subscript shift x_t -> x_{t+i}: an isomorphism onto the subfield generated
// by x_i..x_{m+i}.  Coefficient denominators are cleared first and must be of
// the shape c * x_0^A * (x_0^{q-1}+1)^B (all denominators produced by tower
// arithmetic are); anything else throws std::domain_error.
Tf tf_shift(const TowerCtx& T, const Tf& f, int i);

// The involution of level j sending x_t -> 1/x_{j-t}.
Tf tf_phi(const TowerCtx& T, const Tf& f);

// Canonical-form byte round trip (little-endian); deserialization renormalizes
// coefficients and rejects malformed exponent vectors.
void tf_serialize(ByteWriter& w, const Tf& f);
Tf tf_deserialize(const Gf& k, ByteReader& r);

// places with all coordinates in F_{q^2} and every coordinate outside
// Omega = {a : a^q + a = 0}; these are exactly where code words are sampled
struct PlaceList {
    int level = 0;
    size_t n = 0;
    std::vector<uint16_t> coords;  // n * (level+1), place-major
    std::array<uint8_t, 32> digest{};
    const uint16_t* place(size_t i) const { return coords.data() + i * (size_t)(level + 1); }
};

// All q^m(q^2-q) such places at level m, ordered lexicographically by
// coordinate tuple (field elements ordered by index); deterministic.
PlaceList code_places(const TowerCtx& T, int m);

// value of f at a place given by coords[0..f.level]; throws std::domain_error
// if a coefficient denominator vanishes there
uint16_t tf_eval(const TowerCtx& T, const Tf& f, const uint16_t* coords);

// product of shifted factors: prod_i shift(fs[i].base, fs[i].off)^exp;
// evaluation uses coordinate windows and never expands
struct Factor {
    Tf base;
    int off = 0;
    uint64_t exp = 1;
};
struct Product {
    int level = 0;
    std::vector<Factor> fs;
};

Tf product_expand(const TowerCtx& T, const Product& p);
uint16_t product_eval(const TowerCtx& T, const Product& p, const uint16_t* coords);

// --- generic evaluation over a coordinate field (F_{q^2} itself or an
// extension of it) ---

inline uint16_t lift_scalar(const Gf&, uint16_t c) { return c; }
inline ExtField::Elem lift_scalar(const ExtField& E, uint16_t c) { return E.from_base(c); }

template <class Fld>
typename Fld::Elem rf_eval_in(const Fld& F, const RatFun& a, const typename Fld::Elem& x0) {
    auto horner = [&](const Poly<Gf>& p) {
        auto acc = F.zero();
        for (size_t i = p.c.size(); i-- > 0;) {
            acc = F.add(F.mul(acc, x0), lift_scalar(F, p.c[i]));
        }
        return acc;
    };
    auto den = horner(a.den);
    if (F.is_zero(den)) throw std::domain_error("tower: denominator vanishes at place");
    return F.mul(horner(a.num), F.inv(den));
}

template <class Fld>
typename Fld::Elem tf_eval_in(const TowerCtx&, const Tf& f, const Fld& F,
                              const std::vector<typename Fld::Elem>& coords) {
    auto acc = F.zero();
    for (const auto& [e, cf] : f.c) {
        auto term = rf_eval_in(F, cf, coords[0]);
        for (size_t i = 0; i < e.size(); i++) {
            if (e[i]) term = F.mul(term, F.pow(coords[i + 1], e[i]));
        }
        acc = F.add(acc, term);
    }
    return acc;
}

template <class Fld>
typename Fld::Elem product_eval_in(const TowerCtx& T, const Product& p, const Fld& F,
                                   const std::vector<typename Fld::Elem>& coords) {
    auto acc = F.one();
    for (const auto& fc : p.fs) {
        std::vector<typename Fld::Elem> window(coords.begin() + fc.off,
                                               coords.begin() + fc.off + fc.base.level + 1);
        auto v = tf_eval_in(T, fc.base, F, window);
        acc = F.mul(acc, F.pow(v, fc.exp));
    }
    return acc;
}

}  // namespace gsc
