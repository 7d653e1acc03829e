#pragma once
// Local expansions at the "bad" places of the tower (the places over
// x_0 in Omega or x_0 = infinity), exact valuations, and the pole-cancelling
// construction of the regular function families g_s.
//
// A branch stores truncated Laurent series for x_0..x_m in a uniformizer of
// the place, over a residue field E (an extension of F_{q^2}).  Lifting a
// branch through the relation y^q + y = c works case by case:
//
//  * val(c) >= 0: solve the constant term (q Artin-Schreier roots -> the
//    branch splits; no roots -> the residue field grows by a factor p and
//    the roots regroup into Frobenius orbits, one branch per orbit), then
//    the tail is the convergent series sum_i (-1)^i r^(q^i).
//  * val(c) < 0 divisible by q: the pole term extracts exactly (q-th roots
//    are unique in characteristic p).
//  * val(c) = -1: wild, totally ramified step.  Fractional-power expansions
//    do not exist in characteristic p, so the branch switches uniformizer:
//    writing z = 1/sigma, the reparameterization T with
//    r(T(sigma)) = sigma^{-q} + sigma^{-1} is found by (tame) Newton
//    iteration, every stored series is recomposed through T, and z solves
//    the step exactly.  Any other residual pole profile is a structural
//    violation and aborts loudly.
//
// Branch identity is the recorded choice path, so a branch can be rebuilt
// from scratch at higher precision; valuation queries do this automatically
// when cancellation exhausts the stored terms.

#include <cstdint>
#include <memory>
#include <vector>

#include "gsc/tower.hpp"

namespace gsc {

// truncated Laurent series, coefficients in blocks of E.deg() entries;
// exponents in [lead, lead + co.size()/deg) carry the stored coefficients,
// exponents below lead are zero, exponents >= valid are unknown
struct LSer {
    long long lead = 0;
    long long valid = 0;
    std::vector<uint16_t> co;
};

struct Branch {
    // identity (enough to rebuild deterministically)
    uint32_t q = 0;
    int m = 0;
    int base_kind = 0;  // 0: x_0 = infinity, 1: x_0 = base_alpha in Omega
    uint16_t base_alpha = 0;
    std::vector<uint32_t> path;

    // classification: P_infinity, or S_t for t in [0, m+1] (t = 0 holds the
    // totally ramified branches with x_0 constant in Omega \ {0})
    bool is_pinf = false;
    int t = -1;
    uint16_t alpha = 0;  // constant term of x_t for t >= 0

    long long e = 1;      // ramification index over the x_0-line base point
    uint32_t resdeg = 1;  // residue degree over F_{q^2}

    // expansion state
    std::shared_ptr<const ExtField> E;
    std::vector<LSer> x;  // series for x_0..x_m
    long long cut = 0;       // absolute truncation bound of the stored series
    long long base_prec = 0; // pre-ramification precision used to build
};

// One branch per bad place of F_m, deterministic order: infinity first, then
// base points of Omega ascending, depth-first through canonical choices.
// Verifies, per base point, that ramification times residue degree sums to
// q^m, and that every branch satisfies the defining relations to precision.
std::vector<Branch> bad_branches(const TowerCtx& T, int m, long long prec = 48);

// The unique branch over x_0 = infinity.
Branch pinf_branch(const TowerCtx& T, int m, long long prec = 48);

// Rebuild (replaying the choice path) until the stored series reach at least
// the requested truncation bound.
void branch_ensure(const TowerCtx& T, Branch& b, long long cut);

// Exact valuation of f at the place of b; raises b's precision on demand.
// Throws std::domain_error for f = 0 (valuation would be +infinity).
long long valuation(const TowerCtx& T, const Tf& f, Branch& b);

// weight = -valuation at P_infinity
long long weight_of(const TowerCtx& T, const Tf& f, Branch& pinf);
long long weight_of(const TowerCtx& T, const Tf& f, int m);

struct RegularBasis {
    int level = 0;
    std::vector<Tf> g;  // g[s] regular away from P_infinity, weight q^{m+1}+s
    std::vector<long long> weights;
};

// Pole-cancelling construction: monomial candidates
// x_0^a x_1^{e_1}..x_m^{e_m} (x_j^{q-1}+1)^{-c_j} are expanded at every bad
// branch, the negative tails are eliminated over F_{q^2}, and the kernel is
// triangularized by pole order at P_infinity to extract one representative
// of each weight q^{m+1}+s, s in [0, smax].  Deterministic; candidate bounds
// enlarge on a bounded schedule if a weight is missed.
RegularBasis regular_basis(const TowerCtx& T, int m, int smax);

}  // namespace gsc
