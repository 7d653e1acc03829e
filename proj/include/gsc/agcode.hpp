#pragma once
// Evaluation codes on the tower.  A code instance at level n evaluates the
// span of the first K members of a fixed function family at the q^n(q^2-q)
// code places.  Family member f_r is a product of shifted level-(n/k)
// regular basis functions picked by the base-q^{n/k} digits of r, times an
// x_0 power for r >= q^n:
//
//   r = s q^n + sum_{i=1..k} d_i q^{n - i(n/k)},
//   f_r = x_0^s * prod_{i=1..k} g_{d_i}[(i-1)(n/k)],
//
// giving -v_{Pinf}(f_r) = gweight + r with all other poles confined to the
// branches over x_0 = 0 (a divisor of degree at most deg_g).  Distinct
// weights make the evaluation map injective for K up to the admissible cap.
//
// This header also houses the naive place-by-place encoder (the oracle the
// fast paths are tested against), the Gilbert-Varshamov line comparison, and
// the k=2 mid-level tensor split used to extract systematic subcodes.

#include <cstdint>
#include <memory>
#include <vector>

#include "gsc/localize.hpp"
#include "gsc/tower.hpp"

namespace gsc {

struct CodeParams {
    uint32_t q = 0;
    int n = 0, k = 0;
    long long K = 0;
    long long N = 0;        // q^n (q^2 - q) code places
    long long kmax = 0;     // q^n (q^2 - q - kq - k + 1), admissible dimension cap
    long long deg_g = 0;    // q^n (kq + k - 1), pole divisor degree bound
    long long gweight = 0;  // sum_{i=1..k} q^{n-(i-1)(n/k)+1}, weight of f_0
    long long dstar = 0;    // N - K - deg_g + 1, designed distance
};

// Validates (q, n, k, K) and fills every derived parameter.  Throws
// std::invalid_argument naming the violated bound (q not a prime power,
// k < 2, k not dividing n, K outside [1, kmax], empty admissible range).
CodeParams code_params(uint32_t q, int n, int k, long long K);

struct CodeInstance {
    CodeParams par;
    std::shared_ptr<const TowerCtx> tower;      // levels 0..n
    std::shared_ptr<const RegularBasis> basis;  // level n/k, weights q^{n/k+1}+s
    PlaceList places;                           // code places at level n, canonical order
};

CodeInstance make_code(uint32_t q, int n, int k, long long K);

// Factored description of f_r; the encoders never expand it.
struct MostlyRegular {
    long long r = 0;
    long long s = 0;           // x_0 exponent, r / q^n
    std::vector<int> digits;   // d_1..d_k, most significant first, base q^{n/k}
    Product prod;              // level-n product of the shifted factors
};

MostlyRegular f_family(const CodeInstance& C, long long r);

// Same family without the dimension cap: the decoder's interpolation spaces
// use indices past K (weights keep following gweight + r).
MostlyRegular f_family_any(const CodeInstance& C, long long r);

// out[i] = sum_r v[r] f_r(P_i) by direct factored evaluation at every place.
// Exact, linear, and deliberately simple; quadratic in the instance size.
std::vector<uint16_t> naive_encode(const CodeInstance& C, const std::vector<uint16_t>& v);

// naive_encode over an arbitrary-length coefficient span (family indices
// 0..|v|-1, no dimension cap).
std::vector<uint16_t> naive_encode_span(const CodeInstance& C, const std::vector<uint16_t>& v);

// --- Gilbert-Varshamov comparison ---------------------------------------

struct GvVerdict {
    uint32_t q = 0;
    bool beats = false;  // some (R, delta) with R + delta = 1 - (kq+k-1)/(q^2-q)
                         // lies strictly above the q^2-ary GV curve
    double excess = 0;   // max over delta of H_{q^2}(delta) - delta - (kq+k-1)/(q^2-q)
};

struct GvReport {
    int k = 0;
    std::vector<GvVerdict> rows;      // prime powers in [qlo, qhi], ascending
    uint32_t smallest_beating_q = 0;  // 0 when none in the scanned range
};

// Scans the rate-distance line against the GV bound per prime power q.  A
// coarse grid over delta is refined by ternary search (the objective is
// concave); verdicts are declared only outside a 1e-12 safety margin.
GvReport gv_compare(int k, uint32_t qlo, uint32_t qhi);

// --- k=2 systematic subcode ----------------------------------------------

// Rank pair of the half-level generator restrictions at one alpha.
struct AlphaRanks {
    uint16_t alpha = 0;
    int r1 = 0;  // rows with top coordinate alpha, columns h_u = x_0^{u div} g_{u mod}
    int r2 = 0;  // rows with bottom coordinate alpha, columns g_v
};

// Tensor split at the middle coordinate: the level-n generator rows with
// x_{n/2} = alpha equal A (x) B under the emitted row pairing, where A holds
// h_u at the half-level places with top coordinate alpha and B holds g_v at
// those with bottom coordinate alpha.  Column-reducing both factors exhibits
// an identity block of size r1*r2, a systematic subcode of that dimension.
struct SystematicSubcode {
    uint16_t alpha = 0;                      // maximizer of r1*r2, smallest on ties
    int r1 = 0, r2 = 0;
    long long dim = 0;                       // r1 * r2
    long long rank_sum = 0;                  // sum of r1*r2 over all alpha (>= K)
    std::vector<AlphaRanks> per_alpha;       // every alpha outside Omega, ascending
    int ucols = 0, vcols = 0;                // A: fiber x K/q^{n/2}, B: fiber x q^{n/2}
    std::vector<size_t> bot_rows, top_rows;  // half-level place indices (A rows, B rows)
    std::vector<size_t> row_map;             // bi*|top_rows|+ti -> level-n place index
    std::vector<uint16_t> amat, bmat;        // the chosen alpha's A and B, row-major
    std::vector<uint16_t> ta, tb;            // column transforms from col_reduce
    std::vector<int> apiv, bpiv;             // pivot rows: (A ta)[apiv[i]][j] = delta_ij
    std::vector<size_t> sys_places;          // r1*r2 places carrying the identity block
};

// Requires k = 2 and q^{n/2} | K (the message range must be a full tensor
// product for the split to be exact).
SystematicSubcode systematic_subcode(const CodeInstance& C);

}  // namespace gsc
