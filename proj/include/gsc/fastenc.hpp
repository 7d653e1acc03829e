#pragma once
// Fast encoder.  The message-to-codeword map factors through the digit
// structure of the family index: a chunk function with index digits
// (r_1, ..., r_k) is the product of level-c factors g_{r_i} shifted by
// (i-1)c, so evaluation at all level-n code places proceeds bottom-up.
// Stage i holds the values of every partial product over digits r_1..r_i at
// every level-ic code place; passing to stage i+1 is, for each admissible
// middle coordinate alpha, one matrix multiplication
//
//     (q^{n-c} x q^c) * (q^c x q^c)
//
// between gathered stage-i values (rows: partial-product index x lower
// half-place over alpha) and the precomputed evaluations of g_0..g_{q^c-1}
// at the level-c places whose bottom coordinate is alpha.  A level-ic place
// splits uniquely as (lower part at level (i-1)c, upper part at level c)
// glued over alpha; the precomputed index maps realize that bijection.
//
// Messages longer than q^n split into chunks: index s*q^n + t maps to
// x_0^s * f_t, so chunk s's evaluations are scaled pointwise by x_0(P)^s
// and summed.
//
// Tables are serialized little-endian with a trailing content digest; the
// loader re-derives nothing silently and rejects any mismatch.

#include <array>
#include <cstdint>
#include <vector>

#include "gsc/agcode.hpp"
#include "gsc/kernels.hpp"
#include "gsc/linalg.hpp"

namespace gsc {

struct EvalTable {
    uint32_t q = 0;
    int n = 0, k = 0, c = 0;  // c = n/k
    int D = 0;                // q^c, digits per level and block width
    size_t nc = 0;            // number of level-c code places
    FieldSpec field;
    std::array<uint8_t, 32> place_digest{};  // level-n code place list digest
    std::vector<uint16_t> alphas;            // elements outside Omega, ascending
    std::vector<Tf> gforms;                  // canonical forms of g_0..g_{D-1}
    std::vector<uint16_t> gev;               // D x nc: g_l at level-c places

    // stage maps, one per i = 1..k; groups are indexed by position in alphas
    struct LevelMaps {
        // level-(i-1)c place indices whose top coordinate is alpha (empty at
        // i = 1, where the lower part is the bare coordinate)
        std::vector<std::vector<uint32_t>> lower;
        // glue[alpha][s * q^c + t] = level-ic place index assembled from
        // lower[alpha][s] and upper[alpha][t]; a bijection onto the level
        std::vector<std::vector<uint32_t>> glue;
    };
    std::vector<LevelMaps> lv;

    // level-c place indices whose bottom coordinate is alpha (all stages)
    std::vector<std::vector<uint32_t>> upper;
    // derived, not serialized: per alpha, the D x D block gev[:, upper[alpha]]
    // and its transpose (the stage pipeline multiplies from the transposed
    // side so the row-kernel loops run along the long stacked dimension)
    std::vector<std::vector<uint16_t>> bmat, bmat_t;
};

// Direct evaluation of the level-c basis plus index-map construction; the
// place-split bijections are asserted during the build.
EvalTable precompute_tables(const CodeInstance& C);

// Strided digit split: block l of w is w^{(l)}_j = w[j*D + l], so that
// w = sum_l iota_l(w^{(l)}) with iota_l(e_j) = e_{j*D + l}.  Length must be a
// positive power of D.
std::vector<std::vector<uint16_t>> block_decompose(const std::vector<uint16_t>& w, int D);

enum class MulStrategy { naive, strassen };

// Exact product with selectable strategy; strassen recurses down to naive
// blocks at or below the threshold and pads odd dimensions.
std::vector<uint16_t> matmul(const KernelCtx& kc, const std::vector<uint16_t>& a, int ra, int ca,
                             const std::vector<uint16_t>& b, int cb, MulStrategy strategy,
                             int threshold = 64);

// One chunk: |v| = q^n, output has one symbol per level-n code place.
std::vector<uint16_t> matrix_encode(const CodeInstance& C, const EvalTable& t,
                                    const std::vector<uint16_t>& v);

// Full message: |v| = K; chunk s is scaled pointwise by x_0(P)^s.  Agrees
// with naive_encode exactly.
std::vector<uint16_t> encode(const CodeInstance& C, const EvalTable& t,
                             const std::vector<uint16_t>& v);

// Arbitrary-length coefficient span over the same family (the decoder's
// interpolation spaces run past K): |v| >= 1, zero-padded to whole chunks;
// all chunks ride one batched stage pipeline.
std::vector<uint16_t> encode_span(const CodeInstance& C, const EvalTable& t,
                                  const std::vector<uint16_t>& v);

// Byte round trip.  Deserialization verifies the trailing content digest
// (IntegrityError on mismatch) and structural sanity; table_verify then
// checks the table against a concrete code instance (parameters, field,
// place digest, basis forms).
std::vector<uint8_t> table_serialize(const EvalTable& t);
EvalTable table_deserialize(const std::vector<uint8_t>& bytes);
void table_verify(const EvalTable& t, const CodeInstance& C);

}  // namespace gsc
