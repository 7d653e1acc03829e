// Interpolation decoding.  A polynomial H(lambda) = sum_j u_j lambda^j with
// coefficient functions u_j drawn from the evaluation family is fit to the
// received word through a black-box kernel solve (Wiedemann on big instances),
// then candidate messages are read off from the roots of H at a single place
// of large degree and certified by re-encoding.
#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gsc/agcode.hpp"
#include "gsc/fastenc.hpp"
#include "gsc/ffield.hpp"
#include "gsc/kernels.hpp"
#include "gsc/util.hpp"

namespace gsc {

enum class DecodeMode { unique, list };

// Shape of the interpolation problem: H = sum_{j<=ell} u_j lambda^j where u_j
// ranges over family indices r <= w[j] (a negative w[j] forces u_j = 0).  B is
// the certification threshold: accepted candidates agree with the received
// word in more than B places.
struct DecoderParams {
    int ell = 0;
    long long B = 0;
    std::vector<long long> w;  // ell + 1 entries, w[j] = B - (ell+1) deg_g - (K-1) j
    size_t cols() const;       // sum_j max(w[j] + 1, 0), unknown count
};

// Derived shapes.  unique fixes ell = 1 and centers B so that the certified
// radius reaches half the designed distance; list balances ell against B for
// the largest radius at bounded list size.  Both come out feasible
// (cols >= N + 1).  The explicit overload validates ell >= 1 and feasibility
// and throws std::invalid_argument otherwise.
DecoderParams choose_params(const CodeParams& P, DecodeMode mode);
DecoderParams choose_params(const CodeParams& P, int ell, long long B);

// Row i of the interpolation system, applied blindly: (M a)_i =
// sum_j y_i^j u_j(P_i) with a the stacked u_j coefficient spans.  Costs one
// batched span encode per j plus a Horner sweep in y.
std::vector<uint16_t> blackbox_matvec(const CodeInstance& C, const EvalTable& t,
                                      const std::vector<uint16_t>& y, const DecoderParams& par,
                                      const std::vector<uint16_t>& a);

using Matvec = std::function<std::vector<uint16_t>(const std::vector<uint16_t>&)>;

// Nonzero kernel vector of a rows x cols operator given only as a black box
// (rows < cols so the kernel is nonzero).  Wiedemann: pad square with zero
// rows, run Berlekamp-Massey on a doubly projected Krylov sequence, strip the
// lambda^s factor from the minimal generator and descend to the kernel.
// Las Vegas; retries with fresh projections and throws std::runtime_error
// once retry_cap trials fail.
std::vector<uint16_t> wiedemann_nullvector(const KernelCtx& kc, const Matvec& mv, size_t rows,
                                           size_t cols, Rng& rng, int retry_cap = 8);

// Dense elimination on the materialized operator; the kernel vector is a
// random combination of the free columns, so repeated calls disagree.
std::vector<uint16_t> dense_nullvector(const KernelCtx& kc, const Matvec& mv, size_t rows,
                                       size_t cols, Rng& rng);

// dense below a size cutoff, Wiedemann above
std::vector<uint16_t> kernel_nullvector(const KernelCtx& kc, const Matvec& mv, size_t rows,
                                        size_t cols, Rng& rng);

struct InterpolationPoly {
    DecoderParams par;
    std::vector<std::vector<uint16_t>> u;  // u[j]: span coefficients, size max(w[j]+1, 0)
};

// Nonzero H whose rows all vanish on the received word: sum_j y_i^j u_j(P_i)
// = 0 at every place.  Nonzero as a function, too: the family is independent,
// so a nonzero coefficient vector cannot cancel.
InterpolationPoly interpolate(const CodeInstance& C, const EvalTable& t,
                              const std::vector<uint16_t>& y, const DecoderParams& par, Rng& rng);

// Place of degree D over the base field: coordinates in F_{q^2}[T]/(modulus)
// satisfying the tower relations with x_0 outside Omega.
struct BigPlace {
    std::shared_ptr<const ExtField> E;
    std::vector<ExtField::Elem> coords;  // x_0 .. x_n
};

BigPlace find_place_of_degree(const CodeInstance& C, uint32_t D, Rng& rng);

// The span {f_r(P)}_{r<K} came out rank-deficient at the chosen place.  Can
// happen when D is opportunistically small; never at the guaranteed degree.
struct PivotDeficiencyError : std::runtime_error {
    explicit PivotDeficiencyError(const std::string& m) : std::runtime_error(m) {}
};

// Everything decoding needs at the place P: evaluations f_r(P) across the
// interpolation span, and the echelonized message-recovery transform.
// L = raw * R is the reduced column echelon of raw[i][r] = f_r(P) coordinate
// i, piv its pivot rows; a root z lifts to the message R * z[piv] exactly
// when L * z[piv] reproduces z.
struct LiftTables {
    uint32_t q = 0;
    int n = 0, k = 0;
    long long K = 0;
    long long rmax = 0;  // evals cover r = 0..rmax
    uint32_t D = 0;
    std::shared_ptr<const ExtField> E;
    std::vector<ExtField::Elem> coords;      // x_0 .. x_n at P
    std::vector<ExtField::Elem> evals;       // f_r(P)
    std::vector<uint16_t> L;                 // D x K
    std::vector<uint16_t> R;                 // K x K
    std::vector<int> piv;                    // K ascending pivot rows
    std::array<uint8_t, 32> place_digest{};  // binds modulus + coordinates
};

LiftTables build_lift_tables(const CodeInstance& C, const DecoderParams& par, const BigPlace& P);

// Random place + tables.  optimistic_d > 0 tries that degree first and falls
// back to the guaranteed deg_g + K on pivot deficiency; certification is
// sound at any degree, and a full-rank small place loses no completeness
// either (agreement past B forces H(f) to vanish as a function, not merely
// at P).
LiftTables make_lift_tables(const CodeInstance& C, const DecoderParams& par, Rng& rng,
                            uint32_t optimistic_d = 0);

// Message with f_v(P) = z, or nothing when z is outside the span.
std::optional<std::vector<uint16_t>> lift_root(const LiftTables& lt, const ExtField::Elem& z);

struct Decoded {
    std::vector<uint16_t> msg;
    long long agreement = 0;
};

// All messages whose re-encoding agrees with y in more than par.B places,
// sorted by message.  Empty output is a certified miss, not a failure.
// Retries interpolation when H degenerates at the place (all u_j(P) = 0);
// throws std::runtime_error if that persists.
std::vector<Decoded> list_decode(const CodeInstance& C, const EvalTable& t, const LiftTables& lt,
                                 const std::vector<uint16_t>& y, const DecoderParams& par,
                                 Rng& rng);

// ell = 1 shortcut: H = u_0 + u_1 lambda has the single candidate root
// -u_0(P)/u_1(P).  Declines (nullopt) when the candidate fails verification;
// retries with a fresh kernel vector while u_1(P) = 0.
std::optional<Decoded> unique_decode(const CodeInstance& C, const EvalTable& t,
                                     const LiftTables& lt, const std::vector<uint16_t>& y,
                                     const DecoderParams& par, Rng& rng);
// Same with the derived unique-mode shape.
std::optional<Decoded> unique_decode(const CodeInstance& C, const EvalTable& t,
                                     const LiftTables& lt, const std::vector<uint16_t>& y,
                                     Rng& rng);

// --- persistence: a lift section riding in the shared table container ----

std::vector<uint8_t> lift_serialize(const LiftTables& lt);
LiftTables lift_deserialize(const std::vector<uint8_t>& body, const CodeInstance& C);

// Insert or replace the lift section of an existing table file.
std::vector<uint8_t> lift_attach(const std::vector<uint8_t>& table_file, const LiftTables& lt);
bool lift_present(const std::vector<uint8_t>& table_file);
LiftTables lift_load(const std::vector<uint8_t>& table_file, const CodeInstance& C);

}  // namespace gsc
