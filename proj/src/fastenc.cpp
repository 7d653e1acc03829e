#include "gsc/fastenc.hpp"

#include <algorithm>
#include <cstring>
#include <stdexcept>

#include "gsc/localize.hpp"

namespace gsc {

namespace {

long long ipow(long long b, int e) {
    long long r = 1;
    while (e-- > 0) r *= b;
    return r;
}

long long digit_reverse(long long r, int D, int k) {
    long long o = 0;
    for (int i = 0; i < k; i++) {
        o = o * D + r % D;
        r /= D;
    }
    return o;
}

size_t find_place(const PlaceList& pl, const uint16_t* coords) {
    int w = pl.level + 1;
    size_t lo = 0, hi = pl.n;
    while (lo < hi) {
        size_t mid = (lo + hi) / 2;
        const uint16_t* pc = pl.place(mid);
        if (std::lexicographical_compare(pc, pc + w, coords, coords + w))
            lo = mid + 1;
        else
            hi = mid;
    }
    if (lo == pl.n || std::memcmp(pl.place(lo), coords, (size_t)w * 2) != 0)
        throw std::logic_error("fastenc: split part is not a code place");
    return lo;
}

void build_bmats(EvalTable& t) {
    t.bmat.assign(t.alphas.size(), {});
    t.bmat_t.assign(t.alphas.size(), {});
    for (size_t a = 0; a < t.alphas.size(); a++) {
        auto& B = t.bmat[a];
        auto& Bt = t.bmat_t[a];
        B.assign((size_t)t.D * t.D, 0);
        Bt.assign((size_t)t.D * t.D, 0);
        for (int l = 0; l < t.D; l++)
            for (int u = 0; u < t.D; u++) {
                uint16_t v = t.gev[(size_t)l * t.nc + t.upper[a][(size_t)u]];
                B[(size_t)l * t.D + u] = v;
                Bt[(size_t)u * t.D + l] = v;
            }
    }
}

struct Mat {
    std::vector<uint16_t> d;
    int r = 0, c = 0;
};

Mat madd(const KernelCtx& kc, Mat a, const Mat& b) {
    vec_add(kc, a.d.data(), b.d.data(), a.d.size());
    return a;
}

Mat msub(const KernelCtx& kc, Mat a, const Mat& b) {
    vec_sub(kc, a.d.data(), b.d.data(), a.d.size());
    return a;
}

// quadrant (qi, qj) of a, zero-padded to hr x hc
Mat quad(const Mat& a, int qi, int qj, int hr, int hc) {
    Mat o;
    o.r = hr;
    o.c = hc;
    o.d.assign((size_t)hr * hc, 0);
    for (int i = 0; i < hr; i++) {
        int si = qi * hr + i;
        if (si >= a.r) break;
        int len = std::min(hc, a.c - qj * hc);
        if (len <= 0) continue;
        std::copy_n(a.d.begin() + (size_t)si * a.c + (size_t)qj * hc, len,
                    o.d.begin() + (size_t)i * hc);
    }
    return o;
}

Mat mul_naive(const KernelCtx& kc, const Mat& a, const Mat& b) {
    Mat o;
    o.r = a.r;
    o.c = b.c;
    o.d.assign((size_t)a.r * b.c, 0);
    gemm_accum(kc, o.d.data(), a.d.data(), b.d.data(), (size_t)a.r, (size_t)a.c, (size_t)b.c);
    return o;
}

Mat mul_strassen(const KernelCtx& kc, const Mat& a, const Mat& b, int threshold) {
    if (a.r <= threshold || a.c <= threshold || b.c <= threshold) return mul_naive(kc, a, b);
    int hr = (a.r + 1) / 2, hm = (a.c + 1) / 2, hc = (b.c + 1) / 2;
    Mat a11 = quad(a, 0, 0, hr, hm), a12 = quad(a, 0, 1, hr, hm);
    Mat a21 = quad(a, 1, 0, hr, hm), a22 = quad(a, 1, 1, hr, hm);
    Mat b11 = quad(b, 0, 0, hm, hc), b12 = quad(b, 0, 1, hm, hc);
    Mat b21 = quad(b, 1, 0, hm, hc), b22 = quad(b, 1, 1, hm, hc);
    Mat m1 = mul_strassen(kc, madd(kc, a11, a22), madd(kc, b11, b22), threshold);
    Mat m2 = mul_strassen(kc, madd(kc, a21, a22), b11, threshold);
    Mat m3 = mul_strassen(kc, a11, msub(kc, b12, b22), threshold);
    Mat m4 = mul_strassen(kc, a22, msub(kc, b21, b11), threshold);
    Mat m5 = mul_strassen(kc, madd(kc, a11, a12), b22, threshold);
    Mat m6 = mul_strassen(kc, msub(kc, a21, a11), madd(kc, b11, b12), threshold);
    Mat m7 = mul_strassen(kc, msub(kc, a12, a22), madd(kc, b21, b22), threshold);
    Mat c11 = madd(kc, msub(kc, madd(kc, m1, m4), m5), m7);
    Mat c12 = madd(kc, m3, m5);
    Mat c21 = madd(kc, m2, m4);
    Mat c22 = madd(kc, madd(kc, msub(kc, m1, m2), m3), m6);
    Mat o;
    o.r = a.r;
    o.c = b.c;
    o.d.assign((size_t)a.r * b.c, 0);
    auto put = [&](const Mat& m, int qi, int qj) {
        for (int i = 0; i < m.r; i++) {
            int di = qi * hr + i;
            if (di >= o.r) break;
            int len = std::min(m.c, o.c - qj * hc);
            if (len <= 0) continue;
            std::copy_n(m.d.begin() + (size_t)i * m.c, len, o.d.begin() + (size_t)di * o.c + (size_t)qj * hc);
        }
    };
    put(c11, 0, 0);
    put(c12, 0, 1);
    put(c21, 1, 0);
    put(c22, 1, 1);
    return o;
}

void check_table_matches(const EvalTable& t, const CodeInstance& C) {
    if (t.q != C.par.q || t.n != C.par.n || t.k != C.par.k)
        throw std::invalid_argument("fastenc: table parameters do not match the code instance");
    if (t.place_digest != C.places.digest)
        throw IntegrityError("fastenc: table place digest does not match the code instance");
}

void u32_vec_write(ByteWriter& w, const std::vector<uint32_t>& v) {
    w.u32((uint32_t)v.size());
    for (uint32_t x : v) w.u32(x);
}

std::vector<uint32_t> u32_vec_read(ByteReader& r) {
    uint32_t n = r.u32();
    std::vector<uint32_t> v(n);
    for (auto& x : v) x = r.u32();
    return v;
}

}  // namespace

EvalTable precompute_tables(const CodeInstance& C) {
    const TowerCtx& T = *C.tower;
    const Gf& kf = T.k();
    EvalTable t;
    t.q = C.par.q;
    t.n = C.par.n;
    t.k = C.par.k;
    t.c = t.n / t.k;
    t.D = (int)ipow(t.q, t.c);
    t.field = kf.spec();
    t.place_digest = C.places.digest;

    uint64_t order = kf.spec().order();
    std::vector<int> aidx(order, -1);
    for (uint32_t e = 0; e < order; e++)
        if (!kf.is_zero(kf.add(kf.pow((uint16_t)e, t.q), (uint16_t)e))) {
            aidx[e] = (int)t.alphas.size();
            t.alphas.push_back((uint16_t)e);
        }
    size_t na = t.alphas.size();

    // place lists at every stage level
    std::vector<PlaceList> pls(t.k + 1);
    for (int i = 1; i <= t.k; i++) pls[i] = code_places(T, i * t.c);
    if (pls[t.k].digest != C.places.digest)
        throw std::logic_error("fastenc: place enumeration is not reproducible");

    t.nc = pls[1].n;
    t.gforms = C.basis->g;
    if ((int)t.gforms.size() != t.D) throw std::logic_error("fastenc: basis size is not q^c");
    t.gev.assign((size_t)t.D * t.nc, 0);
    for (int l = 0; l < t.D; l++)
        for (size_t p = 0; p < t.nc; p++) {
            try {
                t.gev[(size_t)l * t.nc + p] = tf_eval(T, t.gforms[(size_t)l], pls[1].place(p));
            } catch (const std::domain_error&) {
                throw std::logic_error("fastenc: regular basis function has a pole at a code place");
            }
        }

    t.upper.assign(na, {});
    for (size_t p = 0; p < pls[1].n; p++) {
        int a = aidx[pls[1].place(p)[0]];
        if (a < 0) throw std::logic_error("fastenc: place coordinate inside Omega");
        t.upper[(size_t)a].push_back((uint32_t)p);
    }
    for (const auto& g : t.upper)
        if ((int)g.size() != t.D) throw std::logic_error("fastenc: non-uniform bottom fibers at level c");

    t.lv.resize((size_t)t.k);
    for (int i = 1; i <= t.k; i++) {
        auto& L = t.lv[(size_t)i - 1];
        L.lower.assign(na, {});
        L.glue.assign(na, {});
        if (i == 1) {
            for (size_t a = 0; a < na; a++) L.glue[a] = t.upper[a];
            continue;
        }
        const PlaceList& low = pls[i - 1];
        const PlaceList& cur = pls[i];
        size_t lsz = (size_t)ipow(t.q, (i - 1) * t.c);
        std::vector<uint32_t> lpos(low.n), upos(pls[1].n);
        for (size_t p = 0; p < low.n; p++) {
            int a = aidx[low.place(p)[low.level]];
            lpos[p] = (uint32_t)L.lower[(size_t)a].size();
            L.lower[(size_t)a].push_back((uint32_t)p);
        }
        for (const auto& g : L.lower)
            if (g.size() != lsz) throw std::logic_error("fastenc: non-uniform top fibers");
        for (size_t a = 0; a < na; a++)
            for (size_t s = 0; s < t.upper[a].size(); s++) upos[t.upper[a][s]] = (uint32_t)s;
        for (size_t a = 0; a < na; a++) L.glue[a].assign(lsz * (size_t)t.D, UINT32_MAX);
        for (size_t p = 0; p < cur.n; p++) {
            const uint16_t* pc = cur.place(p);
            int a = aidx[pc[low.level]];
            if (a < 0) throw std::logic_error("fastenc: place coordinate inside Omega");
            size_t gl = find_place(low, pc);
            size_t gu = find_place(pls[1], pc + low.level);
            uint32_t& slot = L.glue[(size_t)a][(size_t)lpos[gl] * t.D + upos[gu]];
            if (slot != UINT32_MAX) throw std::logic_error("fastenc: place split is not injective");
            slot = (uint32_t)p;
        }
        for (const auto& g : L.glue)
            for (uint32_t x : g)
                if (x == UINT32_MAX) throw std::logic_error("fastenc: place split is not surjective");
    }

    build_bmats(t);
    return t;
}

std::vector<std::vector<uint16_t>> block_decompose(const std::vector<uint16_t>& w, int D) {
    if (D < 2) throw std::invalid_argument("fastenc: block width must be at least 2");
    size_t len = w.size();
    size_t pw = (size_t)D;
    while (pw < len) pw *= (size_t)D;
    if (len == 0 || pw != len)
        throw std::invalid_argument("fastenc: length is not a positive power of the block width");
    std::vector<std::vector<uint16_t>> out((size_t)D);
    size_t sub = len / (size_t)D;
    for (int l = 0; l < D; l++) {
        out[(size_t)l].resize(sub);
        for (size_t j = 0; j < sub; j++) out[(size_t)l][j] = w[j * (size_t)D + (size_t)l];
    }
    return out;
}

std::vector<uint16_t> matmul(const KernelCtx& kc, const std::vector<uint16_t>& a, int ra, int ca,
                             const std::vector<uint16_t>& b, int cb, MulStrategy strategy,
                             int threshold) {
    if (ra < 0 || ca < 0 || cb < 0 || a.size() != (size_t)ra * ca || b.size() != (size_t)ca * cb)
        throw std::invalid_argument("fastenc: matmul shape mismatch");
    if (strategy == MulStrategy::naive) return mat_mul(kc, a, ra, ca, b, cb);
    if (threshold < 1) throw std::invalid_argument("fastenc: strassen threshold must be positive");
    Mat A{a, ra, ca}, B{b, ca, cb};
    return mul_strassen(kc, A, B, threshold).d;
}

namespace {

// Runs the k stages over W chunks at once.  prev holds W*q^n stage-0
// coefficients, chunk-major with each chunk in child-major (digit-reversed)
// order; the chunk axis folds into the partial-product axis because stage i
// has exactly D children per function.  Output is W*N values, chunk-major.
// Each per-alpha product is computed from the transposed side,
// (q^c x q^c) * (q^c x W q^{n-c}), so the inner kernel loops run along the
// long stacked dimension.
std::vector<uint16_t> stage_pipeline(const KernelCtx& kc, const EvalTable& t,
                                     std::vector<uint16_t> prev, size_t W) {
    size_t na = t.alphas.size();
    int D = t.D;
    long long qn = ipow(t.q, t.n);
    size_t rows = W * (size_t)(qn / D);  // stacked height, constant across stages
    std::vector<uint16_t> At((size_t)D * rows);
    size_t nprev = 0;
    for (int i = 1; i <= t.k; i++) {
        size_t mtot = W * (size_t)ipow(t.q, (t.k - i) * t.c);
        size_t lsz = (i == 1) ? 1 : (size_t)ipow(t.q, (i - 1) * t.c);
        size_t ni = (size_t)ipow(t.q, i * t.c) * na;
        std::vector<uint16_t> out(mtot * ni);
        const auto& maps = t.lv[(size_t)i - 1];
        for (size_t a = 0; a < na; a++) {
            if (i == 1) {
                for (size_t f = 0; f < rows; f++)
                    for (int l = 0; l < D; l++) At[(size_t)l * rows + f] = prev[f * (size_t)D + (size_t)l];
            } else {
                const auto& lowg = maps.lower[a];
                for (size_t f = 0; f < mtot; f++)
                    for (int l = 0; l < D; l++)
                        for (size_t s = 0; s < lsz; s++)
                            At[(size_t)l * rows + f * lsz + s] =
                                prev[(f * (size_t)D + (size_t)l) * nprev + lowg[s]];
            }
            auto Ct = matmul(kc, t.bmat_t[a], D, D, At, (int)rows, MulStrategy::strassen);
            const auto& glue = maps.glue[a];
            for (size_t f = 0; f < mtot; f++)
                for (int u = 0; u < D; u++)
                    for (size_t s = 0; s < lsz; s++)
                        out[f * ni + glue[s * (size_t)D + (size_t)u]] =
                            Ct[(size_t)u * rows + f * lsz + s];
        }
        prev = std::move(out);
        nprev = ni;
    }
    return prev;
}

std::vector<uint16_t> span_encode(const CodeInstance& C, const EvalTable& t,
                                  const std::vector<uint16_t>& v) {
    if (v.empty()) throw std::invalid_argument("fastenc: empty coefficient span");
    const Gf& kf = C.tower->k();
    KernelCtx kc = make_kernel_ctx(kf);
    long long qn = ipow(t.q, t.n);
    size_t chunks = (v.size() + (size_t)qn - 1) / (size_t)qn;
    size_t N = C.places.n;

    std::vector<uint16_t> prev(chunks * (size_t)qn, 0);
    for (size_t r = 0; r < v.size(); r++) {
        size_t s = r / (size_t)qn;
        long long within = (long long)(r % (size_t)qn);
        prev[s * (size_t)qn + (size_t)digit_reverse(within, t.D, t.k)] = v[r];
    }
    std::vector<uint16_t> vals = stage_pipeline(kc, t, std::move(prev), chunks);

    std::vector<uint16_t> out(vals.begin(), vals.begin() + N);
    if (chunks == 1) return out;
    std::vector<uint16_t> x0(N), xp;
    for (size_t p = 0; p < N; p++) x0[p] = C.places.place(p)[0];
    for (size_t s = 1; s < chunks; s++) {
        if (s == 1)
            xp = x0;
        else
            vec_hadamard(kc, xp.data(), xp.data(), x0.data(), N);
        vec_hadamard_accum(kc, out.data(), xp.data(), vals.data() + s * N, N);
    }
    return out;
}

}  // namespace

std::vector<uint16_t> matrix_encode(const CodeInstance& C, const EvalTable& t,
                                    const std::vector<uint16_t>& v) {
    check_table_matches(t, C);
    long long qn = ipow(t.q, t.n);
    if ((long long)v.size() != qn) throw std::invalid_argument("fastenc: chunk length must be q^n");
    KernelCtx kc = make_kernel_ctx(C.tower->k());
    std::vector<uint16_t> prev((size_t)qn);
    for (long long r = 0; r < qn; r++) prev[(size_t)digit_reverse(r, t.D, t.k)] = v[(size_t)r];
    return stage_pipeline(kc, t, std::move(prev), 1);
}

std::vector<uint16_t> encode(const CodeInstance& C, const EvalTable& t,
                             const std::vector<uint16_t>& v) {
    table_verify(t, C);
    if ((long long)v.size() != C.par.K) throw std::invalid_argument("fastenc: message length must be K");
    return span_encode(C, t, v);
}

std::vector<uint16_t> encode_span(const CodeInstance& C, const EvalTable& t,
                                  const std::vector<uint16_t>& v) {
    table_verify(t, C);
    return span_encode(C, t, v);
}

std::vector<uint8_t> table_serialize(const EvalTable& t) {
    ByteWriter w;
    w.tag("GSAG");
    w.u32(1);
    w.u32(t.q);
    w.u32((uint32_t)t.n);
    w.u32((uint32_t)t.k);
    w.tag("FLDS");
    t.field.serialize(w);
    w.tag("PLCD");
    w.bytes(t.place_digest.data(), t.place_digest.size());
    w.tag("ALPH");
    w.u16_vec(t.alphas);
    w.tag("BASF");
    w.u32((uint32_t)t.gforms.size());
    for (const Tf& f : t.gforms) tf_serialize(w, f);
    w.tag("GEVL");
    w.u32((uint32_t)t.nc);
    for (uint16_t x : t.gev) w.u16(x);
    w.tag("MAPS");
    for (const auto& L : t.lv) {
        for (size_t a = 0; a < t.alphas.size(); a++) {
            u32_vec_write(w, L.lower[a]);
            u32_vec_write(w, L.glue[a]);
        }
    }
    for (const auto& g : t.upper) u32_vec_write(w, g);
    SectionFile f;
    f.put("GSTB", w.take());
    return f.serialize();
}

EvalTable table_deserialize(const std::vector<uint8_t>& bytes) {
    SectionFile f = SectionFile::deserialize(bytes);
    const std::vector<uint8_t>* body = f.find("GSTB");
    if (!body) throw IntegrityError("fastenc: file has no table section");

    ByteReader r(body->data(), body->size());
    r.expect_tag("GSAG");
    uint32_t ver = r.u32();
    if (ver != 1) throw std::runtime_error("fastenc: unsupported table version");
    EvalTable t;
    t.q = r.u32();
    t.n = (int)r.u32();
    t.k = (int)r.u32();
    if (t.q < 2 || t.n < 1 || t.k < 2 || t.n % t.k != 0)
        throw std::runtime_error("fastenc: malformed table header");
    t.c = t.n / t.k;
    t.D = (int)ipow(t.q, t.c);
    r.expect_tag("FLDS");
    t.field = FieldSpec::deserialize(r);
    r.expect_tag("PLCD");
    r.bytes(t.place_digest.data(), 32);
    r.expect_tag("ALPH");
    t.alphas = r.u16_vec();
    size_t na = (size_t)t.q * t.q - t.q;
    if (t.alphas.size() != na || !std::is_sorted(t.alphas.begin(), t.alphas.end()))
        throw std::runtime_error("fastenc: malformed alpha list");
    r.expect_tag("BASF");
    uint32_t nf = r.u32();
    if ((int)nf != t.D) throw std::runtime_error("fastenc: malformed basis section");
    Gf kf(t.field);
    for (uint32_t i = 0; i < nf; i++) t.gforms.push_back(tf_deserialize(kf, r));
    r.expect_tag("GEVL");
    t.nc = r.u32();
    if (t.nc != (size_t)ipow(t.q, t.c) * na) throw std::runtime_error("fastenc: malformed table dimensions");
    t.gev.resize((size_t)t.D * t.nc);
    for (auto& x : t.gev) x = r.u16();
    r.expect_tag("MAPS");
    t.lv.resize((size_t)t.k);
    for (int i = 1; i <= t.k; i++) {
        auto& L = t.lv[(size_t)i - 1];
        L.lower.resize(na);
        L.glue.resize(na);
        size_t lsz = (i == 1) ? 1 : (size_t)ipow(t.q, (i - 1) * t.c);
        size_t ni = (size_t)ipow(t.q, i * t.c) * na;
        size_t nlow = (size_t)ipow(t.q, (i - 1) * t.c) * na;
        std::vector<uint8_t> seen(ni, 0);
        for (size_t a = 0; a < na; a++) {
            L.lower[a] = u32_vec_read(r);
            L.glue[a] = u32_vec_read(r);
            if (L.lower[a].size() != (i == 1 ? 0 : lsz) || L.glue[a].size() != lsz * (size_t)t.D)
                throw std::runtime_error("fastenc: malformed index maps");
            for (uint32_t x : L.lower[a])
                if (x >= nlow) throw std::runtime_error("fastenc: malformed index maps");
            for (uint32_t x : L.glue[a]) {
                if (x >= ni || seen[x]) throw std::runtime_error("fastenc: index maps are not a bijection");
                seen[x] = 1;
            }
        }
    }
    t.upper.resize(na);
    for (size_t a = 0; a < na; a++) {
        t.upper[a] = u32_vec_read(r);
        if (t.upper[a].size() != (size_t)t.D) throw std::runtime_error("fastenc: malformed index maps");
        for (uint32_t x : t.upper[a])
            if (x >= t.nc) throw std::runtime_error("fastenc: malformed index maps");
    }
    if (!r.at_end()) throw std::runtime_error("fastenc: trailing bytes in table file");
    build_bmats(t);
    return t;
}

void table_verify(const EvalTable& t, const CodeInstance& C) {
    check_table_matches(t, C);
    if (!(t.field == C.tower->k().spec()))
        throw std::invalid_argument("fastenc: table field does not match the code instance");
    if (t.gforms.size() != C.basis->g.size())
        throw IntegrityError("fastenc: table basis does not match the code instance");
    for (size_t i = 0; i < t.gforms.size(); i++)
        if (!tf_eq(t.gforms[i], C.basis->g[i]))
            throw IntegrityError("fastenc: table basis does not match the code instance");
}

}  // namespace gsc
