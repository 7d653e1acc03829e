#include "gsc/linalg.hpp"

#include <stdexcept>

namespace gsc {

std::vector<uint16_t> mat_mul(const KernelCtx& c, const std::vector<uint16_t>& a, int ra, int ca,
                              const std::vector<uint16_t>& b, int cb) {
    if ((int)a.size() != ra * ca || (int)b.size() != ca * cb)
        throw std::invalid_argument("linalg: shape mismatch");
    std::vector<uint16_t> out((size_t)ra * cb, 0);
    gemm_accum(c, out.data(), a.data(), b.data(), ra, ca, cb);
    return out;
}

std::vector<uint16_t> mat_transpose(const std::vector<uint16_t>& a, int rows, int cols) {
    std::vector<uint16_t> out((size_t)rows * cols);
    for (int i = 0; i < rows; i++)
        for (int j = 0; j < cols; j++) out[(size_t)j * rows + i] = a[(size_t)i * cols + j];
    return out;
}

int row_reduce(const KernelCtx& c, std::vector<uint16_t>& m, int rows, int cols,
               std::vector<uint16_t>* t, std::vector<int>* piv) {
    const Gf& k = *c.k;
    if ((int)m.size() != rows * cols) throw std::invalid_argument("linalg: shape mismatch");
    if (t) {
        t->assign((size_t)rows * rows, 0);
        for (int i = 0; i < rows; i++) (*t)[(size_t)i * rows + i] = k.one();
    }
    if (piv) piv->clear();
    auto row = [&](std::vector<uint16_t>& v, int i) { return v.data() + (size_t)i * cols; };
    auto trow = [&](int i) { return t->data() + (size_t)i * rows; };
    int r = 0;
    for (int col = 0; col < cols && r < rows; col++) {
        int p = -1;
        for (int i = r; i < rows; i++)
            if (m[(size_t)i * cols + col]) { p = i; break; }
        if (p < 0) continue;
        if (p != r) {
            std::swap_ranges(row(m, p), row(m, p) + cols, row(m, r));
            if (t) std::swap_ranges(trow(p), trow(p) + rows, trow(r));
        }
        uint16_t inv = k.inv(m[(size_t)r * cols + col]);
        vec_scale(c, row(m, r), inv, row(m, r), cols);
        if (t) vec_scale(c, trow(r), inv, trow(r), rows);
        for (int i = 0; i < rows; i++) {
            if (i == r) continue;
            uint16_t s = m[(size_t)i * cols + col];
            if (!s) continue;
            uint16_t ns = k.neg(s);
            vec_axpy(c, row(m, i), ns, row(m, r), cols);
            if (t) vec_axpy(c, trow(i), ns, trow(r), rows);
        }
        if (piv) piv->push_back(col);
        r++;
    }
    return r;
}

int mat_rank(const KernelCtx& c, std::vector<uint16_t> m, int rows, int cols) {
    return row_reduce(c, m, rows, cols, nullptr, nullptr);
}

int col_reduce(const KernelCtx& c, const std::vector<uint16_t>& a, int rows, int cols,
               std::vector<uint16_t>& t, std::vector<int>& piv) {
    auto mt = mat_transpose(a, rows, cols);
    std::vector<uint16_t> tt;
    int r = row_reduce(c, mt, cols, rows, &tt, &piv);
    t = mat_transpose(tt, cols, cols);
    return r;
}

}  // namespace gsc
