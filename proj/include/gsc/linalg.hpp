#pragma once
// Dense exact linear algebra over a table field: products, rank, and reduced
// row/column echelon forms with recorded transforms.  Matrices are row-major
// uint16 buffers; row operations route through the vector kernels so the
// SIMD paths apply.

#include <cstdint>
#include <vector>

#include "gsc/kernels.hpp"

namespace gsc {

// C (ra x cb) = A (ra x ca) * B (ca x cb)
std::vector<uint16_t> mat_mul(const KernelCtx& c, const std::vector<uint16_t>& a, int ra, int ca,
                              const std::vector<uint16_t>& b, int cb);

std::vector<uint16_t> mat_transpose(const std::vector<uint16_t>& a, int rows, int cols);

// In-place reduced row echelon.  Returns the rank r.  When t is non-null it
// accumulates the left transform (rows x rows, t * input = reduced m); when
// piv is non-null it gets the pivot column of each of the first r rows.
int row_reduce(const KernelCtx& c, std::vector<uint16_t>& m, int rows, int cols,
               std::vector<uint16_t>* t, std::vector<int>* piv);

int mat_rank(const KernelCtx& c, std::vector<uint16_t> m, int rows, int cols);

// Reduced column echelon of a (rows x cols); the input is left untouched.
// Fills t (cols x cols, invertible) so that in a*t column j < r has a pivot 1
// at row piv[j] and is the only nonzero in that row, and columns >= r vanish.
int col_reduce(const KernelCtx& c, const std::vector<uint16_t>& a, int rows, int cols,
               std::vector<uint16_t>& t, std::vector<int>& piv);

}  // namespace gsc
