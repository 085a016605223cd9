#pragma once

#include "npm/stiefel.hpp"

namespace npm {

// Thin QR factorization M = Q R with Q in St(r, n) and R upper triangular
// with non-negative diagonal (the sign convention makes the pair unique for
// full-column-rank M).
struct ThinQr {
    StiefelFrame q;
    Matrix r;
};

// Householder QR; throws RankDeficient when a diagonal of R falls below
// 1e-12 * ||M||_F.
ThinQr qr_thin(const Matrix& m);

}  // namespace npm
