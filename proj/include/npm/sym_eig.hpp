#pragma once

#include "npm/matrix.hpp"

namespace npm {

// Eigendecomposition of a symmetric matrix: S = V * diag(values) * V^T with
// V orthogonal and values sorted descending.
struct SymEig {
    Vector values;
    Matrix vectors;
};

// Throws NotSymmetric when ||S - S^T||_F > 1e-10 * ||S||_F.
SymEig sym_eig(const Matrix& s);

// Inverse square root of a symmetric positive-definite matrix. Throws
// NearSingular when the smallest eigenvalue is at or below
// floor_rel * (largest eigenvalue); the result R satisfies R*S*R = I.
Matrix inv_sqrt_spd(const Matrix& s, double floor_rel = 1e-12);

// Positive-semidefinite square root, same guard as inv_sqrt_spd.
Matrix sqrt_spd(const Matrix& s, double floor_rel = 1e-12);

// Largest singular value, computed as sqrt(lambda_max(M^T M)).
double spectral_norm(const Matrix& m);

}  // namespace npm
