#pragma once

#include <vector>

#include "npm/matrix.hpp"

namespace npm {

// Eigenvalues ordered by |lambda| descending (ties broken by descending real
// part, then descending imaginary part) with unit-norm eigenvector columns.
// Complex eigenvalues of real input come in adjacent conjugate pairs with the
// positive-imaginary member first.
struct Spectrum {
    ComplexVector values;
    ComplexMatrix vectors;
    // tie_with_next[i] marks |values[i]| and |values[i+1]| within 1e-9
    // relative of each other; size n-1.
    std::vector<bool> tie_with_next;

    // True when the modulus gap |lambda_m| > |lambda_{m+1}| fails at the cut
    // after the first m eigenvalues (1 <= m < n).
    bool tie_at_cut(Index m) const { return tie_with_next.at(static_cast<size_t>(m - 1)); }
};

// Dense nonsymmetric eigensolver: Householder Hessenberg reduction followed
// by Francis double-shift QR, kept independent of the power-iteration code
// path so it can serve as its oracle. Oracle-scale only (n <= 64).
// Throws EigFailed when the QR iteration does not converge.
Spectrum general_eig(const Matrix& m);

// Real Schur decomposition A = Q T Q^T with T quasi-upper-triangular; the
// building block of general_eig, exposed for tests.
struct RealSchur {
    Matrix t;
    Matrix q;
};
RealSchur real_schur(const Matrix& m);

}  // namespace npm
