#pragma once

#include <cstdint>

#include "npm/matrix.hpp"

namespace npm {

// An n x r matrix with orthonormal columns (an element of St(r, n)).
// Orthonormality ||U^T U - I||_F <= kOrthoTol is checked at construction.
class StiefelFrame {
  public:
    static constexpr double kOrthoTol = 1e-10;

    explicit StiefelFrame(Matrix u);

    // Polar retraction M (M^T M)^{-1/2}; throws NearSingular when M is
    // numerically rank deficient.
    static StiefelFrame orthonormalized(const Matrix& m);

    const Matrix& matrix() const { return u_; }
    Index n() const { return u_.rows(); }
    Index r() const { return u_.cols(); }

    double orthonormality_defect() const {
        const Index r = u_.cols();
        return (u_.transpose() * u_ - Matrix::Identity(r, r)).norm();
    }

  private:
    Matrix u_;
};

// Haar-ish frame from orthonormalizing a standard-Gaussian matrix drawn from
// Rng(seed); bit-identical output per (n, r, seed).
StiefelFrame random_stiefel(Index n, Index r, std::uint64_t seed);

// Frame whose columns complete U to an orthogonal basis: [U, U_perp] is
// orthogonal and U_perp U_perp^T = I - U U^T.
StiefelFrame orthonormal_complement(const StiefelFrame& u);

}  // namespace npm
