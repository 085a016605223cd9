#include "npm/stiefel.hpp"

#include <Eigen/QR>

#include "npm/rng.hpp"
#include "npm/sym_eig.hpp"

namespace npm {

StiefelFrame::StiefelFrame(Matrix u) : u_(std::move(u)) {
    require_finite(u_, "StiefelFrame");
    if (u_.rows() < u_.cols()) {
        throw ShapeError("StiefelFrame: need n >= r");
    }
    const Index r = u_.cols();
    const double defect = (u_.transpose() * u_ - Matrix::Identity(r, r)).norm();
    if (defect > kOrthoTol) {
        throw NotOrthonormal("StiefelFrame: columns not orthonormal (defect " +
                             std::to_string(defect) + ")");
    }
}

StiefelFrame StiefelFrame::orthonormalized(const Matrix& m) {
    require_finite(m, "StiefelFrame::orthonormalized");
    const Index r = m.cols();
    // Polar iteration: one pass leaves a defect ~ cond(M)^2 * eps, so badly
    // conditioned full-rank inputs need another round. Each pass squares the
    // defect; rank deficiency is caught by the first inverse square root.
    Matrix u = m * inv_sqrt_spd(Matrix(m.transpose() * m));
    for (int pass = 0; pass < 3; ++pass) {
        const Matrix gram = u.transpose() * u;
        if ((gram - Matrix::Identity(r, r)).norm() <= 1e-13) break;
        u = u * inv_sqrt_spd(gram);
    }
    return StiefelFrame(std::move(u));
}

StiefelFrame random_stiefel(Index n, Index r, std::uint64_t seed) {
    if (n < r || r < 1) throw ShapeError("random_stiefel: need n >= r >= 1");
    Rng rng(seed);
    return StiefelFrame::orthonormalized(rng.gaussian_matrix(n, r));
}

StiefelFrame orthonormal_complement(const StiefelFrame& u) {
    const Index n = u.n();
    const Index r = u.r();
    if (r >= n) throw ShapeError("orthonormal_complement: need r < n");
    // Full Householder QR of U: the trailing n-r columns of Q span the
    // orthogonal complement of range(U).
    Eigen::HouseholderQR<Matrix> qr(u.matrix());
    const Matrix q = qr.householderQ();
    return StiefelFrame(q.rightCols(n - r));
}

}  // namespace npm
