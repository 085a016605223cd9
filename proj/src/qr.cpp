#include "npm/qr.hpp"

#include <Eigen/QR>

namespace npm {

ThinQr qr_thin(const Matrix& m) {
    require_finite(m, "qr_thin");
    const Index n = m.rows();
    const Index r = m.cols();
    if (n < r) throw ShapeError("qr_thin: need n >= r");

    Eigen::HouseholderQR<Matrix> qr(m);
    Matrix q = Matrix(qr.householderQ()).leftCols(r);
    Matrix rr = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();

    const double tol = 1e-12 * m.norm();
    for (Index i = 0; i < r; ++i) {
        if (std::abs(rr(i, i)) <= tol) {
            throw RankDeficient("qr_thin: rank-deficient input (R diagonal " +
                                std::to_string(rr(i, i)) + " at " + std::to_string(i) + ")");
        }
        if (rr(i, i) < 0.0) {
            rr.row(i) = -rr.row(i);
            q.col(i) = -q.col(i);
        }
    }
    return ThinQr{StiefelFrame(std::move(q)), std::move(rr)};
}

}  // namespace npm
