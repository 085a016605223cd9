#include "npm/benchmark.hpp"

#include <cmath>

namespace npm {

Matrix a_alpha(double alpha) {
    Matrix a(3, 3);
    a << 1.0, 1.0, 2.0, 0.0, alpha, 1.0, 0.0, 0.0, -1.0;
    return a;
}

Vector psi1() {
    return Vector::Unit(3, 0);
}

Vector psi2(double alpha) {
    Vector v(3);
    v << 1.0 + 2.0 * alpha, 2.0, -2.0 * (1.0 + alpha);
    return v / std::sqrt(8.0 * alpha * alpha + 12.0 * alpha + 9.0);
}

Vector psi3(double alpha) {
    Vector v(3);
    v << 1.0, alpha - 1.0, 0.0;
    return v / std::sqrt(alpha * alpha - 2.0 * alpha + 2.0);
}

SubspaceProjector dominant_projector(double alpha) {
    Matrix x(3, 2);
    x << psi1(), psi2(alpha);
    return SubspaceProjector::from_frame(StiefelFrame::orthonormalized(x));
}

StiefelFrame start_frame_r2(double alpha) {
    Matrix x(3, 2);
    x.col(0) = psi1() + psi2(alpha) + psi3(alpha);
    x.col(1) = psi2(alpha) + psi3(alpha);
    return StiefelFrame::orthonormalized(x);
}

StiefelFrame start_frame_r1(double alpha) {
    Vector x = psi1() + psi2(alpha) + psi3(alpha);
    return StiefelFrame(x / x.norm());
}

StiefelFrame start_frame_r1_weak(double alpha) {
    Vector x = 0.1 * psi1() + psi2(alpha) + psi3(alpha);
    return StiefelFrame(x / x.norm());
}

}  // namespace npm
