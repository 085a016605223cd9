#include "npm/sym_eig.hpp"

#include <Eigen/Eigenvalues>

namespace npm {

SymEig sym_eig(const Matrix& s) {
    require_finite(s, "sym_eig");
    if (s.rows() != s.cols()) throw ShapeError("sym_eig: matrix not square");
    const double scale = s.norm() > 0.0 ? s.norm() : 1.0;
    if ((s - s.transpose()).norm() > 1e-10 * scale) {
        throw NotSymmetric("sym_eig: input is not symmetric");
    }

    Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (s + s.transpose()));
    if (solver.info() != Eigen::Success) {
        throw EigFailed("sym_eig: solver did not converge");
    }

    // Eigen returns ascending order; flip to descending.
    const Index n = s.rows();
    SymEig out;
    out.values = solver.eigenvalues().reverse();
    out.vectors = Matrix(n, n);
    for (Index j = 0; j < n; ++j) out.vectors.col(j) = solver.eigenvectors().col(n - 1 - j);
    return out;
}

namespace {

Matrix power_spd(const Matrix& s, double exponent, double floor_rel, const char* what) {
    const SymEig eig = sym_eig(s);
    const double max_eig = eig.values(0);
    const double min_eig = eig.values(eig.values.size() - 1);
    if (max_eig <= 0.0 || min_eig <= floor_rel * max_eig) {
        throw NearSingular(std::string(what) + ": eigenvalue at or below relative floor");
    }
    Vector powered(eig.values.size());
    for (Index i = 0; i < eig.values.size(); ++i) powered(i) = std::pow(eig.values(i), exponent);
    Matrix result = eig.vectors * powered.asDiagonal() * eig.vectors.transpose();
    // Exact symmetry keeps downstream symmetry checks honest.
    return 0.5 * (result + result.transpose());
}

}  // namespace

Matrix inv_sqrt_spd(const Matrix& s, double floor_rel) {
    return power_spd(s, -0.5, floor_rel, "inv_sqrt_spd");
}

Matrix sqrt_spd(const Matrix& s, double floor_rel) {
    return power_spd(s, 0.5, floor_rel, "sqrt_spd");
}

double spectral_norm(const Matrix& m) {
    require_finite(m, "spectral_norm");
    // Gram matrix of the smaller dimension keeps the eigenproblem cheap.
    Matrix gram;
    if (m.rows() >= m.cols()) {
        gram = m.transpose() * m;
    } else {
        gram = m * m.transpose();
    }
    const SymEig eig = sym_eig(0.5 * (gram + gram.transpose()));
    const double top = eig.values(0);
    return top > 0.0 ? std::sqrt(top) : 0.0;
}

}  // namespace npm
