#pragma once

#include <Eigen/Dense>

#include <complex>

#include "npm/errors.hpp"

namespace npm {

// Dense real matrices/vectors carry all numeric data in this library.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using Index = Eigen::Index;

inline bool is_finite(const Matrix& m) { return m.allFinite(); }

// Throws ShapeError for empty matrices and NearSingular-free validation of
// entries; every constructor-like boundary (IO, domain types) funnels here.
inline void require_finite(const Matrix& m, const char* what) {
    if (m.rows() < 1 || m.cols() < 1) {
        throw ShapeError(std::string(what) + ": matrix must be at least 1x1");
    }
    if (!m.allFinite()) {
        throw ShapeError(std::string(what) + ": non-finite entry");
    }
}

inline double frobenius_norm(const Matrix& m) { return m.norm(); }

inline bool is_symmetric(const Matrix& m, double rel_tol = 1e-10) {
    if (m.rows() != m.cols()) return false;
    const double scale = m.norm();
    return (m - m.transpose()).norm() <= rel_tol * (scale > 0.0 ? scale : 1.0);
}

}  // namespace npm
