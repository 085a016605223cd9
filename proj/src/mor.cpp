#include "npm/mor.hpp"

#include <Eigen/LU>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "npm/errors.hpp"
#include "npm/rng.hpp"
#include "npm/sym_eig.hpp"

namespace npm {

LtiSystem::LtiSystem(Matrix a_, Matrix b_, Matrix c_)
    : a(std::move(a_)), b(std::move(b_)), c(std::move(c_)) {
    require_finite(a, "LtiSystem.A");
    require_finite(b, "LtiSystem.B");
    require_finite(c, "LtiSystem.C");
    if (a.rows() != a.cols()) throw ShapeError("LtiSystem: A not square");
    if (b.rows() != a.rows()) throw ShapeError("LtiSystem: B row count mismatch");
    if (c.cols() != a.rows()) throw ShapeError("LtiSystem: C column count mismatch");
}

BlockForm similarity_block_form(const Matrix& a, const StiefelFrame& ur) {
    require_finite(a, "similarity_block_form");
    if (a.rows() != a.cols() || a.rows() != ur.n())
        throw ShapeError("similarity_block_form: shape mismatch");
    if (ur.r() >= ur.n())
        throw ShapeError("similarity_block_form: complement is empty");

    const StiefelFrame perp = orthonormal_complement(ur);
    BlockForm out;
    out.a_u = ur.matrix().transpose() * a * ur.matrix();
    out.coupling = ur.matrix().transpose() * a * perp.matrix();
    out.a_perp = perp.matrix().transpose() * a * perp.matrix();
    out.lower_residual = spectral_norm(perp.matrix().transpose() * a * ur.matrix());
    return out;
}

DualSubspaces dual_subspaces(const Matrix& a, Index r, const NpmConfig& cfg,
                             std::uint64_t seed) {
    require_finite(a, "dual_subspaces");
    if (a.rows() != a.cols()) throw ShapeError("dual_subspaces: matrix not square");
    if (r < 1 || r > a.rows()) throw ShapeError("dual_subspaces: rank out of range");

    Rng rng(seed);
    const std::uint64_t seed_u = rng.raw();
    const std::uint64_t seed_v = rng.raw();

    NpmRunReport right = npm_run(a, random_stiefel(a.rows(), r, seed_u), cfg);
    NpmRunReport left = npm_run(Matrix(a.transpose()), random_stiefel(a.rows(), r, seed_v), cfg);

    Matrix gram = left.final_frame.matrix().transpose() * right.final_frame.matrix();
    Eigen::JacobiSVD<Matrix> svd(gram);
    const double sigma_min = svd.singularValues().minCoeff();
    if (sigma_min <= 1e-10)
        throw CrossGramSingular("dual_subspaces: cross Gramian singular (sigma_min " +
                                std::to_string(sigma_min) + ")");

    return DualSubspaces{std::move(right.final_frame), std::move(left.final_frame),
                         std::move(gram), sigma_min, right.converged, left.converged};
}

double minor_left_subspace_check(const Matrix& a, const StiefelFrame& u_perp,
                                 const NpmConfig& cfg) {
    require_finite(a, "minor_left_subspace_check");
    if (a.rows() != a.cols() || a.rows() != u_perp.n())
        throw ShapeError("minor_left_subspace_check: shape mismatch");

    Eigen::FullPivLU<Matrix> lu(a);
    if (!lu.isInvertible())
        throw NearSingular("minor_left_subspace_check: matrix is singular");
    const Matrix a_inv_t = lu.inverse().transpose();

    constexpr std::uint64_t kProbeSeed = 1;
    NpmRunReport rep =
        npm_run(a_inv_t, random_stiefel(a.rows(), u_perp.r(), kProbeSeed), cfg);
    return subspace_distance(u_perp, SubspaceProjector::from_frame(rep.final_frame));
}

Matrix reachability_gramian(const Matrix& a, const Matrix& b, Index horizon) {
    require_finite(a, "reachability_gramian");
    require_finite(b, "reachability_gramian");
    if (a.rows() != a.cols() || b.rows() != a.rows())
        throw ShapeError("reachability_gramian: shape mismatch");
    if (horizon < 1) throw ShapeError("reachability_gramian: horizon must be positive");

    Matrix w = Matrix::Zero(a.rows(), a.rows());
    Matrix term = b;
    for (Index i = 0; i < horizon; ++i) {
        w += term * term.transpose();
        term = a * term;
    }
    return Matrix(0.5 * (w + w.transpose()));
}

Matrix observability_gramian(const Matrix& a, const Matrix& c, Index horizon) {
    require_finite(c, "observability_gramian");
    if (c.cols() != a.rows())
        throw ShapeError("observability_gramian: shape mismatch");
    return reachability_gramian(Matrix(a.transpose()), Matrix(c.transpose()), horizon);
}

GramianResiduals gramian_projection_residual(const LtiSystem& sys, const StiefelFrame& ur,
                                             const StiefelFrame& vr) {
    if (ur.n() != sys.n() || vr.n() != sys.n())
        throw ShapeError("gramian_projection_residual: frame size mismatch");
    const Index horizon = sys.n();

    const Matrix a_u = ur.matrix().transpose() * sys.a * ur.matrix();
    const Matrix c_u = sys.c * ur.matrix();
    const Matrix wo = observability_gramian(sys.a, sys.c, horizon);
    const Matrix wo_red = observability_gramian(a_u, c_u, horizon);

    const Matrix a_v = vr.matrix().transpose() * sys.a * vr.matrix();
    const Matrix b_v = vr.matrix().transpose() * sys.b;
    const Matrix wr = reachability_gramian(sys.a, sys.b, horizon);
    const Matrix wr_red = reachability_gramian(a_v, b_v, horizon);

    GramianResiduals out;
    out.obs_residual =
        spectral_norm(ur.matrix().transpose() * wo * ur.matrix() - wo_red);
    out.reach_residual =
        spectral_norm(vr.matrix().transpose() * wr * vr.matrix() - wr_red);
    return out;
}

std::pair<ReducedRealization, ReducedRealization> reduced_models(
    const LtiSystem& sys, const DualSubspaces& duals) {
    if (duals.ur.n() != sys.n())
        throw ShapeError("reduced_models: frame size mismatch");

    Eigen::JacobiSVD<Matrix> svd(duals.cross_gram);
    if (svd.singularValues().minCoeff() <= 1e-10)
        throw CrossGramSingular("reduced_models: cross Gramian singular");

    const Matrix& u = duals.ur.matrix();
    const Matrix& v = duals.vr.matrix();
    Eigen::FullPivLU<Matrix> lu(duals.cross_gram);

    ReducedRealization uside{u.transpose() * sys.a * u,
                             lu.solve(v.transpose() * sys.b), sys.c * u,
                             ReducedBasis::USide};
    // C U (V^T U)^{-1} solved through the transposed system.
    Eigen::FullPivLU<Matrix> lut(Matrix(duals.cross_gram.transpose()));
    ReducedRealization vside{v.transpose() * sys.a * v, v.transpose() * sys.b,
                             lut.solve(Matrix((sys.c * u).transpose())).transpose(),
                             ReducedBasis::VSide};
    return {std::move(uside), std::move(vside)};
}

ComplexMatrix transfer_function_eval(const Matrix& a, const Matrix& b, const Matrix& c,
                                     Complex z) {
    require_finite(a, "transfer_function_eval");
    if (a.rows() != a.cols() || b.rows() != a.rows() || c.cols() != a.rows())
        throw ShapeError("transfer_function_eval: shape mismatch");

    ComplexMatrix resolvent =
        z * ComplexMatrix::Identity(a.rows(), a.rows()) - a.cast<Complex>();
    Eigen::FullPivLU<ComplexMatrix> lu(resolvent);
    if (!lu.isInvertible())
        throw ResolventSingular("transfer_function_eval: z is an eigenvalue");
    return c.cast<Complex>() * lu.solve(b.cast<Complex>());
}

Index staircase_rank(const Matrix& a, const Matrix& b) {
    require_finite(a, "staircase_rank");
    require_finite(b, "staircase_rank");
    if (a.rows() != a.cols() || b.rows() != a.rows())
        throw ShapeError("staircase_rank: shape mismatch");

    const Index n = a.rows();
    Matrix krylov(n, n * b.cols());
    Matrix term = b;
    for (Index i = 0; i < n; ++i) {
        krylov.middleCols(i * b.cols(), b.cols()) = term;
        term = a * term;
    }
    Eigen::ColPivHouseholderQR<Matrix> qr(krylov);
    qr.setThreshold(1e-10);
    return qr.rank();
}

Index staircase_rank_dual(const Matrix& a, const Matrix& c) {
    return staircase_rank(Matrix(a.transpose()), Matrix(c.transpose()));
}

}  // namespace npm
