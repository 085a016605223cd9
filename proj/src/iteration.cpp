#include "npm/iteration.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <string>

#include "npm/errors.hpp"
#include "npm/general_eig.hpp"
#include "npm/sym_eig.hpp"

namespace npm {

namespace {

void check_conformal(const Matrix& a, const StiefelFrame& u, const char* who) {
    if (a.rows() != a.cols())
        throw ShapeError(std::string(who) + ": matrix not square");
    if (a.cols() != u.n())
        throw ShapeError(std::string(who) + ": frame height does not match matrix");
}

}  // namespace

SubspaceProjector::SubspaceProjector(Matrix p, Index rank)
    : p_(std::move(p)), rank_(rank) {
    require_finite(p_, "SubspaceProjector");
    if (p_.rows() != p_.cols())
        throw ShapeError("SubspaceProjector: matrix not square");
    if (rank_ < 0 || rank_ > p_.rows())
        throw ShapeError("SubspaceProjector: rank out of range");
    if ((p_ - p_.transpose()).norm() > 1e-10)
        throw NotSymmetric("SubspaceProjector: matrix not symmetric");
    if ((p_ * p_ - p_).norm() > 1e-9)
        throw ShapeError("SubspaceProjector: matrix not idempotent");
    if (std::abs(p_.trace() - static_cast<double>(rank_)) > 1e-8)
        throw ShapeError("SubspaceProjector: trace does not match rank");
}

SubspaceProjector SubspaceProjector::from_frame(const StiefelFrame& u) {
    return SubspaceProjector(u.matrix() * u.matrix().transpose(), u.r());
}

StiefelFrame npm_step(const Matrix& a, const StiefelFrame& u, double z_floor) {
    require_finite(a, "npm_step");
    check_conformal(a, u, "npm_step");
    const Matrix au = a * u.matrix();
    const Matrix z = au.transpose() * au;
    // The polar pass below squares away the residual defect that a poorly
    // conditioned Z leaves behind; the span is unchanged.
    return StiefelFrame::orthonormalized(Matrix(au * inv_sqrt_spd(z, z_floor)));
}

StiefelFrame npm_stationary_step(const Matrix& a, const StiefelFrame& u, double z_floor) {
    require_finite(a, "npm_stationary_step");
    check_conformal(a, u, "npm_stationary_step");
    const Matrix au = a * u.matrix();
    const Matrix z = au.transpose() * au;
    const Matrix a_u = u.matrix().transpose() * au;
    // W = (A_U^T A_U)^{-1/2} A_U^T is the orthogonal polar factor of A_U^T;
    // it undoes the within-span rotation of the plain step at invariant U.
    const Matrix w = inv_sqrt_spd(Matrix(a_u.transpose() * a_u), z_floor) * a_u.transpose();
    return StiefelFrame::orthonormalized(Matrix(au * inv_sqrt_spd(z, z_floor) * w));
}

NpmRunReport npm_run(const Matrix& a, const StiefelFrame& u0, const NpmConfig& cfg,
                     NpmVariant variant, const std::optional<SubspaceProjector>& reference) {
    if (cfg.max_iter < 1 || cfg.projector_tol <= 0.0 || cfg.z_floor <= 0.0)
        throw ShapeError("npm_run: invalid config");
    require_finite(a, "npm_run");
    check_conformal(a, u0, "npm_run");
    if (reference && reference->n() != u0.n())
        throw ShapeError("npm_run: reference projector size mismatch");

    StiefelFrame u = u0;
    Matrix p_prev = u.matrix() * u.matrix().transpose();
    std::vector<double> deltas;
    std::vector<double> dists;
    bool converged = false;
    Index it = 0;
    while (it < cfg.max_iter) {
        ++it;
        try {
            u = variant == NpmVariant::Plain ? npm_step(a, u, cfg.z_floor)
                                             : npm_stationary_step(a, u, cfg.z_floor);
        } catch (const NearSingular& e) {
            throw NearSingular("npm_run: iteration " + std::to_string(it) + ": " + e.what());
        }
        const Matrix p = u.matrix() * u.matrix().transpose();
        const double delta = (p - p_prev).norm();
        deltas.push_back(delta);
        if (reference) dists.push_back(subspace_distance(u, *reference));
        p_prev = p;
        if (delta <= cfg.projector_tol) {
            converged = true;
            break;
        }
    }
    return NpmRunReport{std::move(u), it, converged, std::move(deltas), std::move(dists)};
}

NpmRunReport reduced_npm_run(const Matrix& a_proj, const StiefelFrame& u0,
                             const NpmConfig& cfg) {
    if (u0.r() >= u0.n())
        throw ShapeError("reduced_npm_run: frame must be strictly thinner than the matrix");
    return npm_run(a_proj, u0, cfg, NpmVariant::Plain, std::nullopt);
}

double subspace_distance(const StiefelFrame& u, const SubspaceProjector& ref) {
    if (u.n() != ref.n()) throw ShapeError("subspace_distance: size mismatch");
    return spectral_norm(u.matrix() * u.matrix().transpose() - ref.matrix());
}

double partial_overlap_distance(const StiefelFrame& u, const SubspaceProjector& ref) {
    if (u.n() != ref.n()) throw ShapeError("partial_overlap_distance: size mismatch");
    const Matrix p = u.matrix() * u.matrix().transpose();
    return spectral_norm(p - ref.matrix() * p * ref.matrix());
}

Matrix projected_matrix(const Matrix& a, const StiefelFrame& u) {
    require_finite(a, "projected_matrix");
    check_conformal(a, u, "projected_matrix");
    return u.matrix().transpose() * a * u.matrix();
}

double oja_residual(const Matrix& a, const StiefelFrame& u) {
    require_finite(a, "oja_residual");
    check_conformal(a, u, "oja_residual");
    const Matrix au = a * u.matrix();
    return spectral_norm(au - u.matrix() * (u.matrix().transpose() * au));
}

DomainRankCheck domain_rank_check(const Matrix& a, const StiefelFrame& u, Index m) {
    require_finite(a, "domain_rank_check");
    check_conformal(a, u, "domain_rank_check");
    if (m < 1 || m > a.rows())
        throw ShapeError("domain_rank_check: m out of range");

    const Spectrum s = general_eig(a);
    const ComplexMatrix k =
        s.vectors.fullPivLu().solve(u.matrix().cast<Complex>());
    const ComplexMatrix top = k.topRows(m);
    Eigen::JacobiSVD<ComplexMatrix> svd(top);

    DomainRankCheck out;
    // rank r needs at least r rows; sigma_r is 0 by convention when m < r.
    out.sigma_min = m >= u.r() ? svd.singularValues().minCoeff() : 0.0;
    out.member = out.sigma_min > 1e-10;
    return out;
}

double geometric_rate(const std::vector<double>& h, double lo, double hi) {
    double sum = 0.0;
    int count = 0;
    for (size_t i = 0; i + 1 < h.size(); ++i) {
        const bool in_window = h[i] >= lo && h[i] <= hi && h[i + 1] >= lo && h[i + 1] <= hi;
        if (in_window && h[i] > 0.0 && h[i + 1] > 0.0) {
            sum += std::log(h[i + 1] / h[i]);
            ++count;
        }
    }
    if (count == 0)
        throw ShapeError("geometric_rate: no consecutive samples inside the fit window");
    return std::exp(sum / count);
}

}  // namespace npm
