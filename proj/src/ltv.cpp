#include "npm/ltv.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

#include <cmath>
#include <string>

#include "npm/benchmark.hpp"
#include "npm/errors.hpp"
#include "npm/general_eig.hpp"
#include "npm/iteration.hpp"
#include "npm/rng.hpp"
#include "npm/stiefel.hpp"

namespace npm {

namespace {

Matrix control_b() {
    Matrix b(3, 1);
    b << 0.0, 0.0, 1.0;
    return b;
}

Matrix control_c() {
    Matrix c(1, 3);
    c << 1.0, 0.0, 0.0;
    return c;
}

void validate(const LtvScenario& scn) {
    if (scn.horizon < 1) throw ShapeError("ltv: horizon must be at least 1");
    if (std::abs(scn.pole_targets[0]) >= 1.0 || std::abs(scn.pole_targets[1]) >= 1.0)
        throw ShapeError("ltv: pole targets must lie inside the unit disk");
    if (scn.npm_iters_per_step < 1)
        throw ShapeError("ltv: need at least one subspace update per step");
    if (scn.npm_warmup_iters < 0) throw ShapeError("ltv: negative warmup");
    if (scn.rank != 2) throw ShapeError("ltv: gain design requires rank 2");
    if (scn.x0.size() != 3 || scn.xhat0.size() != 3)
        throw ShapeError("ltv: state vectors must have dimension 3");
}

// 1x2 gain via Ackermann; caller-side wrappers pick the error type.
Matrix ackermann_2x2(const Matrix& a, const Matrix& b,
                     const std::array<double, 2>& targets, const char* who) {
    require_finite(a, who);
    require_finite(b, who);
    if (a.rows() != 2 || a.cols() != 2 || b.rows() != 2 || b.cols() != 1)
        throw ShapeError(std::string(who) + ": expected a 2x2 pair with one input");

    Matrix ctrb(2, 2);
    ctrb << b, a * b;
    Eigen::JacobiSVD<Matrix> svd(ctrb);
    if (svd.singularValues().minCoeff() <= 1e-10)
        throw Uncontrollable(std::string(who) + ": Krylov matrix singular");

    const double trace = targets[0] + targets[1];
    const double det = targets[0] * targets[1];
    const Matrix phi = a * a - trace * a + det * Matrix::Identity(2, 2);
    // F = e_2^T ctrb^{-1} phi(A), via the transposed system.
    Matrix e2(2, 1);
    e2 << 0.0, 1.0;
    Eigen::PartialPivLU<Matrix> lut(Matrix(ctrb.transpose()));
    const Matrix row = lut.solve(e2).transpose();
    return row * phi;
}

}  // namespace

Matrix rotation_q(Index k, double omega1, double omega2) {
    const double a1 = omega1 * static_cast<double>(k);
    const double a2 = omega2 * static_cast<double>(k);
    Matrix q1(3, 3), q2(3, 3);
    q1 << std::cos(a1), -std::sin(a1), 0.0,
          std::sin(a1),  std::cos(a1), 0.0,
          0.0,           0.0,          1.0;
    q2 << 1.0, 0.0,           0.0,
          0.0, std::cos(a2), -std::sin(a2),
          0.0, std::sin(a2),  std::cos(a2);
    return q1 * q2;
}

Matrix plant_at(const LtvScenario& scn, Index k) {
    const Matrix q = rotation_q(k, scn.omega1, scn.omega2);
    return q.transpose() * a_alpha(scn.alpha) * q;
}

Matrix place_poles_si(const Matrix& a, const Matrix& b,
                      const std::array<double, 2>& targets) {
    return ackermann_2x2(a, b, targets, "place_poles_si");
}

Matrix observer_gain_si(const Matrix& a, const Matrix& c,
                        const std::array<double, 2>& targets) {
    try {
        return ackermann_2x2(Matrix(a.transpose()), Matrix(c.transpose()), targets,
                             "observer_gain_si")
            .transpose();
    } catch (const Uncontrollable& e) {
        throw Unobservable(e.what());
    }
}

TrajectoryLog ltv_simulate(const LtvScenario& scn) {
    validate(scn);
    const Matrix b = control_b();
    const Matrix c = control_c();

    // Oracle dominant planes of A(alpha) and A(alpha)^T; the rotated plant
    // just carries them along: P[k] = Q[k]^T P Q[k].
    const SubspaceProjector right_ref = dominant_projector(scn.alpha);
    const Spectrum left_spec = general_eig(Matrix(a_alpha(scn.alpha).transpose()));
    Matrix left_basis(3, 2);
    left_basis << left_spec.vectors.col(0).real(), left_spec.vectors.col(1).real();
    const SubspaceProjector left_ref =
        SubspaceProjector::from_frame(StiefelFrame::orthonormalized(left_basis));

    // Warm-up on the k = 0 plant from seeded random frames.
    Rng rng(scn.seed);
    StiefelFrame u = random_stiefel(3, scn.rank, rng.raw());
    StiefelFrame v = random_stiefel(3, scn.rank, rng.raw());
    const Matrix a0 = plant_at(scn, 0);
    for (Index i = 0; i < scn.npm_warmup_iters; ++i) {
        u = npm_step(a0, u);
        v = npm_step(Matrix(a0.transpose()), v);
    }

    Vector x = scn.x0;
    Vector xhat = scn.xhat0;
    Matrix l_gain = Matrix::Zero(scn.rank, 1);
    Matrix f_gain = Matrix::Zero(1, scn.rank);

    TrajectoryLog log;
    log.steps.reserve(static_cast<size_t>(scn.horizon));
    for (Index k = 0; k < scn.horizon; ++k) {
        const Matrix ak = plant_at(scn, k);
        try {
            for (Index i = 0; i < scn.npm_iters_per_step; ++i) {
                u = npm_step(ak, u);
                v = npm_step(Matrix(ak.transpose()), v);
            }
        } catch (const NearSingular& e) {
            throw NearSingular("ltv_simulate: step " + std::to_string(k) + ": " + e.what());
        }

        const Matrix a_u = u.matrix().transpose() * ak * u.matrix();
        const Matrix c_u = c * u.matrix();
        const Matrix a_v = v.matrix().transpose() * ak * v.matrix();
        const Matrix b_v = v.matrix().transpose() * b;

        bool held = false;
        try {
            const Matrix l_new = observer_gain_si(a_u, c_u, scn.pole_targets);
            const Matrix f_new = place_poles_si(a_v, b_v, scn.pole_targets);
            l_gain = l_new;
            f_gain = f_new;
        } catch (const Error&) {
            held = true;  // keep previous gains
        }

        // The placed matrix is A_V - B_V F, so the stabilizing input enters
        // with a negative sign.
        const double uk = -(f_gain * (v.matrix().transpose() * xhat))(0, 0);

        const Matrix q = rotation_q(k, scn.omega1, scn.omega2);
        TrajectoryStep step;
        step.k = k;
        step.norm_x = x.norm();
        step.norm_err = (x - xhat).norm();
        step.u = uk;
        step.dist_u = subspace_distance(
            u, SubspaceProjector(q.transpose() * right_ref.matrix() * q, 2));
        step.dist_v = subspace_distance(
            v, SubspaceProjector(q.transpose() * left_ref.matrix() * q, 2));
        step.gain_held = held;
        step.l = l_gain;
        step.f = f_gain;
        log.steps.push_back(std::move(step));

        const double y = (c * x)(0, 0);
        const double yhat = (c * xhat)(0, 0);
        const Vector x_next = ak * x + b * uk;
        const Vector xhat_next =
            ak * xhat + b * uk + u.matrix() * l_gain * (y - yhat);
        x = x_next;
        xhat = xhat_next;
    }
    return log;
}

}  // namespace npm
