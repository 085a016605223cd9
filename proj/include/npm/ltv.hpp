#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "npm/matrix.hpp"

namespace npm {

// Slowly rotating plant A[k] = Q[k]^T A(alpha) Q[k] with an observer-based
// low-rank controller: the estimator is injected through U[k] L[k] and the
// input is fed back from V[k]^T x_hat, where U[k], V[k] track the dominant
// 2-subspaces of A[k] and A[k]^T by one (or more) subspace-iteration steps
// per sample.
struct LtvScenario {
    double alpha = 0.0;
    double omega1 = 0.01;  // rotation rate in the (1,2) plane, rad/step
    double omega2 = 0.03;  // rotation rate in the (2,3) plane, rad/step
    Index horizon = 500;
    std::array<double, 2> pole_targets{0.5, 0.7};
    Vector x0 = Vector::Ones(3);
    Vector xhat0 = Vector::Zero(3);
    std::uint64_t seed = 0;
    Index npm_warmup_iters = 200;  // iterations on A[0] before k = 0
    Index npm_iters_per_step = 1;
    Index rank = 2;  // tracked subspace dimension; the gain design is 2x2
};

struct TrajectoryStep {
    Index k = 0;
    double norm_x = 0.0;
    double norm_err = 0.0;  // ||x - x_hat||
    double u = 0.0;
    double dist_u = 0.0;  // U[k] vs the dominant subspace of A[k]
    double dist_v = 0.0;  // V[k] vs the dominant subspace of A[k]^T
    bool gain_held = false;  // placement failed here; previous gains reused
    Matrix l;  // observer gain in effect, rank x 1
    Matrix f;  // feedback gain in effect, 1 x rank
};

struct TrajectoryLog {
    std::vector<TrajectoryStep> steps;
};

// Product of Givens rotations in the (1,2) and (2,3) planes with angles
// omega1*k and omega2*k. Orthogonal; identity at k = 0.
Matrix rotation_q(Index k, double omega1, double omega2);

// Q[k]^T A(alpha) Q[k]; spectrum {1, alpha, -1} at every k.
Matrix plant_at(const LtvScenario& scn, Index k);

// Single-input Ackermann pole placement on a 2x2 pair: returns the 1x2 gain
// F with charpoly(A - B F) = (z - t0)(z - t1). Throws Uncontrollable when
// [B, AB] is singular below 1e-10.
Matrix place_poles_si(const Matrix& a, const Matrix& b,
                      const std::array<double, 2>& targets);

// Dual construction: 2x1 gain L with charpoly(A - L C) = (z - t0)(z - t1).
// Throws Unobservable when [C; CA] is singular below 1e-10.
Matrix observer_gain_si(const Matrix& a, const Matrix& c,
                        const std::array<double, 2>& targets);

// Runs the closed loop over the scenario horizon. Gains are re-placed each
// step on the compressed pairs; a placement failure holds the previous gain
// and flags the record instead of aborting. NearSingular from the subspace
// update is rethrown with the step index.
TrajectoryLog ltv_simulate(const LtvScenario& scn);

}  // namespace npm
