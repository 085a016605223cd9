#pragma once

#include <cstdint>
#include <utility>

#include "npm/iteration.hpp"
#include "npm/matrix.hpp"
#include "npm/stiefel.hpp"

namespace npm {

// Discrete-time LTI system x[k+1] = A x[k] + B u[k], y[k] = C x[k].
struct LtiSystem {
    Matrix a;  // n x n
    Matrix b;  // n x m
    Matrix c;  // p x n

    LtiSystem(Matrix a_, Matrix b_, Matrix c_);

    Index n() const { return a.rows(); }
    Index inputs() const { return b.cols(); }
    Index outputs() const { return c.rows(); }
};

// Blocks of [Ur, Ur_perp]^T A [Ur, Ur_perp]. At an invariant Ur the lower
// left block vanishes and the spectrum splits across a_u and a_perp.
struct BlockForm {
    Matrix a_u;       // r x r
    Matrix coupling;  // r x (n-r)
    Matrix a_perp;    // (n-r) x (n-r)
    double lower_residual = 0.0;  // ||Ur_perp^T A Ur||_2, equals oja_residual
};

BlockForm similarity_block_form(const Matrix& a, const StiefelFrame& ur);

// Right and left dominant r-subspaces with their cross Gramian Vr^T Ur,
// which must stay invertible for the oblique projections below.
struct DualSubspaces {
    StiefelFrame ur;    // dominant subspace of A
    StiefelFrame vr;    // dominant subspace of A^T
    Matrix cross_gram;  // Vr^T Ur
    double sigma_min = 0.0;
    bool ur_converged = false;
    bool vr_converged = false;
};

// Extracts both subspaces by independent seeded runs on A and A^T. Throws
// CrossGramSingular when the smallest singular value of Vr^T Ur drops to
// 1e-10 or below; non-convergence is reported through the flags.
DualSubspaces dual_subspaces(const Matrix& a, Index r, const NpmConfig& cfg,
                             std::uint64_t seed);

// Distance between the projector of u_perp and the projector of the
// (n-r)-dominant subspace of A^{-T}, extracted by a fixed-seed run. Near 0
// confirms that the complement of a dominant right subspace spans the minor
// left subspace. Throws NearSingular when A is not invertible.
double minor_left_subspace_check(const Matrix& a, const StiefelFrame& u_perp,
                                 const NpmConfig& cfg = {});

// Finite-horizon Gramians: sum_{i=0}^{N-1} A^i B B^T (A^T)^i and
// sum_{i=0}^{N-1} (A^T)^i C^T C A^i. Exact sums, no stability assumption.
Matrix reachability_gramian(const Matrix& a, const Matrix& b, Index horizon);
Matrix observability_gramian(const Matrix& a, const Matrix& c, Index horizon);

// Residuals of the Gramian projection identities at frames (Ur from A,
// Vr from A^T), both sums taken at horizon n:
//   obs:   || Ur^T W_o(A, C) Ur - W_o(Ur^T A Ur, C Ur) ||_2
//   reach: || Vr^T W_r(A, B) Vr - W_r(Vr^T A Vr, Vr^T B) ||_2
// Zero at exactly invariant frames.
struct GramianResiduals {
    double obs_residual = 0.0;
    double reach_residual = 0.0;
};

GramianResiduals gramian_projection_residual(const LtiSystem& sys, const StiefelFrame& ur,
                                             const StiefelFrame& vr);

enum class ReducedBasis { USide, VSide };

struct ReducedRealization {
    Matrix ar;  // r x r
    Matrix br;  // r x m
    Matrix cr;  // p x r
    ReducedBasis basis;
};

// The two oblique-projection realizations
//   U-side: ( Ur^T A Ur, (Vr^T Ur)^{-1} Vr^T B, C Ur )
//   V-side: ( Vr^T A Vr, Vr^T B, C Ur (Vr^T Ur)^{-1} )
// which share one transfer function. Throws CrossGramSingular when the
// cross Gramian is too ill conditioned to invert.
std::pair<ReducedRealization, ReducedRealization> reduced_models(const LtiSystem& sys,
                                                                 const DualSubspaces& duals);

// C (zI - A)^{-1} B. Throws ResolventSingular when z sits on the spectrum.
ComplexMatrix transfer_function_eval(const Matrix& a, const Matrix& b, const Matrix& c,
                                     Complex z);

// Dimension of the Krylov span [B, AB, ..., A^{n-1}B] (reachable subspace);
// the dual form measures observability via (A^T, C^T).
Index staircase_rank(const Matrix& a, const Matrix& b);
Index staircase_rank_dual(const Matrix& a, const Matrix& c);

}  // namespace npm
