#pragma once

#include <optional>
#include <vector>

#include "npm/matrix.hpp"
#include "npm/stiefel.hpp"

namespace npm {

// Knobs for the iterative drivers. The step itself has no tuning; the
// stopping rule watches successive projectors because frames need not
// converge even when the subspace does.
struct NpmConfig {
    Index max_iter = 10000;
    double projector_tol = 1e-12;  // stop when ||P[k+1] - P[k]||_F drops below
    double z_floor = 1e-12;        // relative eigenvalue floor for Z^{-1/2}
};

enum class NpmVariant { Plain, Stationary };

// Orthogonal projector with a declared rank. Validates symmetry,
// idempotence, and trace at construction.
class SubspaceProjector {
  public:
    SubspaceProjector(Matrix p, Index rank);

    static SubspaceProjector from_frame(const StiefelFrame& u);

    const Matrix& matrix() const { return p_; }
    Index rank() const { return rank_; }
    Index n() const { return p_.rows(); }

  private:
    Matrix p_;
    Index rank_;
};

struct NpmRunReport {
    StiefelFrame final_frame;
    Index iterations = 0;
    bool converged = false;
    // One entry per iteration: ||P[k] - P[k-1]||_F.
    std::vector<double> projector_delta_history;
    // One entry per iteration when a reference was given: ||P[k] - P_ref||_2.
    std::vector<double> distance_history;
};

// One subspace iteration U -> A U (U^T A^T A U)^{-1/2}. Output stays on the
// Stiefel manifold; throws NearSingular when A U loses column rank relative
// to z_floor.
StiefelFrame npm_step(const Matrix& a, const StiefelFrame& u, double z_floor = 1e-12);

// Variant that right-multiplies the plain step by the orthogonal factor
// W = (U^T A^T U U^T A U)^{-1/2} (U^T A^T U). Same span and projector as the
// plain step, but invariant frames become exact fixed points. Additionally
// needs U^T A U invertible above z_floor.
StiefelFrame npm_stationary_step(const Matrix& a, const StiefelFrame& u,
                                 double z_floor = 1e-12);

// Iterates the chosen step until projector stagnation or max_iter. A
// NearSingular raised by a step is rethrown with the iteration index.
NpmRunReport npm_run(const Matrix& a, const StiefelFrame& u0, const NpmConfig& cfg = {},
                     NpmVariant variant = NpmVariant::Plain,
                     const std::optional<SubspaceProjector>& reference = std::nullopt);

// Same driver on an r x r projected matrix with an r x m frame, m < r.
// Composing the host frame with the final small frame lands in a dominant
// m-subspace of the original matrix.
NpmRunReport reduced_npm_run(const Matrix& a_proj, const StiefelFrame& u0,
                             const NpmConfig& cfg = {});

// ||U U^T - P_ref||_2; in [0, 1] when ranks match.
double subspace_distance(const StiefelFrame& u, const SubspaceProjector& ref);

// ||U U^T - P_ref U U^T P_ref||_2; zero iff span(U) lies inside range(P_ref).
// Tracks containment when rank(U) < rank(P_ref), where subspace_distance
// cannot reach zero.
double partial_overlap_distance(const StiefelFrame& u, const SubspaceProjector& ref);

// A_U = U^T A U. At a converged dominant frame its spectrum equals the
// dominant eigenvalues of A.
Matrix projected_matrix(const Matrix& a, const StiefelFrame& u);

// ||(I - U U^T) A U||_2: zero exactly on invariant subspaces, insensitive to
// rotations within the span.
double oja_residual(const Matrix& a, const StiefelFrame& u);

struct DomainRankCheck {
    bool member = false;    // true iff sigma_min > 1e-10
    double sigma_min = 0.0; // smallest singular value of the top m x r block
};

// Expands U in the eigenbasis of A (dominant-first) and checks that the top
// m x r coefficient block has full column rank, i.e. U is inside the domain
// of attraction of the dominant m-subspace.
DomainRankCheck domain_rank_check(const Matrix& a, const StiefelFrame& u, Index m);

// Geometric decay ratio of a positive sequence fitted over [lo, hi]: exp of
// the mean log-ratio of consecutive in-window samples. Throws ShapeError when
// the window captures nothing.
double geometric_rate(const std::vector<double>& h, double lo = 1e-10, double hi = 1e-2);

}  // namespace npm
