#include "npm/experiments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <tuple>

#include "npm/benchmark.hpp"
#include "npm/errors.hpp"
#include "npm/general_eig.hpp"
#include "npm/io.hpp"
#include "npm/iteration.hpp"
#include "npm/ltv.hpp"
#include "npm/mor.hpp"
#include "npm/qr.hpp"
#include "npm/stiefel.hpp"

namespace npm {

namespace {

constexpr Index kDefaultIterSteps = 100;
constexpr Index kDefaultTrajectorySteps = 500;

// Thresholds for the check families. These gate the verdict rows and the
// process exit status, so they are pinned here rather than configurable.
constexpr double kPsiResidualTol = 1e-12;
constexpr double kEigCrossTol = 1e-9;
constexpr double kInvarianceTol = 1e-6;
constexpr double kFixedPointTol = 1e-9;
constexpr double kMinorLeftTol = 1e-6;
constexpr double kRateRelTol = 0.15;
constexpr double kOneStepTol = 1e-10;
constexpr double kGramianTol = 1e-6;
constexpr double kTransferTol = 1e-7;

struct RowSink {
    std::vector<ExperimentRow> rows;
    bool all_passed = true;

    void value(const std::string& name, double alpha, Index k, double v) {
        rows.push_back({name, alpha, k, v});
    }
    // Residual row at k, verdict row at k+1.
    void check(const std::string& name, double alpha, Index& k, double residual, bool pass) {
        rows.push_back({name, alpha, k++, residual});
        rows.push_back({name, alpha, k++, pass ? 1.0 : 0.0});
        all_passed = all_passed && pass;
    }
};

// fig1: ||U[k]U[k]^T - P12||_2 for the r=2 start, one row per step.
void run_fig1(const ExperimentSpec& spec, Index steps, RowSink& sink) {
    for (double alpha : spec.alphas) {
        const Matrix a = a_alpha(alpha);
        const SubspaceProjector ref = dominant_projector(alpha);
        StiefelFrame u = start_frame_r2(alpha);
        sink.value(spec.name, alpha, 0, subspace_distance(u, ref));
        for (Index k = 1; k <= steps; ++k) {
            u = npm_step(a, u);
            sink.value(spec.name, alpha, k, subspace_distance(u, ref));
        }
    }
}

// fig2: containment distance of the single-vector iterate inside the
// dominant plane, where the full distance cannot reach zero.
void run_fig2(const ExperimentSpec& spec, Index steps, RowSink& sink) {
    for (double alpha : spec.alphas) {
        const Matrix a = a_alpha(alpha);
        const SubspaceProjector ref = dominant_projector(alpha);
        StiefelFrame u = start_frame_r1(alpha);
        sink.value(spec.name, alpha, 0, partial_overlap_distance(u, ref));
        for (Index k = 1; k <= steps; ++k) {
            u = npm_step(a, u);
            sink.value(spec.name, alpha, k, partial_overlap_distance(u, ref));
        }
    }
}

// fig3 family: the compressed scalar u^T A u along the r=1 run. The standard
// start drives it to zero; the weakly loaded start leaves it oscillating.
void run_fig3(const ExperimentSpec& spec, Index steps, bool weak_start, RowSink& sink) {
    for (double alpha : spec.alphas) {
        const Matrix a = a_alpha(alpha);
        StiefelFrame u = weak_start ? start_frame_r1_weak(alpha) : start_frame_r1(alpha);
        sink.value(spec.name, alpha, 0, projected_matrix(a, u)(0, 0));
        for (Index k = 1; k <= steps; ++k) {
            u = npm_step(a, u);
            sink.value(spec.name, alpha, k, projected_matrix(a, u)(0, 0));
        }
    }
}

// fig4/fig5: closed-loop norms from the rotating-plant simulation.
void run_trajectory_fig(const ExperimentSpec& spec, Index steps, bool state_norm,
                        RowSink& sink) {
    for (double alpha : spec.alphas) {
        LtvScenario scn;
        scn.alpha = alpha;
        scn.horizon = steps;
        scn.seed = spec.seed;
        const TrajectoryLog log = ltv_simulate(scn);
        for (const TrajectoryStep& s : log.steps)
            sink.value(spec.name, alpha, s.k, state_norm ? s.norm_x : s.norm_err);
    }
}

// Benchmark triple: the 3x3 family with the single-input/single-output
// boundary used by the rotating-plant controller.
LtiSystem benchmark_system(double alpha) {
    Matrix b(3, 1), c(1, 3);
    b << 0.0, 0.0, 1.0;
    c << 1.0, 0.0, 0.0;
    return LtiSystem(a_alpha(alpha), b, c);
}

// mor-check: model-order-reduction identities on the benchmark triple at
// r = 2. Check pairs per alpha, in k order:
//   0 cross-Gramian sigma_min (pass: both subspace runs converged)
//   1 lower block residual of the right frame under A
//   2 lower block residual of the left frame under A^T
//   3 observability Gramian projection residual
//   4 reachability Gramian projection residual
//   5 worst transfer-function gap between the two reduced realizations
//   6 reachability staircase rank of the right-basis model (pass: = r)
//   7 observability staircase rank of the left-basis model (pass: = r)
void run_mor_check(const ExperimentSpec& spec, RowSink& sink) {
    const Index r = 2;
    for (double alpha : spec.alphas) {
        const LtiSystem sys = benchmark_system(alpha);
        const DualSubspaces duals = dual_subspaces(sys.a, r, NpmConfig{}, spec.seed);
        Index k = 0;
        sink.check(spec.name, alpha, k, duals.sigma_min,
                   duals.ur_converged && duals.vr_converged);
        const double right_res = similarity_block_form(sys.a, duals.ur).lower_residual;
        sink.check(spec.name, alpha, k, right_res, right_res < kInvarianceTol);
        const double left_res =
            similarity_block_form(Matrix(sys.a.transpose()), duals.vr).lower_residual;
        sink.check(spec.name, alpha, k, left_res, left_res < kInvarianceTol);
        const GramianResiduals gram = gramian_projection_residual(sys, duals.ur, duals.vr);
        sink.check(spec.name, alpha, k, gram.obs_residual, gram.obs_residual < kGramianTol);
        sink.check(spec.name, alpha, k, gram.reach_residual,
                   gram.reach_residual < kGramianTol);
        const auto [red_u, red_v] = reduced_models(sys, duals);
        const std::array<Complex, 4> probes{Complex(1.7, 0.3), Complex(-0.4, 1.1),
                                            Complex(2.5, -0.7), Complex(0.3, 0.9)};
        double transfer_gap = 0.0;
        for (const Complex& z : probes) {
            const ComplexMatrix gu = transfer_function_eval(red_u.ar, red_u.br, red_u.cr, z);
            const ComplexMatrix gv = transfer_function_eval(red_v.ar, red_v.br, red_v.cr, z);
            transfer_gap = std::max(transfer_gap, (gu - gv).norm());
        }
        sink.check(spec.name, alpha, k, transfer_gap, transfer_gap < kTransferTol);
        const Index reach_rank = staircase_rank(red_u.ar, red_u.br);
        sink.check(spec.name, alpha, k, static_cast<double>(reach_rank), reach_rank == r);
        const Index obs_rank = staircase_rank_dual(red_v.ar, red_v.cr);
        sink.check(spec.name, alpha, k, static_cast<double>(obs_rank), obs_rank == r);
    }
}

// lemma-checks: eigenstructure and convergence identities on the closed-form
// family. Check pairs per alpha, in k order:
//   0 worst eigenpair residual of the closed-form eigenvectors
//   1 worst eigenvalue gap against the dense solver
//   2 sigma_min of the start frame's dominant coefficient block (pass:
//     inside the domain of attraction)
//   3 lower block residual at the converged r=2 frame
//   4 fixed-point residual of the stationary step at an invariant frame
//   5 complement-vs-inverse-transpose subspace distance (skipped when the
//     matrix is singular, i.e. alpha = 0)
//   6 fitted decay ratio vs alpha (at alpha = 0: first-step distance)
void run_lemma_checks(const ExperimentSpec& spec, RowSink& sink) {
    for (double alpha : spec.alphas) {
        const Matrix a = a_alpha(alpha);
        Index k = 0;

        const std::array<std::pair<Vector, double>, 3> pairs{
            std::pair<Vector, double>{psi1(), 1.0},
            std::pair<Vector, double>{psi2(alpha), -1.0},
            std::pair<Vector, double>{psi3(alpha), alpha}};
        double psi_residual = 0.0;
        for (const auto& [psi, lambda] : pairs)
            psi_residual = std::max(psi_residual, (a * psi - lambda * psi).norm());
        sink.check(spec.name, alpha, k, psi_residual, psi_residual < kPsiResidualTol);

        const Spectrum s = general_eig(a);
        std::array<double, 3> got{s.values(0).real(), s.values(1).real(), s.values(2).real()};
        std::array<double, 3> want{1.0, -1.0, alpha};
        std::sort(got.begin(), got.end());
        std::sort(want.begin(), want.end());
        double eig_gap = s.values.imag().cwiseAbs().maxCoeff();
        for (int i = 0; i < 3; ++i) eig_gap = std::max(eig_gap, std::abs(got[i] - want[i]));
        sink.check(spec.name, alpha, k, eig_gap, eig_gap < kEigCrossTol);

        const DomainRankCheck domain = domain_rank_check(a, start_frame_r2(alpha), 2);
        sink.check(spec.name, alpha, k, domain.sigma_min, domain.member);

        const SubspaceProjector ref = dominant_projector(alpha);
        const NpmRunReport report =
            npm_run(a, start_frame_r2(alpha), NpmConfig{}, NpmVariant::Plain, ref);
        const double lower = similarity_block_form(a, report.final_frame).lower_residual;
        sink.check(spec.name, alpha, k, lower, lower < kInvarianceTol);

        Matrix psi12(3, 2);
        psi12.col(0) = psi1();
        psi12.col(1) = psi2(alpha);
        const StiefelFrame invariant = qr_thin(psi12).q;
        const double fixed_point =
            (npm_stationary_step(a, invariant).matrix() - invariant.matrix()).norm();
        sink.check(spec.name, alpha, k, fixed_point, fixed_point < kFixedPointTol);

        if (std::abs(alpha) > 1e-12) {
            const double minor_left =
                minor_left_subspace_check(a, orthonormal_complement(report.final_frame));
            sink.check(spec.name, alpha, k, minor_left, minor_left < kMinorLeftTol);
        } else {
            k += 2;  // singular matrix: the inverse-transpose run is undefined
        }

        if (std::abs(alpha) > 1e-12) {
            // An empty fit window means the distance never entered the decay
            // band: report the check as failed with a -1 sentinel instead of
            // aborting the whole run.
            double rate = -1.0;
            bool fitted = false;
            try {
                rate = geometric_rate(report.distance_history);
                fitted = true;
            } catch (const ShapeError&) {
            }
            sink.check(spec.name, alpha, k, rate,
                       fitted && std::abs(rate - alpha) <= kRateRelTol * alpha);
        } else {
            const double first = report.distance_history.at(0);
            sink.check(spec.name, alpha, k, first, first <= kOneStepTol);
        }
    }
}

}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec) {
    if (spec.alphas.empty()) throw Error("run_experiment: empty alpha list");
    if (spec.max_iter < 0) throw Error("run_experiment: negative step count");
    const Index iter_steps = spec.max_iter > 0 ? spec.max_iter : kDefaultIterSteps;
    const Index traj_steps = spec.max_iter > 0 ? spec.max_iter : kDefaultTrajectorySteps;

    RowSink sink;
    if (spec.name == "fig1") {
        run_fig1(spec, iter_steps, sink);
    } else if (spec.name == "fig2") {
        run_fig2(spec, iter_steps, sink);
    } else if (spec.name == "fig3") {
        run_fig3(spec, iter_steps, false, sink);
    } else if (spec.name == "fig3-modified") {
        run_fig3(spec, iter_steps, true, sink);
    } else if (spec.name == "fig4") {
        run_trajectory_fig(spec, traj_steps, true, sink);
    } else if (spec.name == "fig5") {
        run_trajectory_fig(spec, traj_steps, false, sink);
    } else if (spec.name == "mor-check") {
        run_mor_check(spec, sink);
    } else if (spec.name == "lemma-checks") {
        run_lemma_checks(spec, sink);
    } else {
        throw Error("run_experiment: unknown experiment '" + spec.name + "'");
    }

    std::stable_sort(sink.rows.begin(), sink.rows.end(),
                     [](const ExperimentRow& x, const ExperimentRow& y) {
                         return std::tie(x.experiment, x.alpha, x.k) <
                                std::tie(y.experiment, y.alpha, y.k);
                     });
    if (!spec.out_path.empty()) save_rows(spec.out_path, sink.rows);
    return ExperimentResult{std::move(sink.rows), sink.all_passed};
}

void save_rows(const std::string& path, const std::vector<ExperimentRow>& rows) {
    std::ofstream out(path);
    if (!out) throw ParseError(path + ": cannot open for writing");
    out << "experiment,alpha,k,value\n";
    char alpha_buf[32];
    for (const ExperimentRow& row : rows) {
        std::snprintf(alpha_buf, sizeof(alpha_buf), "%.12g", row.alpha);
        out << row.experiment << ',' << alpha_buf << ',' << row.k << ','
            << format_full(row.value) << '\n';
    }
    if (!out) throw ParseError(path + ": write failed");
}

}  // namespace npm
