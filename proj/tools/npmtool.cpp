// Command-line front end: seeded experiment runs emitting long-format CSV,
// plus one-shot inspectors for eigenstructure, model reduction, and the
// rotating-plant closed loop. Exit codes: 0 success, 1 failed numerical
// check, 2 usage or file error.

#include <CLI11.hpp>

#include <array>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "npm/errors.hpp"
#include "npm/experiments.hpp"
#include "npm/general_eig.hpp"
#include "npm/io.hpp"
#include "npm/iteration.hpp"
#include "npm/ltv.hpp"
#include "npm/mor.hpp"

namespace {

int cmd_run(npm::ExperimentSpec spec) {
    if (spec.out_path.empty()) spec.out_path = spec.name + ".csv";
    const npm::ExperimentResult result = npm::run_experiment(spec);
    std::cout << "wrote " << spec.out_path << " (" << result.rows.size() << " rows)\n";
    if (!result.checks_passed) {
        std::cout << spec.name << ": at least one check failed\n";
        return 1;
    }
    return 0;
}

int cmd_eig(const std::string& path) {
    const npm::Matrix m = npm::load_matrix(path);
    if (m.rows() != m.cols())
        throw npm::ShapeError(path + ": eigendecomposition needs a square matrix, got " +
                              std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    const npm::Spectrum s = npm::general_eig(m);
    for (npm::Index i = 0; i < s.values.size(); ++i) {
        std::cout << "lambda[" << i << "] = " << npm::format_full(s.values(i).real());
        if (s.values(i).imag() != 0.0)
            std::cout << (s.values(i).imag() > 0 ? " + " : " - ")
                      << npm::format_full(std::abs(s.values(i).imag())) << "i";
        if (i + 1 < s.values.size() && s.tie_with_next[static_cast<size_t>(i)])
            std::cout << "  (modulus tie with next)";
        std::cout << '\n';
    }
    return 0;
}

int cmd_mor(const std::string& path, npm::Index r, std::uint64_t seed) {
    const npm::LtiSystem sys = npm::load_system(path);
    if (r < 1 || r >= sys.n())
        throw npm::ShapeError("mor: r must satisfy 1 <= r < n = " + std::to_string(sys.n()));

    bool ok = true;
    const auto report = [&ok](const std::string& name, double value, bool pass) {
        std::cout << name << " = " << npm::format_full(value) << "  "
                  << (pass ? "pass" : "FAIL") << '\n';
        ok = ok && pass;
    };

    const npm::DualSubspaces duals = npm::dual_subspaces(sys.a, r, npm::NpmConfig{}, seed);
    report("cross_gram_sigma_min", duals.sigma_min,
           duals.ur_converged && duals.vr_converged);
    report("right_invariance_residual",
           npm::similarity_block_form(sys.a, duals.ur).lower_residual, true);
    const npm::GramianResiduals gram =
        npm::gramian_projection_residual(sys, duals.ur, duals.vr);
    report("gramian_obs_residual", gram.obs_residual, gram.obs_residual < 1e-6);
    report("gramian_reach_residual", gram.reach_residual, gram.reach_residual < 1e-6);

    const auto [red_u, red_v] = npm::reduced_models(sys, duals);
    const std::array<npm::Complex, 4> probes{npm::Complex(1.7, 0.3), npm::Complex(-0.4, 1.1),
                                             npm::Complex(2.5, -0.7), npm::Complex(0.3, 0.9)};
    double transfer_gap = 0.0;
    for (const npm::Complex& z : probes) {
        const npm::ComplexMatrix gu =
            npm::transfer_function_eval(red_u.ar, red_u.br, red_u.cr, z);
        const npm::ComplexMatrix gv =
            npm::transfer_function_eval(red_v.ar, red_v.br, red_v.cr, z);
        transfer_gap = std::max(transfer_gap, (gu - gv).norm());
    }
    report("reduced_transfer_gap", transfer_gap, transfer_gap < 1e-7);
    report("reduced_reach_rank", static_cast<double>(npm::staircase_rank(red_u.ar, red_u.br)),
           npm::staircase_rank(red_u.ar, red_u.br) == r);
    report("reduced_obs_rank",
           static_cast<double>(npm::staircase_rank_dual(red_v.ar, red_v.cr)),
           npm::staircase_rank_dual(red_v.ar, red_v.cr) == r);
    return ok ? 0 : 1;
}

int cmd_ltv(double alpha, npm::Index horizon, std::uint64_t seed, const std::string& out) {
    npm::LtvScenario scn;
    scn.alpha = alpha;
    scn.horizon = horizon;
    scn.seed = seed;
    const npm::TrajectoryLog log = npm::ltv_simulate(scn);
    npm::save_trajectory(out, log);
    npm::Index held = 0;
    for (const npm::TrajectoryStep& s : log.steps) held += s.gain_held ? 1 : 0;
    const npm::TrajectoryStep& last = log.steps.back();
    std::cout << "wrote " << out << " (" << log.steps.size() << " steps)\n"
              << "final norm_x = " << npm::format_full(last.norm_x)
              << ", norm_err = " << npm::format_full(last.norm_err) << ", gains held at "
              << held << " steps\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Subspace-iteration experiment runner and inspectors"};
    app.require_subcommand(1);

    npm::ExperimentSpec spec;
    CLI::App* run = app.add_subcommand("run", "Run a named experiment and write its CSV");
    run->add_option("--experiment", spec.name, "Experiment name")
        ->required()
        ->check(CLI::IsMember({"fig1", "fig2", "fig3", "fig3-modified", "fig4", "fig5",
                               "mor-check", "lemma-checks"}));
    run->add_option("--alpha", spec.alphas, "Comma-separated parameter list")
        ->delimiter(',')
        ->capture_default_str();
    run->add_option("--seed", spec.seed, "RNG seed")->capture_default_str();
    run->add_option("--max-iter", spec.max_iter,
                    "Steps to log (0 = per-experiment default: 100 iteration steps, "
                    "500 trajectory steps)")
        ->check(CLI::NonNegativeNumber);
    run->add_option("--out", spec.out_path, "Output CSV path (default <experiment>.csv)");

    std::string matrix_path;
    CLI::App* eig = app.add_subcommand("eig", "Print the spectrum of a matrix file");
    eig->add_option("--matrix", matrix_path, "CSV matrix file")->required();

    std::string system_path;
    npm::Index mor_r = 1;
    std::uint64_t mor_seed = 0;
    CLI::App* mor = app.add_subcommand("mor", "Check the reduction identities on a system");
    mor->add_option("--system", system_path, "System file (A, blank, B, blank, C)")
        ->required();
    mor->add_option("--r", mor_r, "Reduced order")->required()->check(CLI::PositiveNumber);
    mor->add_option("--seed", mor_seed, "RNG seed")->capture_default_str();

    double ltv_alpha = 0.0;
    npm::Index ltv_horizon = 500;
    std::uint64_t ltv_seed = 0;
    std::string ltv_out = "ltv.csv";
    CLI::App* ltv = app.add_subcommand("ltv", "Simulate the rotating-plant closed loop");
    ltv->add_option("--alpha", ltv_alpha, "Plant parameter")->required();
    ltv->add_option("--horizon", ltv_horizon, "Simulation steps")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    ltv->add_option("--seed", ltv_seed, "RNG seed")->capture_default_str();
    ltv->add_option("--out", ltv_out, "Trajectory CSV path")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (run->parsed()) return cmd_run(spec);
        if (eig->parsed()) return cmd_eig(matrix_path);
        if (mor->parsed()) return cmd_mor(system_path, mor_r, mor_seed);
        if (ltv->parsed()) return cmd_ltv(ltv_alpha, ltv_horizon, ltv_seed, ltv_out);
    } catch (const npm::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const npm::ShapeError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
