#include <iostream>

#include <CLI11.hpp>

#include "dynasplit/cli.hpp"

namespace {

void add_common(CLI::App* cmd, dynasplit::cli::CommonOptions& opt,
                bool with_seed = true) {
    cmd->add_option("--profile", opt.profile_path, "Model/device profile file")
        ->required();
    cmd->add_option("--out", opt.out_dir, "Output directory")->required();
    if (with_seed)
        cmd->add_option("--seed", opt.seed, "Manifest seed; all randomness derives from it");
    cmd->add_option("--jobs", opt.jobs, "Worker threads for solver evaluations")
        ->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "dynasplit - energy-aware split-inference co-design: offline "
        "multi-objective search plus online QoS-aware scheduling, driven by "
        "calibrated stochastic cost profiles.\n"};
    app.require_subcommand(1);
    app.footer(
        "Exit codes: 0 success, 2 bad input, 3 infeasible request "
        "(e.g. a baseline the model does not admit, or an empty front).");

    dynasplit::cli::EnumerateOptions enum_opt;
    auto* c_enum = app.add_subcommand(
        "enumerate", "List the feasible configuration space and its counts");
    add_common(c_enum, enum_opt.common, /*with_seed=*/false);

    dynasplit::cli::SolveOptions solve_opt;
    auto* c_solve = app.add_subcommand(
        "solve", "Offline phase: explore the space and extract the Pareto front");
    add_common(c_solve, solve_opt.common);
    c_solve->add_option("--sampler", solve_opt.sampler, "nsga3 or grid")
        ->check(CLI::IsMember({"nsga3", "grid"}));
    c_solve->add_option("--budget", solve_opt.budget,
                        "Fraction of the feasible space to evaluate (default 0.20)");
    c_solve->add_option("--population", solve_opt.population, "NSGA-III population");
    c_solve->add_option("--divisions", solve_opt.reference_divisions,
                        "Das-Dennis reference point divisions");
    c_solve->add_option("--inferences", solve_opt.n_inferences,
                        "Inferences averaged per trial (default 1000)");

    dynasplit::cli::WorkloadOptions wl_opt;
    auto* c_wl = app.add_subcommand("workload",
                                    "Generate a QoS request stream (Weibull-scaled)");
    add_common(c_wl, wl_opt.common);
    c_wl->add_option("--requests", wl_opt.n_requests, "Number of requests");
    c_wl->add_option("--inferences", wl_opt.n_inferences,
                     "Inferences per request (default 1000)");

    dynasplit::cli::ExperimentCliOptions ex_opt;
    auto* c_ex = app.add_subcommand(
        "experiment", "Online phase: schedule a workload against a front");
    add_common(c_ex, ex_opt.common);
    c_ex->add_option("--front", ex_opt.front_path, "Front CSV from solve")->required();
    c_ex->add_option("--workload", ex_opt.workload_path, "Workload CSV")->required();
    c_ex->add_option("--policies", ex_opt.policies,
                     "Subset of: dynasplit cloud edge latency energy");
    c_ex->add_option("--mode", ex_opt.mode, "simulate or replay")
        ->check(CLI::IsMember({"simulate", "replay"}));

    dynasplit::cli::ReportCliOptions rep_opt;
    auto* c_rep = app.add_subcommand("report",
                                     "Summarize a decisions CSV into report files");
    c_rep->add_option("--decisions", rep_opt.decisions_path, "Decisions CSV")
        ->required();
    c_rep->add_option("--out", rep_opt.out_dir, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : dynasplit::cli::kExitBadInput;
    }

    if (c_enum->parsed()) return dynasplit::cli::run_enumerate(enum_opt, std::cout);
    if (c_solve->parsed()) return dynasplit::cli::run_solve(solve_opt, std::cout);
    if (c_wl->parsed()) return dynasplit::cli::run_workload(wl_opt, std::cout);
    if (c_ex->parsed()) return dynasplit::cli::run_experiment_cmd(ex_opt, std::cout);
    if (c_rep->parsed()) return dynasplit::cli::run_report(rep_opt, std::cout);
    return dynasplit::cli::kExitBadInput;
}
