#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "dynasplit/cli.hpp"
#include "dynasplit/csv.hpp"
#include "dynasplit/experiment.hpp"
#include "dynasplit/nsga3.hpp"
#include "dynasplit/workload.hpp"
#include "helpers.hpp"

using namespace dynasplit;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name)
        : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str(const std::string& sub = "") const {
        return (sub.empty() ? path : path / sub).string();
    }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("enumerate writes counts, the feasible list and a manifest") {
    TempDir dir("ds_cli_enum");
    cli::EnumerateOptions opt;
    opt.common.profile_path = testutil::vgg_profile_path();
    opt.common.out_dir = dir.str();
    std::ostringstream log;
    CHECK(cli::run_enumerate(opt, log) == cli::kExitOk);
    CHECK(log.str().find("raw configurations: 966") != std::string::npos);
    CHECK(log.str().find("feasible configurations: 917") != std::string::npos);
    const auto table = csv::read(dir.str("feasible.csv"), cli::kSpaceCsvTag);
    CHECK(table.rows.size() == 917);
    CHECK(fs::exists(dir.str("manifest.json")));
}

TEST_CASE("solve: budget bookkeeping for both samplers") {
    TempDir dir("ds_cli_solve");
    cli::SolveOptions opt;
    opt.common.profile_path = testutil::vgg_profile_path();
    opt.common.seed = 3;
    opt.common.out_dir = dir.str("nsga");
    opt.n_inferences = 50;  // keep the smoke test quick
    std::ostringstream log;
    REQUIRE(cli::run_solve(opt, log) == cli::kExitOk);
    auto trials = csv::read(dir.str("nsga") + "/trials.csv", cli::kTrialsCsvTag);
    CHECK(trials.rows.size() == 184);  // ceil(0.20 * 917)

    opt.sampler = "grid";
    opt.budget = 0.815;
    opt.common.out_dir = dir.str("grid");
    REQUIRE(cli::run_solve(opt, log) == cli::kExitOk);
    trials = csv::read(dir.str("grid") + "/trials.csv", cli::kTrialsCsvTag);
    CHECK(trials.rows.size() == 747);  // the paper's 81.5% search

    opt.sampler = "bogus";
    opt.common.out_dir = dir.str("bad");
    CHECK(cli::run_solve(opt, log) == cli::kExitBadInput);
}

TEST_CASE("workload command writes the bounds from the profile") {
    TempDir dir("ds_cli_wl");
    cli::WorkloadOptions opt;
    opt.common.profile_path = testutil::vit_profile_path();
    opt.common.seed = 9;
    opt.common.out_dir = dir.str();
    opt.n_requests = 64;
    std::ostringstream log;
    REQUIRE(cli::run_workload(opt, log) == cli::kExitOk);
    const auto reqs = read_workload_csv(dir.str("workload.csv"), "vit-like");
    REQUIRE(reqs.size() == 64);
    double lo = 1e300, hi = -1e300;
    for (const auto& r : reqs) {
        lo = std::min(lo, r.qos_ms);
        hi = std::max(hi, r.qos_ms);
    }
    CHECK(lo == 118.8);
    CHECK(hi == 10287.6);
}

TEST_CASE("experiment smoke: five policies, one report per policy") {
    TempDir dir("ds_cli_exp");
    cli::SolveOptions solve;
    solve.common.profile_path = testutil::vgg_profile_path();
    solve.common.seed = 11;
    solve.common.out_dir = dir.str("solve");
    solve.n_inferences = 50;
    std::ostringstream log;
    REQUIRE(cli::run_solve(solve, log) == cli::kExitOk);

    cli::WorkloadOptions wl;
    wl.common.profile_path = testutil::vgg_profile_path();
    wl.common.seed = 11;
    wl.common.out_dir = dir.str("wl");
    wl.n_requests = 20;
    wl.n_inferences = 50;
    REQUIRE(cli::run_workload(wl, log) == cli::kExitOk);

    cli::ExperimentCliOptions ex;
    ex.common.profile_path = testutil::vgg_profile_path();
    ex.common.seed = 11;
    ex.common.out_dir = dir.str("exp");
    ex.front_path = dir.str("solve") + "/front.csv";
    ex.workload_path = dir.str("wl") + "/workload.csv";
    REQUIRE(cli::run_experiment_cmd(ex, log) == cli::kExitOk);

    const auto decisions =
        csv::read(dir.str("exp") + "/decisions.csv", kDecisionsCsvTag);
    CHECK(decisions.rows.size() == 5 * 20);  // five policies, twenty requests
    const auto report = csv::read(dir.str("exp") + "/report.csv", kReportCsvTag);
    std::set<std::string> policies;
    for (const auto& r : report.rows) policies.insert(r[0]);
    CHECK(policies == std::set<std::string>{"dynasplit", "cloud", "edge", "latency",
                                            "energy"});

    // report subcommand consumes the decisions file.
    cli::ReportCliOptions rep;
    rep.decisions_path = dir.str("exp") + "/decisions.csv";
    rep.out_dir = dir.str("rep");
    std::ostringstream rep_log;
    REQUIRE(cli::run_report(rep, rep_log) == cli::kExitOk);
    CHECK(rep_log.str().find("dynasplit") != std::string::npos);
    CHECK(fs::exists(dir.str("rep") + "/plotdata.csv"));
}

TEST_CASE("dynasplit never violates more than the edge baseline") {
    // Property over seeds: dynamic selection can fall back to faster
    // configurations, the static edge baseline cannot.
    const auto vgg = load_profile(testutil::vgg_profile_path());
    const Evaluator eval = [&](const Configuration& c, std::uint64_t t) {
        return objectives_of(evaluate_trial_indexed(c, vgg, 1000, 500, t));
    };
    NsgaParams params;
    params.budget_fraction = 0.20;
    params.seed = 500;
    auto front = run_nsga3(vgg.space, eval, params).front;
    sort_front(front);

    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        WorkloadSpec spec;
        spec.n_requests = 50;
        spec.min_ms = vgg.workload_bounds.min_ms;
        spec.max_ms = vgg.workload_bounds.max_ms;
        spec.seed = rng::substream(seed, "wl");
        spec.model_id = "vgg16-like";
        const auto reqs = generate_workload(spec);

        ExperimentOptions opt;
        opt.policies = {"dynasplit", "edge"};
        opt.mode = ExperimentMode::Simulate;
        opt.seed = seed;
        const auto result = run_experiment(vgg, front, reqs, opt);
        CHECK(result.report.at("dynasplit").violations <=
              result.report.at("edge").violations);
    }
}

TEST_CASE("exit codes: bad input vs infeasible request") {
    TempDir dir("ds_cli_codes");
    std::ostringstream log;

    cli::EnumerateOptions missing;
    missing.common.profile_path = "/no/such/profile";
    missing.common.out_dir = dir.str("x");
    CHECK(cli::run_enumerate(missing, log) == cli::kExitBadInput);

    // Edge baseline on a model with no edge-only configurations - exit 3.
    auto profile_json = slurp(testutil::vgg_profile_path());
    auto j = nlohmann::json::parse(profile_json);
    j["search_space"]["constraints"] = {"no-edge-only"};
    const auto constrained_path = dir.str("constrained.profile");
    {
        std::ofstream out(constrained_path);
        out << j.dump(2);
    }

    cli::SolveOptions solve;
    solve.common.profile_path = constrained_path;
    solve.common.seed = 1;
    solve.common.out_dir = dir.str("solve");
    solve.sampler = "grid";
    solve.budget = 0.05;
    solve.n_inferences = 10;
    REQUIRE(cli::run_solve(solve, log) == cli::kExitOk);

    cli::WorkloadOptions wl;
    wl.common.profile_path = constrained_path;
    wl.common.seed = 1;
    wl.common.out_dir = dir.str("wl");
    wl.n_requests = 5;
    wl.n_inferences = 10;
    REQUIRE(cli::run_workload(wl, log) == cli::kExitOk);

    cli::ExperimentCliOptions ex;
    ex.common.profile_path = constrained_path;
    ex.common.seed = 1;
    ex.common.out_dir = dir.str("exp");
    ex.front_path = dir.str("solve") + "/front.csv";
    ex.workload_path = dir.str("wl") + "/workload.csv";
    ex.policies = {"edge"};
    CHECK(cli::run_experiment_cmd(ex, log) == cli::kExitInfeasible);
}

TEST_CASE("identical options produce byte-identical outputs at any job count") {
    TempDir dir("ds_cli_det");
    auto run = [&](const std::string& sub, int jobs) {
        cli::SolveOptions opt;
        opt.common.profile_path = testutil::vit_profile_path();
        opt.common.seed = 77;
        opt.common.out_dir = dir.str(sub);
        opt.common.jobs = jobs;
        opt.n_inferences = 100;
        std::ostringstream log;
        REQUIRE(cli::run_solve(opt, log) == cli::kExitOk);
    };
    run("a", 1);
    run("b", 1);
    run("c", 4);
    for (const char* f : {"/trials.csv", "/front.csv"}) {
        const auto a = slurp(dir.str("a") + f);
        CHECK(a == slurp(dir.str("b") + f));
        CHECK(a == slurp(dir.str("c") + f));
    }
}
