#include "dynasplit/cli.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <map>

#include <json.hpp>

#include "dynasplit/csv.hpp"
#include "dynasplit/experiment.hpp"
#include "dynasplit/nsga3.hpp"
#include "dynasplit/rng.hpp"
#include "dynasplit/workload.hpp"

namespace dynasplit::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path prepare_out_dir(const std::string& dir) {
    if (dir.empty()) throw std::invalid_argument("missing --out directory");
    fs::path p(dir);
    fs::create_directories(p);
    return p;
}

void write_manifest(const fs::path& out_dir, json manifest) {
    manifest["tool"] = "dynasplit";
    manifest["manifest_version"] = 1;
    std::ofstream out(out_dir / "manifest.json", std::ios::binary);
    if (!out) throw std::runtime_error("cannot write manifest");
    out << manifest.dump(2) << "\n";
}

int guarded(std::ostream& log, const std::function<void()>& body) {
    try {
        body();
        return kExitOk;
    } catch (const InfeasibleError& e) {
        log << "error: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return kExitBadInput;
    }
}

void write_trials_csv(const fs::path& path, const std::vector<Trial>& trials,
                      const std::string& model_id) {
    csv::Writer w(path.string(), kTrialsCsvTag,
                  "trial,model_id,cpu_freq_ghz,tpu_mode,use_gpu,split_layer,"
                  "latency_ms,energy_j,accuracy");
    for (const auto& t : trials)
        w.row(static_cast<std::int64_t>(t.index), model_id,
              t.config.cpu_freq_ghz, to_string(t.config.tpu_mode),
              t.config.use_gpu ? 1 : 0, t.config.split_layer,
              t.objectives.latency_ms, t.objectives.energy_j,
              t.objectives.accuracy());
}

}  // namespace

int run_enumerate(const EnumerateOptions& opt, std::ostream& log) {
    return guarded(log, [&] {
        const auto profile = load_profile(opt.common.profile_path);
        const auto out = prepare_out_dir(opt.common.out_dir);
        const auto feasible = enumerate(profile.space);

        csv::Writer w((out / "feasible.csv").string(), kSpaceCsvTag,
                      "model_id,cpu_freq_ghz,tpu_mode,use_gpu,split_layer");
        for (const auto& c : feasible)
            w.row(c.model_id, c.cpu_freq_ghz, to_string(c.tpu_mode),
                  c.use_gpu ? 1 : 0, c.split_layer);

        write_manifest(out, {{"subcommand", "enumerate"},
                             {"profile", opt.common.profile_path},
                             {"outputs", {{"feasible", "feasible.csv"}}}});
        log << "model: " << profile.model.model_id << "\n"
            << "raw configurations: " << profile.space.raw_size() << "\n"
            << "feasible configurations: " << feasible.size() << "\n";
    });
}

int run_solve(const SolveOptions& opt, std::ostream& log) {
    return guarded(log, [&] {
        const auto profile = load_profile(opt.common.profile_path);
        const auto out = prepare_out_dir(opt.common.out_dir);

        const std::uint64_t noise_seed = rng::substream(opt.common.seed, "noise");
        const std::uint64_t solver_seed = rng::substream(opt.common.seed, "solver");
        const Evaluator evaluator = [&](const Configuration& c,
                                        std::uint64_t trial_index) {
            return objectives_of(evaluate_trial_indexed(c, profile, opt.n_inferences,
                                                        noise_seed, trial_index));
        };

        SolveResult result;
        if (opt.sampler == "nsga3") {
            NsgaParams params;
            params.population = opt.population;
            params.reference_divisions = opt.reference_divisions;
            params.seed = solver_seed;
            params.budget_fraction = opt.budget;
            params.jobs = opt.common.jobs;
            result = run_nsga3(profile.space, evaluator, params);
        } else if (opt.sampler == "grid") {
            result = grid_search(profile.space, evaluator, opt.budget, solver_seed,
                                 opt.common.jobs);
        } else {
            throw std::invalid_argument("unknown sampler '" + opt.sampler + "'");
        }

        write_trials_csv(out / "trials.csv", result.trials, profile.model.model_id);
        write_front_csv((out / "front.csv").string(), result.front,
                        profile.model.model_id);
        write_manifest(out, {{"subcommand", "solve"},
                             {"profile", opt.common.profile_path},
                             {"seed", opt.common.seed},
                             {"sampler", opt.sampler},
                             {"budget", opt.budget},
                             {"population", opt.population},
                             {"reference_divisions", opt.reference_divisions},
                             {"n_inferences", opt.n_inferences},
                             {"jobs", opt.common.jobs},
                             {"outputs",
                              {{"trials", "trials.csv"}, {"front", "front.csv"}}}});
        log << "sampler: " << opt.sampler << "\n"
            << "trials: " << result.trials.size() << "\n"
            << "front size: " << result.front.size() << "\n";
    });
}

int run_workload(const WorkloadOptions& opt, std::ostream& log) {
    return guarded(log, [&] {
        const auto profile = load_profile(opt.common.profile_path);
        const auto out = prepare_out_dir(opt.common.out_dir);

        WorkloadSpec spec;
        spec.n_requests = opt.n_requests;
        spec.min_ms = profile.workload_bounds.min_ms;
        spec.max_ms = profile.workload_bounds.max_ms;
        spec.seed = rng::substream(opt.common.seed, "workload");
        spec.n_inferences = opt.n_inferences;
        spec.model_id = profile.model.model_id;
        const auto reqs = generate_workload(spec);

        write_workload_csv((out / "workload.csv").string(), reqs);
        write_manifest(out, {{"subcommand", "workload"},
                             {"profile", opt.common.profile_path},
                             {"seed", opt.common.seed},
                             {"requests", opt.n_requests},
                             {"n_inferences", opt.n_inferences},
                             {"outputs", {{"workload", "workload.csv"}}}});
        log << "requests: " << reqs.size() << "\n"
            << "qos bounds: [" << spec.min_ms << ", " << spec.max_ms << "] ms\n";
    });
}

int run_experiment_cmd(const ExperimentCliOptions& opt, std::ostream& log) {
    return guarded(log, [&] {
        const auto profile = load_profile(opt.common.profile_path);
        const auto out = prepare_out_dir(opt.common.out_dir);

        auto front = read_front_csv(opt.front_path);
        sort_front(front);
        const auto workload =
            read_workload_csv(opt.workload_path, profile.model.model_id);

        ExperimentOptions options;
        options.policies = opt.policies;
        options.mode = experiment_mode_from_string(opt.mode);
        options.seed = rng::substream(opt.common.seed, "experiment");
        const auto result = run_experiment(profile, front, workload, options);

        write_decisions_csv((out / "decisions.csv").string(), result.outcomes);
        write_report_csv((out / "report.csv").string(), result.report);
        write_report_json((out / "report.json").string(), result.report);
        write_plot_csv((out / "plotdata.csv").string(), result.outcomes);
        write_manifest(out, {{"subcommand", "experiment"},
                             {"profile", opt.common.profile_path},
                             {"front", opt.front_path},
                             {"workload", opt.workload_path},
                             {"seed", opt.common.seed},
                             {"policies", opt.policies},
                             {"mode", opt.mode},
                             {"outputs",
                              {{"decisions", "decisions.csv"},
                               {"report_csv", "report.csv"},
                               {"report_json", "report.json"},
                               {"plotdata", "plotdata.csv"}}}});
        for (const auto& p : result.report.policies)
            log << p.policy << ": median latency " << p.latency_total_ms.median
                << " ms, median energy " << p.energy_total_j.median << " J, "
                << p.violations << "/" << p.n_requests << " violations\n";
    });
}

int run_report(const ReportCliOptions& opt, std::ostream& log) {
    return guarded(log, [&] {
        const auto outcomes = read_decisions_csv(opt.decisions_path);
        // Rebuild the request list from the decisions themselves.
        std::map<std::int64_t, double> qos;
        for (const auto& o : outcomes) qos[o.request_id] = o.qos_ms;
        std::vector<Request> workload;
        for (const auto& [id, q] : qos) workload.push_back(Request{id, q, 1, ""});
        const auto report = summarize(outcomes, workload);

        const auto out = prepare_out_dir(opt.out_dir);
        write_report_csv((out / "report.csv").string(), report);
        write_plot_csv((out / "plotdata.csv").string(), outcomes);
        write_manifest(out, {{"subcommand", "report"},
                             {"decisions", opt.decisions_path},
                             {"outputs",
                              {{"report_csv", "report.csv"},
                               {"plotdata", "plotdata.csv"}}}});

        for (const auto& p : report.policies) {
            log << p.policy << ": n=" << p.n_requests << "\n"
                << "  latency ms   min/q1/med/q3/max: " << p.latency_total_ms.min
                << "/" << p.latency_total_ms.q1 << "/" << p.latency_total_ms.median
                << "/" << p.latency_total_ms.q3 << "/" << p.latency_total_ms.max
                << "\n"
                << "  energy J     min/q1/med/q3/max: " << p.energy_total_j.min
                << "/" << p.energy_total_j.q1 << "/" << p.energy_total_j.median
                << "/" << p.energy_total_j.q3 << "/" << p.energy_total_j.max << "\n"
                << "  violations: " << p.violations << " ("
                << 100.0 * p.violation_rate << "%)"
                << "  decisions edge/split/cloud: " << p.n_edge << "/" << p.n_split
                << "/" << p.n_cloud << "\n";
        }
    });
}

}  // namespace dynasplit::cli
