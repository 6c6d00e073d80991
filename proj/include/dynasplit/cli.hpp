#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace dynasplit::cli {

// Exit codes, documented in the binary's help text.
inline constexpr int kExitOk = 0;
inline constexpr int kExitBadInput = 2;
inline constexpr int kExitInfeasible = 3;

struct CommonOptions {
    std::string profile_path;
    std::uint64_t seed = 0;
    std::string out_dir;
    int jobs = 1;
};

struct EnumerateOptions {
    CommonOptions common;
};

struct SolveOptions {
    CommonOptions common;
    std::string sampler = "nsga3";  // "nsga3" | "grid"
    double budget = 0.20;
    int population = 32;
    int reference_divisions = 6;
    int n_inferences = 1000;
};

struct WorkloadOptions {
    CommonOptions common;
    int n_requests = 50;
    int n_inferences = 1000;
};

struct ExperimentCliOptions {
    CommonOptions common;
    std::string front_path;
    std::string workload_path;
    std::vector<std::string> policies = {"dynasplit", "cloud", "edge", "latency",
                                         "energy"};
    std::string mode = "simulate";  // "simulate" | "replay"
};

struct ReportCliOptions {
    std::string decisions_path;
    std::string out_dir;
};

inline constexpr const char* kTrialsCsvTag = "dynasplit trials v1";
inline constexpr const char* kSpaceCsvTag = "dynasplit space v1";

// Each command writes its outputs plus a manifest.json into --out; any result
// is reproducible from the manifest alone. Progress goes to `log`.
int run_enumerate(const EnumerateOptions& opt, std::ostream& log);
int run_solve(const SolveOptions& opt, std::ostream& log);
int run_workload(const WorkloadOptions& opt, std::ostream& log);
int run_experiment_cmd(const ExperimentCliOptions& opt, std::ostream& log);
int run_report(const ReportCliOptions& opt, std::ostream& log);

}  // namespace dynasplit::cli
