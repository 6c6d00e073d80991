#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dynasplit/metrics.hpp"
#include "dynasplit/profile.hpp"

namespace dynasplit {

enum class ExperimentMode { Simulate, Replay };
const char* to_string(ExperimentMode m);
ExperimentMode experiment_mode_from_string(const std::string& s);

inline constexpr const char* kPolicyDynasplit = "dynasplit";

struct ExperimentOptions {
    std::vector<std::string> policies = {"dynasplit", "cloud", "edge", "latency",
                                         "energy"};
    ExperimentMode mode = ExperimentMode::Simulate;
    std::uint64_t seed = 0;
    int pool_observations = 5;  // per configuration, replay mode
};

struct ExperimentResult {
    std::vector<RequestOutcome> outcomes;  // all policies, request order
    ExperimentReport report;
};

/// Evaluates each configuration `n_observations` times; the replay pool of
/// the offline phase.
ObservationPool build_observation_pool(const Profile& profile,
                                       const std::vector<Configuration>& configs,
                                       int n_inferences, int n_observations,
                                       std::uint64_t seed);

/// Processes the workload strictly sequentially for every requested policy.
/// Simulate mode drives the cost-model emulator per request; replay mode
/// samples stored observations instead. The front must already be sorted.
ExperimentResult run_experiment(const Profile& profile,
                                const ParetoFront& sorted_front,
                                const std::vector<Request>& workload,
                                const ExperimentOptions& options);

}  // namespace dynasplit
