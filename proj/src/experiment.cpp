#include "dynasplit/experiment.hpp"

#include <algorithm>
#include <stdexcept>

#include "dynasplit/rng.hpp"

namespace dynasplit {

const char* to_string(ExperimentMode m) {
    return m == ExperimentMode::Simulate ? "simulate" : "replay";
}

ExperimentMode experiment_mode_from_string(const std::string& s) {
    if (s == "simulate") return ExperimentMode::Simulate;
    if (s == "replay") return ExperimentMode::Replay;
    throw std::invalid_argument("unknown experiment mode '" + s + "'");
}

ObservationPool build_observation_pool(const Profile& profile,
                                       const std::vector<Configuration>& configs,
                                       int n_inferences, int n_observations,
                                       std::uint64_t seed) {
    const std::uint64_t pool_seed = rng::substream(seed, "pool");
    ObservationPool pool;
    std::uint64_t trial = 0;
    for (const auto& c : configs)
        for (int i = 0; i < n_observations; ++i)
            pool.add(evaluate_trial_indexed(c, profile, n_inferences, pool_seed,
                                            trial++));
    return pool;
}

namespace {

std::optional<Configuration> policy_config(const std::string& policy,
                                           const ParetoFront& front,
                                           const Profile& profile) {
    if (policy == kPolicyDynasplit) return std::nullopt;
    return baseline_policy(baseline_from_string(policy), front, profile.space,
                           profile.model.tpu_supported);
}

RequestOutcome make_outcome(const std::string& policy, const Request& req,
                            const ScheduleDecision& d, const Observation& obs) {
    RequestOutcome o;
    o.policy = policy;
    o.request_id = req.request_id;
    o.qos_ms = req.qos_ms;
    o.decision = d;
    o.observation = obs;
    return o;
}

/// Simulate mode: every request exercises the emulator end to end.
std::vector<RequestOutcome> simulate_policy(const std::string& policy,
                                            const Profile& profile,
                                            const ParetoFront& front,
                                            const std::vector<Request>& workload,
                                            std::uint64_t seed) {
    const std::uint64_t noise_seed = rng::substream(seed, "noise/" + policy);
    rng::Stream overhead_rng(rng::substream(seed, "overhead/" + policy));
    const auto fixed = policy_config(policy, front, profile);

    std::vector<RequestOutcome> out;
    out.reserve(workload.size());
    ControllerState state;
    std::uint64_t trial = 0;
    for (const auto& req : workload) {
        if (!fixed) {
            auto [d, obs] = execute_request(req, front, profile, state, noise_seed,
                                            trial++, overhead_rng);
            out.push_back(make_outcome(policy, req, d, obs));
            continue;
        }
        ScheduleDecision d;
        d.request_id = req.request_id;
        d.config = *fixed;
        d.klass = decision_class(*fixed, profile.model.layer_count);
        const auto predicted = noiseless_latency(*fixed, profile.model, profile.device);
        d.predicted_latency_ms = predicted.t_total_ms;
        const auto trace =
            simulate_power_trace(*fixed, profile.model, profile.device, predicted);
        d.predicted_energy_j = trace.timeline.edge_power.exact_integral_j() +
                               trace.timeline.cloud_power.exact_integral_j();
        d.apply_ms = apply_configuration(state.current, *fixed, profile.device,
                                         profile.model.layer_count, overhead_rng);
        state.current = *fixed;
        const auto obs = evaluate_trial_indexed(*fixed, profile, req.n_inferences,
                                                noise_seed, trial++);
        out.push_back(make_outcome(policy, req, d, obs));
    }
    return out;
}

/// Replay mode: decisions are made normally, observations come from the pool.
std::vector<RequestOutcome> replay_policy(const std::string& policy,
                                          const Profile& profile,
                                          const ParetoFront& front,
                                          const std::vector<Request>& workload,
                                          const ObservationPool& pool,
                                          std::uint64_t seed) {
    if (policy == kPolicyDynasplit)
        return replay_dynasplit(pool, front, workload, seed,
                                profile.model.layer_count);

    const auto fixed = *policy_config(policy, front, profile);
    rng::Stream rng(rng::substream(seed, "replay/" + policy));
    const auto& candidates = pool.at(fixed);
    std::vector<RequestOutcome> out;
    out.reserve(workload.size());
    for (const auto& req : workload) {
        ScheduleDecision d;
        d.request_id = req.request_id;
        d.config = fixed;
        d.klass = decision_class(fixed, profile.model.layer_count);
        d.predicted_latency_ms = candidates.front().latency.t_total_ms;
        d.predicted_energy_j = candidates.front().energy_total_j;
        const auto& obs = candidates[rng.uniform_index(candidates.size())];
        out.push_back(make_outcome(policy, req, d, obs));
    }
    return out;
}

}  // namespace

ExperimentResult run_experiment(const Profile& profile,
                                const ParetoFront& sorted_front,
                                const std::vector<Request>& workload,
                                const ExperimentOptions& options) {
    if (workload.empty()) throw std::invalid_argument("experiment: empty workload");

    ObservationPool pool;
    if (options.mode == ExperimentMode::Replay) {
        // Pool covers every front configuration plus each baseline in play.
        std::vector<Configuration> needed;
        for (const auto& e : sorted_front) needed.push_back(e.config);
        for (const auto& policy : options.policies)
            if (auto c = policy_config(policy, sorted_front, profile))
                if (std::find(needed.begin(), needed.end(), *c) == needed.end())
                    needed.push_back(*c);
        pool = build_observation_pool(profile, needed, workload.front().n_inferences,
                                      options.pool_observations, options.seed);
    }

    ExperimentResult result;
    for (const auto& policy : options.policies) {
        auto recs = options.mode == ExperimentMode::Simulate
                        ? simulate_policy(policy, profile, sorted_front, workload,
                                          options.seed)
                        : replay_policy(policy, profile, sorted_front, workload,
                                        pool, options.seed);
        result.outcomes.insert(result.outcomes.end(), recs.begin(), recs.end());
    }
    result.report = summarize(result.outcomes, workload);
    return result;
}

}  // namespace dynasplit
