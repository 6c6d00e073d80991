#include "dynasplit/controller.hpp"

#include <algorithm>
#include <stdexcept>

namespace dynasplit {

const char* to_string(DecisionClass d) {
    switch (d) {
        case DecisionClass::EdgeOnly: return "edge";
        case DecisionClass::CloudOnly: return "cloud";
        case DecisionClass::Split: return "split";
    }
    return "?";
}

DecisionClass decision_class(const Configuration& c, int layer_count) {
    if (c.split_layer == 0) return DecisionClass::CloudOnly;
    if (c.split_layer == layer_count) return DecisionClass::EdgeOnly;
    return DecisionClass::Split;
}

SelectResult select_configuration(double qos_ms, const ParetoFront& sorted_front) {
    if (sorted_front.empty())
        throw InfeasibleError("select_configuration: empty front");
    std::size_t fastest = 0;
    for (std::size_t i = 0; i < sorted_front.size(); ++i) {
        if (sorted_front[i].objectives.latency_ms <= qos_ms)
            return SelectResult{i, i + 1, true};
        // Strict '<': equal-latency candidates keep the earlier, more
        // energy-efficient entry.
        if (sorted_front[i].objectives.latency_ms <
            sorted_front[fastest].objectives.latency_ms)
            fastest = i;
    }
    return SelectResult{fastest, sorted_front.size(), false};
}

double selection_overhead_ms(std::size_t scanned, const DeviceProfile& dp,
                             rng::Stream& rng) {
    const auto& m = dp.selection_overhead;
    const double base =
        m.base_ms + m.per_entry_ms * static_cast<double>(scanned);
    return base * rng.lognormal_factor(m.sigma);
}

double apply_configuration(const std::optional<Configuration>& prev,
                           const Configuration& next, const DeviceProfile& dp,
                           int layer_count, rng::Stream& rng) {
    const auto& m = dp.apply_overhead;
    double cost = 0.0;
    const bool fresh = !prev.has_value();
    auto charge = [&](bool changed, double median_ms) {
        if (changed) cost += median_ms * rng.lognormal_factor(m.sigma);
    };
    charge(fresh || prev->cpu_freq_ghz != next.cpu_freq_ghz, m.freq_change_ms);
    charge(fresh || prev->tpu_mode != next.tpu_mode, m.tpu_toggle_ms);
    charge(fresh || prev->split_layer != next.split_layer, m.model_load_ms);
    // Initialization message to the cloud node whenever it participates and
    // the tail or its accelerator assignment changed.
    const bool cloud_involved = next.split_layer < layer_count;
    charge(cloud_involved && (fresh || prev->split_layer != next.split_layer ||
                              prev->use_gpu != next.use_gpu),
           m.cloud_init_ms);
    return cost;
}

std::pair<ScheduleDecision, Observation> execute_request(
    const Request& r, const ParetoFront& sorted_front, const Profile& profile,
    ControllerState& state, std::uint64_t noise_seed, std::uint64_t trial_index,
    rng::Stream& overhead_rng) {
    const auto sel = select_configuration(r.qos_ms, sorted_front);
    const auto& entry = sorted_front[sel.index];

    ScheduleDecision d;
    d.request_id = r.request_id;
    d.config = entry.config;
    d.klass = decision_class(entry.config, profile.model.layer_count);
    d.predicted_latency_ms = entry.objectives.latency_ms;
    d.predicted_energy_j = entry.objectives.energy_j;
    d.selection_ms = selection_overhead_ms(sel.scanned, profile.device, overhead_rng);
    d.apply_ms = apply_configuration(state.current, entry.config, profile.device,
                                     profile.model.layer_count, overhead_rng);
    d.qos_satisfiable = sel.satisfies_qos;
    state.current = entry.config;

    Observation obs = evaluate_trial_indexed(entry.config, profile, r.n_inferences,
                                             noise_seed, trial_index);
    return {d, obs};
}

const char* to_string(BaselinePolicy p) {
    switch (p) {
        case BaselinePolicy::CloudOnly: return "cloud";
        case BaselinePolicy::EdgeOnly: return "edge";
        case BaselinePolicy::Fastest: return "latency";
        case BaselinePolicy::EnergySaving: return "energy";
    }
    return "?";
}

BaselinePolicy baseline_from_string(const std::string& s) {
    if (s == "cloud") return BaselinePolicy::CloudOnly;
    if (s == "edge") return BaselinePolicy::EdgeOnly;
    if (s == "latency") return BaselinePolicy::Fastest;
    if (s == "energy") return BaselinePolicy::EnergySaving;
    throw std::invalid_argument("unknown baseline policy '" + s + "'");
}

Configuration baseline_policy(BaselinePolicy kind, const ParetoFront& sorted_front,
                              const SearchSpace& s, bool tpu_supported) {
    switch (kind) {
        case BaselinePolicy::CloudOnly: {
            Configuration c{*std::max_element(s.cpu_grid.begin(), s.cpu_grid.end()),
                            TpuMode::Off, true, 0, s.model_id};
            if (!is_feasible(c, s))
                throw InfeasibleError("baseline: no feasible cloud-only configuration");
            return c;
        }
        case BaselinePolicy::EdgeOnly: {
            const bool tpu_max_ok =
                tpu_supported &&
                std::find(s.tpu_modes.begin(), s.tpu_modes.end(), TpuMode::Max) !=
                    s.tpu_modes.end() &&
                !s.has_constraint(NamedConstraint::NoTpu);
            Configuration c{*std::max_element(s.cpu_grid.begin(), s.cpu_grid.end()),
                            tpu_max_ok ? TpuMode::Max : TpuMode::Off, false,
                            s.layer_count, s.model_id};
            if (!is_feasible(c, s))
                throw InfeasibleError(
                    "baseline: model admits no edge-only configuration");
            return c;
        }
        case BaselinePolicy::Fastest: {
            if (sorted_front.empty())
                throw InfeasibleError("baseline: empty front");
            std::size_t best = 0;
            for (std::size_t i = 1; i < sorted_front.size(); ++i)
                if (sorted_front[i].objectives.latency_ms <
                    sorted_front[best].objectives.latency_ms)
                    best = i;
            return sorted_front[best].config;
        }
        case BaselinePolicy::EnergySaving: {
            if (sorted_front.empty())
                throw InfeasibleError("baseline: empty front");
            return sorted_front.front().config;
        }
    }
    throw std::logic_error("unreachable");
}

}  // namespace dynasplit
