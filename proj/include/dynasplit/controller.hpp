#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dynasplit/cost_model.hpp"
#include "dynasplit/pareto.hpp"
#include "dynasplit/profile.hpp"
#include "dynasplit/workload.hpp"

#include <stdexcept>

namespace dynasplit {

/// A request that cannot be served at all (empty front, or a baseline the
/// model does not admit). Mapped to its own CLI exit code.
struct InfeasibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class DecisionClass { EdgeOnly, CloudOnly, Split };
const char* to_string(DecisionClass d);
DecisionClass decision_class(const Configuration& c, int layer_count);

/// Outcome of scheduling one request.
struct ScheduleDecision {
    std::int64_t request_id = 0;
    Configuration config;
    DecisionClass klass = DecisionClass::Split;
    double predicted_latency_ms = 0.0;  // front values
    double predicted_energy_j = 0.0;
    double selection_ms = 0.0;
    double apply_ms = 0.0;
    bool qos_satisfiable = true;  // false when the fallback branch fired
};

struct SelectResult {
    std::size_t index = 0;        // position in the sorted front
    std::size_t scanned = 0;      // entries visited by the linear scan
    bool satisfies_qos = false;   // false -> fastest-available fallback
};

/// Algorithm "Request Scheduling and Configuration": the first front entry
/// (energy-ascending) whose latency fits the deadline; otherwise the fastest
/// entry, keeping the earliest-scanned one on latency ties. O(n) scan.
SelectResult select_configuration(double qos_ms, const ParetoFront& sorted_front);

/// Reconfiguration cost in milliseconds; only settings that differ from the
/// previously applied configuration are charged. Added to the wall-clock
/// ledger, never to the per-inference latency metric.
double apply_configuration(const std::optional<Configuration>& prev,
                           const Configuration& next, const DeviceProfile& dp,
                           int layer_count, rng::Stream& rng);

/// Simulated duration of the selection scan itself.
double selection_overhead_ms(std::size_t scanned, const DeviceProfile& dp,
                             rng::Stream& rng);

struct ControllerState {
    std::optional<Configuration> current;
};

/// Full request cycle: select, apply, evaluate against the emulator, update
/// controller state.
std::pair<ScheduleDecision, Observation> execute_request(
    const Request& r, const ParetoFront& sorted_front, const Profile& profile,
    ControllerState& state, std::uint64_t noise_seed, std::uint64_t trial_index,
    rng::Stream& overhead_rng);

enum class BaselinePolicy { CloudOnly, EdgeOnly, Fastest, EnergySaving };
const char* to_string(BaselinePolicy p);
BaselinePolicy baseline_from_string(const std::string& s);

/// The four static comparison policies of the evaluation. EdgeOnly throws
/// when the model admits no feasible edge-only configuration.
Configuration baseline_policy(BaselinePolicy kind, const ParetoFront& sorted_front,
                              const SearchSpace& s, bool tpu_supported);

}  // namespace dynasplit
