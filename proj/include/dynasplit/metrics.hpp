#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dynasplit/controller.hpp"
#include "dynasplit/pareto.hpp"
#include "dynasplit/workload.hpp"

namespace dynasplit {

/// Distribution summary; quartiles by linear interpolation between closest
/// ranks (the R-7 convention).
struct SummaryStats {
    std::size_t n = 0;
    double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0, mean = 0.0;
};

SummaryStats summarize_values(std::vector<double> values);
double quantile(std::vector<double> sorted_values, double p);

/// One scheduled-and-measured request; the decisions CSV row.
struct RequestOutcome {
    std::string policy;
    std::int64_t request_id = 0;
    double qos_ms = 0.0;
    ScheduleDecision decision;
    Observation observation;

    bool violation() const { return observation.latency.t_total_ms > qos_ms; }
    double exceedance_ms() const {
        return violation() ? observation.latency.t_total_ms - qos_ms : 0.0;
    }
    /// Whole-request wall clock including the reconfiguration overheads that
    /// the per-inference latency metric deliberately excludes.
    double wall_clock_ms() const {
        return decision.selection_ms + decision.apply_ms +
               observation.latency.t_total_ms *
                   static_cast<double>(observation.n_inferences);
    }
};

struct PolicyReport {
    std::string policy;
    std::size_t n_requests = 0;
    SummaryStats latency_total_ms, latency_edge_ms, latency_net_ms, latency_cloud_ms;
    SummaryStats energy_total_j, energy_edge_j, energy_cloud_j;
    SummaryStats accuracy;
    SummaryStats selection_ms, apply_ms, wall_clock_ms;
    std::size_t violations = 0;
    double violation_rate = 0.0;
    SummaryStats exceedance_ms;  // over violating requests only
    std::size_t n_edge = 0, n_split = 0, n_cloud = 0;  // decision-class tallies
};

struct ExperimentReport {
    std::vector<PolicyReport> policies;

    const PolicyReport& at(const std::string& policy) const;
};

/// Aggregates outcomes into the evaluation metrics. Every policy present must
/// carry exactly one outcome per workload request (matching request ids).
ExperimentReport summarize(const std::vector<RequestOutcome>& outcomes,
                           const std::vector<Request>& workload);

/// Stored observations per configuration for trace replay; every
/// configuration used in a replay needs at least five entries.
class ObservationPool {
public:
    void add(const Observation& obs);
    const std::vector<Observation>& at(const Configuration& c) const;
    bool contains(const Configuration& c) const;
    std::size_t size() const { return by_config_.size(); }
    void require_minimum(std::size_t n_min) const;

private:
    std::map<std::tuple<double, int, bool, int>, std::vector<Observation>> by_config_;
};

/// Simulation experiment: schedules each request with the online selection
/// algorithm, then replays a stored observation sampled uniformly from that
/// configuration's pool instead of re-simulating.
std::vector<RequestOutcome> replay_dynasplit(const ObservationPool& pool,
                                             const ParetoFront& sorted_front,
                                             const std::vector<Request>& workload,
                                             std::uint64_t seed, int layer_count);

ExperimentReport replay_simulation(const ObservationPool& pool,
                                   const ParetoFront& sorted_front,
                                   const std::vector<Request>& workload,
                                   std::uint64_t seed, int layer_count);

/// Exact 3-D hypervolume dominated by `front` relative to `reference`
/// (all objectives minimized; every point must lie inside the reference box).
double hypervolume(const std::vector<ObjectiveVector>& front,
                   const ObjectiveVector& reference);

/// Default reference point: (1.05 max latency, 1.05 max energy, 0) over the
/// union of the fronts being compared.
ObjectiveVector hypervolume_reference(const std::vector<const ParetoFront*>& fronts);

inline constexpr const char* kDecisionsCsvTag = "dynasplit decisions v1";
inline constexpr const char* kReportCsvTag = "dynasplit report v1";
inline constexpr const char* kPlotCsvTag = "dynasplit plotdata v1";

void write_decisions_csv(const std::string& path,
                         const std::vector<RequestOutcome>& outcomes);
std::vector<RequestOutcome> read_decisions_csv(const std::string& path);
void write_report_csv(const std::string& path, const ExperimentReport& report);
void write_report_json(const std::string& path, const ExperimentReport& report);
/// Plot-ready long format: one (policy, metric, value) row per request metric.
void write_plot_csv(const std::string& path,
                    const std::vector<RequestOutcome>& outcomes);

}  // namespace dynasplit
