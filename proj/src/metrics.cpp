#include "dynasplit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>
#include <utility>

#include <json.hpp>

#include "dynasplit/csv.hpp"
#include "dynasplit/rng.hpp"

namespace dynasplit {

double quantile(std::vector<double> sorted, double p) {
    if (sorted.empty()) return 0.0;
    if (sorted.size() == 1) return sorted[0];
    const double h = static_cast<double>(sorted.size() - 1) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

SummaryStats summarize_values(std::vector<double> values) {
    SummaryStats s;
    s.n = values.size();
    if (values.empty()) return s;
    std::sort(values.begin(), values.end());
    s.min = values.front();
    s.max = values.back();
    s.q1 = quantile(values, 0.25);
    s.median = quantile(values, 0.5);
    s.q3 = quantile(values, 0.75);
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) /
             static_cast<double>(values.size());
    return s;
}

const PolicyReport& ExperimentReport::at(const std::string& policy) const {
    for (const auto& p : policies)
        if (p.policy == policy) return p;
    throw std::out_of_range("report: no policy '" + policy + "'");
}

ExperimentReport summarize(const std::vector<RequestOutcome>& outcomes,
                           const std::vector<Request>& workload) {
    std::set<std::int64_t> expected;
    for (const auto& r : workload) expected.insert(r.request_id);

    std::map<std::string, std::vector<const RequestOutcome*>> by_policy;
    for (const auto& o : outcomes) by_policy[o.policy].push_back(&o);

    ExperimentReport report;
    for (auto& [policy, recs] : by_policy) {
        std::set<std::int64_t> seen;
        for (const auto* r : recs) seen.insert(r->request_id);
        if (seen != expected || recs.size() != workload.size())
            throw std::invalid_argument("summarize: request ids of policy '" +
                                        policy + "' do not match the workload");

        PolicyReport p;
        p.policy = policy;
        p.n_requests = recs.size();
        auto collect = [&](auto getter) {
            std::vector<double> v;
            v.reserve(recs.size());
            for (const auto* r : recs) v.push_back(getter(*r));
            return summarize_values(std::move(v));
        };
        p.latency_total_ms = collect([](const RequestOutcome& r) {
            return r.observation.latency.t_total_ms; });
        p.latency_edge_ms = collect([](const RequestOutcome& r) {
            return r.observation.latency.t_edge_ms; });
        p.latency_net_ms = collect([](const RequestOutcome& r) {
            return r.observation.latency.t_net_ms; });
        p.latency_cloud_ms = collect([](const RequestOutcome& r) {
            return r.observation.latency.t_cloud_ms; });
        p.energy_total_j = collect([](const RequestOutcome& r) {
            return r.observation.energy_total_j; });
        p.energy_edge_j = collect([](const RequestOutcome& r) {
            return r.observation.energy_edge_j; });
        p.energy_cloud_j = collect([](const RequestOutcome& r) {
            return r.observation.energy_cloud_j; });
        p.accuracy = collect([](const RequestOutcome& r) {
            return r.observation.accuracy; });
        p.selection_ms = collect([](const RequestOutcome& r) {
            return r.decision.selection_ms; });
        p.apply_ms = collect([](const RequestOutcome& r) {
            return r.decision.apply_ms; });
        p.wall_clock_ms = collect([](const RequestOutcome& r) {
            return r.wall_clock_ms(); });

        std::vector<double> exceed;
        for (const auto* r : recs) {
            if (r->violation()) exceed.push_back(r->exceedance_ms());
            switch (r->decision.klass) {
                case DecisionClass::EdgeOnly: ++p.n_edge; break;
                case DecisionClass::Split: ++p.n_split; break;
                case DecisionClass::CloudOnly: ++p.n_cloud; break;
            }
        }
        p.violations = exceed.size();
        p.violation_rate =
            static_cast<double>(p.violations) / static_cast<double>(p.n_requests);
        p.exceedance_ms = summarize_values(std::move(exceed));
        report.policies.push_back(std::move(p));
    }
    return report;
}

void ObservationPool::add(const Observation& obs) {
    by_config_[obs.config.key()].push_back(obs);
}

const std::vector<Observation>& ObservationPool::at(const Configuration& c) const {
    auto it = by_config_.find(c.key());
    if (it == by_config_.end())
        throw std::out_of_range("replay: configuration missing from pool: " +
                                c.describe());
    return it->second;
}

bool ObservationPool::contains(const Configuration& c) const {
    return by_config_.count(c.key()) > 0;
}

void ObservationPool::require_minimum(std::size_t n_min) const {
    for (const auto& [key, obs] : by_config_)
        if (obs.size() < n_min)
            throw std::runtime_error("replay: pool entry with fewer than " +
                                     std::to_string(n_min) + " observations");
}

std::vector<RequestOutcome> replay_dynasplit(const ObservationPool& pool,
                                             const ParetoFront& sorted_front,
                                             const std::vector<Request>& workload,
                                             std::uint64_t seed, int layer_count) {
    pool.require_minimum(5);
    rng::Stream rng(rng::substream(seed, "replay"));
    std::vector<RequestOutcome> out;
    out.reserve(workload.size());
    for (const auto& req : workload) {
        const auto sel = select_configuration(req.qos_ms, sorted_front);
        const auto& entry = sorted_front[sel.index];
        const auto& candidates = pool.at(entry.config);

        RequestOutcome o;
        o.policy = "dynasplit";
        o.request_id = req.request_id;
        o.qos_ms = req.qos_ms;
        o.decision.request_id = req.request_id;
        o.decision.config = entry.config;
        o.decision.klass = decision_class(entry.config, layer_count);
        o.decision.predicted_latency_ms = entry.objectives.latency_ms;
        o.decision.predicted_energy_j = entry.objectives.energy_j;
        o.decision.qos_satisfiable = sel.satisfies_qos;
        o.observation = candidates[rng.uniform_index(candidates.size())];
        out.push_back(std::move(o));
    }
    return out;
}

ExperimentReport replay_simulation(const ObservationPool& pool,
                                   const ParetoFront& sorted_front,
                                   const std::vector<Request>& workload,
                                   std::uint64_t seed, int layer_count) {
    return summarize(replay_dynasplit(pool, sorted_front, workload, seed, layer_count),
                     workload);
}

namespace {

/// Area of the union of boxes [x_i, rx] x [y_i, ry] for minimization points.
double union_area_2d(std::vector<std::pair<double, double>> pts, double rx,
                     double ry) {
    if (pts.empty()) return 0.0;
    std::sort(pts.begin(), pts.end());
    std::vector<std::pair<double, double>> stair;  // x asc, y strictly desc
    double best_y = std::numeric_limits<double>::infinity();
    for (const auto& p : pts) {
        if (p.second < best_y) {
            stair.push_back(p);
            best_y = p.second;
        }
    }
    double area = 0.0;
    for (std::size_t i = 0; i < stair.size(); ++i) {
        const double next_x = (i + 1 < stair.size()) ? stair[i + 1].first : rx;
        area += (next_x - stair[i].first) * (ry - stair[i].second);
    }
    return area;
}

}  // namespace

double hypervolume(const std::vector<ObjectiveVector>& front,
                   const ObjectiveVector& reference) {
    if (front.empty()) return 0.0;
    for (const auto& f : front)
        if (f.latency_ms > reference.latency_ms || f.energy_j > reference.energy_j ||
            f.neg_accuracy > reference.neg_accuracy)
            throw std::invalid_argument("hypervolume: point outside reference box");

    // Sweep along the third objective: between consecutive z-levels the
    // dominated cross-section is a 2-D union of rectangles.
    std::vector<double> zs;
    for (const auto& f : front) zs.push_back(f.neg_accuracy);
    std::sort(zs.begin(), zs.end());
    zs.erase(std::unique(zs.begin(), zs.end()), zs.end());

    double volume = 0.0;
    for (std::size_t i = 0; i < zs.size(); ++i) {
        const double z0 = zs[i];
        const double z1 = (i + 1 < zs.size()) ? zs[i + 1] : reference.neg_accuracy;
        if (z1 <= z0) continue;
        std::vector<std::pair<double, double>> active;
        for (const auto& f : front)
            if (f.neg_accuracy <= z0) active.emplace_back(f.latency_ms, f.energy_j);
        volume += union_area_2d(std::move(active), reference.latency_ms,
                                reference.energy_j) *
                  (z1 - z0);
    }
    return volume;
}

ObjectiveVector hypervolume_reference(const std::vector<const ParetoFront*>& fronts) {
    double max_lat = 0.0, max_en = 0.0;
    for (const auto* f : fronts)
        for (const auto& e : *f) {
            max_lat = std::max(max_lat, e.objectives.latency_ms);
            max_en = std::max(max_en, e.objectives.energy_j);
        }
    return ObjectiveVector{1.05 * max_lat, 1.05 * max_en, 0.0};
}

void write_decisions_csv(const std::string& path,
                         const std::vector<RequestOutcome>& outcomes) {
    csv::Writer w(path, kDecisionsCsvTag,
                  "policy,request_id,qos_ms,model_id,cpu_freq_ghz,tpu_mode,use_gpu,"
                  "split_layer,class,predicted_latency_ms,predicted_energy_j,"
                  "latency_ms,edge_ms,net_ms,cloud_ms,energy_total_j,energy_edge_j,"
                  "energy_cloud_j,accuracy,violation,exceedance_ms,selection_ms,"
                  "apply_ms,wall_clock_ms,n_inferences");
    for (const auto& o : outcomes) {
        const auto& c = o.decision.config;
        const auto& m = o.observation;
        w.row(o.policy, o.request_id, o.qos_ms, c.model_id, c.cpu_freq_ghz,
              to_string(c.tpu_mode), c.use_gpu ? 1 : 0, c.split_layer,
              to_string(o.decision.klass), o.decision.predicted_latency_ms,
              o.decision.predicted_energy_j, m.latency.t_total_ms,
              m.latency.t_edge_ms, m.latency.t_net_ms, m.latency.t_cloud_ms,
              m.energy_total_j, m.energy_edge_j, m.energy_cloud_j, m.accuracy,
              o.violation() ? 1 : 0, o.exceedance_ms(), o.decision.selection_ms,
              o.decision.apply_ms, o.wall_clock_ms(), m.n_inferences);
    }
}

std::vector<RequestOutcome> read_decisions_csv(const std::string& path) {
    const auto t = csv::read(path, kDecisionsCsvTag);
    auto col = [&](const char* n) { return t.col(n); };
    const auto c_pol = col("policy"), c_id = col("request_id"), c_qos = col("qos_ms"),
               c_model = col("model_id"), c_freq = col("cpu_freq_ghz"),
               c_tpu = col("tpu_mode"), c_gpu = col("use_gpu"),
               c_k = col("split_layer"), c_class = col("class"),
               c_plat = col("predicted_latency_ms"), c_pen = col("predicted_energy_j"),
               c_lat = col("latency_ms"), c_edge = col("edge_ms"), c_net = col("net_ms"),
               c_cloud = col("cloud_ms"), c_et = col("energy_total_j"),
               c_ee = col("energy_edge_j"), c_ec = col("energy_cloud_j"),
               c_acc = col("accuracy"), c_sel = col("selection_ms"),
               c_app = col("apply_ms"), c_n = col("n_inferences");
    std::vector<RequestOutcome> out;
    for (const auto& r : t.rows) {
        RequestOutcome o;
        o.policy = r[c_pol];
        o.request_id = csv::stoi_strict(r[c_id]);
        o.qos_ms = csv::stod_strict(r[c_qos]);
        o.decision.request_id = o.request_id;
        o.decision.config.model_id = r[c_model];
        o.decision.config.cpu_freq_ghz = csv::stod_strict(r[c_freq]);
        o.decision.config.tpu_mode = tpu_mode_from_string(r[c_tpu]);
        o.decision.config.use_gpu = csv::stoi_strict(r[c_gpu]) != 0;
        o.decision.config.split_layer = static_cast<int>(csv::stoi_strict(r[c_k]));
        o.decision.klass = r[c_class] == "edge" ? DecisionClass::EdgeOnly
                           : r[c_class] == "cloud" ? DecisionClass::CloudOnly
                                                   : DecisionClass::Split;
        o.decision.predicted_latency_ms = csv::stod_strict(r[c_plat]);
        o.decision.predicted_energy_j = csv::stod_strict(r[c_pen]);
        o.decision.selection_ms = csv::stod_strict(r[c_sel]);
        o.decision.apply_ms = csv::stod_strict(r[c_app]);
        o.observation.config = o.decision.config;
        o.observation.latency.t_total_ms = csv::stod_strict(r[c_lat]);
        o.observation.latency.t_edge_ms = csv::stod_strict(r[c_edge]);
        o.observation.latency.t_net_ms = csv::stod_strict(r[c_net]);
        o.observation.latency.t_cloud_ms = csv::stod_strict(r[c_cloud]);
        o.observation.energy_total_j = csv::stod_strict(r[c_et]);
        o.observation.energy_edge_j = csv::stod_strict(r[c_ee]);
        o.observation.energy_cloud_j = csv::stod_strict(r[c_ec]);
        o.observation.accuracy = csv::stod_strict(r[c_acc]);
        o.observation.n_inferences = static_cast<int>(csv::stoi_strict(r[c_n]));
        out.push_back(std::move(o));
    }
    return out;
}

namespace {

void stat_rows(csv::Writer& w, const std::string& policy, const char* metric,
               const SummaryStats& s) {
    w.row(policy, metric, static_cast<std::int64_t>(s.n), s.min, s.q1, s.median,
          s.q3, s.max, s.mean);
}

nlohmann::json stats_json(const SummaryStats& s) {
    return {{"n", s.n},   {"min", s.min}, {"q1", s.q1},  {"median", s.median},
            {"q3", s.q3}, {"max", s.max}, {"mean", s.mean}};
}

}  // namespace

void write_report_csv(const std::string& path, const ExperimentReport& report) {
    csv::Writer w(path, kReportCsvTag, "policy,metric,n,min,q1,median,q3,max,mean");
    for (const auto& p : report.policies) {
        stat_rows(w, p.policy, "latency_ms", p.latency_total_ms);
        stat_rows(w, p.policy, "latency_edge_ms", p.latency_edge_ms);
        stat_rows(w, p.policy, "latency_net_ms", p.latency_net_ms);
        stat_rows(w, p.policy, "latency_cloud_ms", p.latency_cloud_ms);
        stat_rows(w, p.policy, "energy_j", p.energy_total_j);
        stat_rows(w, p.policy, "energy_edge_j", p.energy_edge_j);
        stat_rows(w, p.policy, "energy_cloud_j", p.energy_cloud_j);
        stat_rows(w, p.policy, "accuracy", p.accuracy);
        stat_rows(w, p.policy, "selection_ms", p.selection_ms);
        stat_rows(w, p.policy, "apply_ms", p.apply_ms);
        stat_rows(w, p.policy, "wall_clock_ms", p.wall_clock_ms);
        stat_rows(w, p.policy, "exceedance_ms", p.exceedance_ms);
    }
}

void write_report_json(const std::string& path, const ExperimentReport& report) {
    nlohmann::json j;
    for (const auto& p : report.policies) {
        nlohmann::json e;
        e["n_requests"] = p.n_requests;
        e["latency_ms"] = stats_json(p.latency_total_ms);
        e["latency_edge_ms"] = stats_json(p.latency_edge_ms);
        e["latency_net_ms"] = stats_json(p.latency_net_ms);
        e["latency_cloud_ms"] = stats_json(p.latency_cloud_ms);
        e["energy_j"] = stats_json(p.energy_total_j);
        e["energy_edge_j"] = stats_json(p.energy_edge_j);
        e["energy_cloud_j"] = stats_json(p.energy_cloud_j);
        e["accuracy"] = stats_json(p.accuracy);
        e["selection_ms"] = stats_json(p.selection_ms);
        e["apply_ms"] = stats_json(p.apply_ms);
        e["wall_clock_ms"] = stats_json(p.wall_clock_ms);
        e["violations"] = p.violations;
        e["violation_rate"] = p.violation_rate;
        e["exceedance_ms"] = stats_json(p.exceedance_ms);
        e["decisions"] = {{"edge", p.n_edge}, {"split", p.n_split}, {"cloud", p.n_cloud}};
        j[p.policy] = std::move(e);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("report: cannot open " + path);
    out << j.dump(2) << "\n";
}

void write_plot_csv(const std::string& path,
                    const std::vector<RequestOutcome>& outcomes) {
    csv::Writer w(path, kPlotCsvTag, "policy,metric,value");
    for (const auto& o : outcomes) {
        w.row(o.policy, "latency_ms", o.observation.latency.t_total_ms);
        w.row(o.policy, "energy_j", o.observation.energy_total_j);
        w.row(o.policy, "accuracy", o.observation.accuracy);
        if (o.violation()) w.row(o.policy, "exceedance_ms", o.exceedance_ms());
    }
}

}  // namespace dynasplit
