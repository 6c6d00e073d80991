#include "dynasplit/pareto.hpp"

#include <algorithm>
#include <stdexcept>

#include "dynasplit/csv.hpp"

namespace dynasplit {

ObjectiveVector objectives_of(const Observation& obs) {
    return ObjectiveVector{obs.latency.t_total_ms, obs.energy_total_j,
                           -obs.accuracy};
}

bool dominates(const ObjectiveVector& a, const ObjectiveVector& b) {
    if (a.latency_ms > b.latency_ms || a.energy_j > b.energy_j ||
        a.neg_accuracy > b.neg_accuracy)
        return false;
    return a.latency_ms < b.latency_ms || a.energy_j < b.energy_j ||
           a.neg_accuracy < b.neg_accuracy;
}

namespace {

bool front_order(const FrontEntry& a, const FrontEntry& b) {
    if (a.objectives.energy_j != b.objectives.energy_j)
        return a.objectives.energy_j < b.objectives.energy_j;
    if (a.objectives.neg_accuracy != b.objectives.neg_accuracy)
        return a.objectives.neg_accuracy < b.objectives.neg_accuracy;  // acc desc
    if (a.objectives.latency_ms != b.objectives.latency_ms)
        return a.objectives.latency_ms < b.objectives.latency_ms;
    return a.config < b.config;
}

}  // namespace

ExtractResult extract_front_detailed(const std::vector<FrontEntry>& points) {
    ExtractResult res;
    for (std::size_t i = 0; i < points.size(); ++i) {
        bool dominated = false;
        bool duplicate = false;
        for (std::size_t j = 0; j < points.size() && !dominated; ++j) {
            if (i == j) continue;
            if (dominates(points[j].objectives, points[i].objectives)) {
                dominated = true;
            } else if (points[j].objectives == points[i].objectives) {
                // Exact objective tie: keep only the lexicographically
                // smallest configuration (earliest index wins full ties).
                if (points[j].config < points[i].config ||
                    (!(points[i].config < points[j].config) && j < i))
                    duplicate = true;
            }
        }
        if (dominated) continue;
        (duplicate ? res.duplicates : res.front).push_back(points[i]);
    }
    sort_front(res.front);
    return res;
}

ParetoFront extract_front(const std::vector<FrontEntry>& points) {
    return extract_front_detailed(points).front;
}

void sort_front(ParetoFront& front) {
    std::stable_sort(front.begin(), front.end(), front_order);
}

void write_front_csv(const std::string& path, const ParetoFront& front,
                     const std::string& model_id) {
    csv::Writer w(path, kFrontCsvTag,
                  "model_id,cpu_freq_ghz,tpu_mode,use_gpu,split_layer,"
                  "latency_ms,energy_j,accuracy");
    for (const auto& e : front)
        w.row(model_id, e.config.cpu_freq_ghz, to_string(e.config.tpu_mode),
              e.config.use_gpu ? 1 : 0, e.config.split_layer,
              e.objectives.latency_ms, e.objectives.energy_j,
              e.objectives.accuracy());
}

ParetoFront read_front_csv(const std::string& path) {
    const auto t = csv::read(path, kFrontCsvTag);
    const auto c_model = t.col("model_id"), c_freq = t.col("cpu_freq_ghz"),
               c_tpu = t.col("tpu_mode"), c_gpu = t.col("use_gpu"),
               c_k = t.col("split_layer"), c_lat = t.col("latency_ms"),
               c_en = t.col("energy_j"), c_acc = t.col("accuracy");
    ParetoFront front;
    for (const auto& r : t.rows) {
        FrontEntry e;
        e.config.model_id = r[c_model];
        e.config.cpu_freq_ghz = csv::stod_strict(r[c_freq]);
        e.config.tpu_mode = tpu_mode_from_string(r[c_tpu]);
        e.config.use_gpu = csv::stoi_strict(r[c_gpu]) != 0;
        e.config.split_layer = static_cast<int>(csv::stoi_strict(r[c_k]));
        e.objectives.latency_ms = csv::stod_strict(r[c_lat]);
        e.objectives.energy_j = csv::stod_strict(r[c_en]);
        e.objectives.neg_accuracy = -csv::stod_strict(r[c_acc]);
        front.push_back(std::move(e));
    }
    return front;
}

}  // namespace dynasplit
