#include "dynasplit/workload.hpp"

#include <algorithm>
#include <stdexcept>

#include "dynasplit/csv.hpp"

namespace dynasplit {

void WorkloadSpec::validate() const {
    if (n_requests < 2)
        throw std::invalid_argument("workload: need >= 2 requests (rescaling needs two extremes)");
    if (!(min_ms < max_ms))
        throw std::invalid_argument("workload: min latency bound must be below max");
    if (weibull_shape <= 0.0)
        throw std::invalid_argument("workload: weibull shape must be positive");
    if (n_inferences < 1)
        throw std::invalid_argument("workload: batch size must be >= 1");
}

std::vector<double> draw_raw_samples(const WorkloadSpec& spec) {
    spec.validate();
    rng::Stream stream(spec.seed);
    std::vector<double> s(static_cast<std::size_t>(spec.n_requests));
    for (auto& x : s) x = stream.weibull(spec.weibull_shape);
    return s;
}

std::vector<Request> generate_workload(const WorkloadSpec& spec) {
    spec.validate();
    WorkloadSpec cur = spec;
    std::vector<double> s;
    for (int attempt = 0; attempt < 64; ++attempt) {
        s = draw_raw_samples(cur);
        const auto [lo, hi] = std::minmax_element(s.begin(), s.end());
        if (*lo < *hi) break;
        s.clear();
        cur.seed = rng::splitmix64(cur.seed + 1);  // degenerate draw; retry
    }
    if (s.empty())
        throw std::runtime_error("workload: degenerate samples after retries");

    const auto lo_it = std::min_element(s.begin(), s.end());
    const auto hi_it = std::max_element(s.begin(), s.end());
    const double s_min = *lo_it, s_max = *hi_it;
    const double scale = (spec.max_ms - spec.min_ms) / (s_max - s_min);

    std::vector<Request> reqs(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        double q = spec.min_ms + (s[i] - s_min) * scale;
        q = std::clamp(q, spec.min_ms, spec.max_ms);
        reqs[i] = Request{static_cast<std::int64_t>(i), q, spec.n_inferences,
                          spec.model_id};
    }
    // Pin the extremes bit-exactly; affine arithmetic may wobble in the last ulp.
    reqs[static_cast<std::size_t>(lo_it - s.begin())].qos_ms = spec.min_ms;
    reqs[static_cast<std::size_t>(hi_it - s.begin())].qos_ms = spec.max_ms;
    return reqs;
}

void write_workload_csv(const std::string& path, const std::vector<Request>& reqs) {
    csv::Writer w(path, kWorkloadCsvTag, "request_id,qos_ms,n_inferences");
    for (const auto& r : reqs) w.row(r.request_id, r.qos_ms, r.n_inferences);
}

std::vector<Request> read_workload_csv(const std::string& path,
                                       const std::string& model_id) {
    const auto t = csv::read(path, kWorkloadCsvTag);
    const auto c_id = t.col("request_id"), c_qos = t.col("qos_ms"),
               c_n = t.col("n_inferences");
    std::vector<Request> reqs;
    for (const auto& r : t.rows)
        reqs.push_back(Request{csv::stoi_strict(r[c_id]), csv::stod_strict(r[c_qos]),
                               static_cast<int>(csv::stoi_strict(r[c_n])), model_id});
    return reqs;
}

}  // namespace dynasplit
