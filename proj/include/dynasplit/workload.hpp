#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dynasplit/rng.hpp"

namespace dynasplit {

/// One user inference request: deadline in milliseconds plus batch size.
struct Request {
    std::int64_t request_id = 0;
    double qos_ms = 0.0;
    int n_inferences = 1000;
    std::string model_id;
};

struct WorkloadSpec {
    int n_requests = 50;
    double weibull_shape = 1.0;  // shape 1 reduces to Exponential(1)
    double min_ms = 0.0;
    double max_ms = 0.0;
    std::uint64_t seed = 0;
    int n_inferences = 1000;
    std::string model_id;

    void validate() const;
};

/// Raw Weibull(shape) samples before rescaling; exposed so the distribution
/// can be tested against the analytic CDF on the exact generation path.
std::vector<double> draw_raw_samples(const WorkloadSpec& spec);

/// Weibull samples affinely rescaled so min(qos) == min_ms and
/// max(qos) == max_ms exactly. Degenerate draws (all samples equal) are
/// retried with a perturbed seed.
std::vector<Request> generate_workload(const WorkloadSpec& spec);

inline constexpr const char* kWorkloadCsvTag = "dynasplit workload v1";
void write_workload_csv(const std::string& path, const std::vector<Request>& reqs);
std::vector<Request> read_workload_csv(const std::string& path,
                                       const std::string& model_id);

}  // namespace dynasplit
