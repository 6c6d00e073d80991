#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dynasplit/config_space.hpp"

namespace dynasplit {

/// Power law base + alpha * f^beta (watts as a function of GHz).
struct PowerLaw {
    double base_w = 0.0;
    double alpha = 0.0;
    double beta = 1.0;

    double at(double freq_ghz) const;
};

struct AccuracyModel {
    double base = 0.8;               // full-precision (cloud-only) accuracy
    double quant_penalty_max = 0.0;  // penalty with the whole network quantized
    double quant_exponent = 1.0;     // penalty = max * (k/L)^exponent
    bool quantization_enabled = false;  // true only for TPU-capable models
    double noise_sigma = 0.001;         // additive, in accuracy fraction
};

/// A partitionable network: per-layer costs, intermediate payload sizes and
/// the accuracy model. Layer i is 1-based in the interface (head = 1..k);
/// cost arrays are 0-based (entry i-1 belongs to layer i).
struct ModelProfile {
    std::string model_id;
    int layer_count = 0;
    double reference_freq_ghz = 1.8;  // edge CPU costs are seconds at this freq

    std::vector<double> edge_cpu_cost_s;   // size L
    std::vector<double> edge_tpu_cost_s;   // size L when tpu_supported
    std::vector<double> cloud_cpu_cost_s;  // size L
    std::vector<double> cloud_gpu_cost_s;  // size L
    std::vector<double> intermediate_output_bytes;  // size L+1, index k

    // Fixed per-inference edge processing (image scaling / batch assembly and
    // result decoding), seconds at the reference frequency.
    double prep_pre_s = 0.0;
    double prep_post_s = 0.0;

    bool tpu_supported = false;
    AccuracyModel accuracy;

    void validate() const;
};

struct TpuCharacteristics {
    double addon_power_std_w = 0.0;
    double addon_power_max_w = 0.0;
    double speedup_std = 1.0;
    double speedup_max = 1.0;

    double addon_power(TpuMode m) const;
    double speedup(TpuMode m) const;
};

struct SelectionOverheadModel {
    double base_ms = 2.0;
    double per_entry_ms = 0.2;
    double sigma = 0.2;  // log-normal, truncated at 3 sigma
};

struct ApplyOverheadModel {
    double freq_change_ms = 15.0;
    double tpu_toggle_ms = 40.0;
    double model_load_ms = 55.0;
    double cloud_init_ms = 40.0;
    double sigma = 0.25;  // per-component log-normal, truncated at 3 sigma
};

/// Calibrated characteristics of the emulated testbed: edge node power laws,
/// TPU add-on, cloud node active power, network link, power-meter sampling
/// intervals and reconfiguration overhead distributions.
struct DeviceProfile {
    PowerLaw edge_idle_power;    // while waiting on network/cloud phases
    PowerLaw edge_active_power;  // while computing
    TpuCharacteristics tpu;
    double edge_meter_interval_s = 0.2;

    double cloud_cpu_power_w = 0.0;  // idle-excluded, active phase only
    double cloud_gpu_power_w = 0.0;
    double cloud_meter_interval_s = 0.02;

    double bandwidth_bytes_per_s = 0.0;
    double rtt_s = 0.0;

    SelectionOverheadModel selection_overhead;
    ApplyOverheadModel apply_overhead;

    void validate() const;
};

/// Multiplicative log-normal sigma per latency component (truncated +-3 sigma).
struct NoiseParams {
    double edge_sigma = 0.03;
    double net_sigma = 0.03;
    double cloud_sigma = 0.03;

    NoiseParams scaled_off() const { return NoiseParams{0.0, 0.0, 0.0}; }
};

struct WorkloadBounds {
    double min_ms = 0.0;
    double max_ms = 0.0;
};

/// One bundled ".profile" file: model + device + search space + noise +
/// default workload bounds. JSON data model, all units stated in field names.
struct Profile {
    ModelProfile model;
    DeviceProfile device;
    SearchSpace space;
    NoiseParams noise;
    WorkloadBounds workload_bounds;

    void validate() const;
};

Profile load_profile(const std::string& path);
Profile parse_profile(const std::string& json_text);

}  // namespace dynasplit
