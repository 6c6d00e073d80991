#pragma once

// Shared test fixtures: bundled profile paths, a programmatic tiny-profile
// builder, and independent brute-force oracles. The oracles intentionally
// reimplement the checked logic from scratch; they must never call the
// library functions they verify.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "dynasplit/config_space.hpp"
#include "dynasplit/pareto.hpp"
#include "dynasplit/profile.hpp"
#include "dynasplit/rng.hpp"

namespace testutil {

inline std::string profile_dir() { return DYNASPLIT_PROFILE_DIR; }
inline std::string vgg_profile_path() { return profile_dir() + "/vgg16-like.profile"; }
inline std::string vit_profile_path() { return profile_dir() + "/vit-like.profile"; }

/// Small synthetic profile for solver/controller tests. Layer costs are
/// arbitrary but strictly positive and non-uniform.
inline dynasplit::Profile tiny_profile(int layers = 4,
                                       std::vector<double> cpu_grid = {1.0, 2.0},
                                       bool with_tpu = true,
                                       double noise_sigma = 0.0) {
    using namespace dynasplit;
    Profile p;
    p.model.model_id = "tiny";
    p.model.layer_count = layers;
    p.model.reference_freq_ghz = 2.0;
    for (int i = 0; i < layers; ++i) {
        p.model.edge_cpu_cost_s.push_back(0.010 + 0.004 * ((i * 7) % 5));
        p.model.edge_tpu_cost_s.push_back(0.010 + 0.004 * ((i * 7) % 5));
        p.model.cloud_cpu_cost_s.push_back(0.004 + 0.001 * (i % 3));
        p.model.cloud_gpu_cost_s.push_back(0.002 + 0.0005 * (i % 2));
    }
    for (int k = 0; k <= layers; ++k)
        p.model.intermediate_output_bytes.push_back(1.0e5 * (1 + ((k * 3) % 4)));
    p.model.prep_pre_s = 0.002;
    p.model.prep_post_s = 0.001;
    p.model.tpu_supported = with_tpu;
    p.model.accuracy = {0.9, with_tpu ? 0.004 : 0.0, 1.0, with_tpu, 0.0005};

    p.device.edge_idle_power = {1.5, 0.2, 1.0};
    p.device.edge_active_power = {2.0, 0.8, 1.2};
    p.device.tpu = {0.8, 1.2, 3.0, 3.0};
    p.device.edge_meter_interval_s = 0.2;
    p.device.cloud_cpu_power_w = 150.0;
    p.device.cloud_gpu_power_w = 600.0;
    p.device.cloud_meter_interval_s = 0.02;
    p.device.bandwidth_bytes_per_s = 5.0e6;
    p.device.rtt_s = 0.004;

    p.space.model_id = "tiny";
    p.space.cpu_grid = std::move(cpu_grid);
    p.space.tpu_modes = {TpuMode::Off, TpuMode::Std, TpuMode::Max};
    p.space.gpu_options = {false, true};
    p.space.layer_count = layers;
    if (!with_tpu) p.space.extra_constraints.push_back(NamedConstraint::NoTpu);

    p.noise = {noise_sigma, noise_sigma, noise_sigma};
    p.workload_bounds.min_ms = 20.0;
    p.workload_bounds.max_ms = 400.0;
    p.validate();
    return p;
}

/// Feasibility per the written rules, reimplemented independently.
inline bool oracle_feasible(const dynasplit::Configuration& c,
                            const dynasplit::SearchSpace& s) {
    using dynasplit::NamedConstraint;
    using dynasplit::TpuMode;
    if (c.split_layer == 0 && c.tpu_mode != TpuMode::Off) return false;
    if (c.split_layer == s.layer_count && c.use_gpu) return false;
    for (auto nc : s.extra_constraints) {
        if (nc == NamedConstraint::NoTpu && c.tpu_mode != TpuMode::Off) return false;
        if (nc == NamedConstraint::NoEdgeOnly && c.split_layer == s.layer_count)
            return false;
    }
    return true;
}

/// Brute-force count over the raw product space.
inline std::size_t oracle_feasible_count(const dynasplit::SearchSpace& s) {
    std::size_t n = 0;
    for (double f : s.cpu_grid)
        for (auto m : s.tpu_modes)
            for (bool g : s.gpu_options)
                for (int k = 0; k <= s.layer_count; ++k)
                    if (oracle_feasible({f, m, g, k, s.model_id}, s)) ++n;
    return n;
}

inline bool oracle_dominates(const dynasplit::ObjectiveVector& a,
                             const dynasplit::ObjectiveVector& b) {
    const bool le = a.latency_ms <= b.latency_ms && a.energy_j <= b.energy_j &&
                    a.neg_accuracy <= b.neg_accuracy;
    const bool lt = a.latency_ms < b.latency_ms || a.energy_j < b.energy_j ||
                    a.neg_accuracy < b.neg_accuracy;
    return le && lt;
}

/// O(n^2) non-dominated filter (keeps duplicates; membership only).
inline std::vector<std::size_t> oracle_front_indices(
    const std::vector<dynasplit::ObjectiveVector>& pts) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        bool dominated = false;
        for (std::size_t j = 0; j < pts.size() && !dominated; ++j)
            if (i != j && oracle_dominates(pts[j], pts[i])) dominated = true;
        if (!dominated) out.push_back(i);
    }
    return out;
}

inline dynasplit::ObjectiveVector random_objectives(dynasplit::rng::Stream& rng) {
    return {rng.uniform(1.0, 1000.0), rng.uniform(0.5, 100.0),
            -rng.uniform(0.5, 1.0)};
}

}  // namespace testutil
