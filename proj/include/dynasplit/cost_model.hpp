#pragma once

#include <optional>
#include <vector>

#include "dynasplit/config_space.hpp"
#include "dynasplit/profile.hpp"
#include "dynasplit/rng.hpp"

namespace dynasplit {

/// Per-inference latency split (milliseconds). t_total is always the exact
/// sum of the three parts; edge-only configurations have zero net/cloud.
struct LatencyBreakdown {
    double t_edge_ms = 0.0;
    double t_net_ms = 0.0;
    double t_cloud_ms = 0.0;
    double t_total_ms = 0.0;
};

struct PowerSample {
    double t_s = 0.0;
    double power_w = 0.0;
};
using PowerSeries = std::vector<PowerSample>;

/// Piecewise-constant power over [boundaries.front(), boundaries.back()];
/// levels[i] holds on [boundaries[i], boundaries[i+1]). The emulated meters
/// sample this at a fixed interval; the exact integral is the ground truth
/// the sampled trapezoidal estimate is checked against.
struct PiecewiseConstant {
    std::vector<double> boundaries_s;  // size n+1, non-decreasing
    std::vector<double> levels_w;      // size n

    double value_at(double t_s) const;
    double exact_integral_j() const;

    /// Meter emulation: samples at start + i*interval, plus the exact final
    /// instant, so a constant trace integrates exactly.
    PowerSeries sample(double interval_s) const;
};

/// Inference phases on a common clock. t_net1/t_net2 exist only when the
/// cloud participates (k < L).
struct PhaseTimeline {
    double t0_s = 0.0;
    double head_end_s = 0.0;  // edge pre-processing + head compute done
    std::optional<double> t_net1_s;        // all data at the cloud
    std::optional<double> t_net2_s;        // cloud compute done
    std::optional<double> return_end_s;    // results back at the edge
    double t_inf_s = 0.0;

    PiecewiseConstant edge_power;
    PiecewiseConstant cloud_power;
};

struct PowerTrace {
    PhaseTimeline timeline;
    PowerSeries edge_series;   // sampled at the edge meter interval (200 ms default)
    PowerSeries cloud_series;  // sampled at the cloud meter interval (20 ms default)
};

/// One evaluated trial, averaged over n_inferences.
struct Observation {
    Configuration config;
    LatencyBreakdown latency;
    double energy_edge_j = 0.0;
    double energy_cloud_j = 0.0;
    double energy_total_j = 0.0;
    double accuracy = 0.0;
    int n_inferences = 1;
};

/// Multiplicative factors applied to each latency component of a whole trial
/// plus the additive accuracy perturbation. One draw per trial: testbed drift
/// does not average out across a 1,000-inference batch, which is what keeps
/// stored observation pools non-degenerate.
struct NoiseDraws {
    double edge = 1.0;
    double net = 1.0;
    double cloud = 1.0;
    double accuracy = 0.0;
};

NoiseDraws draw_noise(const NoiseParams& np, const AccuracyModel& am,
                      rng::Stream& rng);

/// Noiseless per-inference latency (used for profile calibration checks).
LatencyBreakdown noiseless_latency(const Configuration& c, const ModelProfile& mp,
                                   const DeviceProfile& dp);

/// Stochastic per-inference latency; head layers run on the TPU (cost divided
/// by the mode's speedup) when the TPU is on and the model supports it, on the
/// CPU scaled by reference_freq/cpu_freq otherwise. k = 0 leaves only the
/// data-preparation terms on the edge.
LatencyBreakdown simulate_latency(const Configuration& c, const ModelProfile& mp,
                                  const DeviceProfile& dp, rng::Stream& rng,
                                  const NoiseParams& noise = {});

/// Phase timeline + meter-sampled power series consistent with a breakdown
/// previously produced for c (the breakdown's component totals are preserved).
PowerTrace simulate_power_trace(const Configuration& c, const ModelProfile& mp,
                                const DeviceProfile& dp, const LatencyBreakdown& lb);

/// Trapezoidal integration over a sampled power trace. Requires >= 2 samples
/// with strictly increasing timestamps.
double integrate_energy(const PowerSeries& series);

double quantization_penalty(const Configuration& c, const ModelProfile& mp);

/// base_accuracy - quantization penalty + truncated Gaussian noise, in [0,1].
double simulate_accuracy(const Configuration& c, const ModelProfile& mp,
                         rng::Stream& rng);

/// Full trial: n sequential inferences per phase (head x n, one batched
/// transfer, tail x n), energies integrated from the meter-sampled traces,
/// everything returned as per-inference averages.
Observation evaluate_trial(const Configuration& c, const ModelProfile& mp,
                           const DeviceProfile& dp, int n_inferences,
                           rng::Stream& rng, const NoiseParams& noise);

/// Convenience: evaluate_trial with an independent stream derived from
/// (seed, trial_index), the determinism contract used by the solver and the
/// experiment runner.
Observation evaluate_trial_indexed(const Configuration& c, const Profile& profile,
                                   int n_inferences, std::uint64_t noise_seed,
                                   std::uint64_t trial_index);

}  // namespace dynasplit
