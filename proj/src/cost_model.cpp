#include "dynasplit/cost_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace dynasplit {

double PiecewiseConstant::value_at(double t_s) const {
    if (boundaries_s.size() < 2) throw std::logic_error("empty piecewise trace");
    if (t_s >= boundaries_s.back()) return levels_w.back();
    auto it = std::upper_bound(boundaries_s.begin(), boundaries_s.end(), t_s);
    const auto idx = static_cast<std::size_t>(it - boundaries_s.begin());
    return levels_w[idx == 0 ? 0 : idx - 1];
}

double PiecewiseConstant::exact_integral_j() const {
    double e = 0.0;
    for (std::size_t i = 0; i < levels_w.size(); ++i)
        e += levels_w[i] * (boundaries_s[i + 1] - boundaries_s[i]);
    return e;
}

PowerSeries PiecewiseConstant::sample(double interval_s) const {
    if (interval_s <= 0.0) throw std::invalid_argument("non-positive meter interval");
    const double start = boundaries_s.front();
    const double end = boundaries_s.back();
    PowerSeries out;
    out.reserve(static_cast<std::size_t>((end - start) / interval_s) + 2);
    // Fixed-rate samples, except the final reading lands exactly on the end of
    // the trace so that constant spans integrate without truncation error.
    for (std::size_t i = 0;; ++i) {
        const double t = start + static_cast<double>(i) * interval_s;
        if (t >= end) break;
        out.push_back({t, value_at(t)});
    }
    out.push_back({end, levels_w.back()});
    if (out.size() < 2) out.insert(out.begin(), {start, levels_w.front()});
    return out;
}

double integrate_energy(const PowerSeries& series) {
    if (series.size() < 2)
        throw std::invalid_argument("integrate_energy: need at least 2 samples");
    double e = 0.0;
    for (std::size_t i = 0; i + 1 < series.size(); ++i) {
        const double dt = series[i + 1].t_s - series[i].t_s;
        if (dt <= 0.0)
            throw std::invalid_argument("integrate_energy: timestamps must increase");
        e += 0.5 * (series[i].power_w + series[i + 1].power_w) * dt;
    }
    return e;
}

NoiseDraws draw_noise(const NoiseParams& np, const AccuracyModel& am,
                      rng::Stream& rng) {
    NoiseDraws d;
    d.edge = rng.lognormal_factor(np.edge_sigma);
    d.net = rng.lognormal_factor(np.net_sigma);
    d.cloud = rng.lognormal_factor(np.cloud_sigma);
    d.accuracy = rng.normal_truncated(am.noise_sigma);
    return d;
}

namespace {

void check_config(const Configuration& c, const ModelProfile& mp) {
    if (c.model_id != mp.model_id)
        throw std::invalid_argument("cost model: unknown model '" + c.model_id +
                                    "' (profile is '" + mp.model_id + "')");
    if (c.split_layer < 0 || c.split_layer > mp.layer_count)
        throw std::invalid_argument("cost model: split layer out of range");
}

bool tpu_active(const Configuration& c, const ModelProfile& mp) {
    return c.tpu_mode != TpuMode::Off && mp.tpu_supported && c.split_layer > 0;
}

/// Batch phase durations (seconds) before noise.
struct BatchTimings {
    double edge_head_s = 0.0;  // n * (pre-processing + head layers)
    double edge_post_s = 0.0;  // n * result decoding
    double net_out_s = 0.0;    // rtt/2 + n * payload / bandwidth
    double net_back_s = 0.0;   // rtt/2
    double cloud_s = 0.0;      // n * tail layers
};

BatchTimings batch_timings(const Configuration& c, const ModelProfile& mp,
                           const DeviceProfile& dp, int n) {
    check_config(c, mp);
    const int k = c.split_layer;
    const int L = mp.layer_count;
    const double freq_scale = mp.reference_freq_ghz / c.cpu_freq_ghz;
    const double dn = static_cast<double>(n);

    double head = 0.0;
    if (tpu_active(c, mp)) {
        const double speedup = dp.tpu.speedup(c.tpu_mode);
        for (int i = 0; i < k; ++i) head += mp.edge_tpu_cost_s[i] / speedup;
    } else {
        for (int i = 0; i < k; ++i) head += mp.edge_cpu_cost_s[i] * freq_scale;
    }

    BatchTimings t;
    t.edge_head_s = dn * (mp.prep_pre_s * freq_scale + head);
    t.edge_post_s = dn * mp.prep_post_s * freq_scale;

    if (k < L) {
        // One round trip per batch; the payload streams per inference.
        t.net_out_s = 0.5 * dp.rtt_s +
                      dn * mp.intermediate_output_bytes[static_cast<std::size_t>(k)] /
                          dp.bandwidth_bytes_per_s;
        t.net_back_s = 0.5 * dp.rtt_s;
        double tail = 0.0;
        const auto& cost = c.use_gpu ? mp.cloud_gpu_cost_s : mp.cloud_cpu_cost_s;
        for (int i = k; i < L; ++i) tail += cost[static_cast<std::size_t>(i)];
        t.cloud_s = dn * tail;
    }
    return t;
}

LatencyBreakdown to_breakdown(const BatchTimings& t, int n) {
    const double dn = static_cast<double>(n);
    LatencyBreakdown lb;
    lb.t_edge_ms = (t.edge_head_s + t.edge_post_s) / dn * 1e3;
    lb.t_net_ms = (t.net_out_s + t.net_back_s) / dn * 1e3;
    lb.t_cloud_ms = t.cloud_s / dn * 1e3;
    lb.t_total_ms = lb.t_edge_ms + lb.t_net_ms + lb.t_cloud_ms;
    return lb;
}

BatchTimings apply_noise(BatchTimings t, const NoiseDraws& d) {
    t.edge_head_s *= d.edge;
    t.edge_post_s *= d.edge;
    t.net_out_s *= d.net;
    t.net_back_s *= d.net;
    t.cloud_s *= d.cloud;
    return t;
}

PhaseTimeline build_timeline(const Configuration& c, const ModelProfile& mp,
                             const DeviceProfile& dp, const BatchTimings& t) {
    const bool split = c.split_layer < mp.layer_count;
    const double p_active = dp.edge_active_power.at(c.cpu_freq_ghz);
    const double p_idle = dp.edge_idle_power.at(c.cpu_freq_ghz);
    const double p_head =
        p_active + (tpu_active(c, mp) ? dp.tpu.addon_power(c.tpu_mode) : 0.0);

    PhaseTimeline tl;
    tl.t0_s = 0.0;
    tl.head_end_s = t.edge_head_s;
    if (split) {
        tl.t_net1_s = tl.head_end_s + t.net_out_s;
        tl.t_net2_s = *tl.t_net1_s + t.cloud_s;
        tl.return_end_s = *tl.t_net2_s + t.net_back_s;
        tl.t_inf_s = *tl.return_end_s + t.edge_post_s;

        tl.edge_power.boundaries_s = {0.0, tl.head_end_s, *tl.return_end_s, tl.t_inf_s};
        tl.edge_power.levels_w = {p_head, p_idle, p_active};
        // Cloud node power counted only during the active computation phase.
        const double p_cloud = c.use_gpu ? dp.cloud_gpu_power_w : dp.cloud_cpu_power_w;
        tl.cloud_power.boundaries_s = {*tl.t_net1_s, *tl.t_net2_s};
        tl.cloud_power.levels_w = {p_cloud};
    } else {
        tl.t_inf_s = tl.head_end_s + t.edge_post_s;
        tl.edge_power.boundaries_s = {0.0, tl.head_end_s, tl.t_inf_s};
        tl.edge_power.levels_w = {p_head, p_active};
        tl.cloud_power.boundaries_s = {0.0, tl.t_inf_s};
        tl.cloud_power.levels_w = {0.0};
    }
    return tl;
}

}  // namespace

LatencyBreakdown noiseless_latency(const Configuration& c, const ModelProfile& mp,
                                   const DeviceProfile& dp) {
    return to_breakdown(batch_timings(c, mp, dp, 1), 1);
}

LatencyBreakdown simulate_latency(const Configuration& c, const ModelProfile& mp,
                                  const DeviceProfile& dp, rng::Stream& rng,
                                  const NoiseParams& noise) {
    const auto d = draw_noise(noise, mp.accuracy, rng);
    return to_breakdown(apply_noise(batch_timings(c, mp, dp, 1), d), 1);
}

PowerTrace simulate_power_trace(const Configuration& c, const ModelProfile& mp,
                                const DeviceProfile& dp, const LatencyBreakdown& lb) {
    // Reconstruct phase durations from the breakdown: the noiseless
    // composition fixes the internal split, then each component is rescaled
    // so the breakdown's totals are preserved exactly.
    BatchTimings base = batch_timings(c, mp, dp, 1);
    auto rescale = [](double part, double whole, double target) {
        return whole > 0.0 ? part * (target / whole) : 0.0;
    };
    const double edge_s = lb.t_edge_ms * 1e-3;
    const double net_s = lb.t_net_ms * 1e-3;
    BatchTimings t;
    t.edge_head_s = rescale(base.edge_head_s, base.edge_head_s + base.edge_post_s, edge_s);
    t.edge_post_s = rescale(base.edge_post_s, base.edge_head_s + base.edge_post_s, edge_s);
    t.net_out_s = rescale(base.net_out_s, base.net_out_s + base.net_back_s, net_s);
    t.net_back_s = rescale(base.net_back_s, base.net_out_s + base.net_back_s, net_s);
    t.cloud_s = lb.t_cloud_ms * 1e-3;

    PowerTrace trace;
    trace.timeline = build_timeline(c, mp, dp, t);
    trace.edge_series = trace.timeline.edge_power.sample(dp.edge_meter_interval_s);
    trace.cloud_series = trace.timeline.cloud_power.sample(dp.cloud_meter_interval_s);
    return trace;
}

double quantization_penalty(const Configuration& c, const ModelProfile& mp) {
    if (!mp.accuracy.quantization_enabled || !tpu_active(c, mp)) return 0.0;
    const double frac =
        static_cast<double>(c.split_layer) / static_cast<double>(mp.layer_count);
    return mp.accuracy.quant_penalty_max * std::pow(frac, mp.accuracy.quant_exponent);
}

double simulate_accuracy(const Configuration& c, const ModelProfile& mp,
                         rng::Stream& rng) {
    check_config(c, mp);
    const double a = mp.accuracy.base - quantization_penalty(c, mp) +
                     rng.normal_truncated(mp.accuracy.noise_sigma);
    return std::clamp(a, 0.0, 1.0);
}

Observation evaluate_trial(const Configuration& c, const ModelProfile& mp,
                           const DeviceProfile& dp, int n_inferences,
                           rng::Stream& rng, const NoiseParams& noise) {
    if (n_inferences < 1)
        throw std::invalid_argument("evaluate_trial: batch size must be >= 1");
    check_config(c, mp);

    const auto draws = draw_noise(noise, mp.accuracy, rng);
    const auto t = apply_noise(batch_timings(c, mp, dp, n_inferences), draws);
    const auto tl = build_timeline(c, mp, dp, t);

    const auto edge_series = tl.edge_power.sample(dp.edge_meter_interval_s);
    const auto cloud_series = tl.cloud_power.sample(dp.cloud_meter_interval_s);
    const double dn = static_cast<double>(n_inferences);

    Observation obs;
    obs.config = c;
    obs.latency = to_breakdown(t, n_inferences);
    obs.energy_edge_j = integrate_energy(edge_series) / dn;
    obs.energy_cloud_j = c.split_layer == mp.layer_count
                             ? 0.0
                             : integrate_energy(cloud_series) / dn;
    obs.energy_total_j = obs.energy_edge_j + obs.energy_cloud_j;
    obs.accuracy = std::clamp(
        mp.accuracy.base - quantization_penalty(c, mp) + draws.accuracy, 0.0, 1.0);
    obs.n_inferences = n_inferences;
    return obs;
}

Observation evaluate_trial_indexed(const Configuration& c, const Profile& profile,
                                   int n_inferences, std::uint64_t noise_seed,
                                   std::uint64_t trial_index) {
    rng::Stream stream(rng::substream(noise_seed, trial_index));
    return evaluate_trial(c, profile.model, profile.device, n_inferences, stream,
                          profile.noise);
}

}  // namespace dynasplit
