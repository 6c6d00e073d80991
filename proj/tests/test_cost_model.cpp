#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dynasplit/cost_model.hpp"
#include "dynasplit/profile.hpp"
#include "helpers.hpp"

using namespace dynasplit;

TEST_CASE("trapezoidal integration on hand-checked traces") {
    CHECK(integrate_energy({{0.0, 5.0}, {2.0, 5.0}}) == doctest::Approx(10.0));
    CHECK(integrate_energy({{0.0, 0.0}, {1.0, 2.0}, {2.0, 0.0}}) ==
          doctest::Approx(2.0));  // triangle area
    CHECK_THROWS_AS(integrate_energy({{0.0, 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(integrate_energy({{0.0, 1.0}, {0.0, 2.0}}),
                    std::invalid_argument);
}

TEST_CASE("trapezoid is exact on piecewise-linear traces") {
    // Closed form for p(t) = a + b t on [t0, t1]: a (t1-t0) + b (t1^2-t0^2)/2.
    rng::Stream rng(11);
    for (int iter = 0; iter < 50; ++iter) {
        const double a = rng.uniform(0.5, 10.0);
        const double b = rng.uniform(-0.3, 0.5);
        PowerSeries s;
        double t = 0.0;
        for (int i = 0; i < 40; ++i) {
            s.push_back({t, a + b * t});
            t += rng.uniform(0.01, 0.5);
        }
        const double t1 = s.back().t_s;
        const double exact = a * t1 + 0.5 * b * t1 * t1;
        CHECK(integrate_energy(s) == doctest::Approx(exact).epsilon(1e-12));
    }
}

TEST_CASE("trapezoid matches a midpoint-rule oracle on smooth traces") {
    rng::Stream rng(12);
    for (int iter = 0; iter < 20; ++iter) {
        const double base = rng.uniform(3.0, 8.0);
        const double amp = rng.uniform(0.1, 1.5);
        const double freq = rng.uniform(0.2, 2.0);
        auto p = [&](double t) { return base + amp * std::sin(freq * t); };

        const int n = 1000;
        const double t_end = 10.0;
        PowerSeries s;
        for (int i = 0; i <= n; ++i) {
            const double t = t_end * i / n;
            s.push_back({t, p(t)});
        }
        double midpoint = 0.0;  // independent oracle on the analytic function
        for (int i = 0; i < n; ++i)
            midpoint += p(t_end * (i + 0.5) / n) * (t_end / n);
        CHECK(integrate_energy(s) ==
              doctest::Approx(midpoint).epsilon(0.01));
    }
}

TEST_CASE("meter sampling: constant trace integrates exactly") {
    PiecewiseConstant pc{{0.0, 1.3}, {5.0}};
    const auto series = pc.sample(0.2);
    CHECK(series.front().t_s == 0.0);
    CHECK(series.back().t_s == doctest::Approx(1.3));
    CHECK(integrate_energy(series) == doctest::Approx(5.0 * 1.3));
}

TEST_CASE("meter sampling: two-phase trace, hand-computed expectation") {
    // 10 W for 1 s then 2 W for 1 s, sampled every 0.2 s. The sample at
    // t = 1.0 reads the new 2 W level, so the trapezoid loses exactly
    // 0.2 * (10-2)/2 = 0.8 J: 11.2 J against the true 12 J.
    PiecewiseConstant pc{{0.0, 1.0, 2.0}, {10.0, 2.0}};
    CHECK(pc.exact_integral_j() == doctest::Approx(12.0));
    const double e = integrate_energy(pc.sample(0.2));
    CHECK(e == doctest::Approx(11.2));
    CHECK(std::abs(e - 12.0) <= 0.8 + 1e-12);  // one boundary sample's worth
}

TEST_CASE("exact phase integral scales linearly when phases stretch") {
    rng::Stream rng(13);
    for (int iter = 0; iter < 30; ++iter) {
        PiecewiseConstant pc;
        pc.boundaries_s.push_back(0.0);
        const int phases = 2 + static_cast<int>(rng.uniform_index(4));
        for (int i = 0; i < phases; ++i) {
            pc.boundaries_s.push_back(pc.boundaries_s.back() + rng.uniform(0.1, 2.0));
            pc.levels_w.push_back(rng.uniform(1.0, 12.0));
        }
        const double s = 1.0 + rng.uniform(0.0, 4.0);
        PiecewiseConstant stretched = pc;
        for (auto& b : stretched.boundaries_s) b *= s;
        CHECK(stretched.exact_integral_j() ==
              doctest::Approx(s * pc.exact_integral_j()).epsilon(1e-12));
    }
}

TEST_CASE("noiseless latencies reproduce the calibrated endpoints") {
    const auto vgg = load_profile(testutil::vgg_profile_path());
    const auto vit = load_profile(testutil::vit_profile_path());

    const auto lo_vgg = noiseless_latency({1.2, TpuMode::Off, true, 0, "vgg16-like"},
                                          vgg.model, vgg.device);
    CHECK(lo_vgg.t_total_ms == doctest::Approx(90.6).epsilon(1e-6));
    const auto hi_vgg = noiseless_latency({0.6, TpuMode::Off, false, 20, "vgg16-like"},
                                          vgg.model, vgg.device);
    CHECK(hi_vgg.t_total_ms == doctest::Approx(5026.8).epsilon(1e-6));

    const auto lo_vit = noiseless_latency({1.4, TpuMode::Off, true, 0, "vit-like"},
                                          vit.model, vit.device);
    CHECK(lo_vit.t_total_ms == doctest::Approx(118.8).epsilon(1e-6));
    const auto hi_vit = noiseless_latency({0.6, TpuMode::Off, false, 18, "vit-like"},
                                          vit.model, vit.device);
    CHECK(hi_vit.t_total_ms == doctest::Approx(10287.6).epsilon(1e-6));
}

TEST_CASE("edge-only zeroes network and cloud for any seed") {
    const auto vgg = load_profile(testutil::vgg_profile_path());
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        rng::Stream rng(seed);
        const auto lb = simulate_latency({1.8, TpuMode::Max, false, 22, "vgg16-like"},
                                         vgg.model, vgg.device, rng, vgg.noise);
        CHECK(lb.t_net_ms == 0.0);
        CHECK(lb.t_cloud_ms == 0.0);
        CHECK(lb.t_total_ms ==
              doctest::Approx(lb.t_edge_ms + lb.t_net_ms + lb.t_cloud_ms));
    }
}

TEST_CASE("cloud-only leaves only the data-preparation terms on the edge") {
    const auto vgg = load_profile(testutil::vgg_profile_path());
    const auto lb = noiseless_latency({1.8, TpuMode::Off, true, 0, "vgg16-like"},
                                      vgg.model, vgg.device);
    const double prep_ms =
        (vgg.model.prep_pre_s + vgg.model.prep_post_s) * 1e3;  // at reference freq
    CHECK(lb.t_edge_ms == doctest::Approx(prep_ms));
    CHECK(lb.t_net_ms > 0.0);
    CHECK(lb.t_cloud_ms > 0.0);
}

TEST_CASE("tpu path divides the head cost by the mode's speedup") {
    const auto vgg = load_profile(testutil::vgg_profile_path());
    const Configuration cpu_only{1.8, TpuMode::Off, false, 22, "vgg16-like"};
    const Configuration tpu_max{1.8, TpuMode::Max, false, 22, "vgg16-like"};
    const auto t_cpu = noiseless_latency(cpu_only, vgg.model, vgg.device);
    const auto t_tpu = noiseless_latency(tpu_max, vgg.model, vgg.device);
    const double prep_ms = (vgg.model.prep_pre_s + vgg.model.prep_post_s) * 1e3;
    CHECK((t_cpu.t_edge_ms - prep_ms) / (t_tpu.t_edge_ms - prep_ms) ==
          doctest::Approx(vgg.device.tpu.speedup_max));
    // Edge-only with the TPU lands on the calibrated 425 ms operating point.
    CHECK(t_tpu.t_total_ms == doctest::Approx(425.0).epsilon(1e-6));
}

TEST_CASE("latency noise is multiplicative, truncated and unbiased-ish") {
    const auto vgg = load_profile(testutil::vgg_profile_path());
    const Configuration c{1.2, TpuMode::Off, true, 0, "vgg16-like"};
    const auto base = noiseless_latency(c, vgg.model, vgg.device);
    rng::Stream rng(99);
    double sum = 0.0;
    const int n = 4000;
    for (int i = 0; i < n; ++i) {
        const auto lb = simulate_latency(c, vgg.model, vgg.device, rng, vgg.noise);
        // +-3 sigma truncation bounds every component.
        CHECK(lb.t_edge_ms <= base.t_edge_ms * std::exp(3 * 0.03) * (1 + 1e-9));
        CHECK(lb.t_edge_ms >= base.t_edge_ms * std::exp(-3 * 0.03) * (1 - 1e-9));
        sum += lb.t_total_ms;
    }
    CHECK(sum / n == doctest::Approx(base.t_total_ms).epsilon(0.01));
}

TEST_CASE("power trace phases and sampled energies") {
    const auto vgg = load_profile(testutil::vgg_profile_path());
    const Configuration split{1.8, TpuMode::Max, true, 10, "vgg16-like"};
    const auto lb = noiseless_latency(split, vgg.model, vgg.device);
    const auto trace = simulate_power_trace(split, vgg.model, vgg.device, lb);
    const auto& tl = trace.timeline;

    REQUIRE(tl.t_net1_s.has_value());
    REQUIRE(tl.t_net2_s.has_value());
    CHECK(tl.t0_s == 0.0);
    CHECK(tl.head_end_s <= *tl.t_net1_s);
    CHECK(*tl.t_net1_s <= *tl.t_net2_s);
    CHECK(*tl.t_net2_s <= tl.t_inf_s);
    CHECK(tl.t_inf_s == doctest::Approx(lb.t_total_ms * 1e-3));

    // The component totals of the breakdown are preserved by reconstruction.
    const double edge_s = tl.head_end_s + (tl.t_inf_s - *tl.return_end_s);
    CHECK(edge_s == doctest::Approx(lb.t_edge_ms * 1e-3));
    // Cloud power is nonzero only during the active computation phase.
    CHECK(tl.cloud_power.boundaries_s.front() == doctest::Approx(*tl.t_net1_s));
    CHECK(tl.cloud_power.boundaries_s.back() == doctest::Approx(*tl.t_net2_s));
    CHECK(tl.cloud_power.levels_w[0] == vgg.device.cloud_gpu_power_w);

    // Edge-only: cloud series identically zero.
    const Configuration edge_only{1.8, TpuMode::Max, false, 22, "vgg16-like"};
    const auto lb2 = noiseless_latency(edge_only, vgg.model, vgg.device);
    const auto trace2 = simulate_power_trace(edge_only, vgg.model, vgg.device, lb2);
    CHECK_FALSE(trace2.timeline.t_net1_s.has_value());
    for (const auto& s : trace2.cloud_series) CHECK(s.power_w == 0.0);
}

TEST_CASE("meter fidelity: sampled trapezoid error is bounded and vanishing") {
    const auto vgg = load_profile(testutil::vgg_profile_path());
    const Configuration split{1.4, TpuMode::Std, true, 13, "vgg16-like"};
    rng::Stream rng(7);
    const auto obs_target = evaluate_trial(split, vgg.model, vgg.device, 1000, rng,
                                           vgg.noise);
    // Rebuild the batch trace at several sampling intervals.
    const auto lb = obs_target.latency;
    LatencyBreakdown batch = lb;  // per-inference values scaled to the batch
    batch.t_edge_ms *= 1000;
    batch.t_net_ms *= 1000;
    batch.t_cloud_ms *= 1000;
    batch.t_total_ms *= 1000;
    const auto trace = simulate_power_trace(split, vgg.model, vgg.device, batch);
    const double exact = trace.timeline.edge_power.exact_integral_j();
    double max_power = 0.0;
    for (double w : trace.timeline.edge_power.levels_w)
        max_power = std::max(max_power, w);

    double prev_err = std::numeric_limits<double>::infinity();
    for (double interval : {0.2, 0.05, 0.01}) {
        const auto series = trace.timeline.edge_power.sample(interval);
        const double err = std::abs(integrate_energy(series) - exact);
        CHECK(err <= interval * max_power + 1e-9);
        CHECK(err <= prev_err + 1e-9);
        prev_err = err;
    }
}

TEST_CASE("accuracy model: penalty shape and noise bound") {
    const auto vgg = load_profile(testutil::vgg_profile_path());
    const auto vit = load_profile(testutil::vit_profile_path());

    // k = 0: no quantized layers, no penalty.
    CHECK(quantization_penalty({1.8, TpuMode::Off, true, 0, "vgg16-like"},
                               vgg.model) == 0.0);
    // Std and Max share the penalty at equal k.
    const Configuration cs{1.8, TpuMode::Std, false, 11, "vgg16-like"};
    const Configuration cm{1.8, TpuMode::Max, false, 11, "vgg16-like"};
    CHECK(quantization_penalty(cs, vgg.model) == quantization_penalty(cm, vgg.model));
    // Monotone non-decreasing in the number of quantized layers.
    double prev = -1.0;
    for (int k = 1; k <= 22; ++k) {
        const double p = quantization_penalty(
            {1.8, TpuMode::Max, false, k, "vgg16-like"}, vgg.model);
        CHECK(p >= prev);
        CHECK(p <= 0.01);
        prev = p;
    }
    // No quantization path for the ViT-style model, and no penalty without TPU.
    CHECK(quantization_penalty({1.8, TpuMode::Off, false, 19, "vit-like"},
                               vit.model) == 0.0);
    CHECK(quantization_penalty({1.8, TpuMode::Off, false, 15, "vgg16-like"},
                               vgg.model) == 0.0);

    // |accuracy - base| < 0.01 for any configuration and seed.
    rng::Stream rng(5);
    for (int i = 0; i < 2000; ++i) {
        const int k = static_cast<int>(rng.uniform_index(23));
        const Configuration c{1.8, k > 0 ? TpuMode::Max : TpuMode::Off, false, k,
                              "vgg16-like"};
        const double a = simulate_accuracy(c, vgg.model, rng);
        CHECK(std::abs(a - vgg.model.accuracy.base) < 0.01);
    }
    // k = 0 with zero-noise profile returns the base exactly.
    auto quiet = vgg;
    quiet.model.accuracy.noise_sigma = 0.0;
    rng::Stream rng2(6);
    CHECK(simulate_accuracy({1.8, TpuMode::Off, true, 0, "vgg16-like"}, quiet.model,
                            rng2) == vgg.model.accuracy.base);
}

TEST_CASE("evaluate_trial: determinism, additivity and batch amortization") {
    const auto vgg = load_profile(testutil::vgg_profile_path());
    const Configuration split{1.6, TpuMode::Std, true, 8, "vgg16-like"};

    rng::Stream a(123), b(123);
    const auto o1 = evaluate_trial(split, vgg.model, vgg.device, 100, a, vgg.noise);
    const auto o2 = evaluate_trial(split, vgg.model, vgg.device, 100, b, vgg.noise);
    CHECK(o1.latency.t_total_ms == o2.latency.t_total_ms);
    CHECK(o1.energy_total_j == o2.energy_total_j);
    CHECK(o1.accuracy == o2.accuracy);

    CHECK(o1.energy_total_j ==
          doctest::Approx(o1.energy_edge_j + o1.energy_cloud_j));
    CHECK(o1.latency.t_total_ms ==
          doctest::Approx(o1.latency.t_edge_ms + o1.latency.t_net_ms +
                          o1.latency.t_cloud_ms));

    // One round trip per batch: per-inference network time shrinks with n.
    rng::Stream c(9), d(9);
    const auto single = evaluate_trial(split, vgg.model, vgg.device, 1, c, vgg.noise);
    const auto batch = evaluate_trial(split, vgg.model, vgg.device, 1000, d, vgg.noise);
    CHECK(batch.latency.t_net_ms < single.latency.t_net_ms);
    const double payload_ms =
        vgg.model.intermediate_output_bytes[8] / vgg.device.bandwidth_bytes_per_s * 1e3;
    CHECK(batch.latency.t_net_ms > 0.9 * payload_ms);

    // Edge-only zeroing of cloud energy for any seed.
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        rng::Stream r(seed);
        const auto obs = evaluate_trial({1.8, TpuMode::Max, false, 22, "vgg16-like"},
                                        vgg.model, vgg.device, 50, r, vgg.noise);
        CHECK(obs.energy_cloud_j == 0.0);
    }
}

TEST_CASE("calibrated energy operating points") {
    const auto vgg = load_profile(testutil::vgg_profile_path());
    // Edge-only best configuration: a handful of joules per inference.
    rng::Stream r1(1);
    const auto edge = evaluate_trial({1.8, TpuMode::Max, false, 22, "vgg16-like"},
                                     vgg.model, vgg.device, 1000, r1, vgg.noise);
    CHECK(edge.energy_total_j > 2.0);
    CHECK(edge.energy_total_j < 3.0);

    // Cloud baseline: roughly 68 J per inference.
    rng::Stream r2(2);
    const auto cloud = evaluate_trial({1.8, TpuMode::Off, true, 0, "vgg16-like"},
                                      vgg.model, vgg.device, 1000, r2, vgg.noise);
    CHECK(cloud.energy_total_j == doctest::Approx(68.0).epsilon(0.10));
}

TEST_CASE("cost model rejects invalid inputs") {
    const auto vgg = load_profile(testutil::vgg_profile_path());
    rng::Stream rng(0);
    CHECK_THROWS_AS(evaluate_trial({1.8, TpuMode::Off, false, 23, "vgg16-like"},
                                   vgg.model, vgg.device, 1, rng, vgg.noise),
                    std::invalid_argument);
    CHECK_THROWS_AS(evaluate_trial({1.8, TpuMode::Off, false, 2, "mystery"},
                                   vgg.model, vgg.device, 1, rng, vgg.noise),
                    std::invalid_argument);
    CHECK_THROWS_AS(evaluate_trial({1.8, TpuMode::Off, false, 2, "vgg16-like"},
                                   vgg.model, vgg.device, 0, rng, vgg.noise),
                    std::invalid_argument);
}
