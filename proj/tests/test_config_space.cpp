#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "dynasplit/config_space.hpp"
#include "dynasplit/profile.hpp"
#include "helpers.hpp"

using namespace dynasplit;

TEST_CASE("tpu mode strings round trip") {
    for (auto m : {TpuMode::Off, TpuMode::Std, TpuMode::Max})
        CHECK(tpu_mode_from_string(to_string(m)) == m);
    CHECK_THROWS(tpu_mode_from_string("turbo"));
}

TEST_CASE("structural feasibility rules") {
    const auto vgg = load_profile(testutil::vgg_profile_path());
    const auto vit = load_profile(testutil::vit_profile_path());

    // No TPU with cloud-only inference.
    CHECK_FALSE(is_feasible({1.8, TpuMode::Std, true, 0, "vgg16-like"}, vgg.space));
    // Plain edge-only passes everything.
    CHECK(is_feasible({1.8, TpuMode::Off, false, 22, "vgg16-like"}, vgg.space));
    // ViT forbids the TPU outright.
    CHECK_FALSE(is_feasible({0.6, TpuMode::Max, false, 5, "vit-like"}, vit.space));
    // No GPU with edge-only inference.
    CHECK_FALSE(is_feasible({1.8, TpuMode::Off, true, 22, "vgg16-like"}, vgg.space));
    // Cloud-only without the GPU stays feasible (cloud CPU inference).
    CHECK(is_feasible({1.8, TpuMode::Off, false, 0, "vgg16-like"}, vgg.space));

    CHECK_THROWS_AS(is_feasible({1.8, TpuMode::Off, false, 0, "resnet"}, vgg.space),
                    std::invalid_argument);
}

TEST_CASE("bundled space cardinalities match the brute-force oracle") {
    const auto vgg = load_profile(testutil::vgg_profile_path());
    CHECK(vgg.space.raw_size() == 966);  // 7 x 3 x 2 x 23
    const auto vgg_configs = enumerate(vgg.space);
    CHECK(vgg_configs.size() == 917);
    CHECK(vgg_configs.size() == testutil::oracle_feasible_count(vgg.space));

    const auto vit = load_profile(testutil::vit_profile_path());
    CHECK(vit.space.raw_size() == 840);  // 7 x 3 x 2 x 20
    const auto vit_configs = enumerate(vit.space);
    CHECK(vit_configs.size() == 273);
    CHECK(vit_configs.size() == testutil::oracle_feasible_count(vit.space));
}

TEST_CASE("enumeration is exact, unique and order-stable on random small spaces") {
    rng::Stream rng(20240811);
    for (int iter = 0; iter < 60; ++iter) {
        SearchSpace s;
        s.model_id = "rand";
        const int n_freq = 1 + static_cast<int>(rng.uniform_index(4));
        for (int i = 0; i < n_freq; ++i) s.cpu_grid.push_back(0.5 + 0.25 * i);
        s.tpu_modes = {TpuMode::Off};
        if (rng.bernoulli(0.7)) s.tpu_modes.push_back(TpuMode::Std);
        if (rng.bernoulli(0.5)) s.tpu_modes.push_back(TpuMode::Max);
        s.gpu_options = rng.bernoulli(0.5) ? std::vector<bool>{false, true}
                                           : std::vector<bool>{false};
        s.layer_count = 1 + static_cast<int>(rng.uniform_index(6));
        if (rng.bernoulli(0.3)) s.extra_constraints.push_back(NamedConstraint::NoTpu);
        if (rng.bernoulli(0.2))
            s.extra_constraints.push_back(NamedConstraint::NoEdgeOnly);

        const auto configs = enumerate(s);
        CHECK(configs.size() == testutil::oracle_feasible_count(s));
        CHECK(configs.size() <= s.raw_size());

        std::set<std::tuple<double, int, bool, int>> seen;
        for (const auto& c : configs) {
            CHECK(is_feasible(c, s));
            CHECK(seen.insert(c.key()).second);  // exactly once
        }
        CHECK(enumerate(s) == configs);  // order-stable across runs
        for (std::size_t i = 1; i < configs.size(); ++i)
            CHECK(configs[i - 1].key() < configs[i].key());  // lexicographic
    }
}

TEST_CASE("invalid spaces are rejected") {
    SearchSpace s;
    s.model_id = "x";
    s.cpu_grid = {1.0};
    s.tpu_modes = {TpuMode::Off};
    s.gpu_options = {false};
    s.layer_count = 0;
    CHECK_THROWS_AS(enumerate(s), std::invalid_argument);
    s.layer_count = 3;
    s.cpu_grid = {};
    CHECK_THROWS_AS(enumerate(s), std::invalid_argument);
    CHECK_THROWS_AS(constraint_from_string("no-such-rule"), std::invalid_argument);
}
