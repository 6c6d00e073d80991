#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace dynasplit::rng {

// All randomness in the project flows through this header. Distributions are
// hand-rolled on top of std::mt19937_64 (whose output is standardized
// bit-exact) instead of using std::*_distribution, whose sequences are
// implementation-defined and would break byte-identical reproducibility.

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Named sub-stream seed: independent streams per component (solver, workload,
/// noise, replay, ...) derived from one manifest seed.
constexpr std::uint64_t substream(std::uint64_t seed, std::string_view name) {
    return splitmix64(seed ^ fnv1a64(name));
}

/// Indexed sub-stream seed, e.g. one independent stream per trial.
constexpr std::uint64_t substream(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(seed ^ splitmix64(index + 0x51ed2701ULL));
}

class Stream {
public:
    explicit Stream(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    /// Uniform in (0, 1]; never returns 0 (safe for log()).
    double uniform_pos() { return 1.0 - uniform(); }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n).
    std::size_t uniform_index(std::size_t n) {
        // Rejection-free modulo bias is irrelevant at our domain sizes (<= ~10^4),
        // but use Lemire's multiply-shift anyway; it is exact and branch-light.
        const auto x = gen_();
        return static_cast<std::size_t>(
            (static_cast<unsigned __int128>(x) * n) >> 64);
    }

    bool bernoulli(double p) { return uniform() < p; }

    /// Standard normal via Box-Muller (stateless; uses two uniforms per draw).
    double normal() {
        const double u1 = uniform_pos();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    /// Normal(0, sigma) clamped to [-clamp_sigmas*sigma, +clamp_sigmas*sigma].
    double normal_truncated(double sigma, double clamp_sigmas = 3.0) {
        if (sigma <= 0.0) return 0.0;
        const double z = normal();
        const double c = clamp_sigmas;
        return sigma * (z < -c ? -c : (z > c ? c : z));
    }

    /// Multiplicative log-normal factor exp(N(0, sigma)), truncated at +-3 sigma.
    double lognormal_factor(double sigma, double clamp_sigmas = 3.0) {
        return std::exp(normal_truncated(sigma, clamp_sigmas));
    }

    /// Weibull(shape, scale=1) by inverse CDF.
    double weibull(double shape) {
        return std::pow(-std::log(uniform_pos()), 1.0 / shape);
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace dynasplit::rng
