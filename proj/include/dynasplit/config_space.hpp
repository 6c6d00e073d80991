#pragma once

#include <cstdint>
#include <string>
#include <tuple>
#include <vector>

namespace dynasplit {

/// Edge TPU accelerator setting. Numeric frequencies (0/250/500 MHz) live in
/// the cost profile; the search space is categorical.
enum class TpuMode : int { Off = 0, Std = 1, Max = 2 };

const char* to_string(TpuMode m);
TpuMode tpu_mode_from_string(const std::string& s);

/// One point of the hardware/software co-design space: edge CPU frequency,
/// edge TPU setting, cloud GPU usage, and the split layer k (layers 1..k run
/// on the edge, k+1..L on the cloud).
struct Configuration {
    double cpu_freq_ghz = 0.0;
    TpuMode tpu_mode = TpuMode::Off;
    bool use_gpu = false;
    int split_layer = 0;
    std::string model_id;

    bool edge_only(int layer_count) const { return split_layer == layer_count; }
    bool cloud_only() const { return split_layer == 0; }

    /// Lexicographic over (cpu_freq, tpu_mode, use_gpu, split_layer); the
    /// deterministic total order used by enumeration and tie-breaking.
    auto key() const {
        return std::tuple(cpu_freq_ghz, static_cast<int>(tpu_mode), use_gpu,
                          split_layer);
    }
    friend bool operator<(const Configuration& a, const Configuration& b) {
        return a.key() < b.key();
    }
    friend bool operator==(const Configuration& a, const Configuration& b) {
        return a.key() == b.key() && a.model_id == b.model_id;
    }

    std::string describe() const;
};

/// Model-specific feasibility constraints beyond the two structural rules.
/// Declared by name in the profile file so new models need no code change.
enum class NamedConstraint { NoTpu, NoEdgeOnly };

NamedConstraint constraint_from_string(const std::string& name);
const char* to_string(NamedConstraint c);

struct SearchSpace {
    std::string model_id;
    std::vector<double> cpu_grid;
    std::vector<TpuMode> tpu_modes;
    std::vector<bool> gpu_options;
    int layer_count = 0;  // split layer ranges over 0..layer_count
    std::vector<NamedConstraint> extra_constraints;

    std::size_t raw_size() const {
        return cpu_grid.size() * tpu_modes.size() * gpu_options.size() *
               static_cast<std::size_t>(layer_count + 1);
    }

    bool has_constraint(NamedConstraint c) const;
    void validate() const;
};

/// False iff (k = 0 and TPU on) or (k = L and GPU on) or a model constraint
/// rejects c. Throws if c references a different model than s.
bool is_feasible(const Configuration& c, const SearchSpace& s);

/// Every feasible configuration exactly once, in the deterministic
/// lexicographic order over (cpu grid, tpu modes, gpu options, split layer).
std::vector<Configuration> enumerate(const SearchSpace& s);

}  // namespace dynasplit
