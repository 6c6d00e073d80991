#include "dynasplit/config_space.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace dynasplit {

const char* to_string(TpuMode m) {
    switch (m) {
        case TpuMode::Off: return "off";
        case TpuMode::Std: return "std";
        case TpuMode::Max: return "max";
    }
    return "?";
}

TpuMode tpu_mode_from_string(const std::string& s) {
    if (s == "off") return TpuMode::Off;
    if (s == "std") return TpuMode::Std;
    if (s == "max") return TpuMode::Max;
    throw std::invalid_argument("unknown tpu mode '" + s + "'");
}

std::string Configuration::describe() const {
    std::ostringstream os;
    os << model_id << "(" << cpu_freq_ghz << "GHz,tpu=" << to_string(tpu_mode)
       << ",gpu=" << (use_gpu ? "yes" : "no") << ",k=" << split_layer << ")";
    return os.str();
}

NamedConstraint constraint_from_string(const std::string& name) {
    if (name == "no-tpu") return NamedConstraint::NoTpu;
    if (name == "no-edge-only") return NamedConstraint::NoEdgeOnly;
    throw std::invalid_argument("unknown constraint '" + name + "'");
}

const char* to_string(NamedConstraint c) {
    switch (c) {
        case NamedConstraint::NoTpu: return "no-tpu";
        case NamedConstraint::NoEdgeOnly: return "no-edge-only";
    }
    return "?";
}

bool SearchSpace::has_constraint(NamedConstraint c) const {
    return std::find(extra_constraints.begin(), extra_constraints.end(), c) !=
           extra_constraints.end();
}

void SearchSpace::validate() const {
    if (model_id.empty()) throw std::invalid_argument("search space: empty model id");
    if (cpu_grid.empty() || tpu_modes.empty() || gpu_options.empty())
        throw std::invalid_argument("search space: empty parameter domain");
    if (layer_count < 1)
        throw std::invalid_argument("search space: layer count must be >= 1");
    for (double f : cpu_grid)
        if (f <= 0.0) throw std::invalid_argument("search space: non-positive cpu frequency");
}

namespace {

bool satisfies_named(const Configuration& c, const SearchSpace& s) {
    for (NamedConstraint nc : s.extra_constraints) {
        switch (nc) {
            case NamedConstraint::NoTpu:
                if (c.tpu_mode != TpuMode::Off) return false;
                break;
            case NamedConstraint::NoEdgeOnly:
                if (c.split_layer == s.layer_count) return false;
                break;
        }
    }
    return true;
}

}  // namespace

bool is_feasible(const Configuration& c, const SearchSpace& s) {
    if (c.model_id != s.model_id)
        throw std::invalid_argument("is_feasible: configuration targets model '" +
                                    c.model_id + "', space is for '" + s.model_id + "'");
    // No TPU with cloud-only inference; no GPU with edge-only inference.
    if (c.split_layer == 0 && c.tpu_mode != TpuMode::Off) return false;
    if (c.split_layer == s.layer_count && c.use_gpu) return false;
    return satisfies_named(c, s);
}

std::vector<Configuration> enumerate(const SearchSpace& s) {
    s.validate();
    std::vector<Configuration> out;
    out.reserve(s.raw_size());
    for (double f : s.cpu_grid)
        for (TpuMode m : s.tpu_modes)
            for (bool g : s.gpu_options)
                for (int k = 0; k <= s.layer_count; ++k) {
                    Configuration c{f, m, g, k, s.model_id};
                    if (is_feasible(c, s)) out.push_back(std::move(c));
                }
    return out;
}

}  // namespace dynasplit
