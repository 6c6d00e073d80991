#include "dynasplit/profile.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace dynasplit {

using nlohmann::json;

double PowerLaw::at(double freq_ghz) const {
    return base_w + alpha * std::pow(freq_ghz, beta);
}

double TpuCharacteristics::addon_power(TpuMode m) const {
    switch (m) {
        case TpuMode::Off: return 0.0;
        case TpuMode::Std: return addon_power_std_w;
        case TpuMode::Max: return addon_power_max_w;
    }
    return 0.0;
}

double TpuCharacteristics::speedup(TpuMode m) const {
    switch (m) {
        case TpuMode::Off: return 1.0;
        case TpuMode::Std: return speedup_std;
        case TpuMode::Max: return speedup_max;
    }
    return 1.0;
}

namespace {

void require_positive(const std::vector<double>& v, std::size_t n,
                      const char* what) {
    if (v.size() != n)
        throw std::invalid_argument(std::string("profile: ") + what +
                                    " must have " + std::to_string(n) + " entries");
    for (double x : v)
        if (!(x > 0.0))
            throw std::invalid_argument(std::string("profile: ") + what +
                                        " entries must be strictly positive");
}

}  // namespace

void ModelProfile::validate() const {
    if (model_id.empty()) throw std::invalid_argument("profile: empty model id");
    if (layer_count < 1) throw std::invalid_argument("profile: layer count must be >= 1");
    if (reference_freq_ghz <= 0.0)
        throw std::invalid_argument("profile: reference frequency must be positive");
    const auto L = static_cast<std::size_t>(layer_count);
    require_positive(edge_cpu_cost_s, L, "edge cpu costs");
    if (tpu_supported) require_positive(edge_tpu_cost_s, L, "edge tpu costs");
    require_positive(cloud_cpu_cost_s, L, "cloud cpu costs");
    require_positive(cloud_gpu_cost_s, L, "cloud gpu costs");
    require_positive(intermediate_output_bytes, L + 1, "intermediate output sizes");
    if (prep_pre_s < 0.0 || prep_post_s < 0.0)
        throw std::invalid_argument("profile: negative prep time");
    if (accuracy.base < 0.0 || accuracy.base > 1.0)
        throw std::invalid_argument("profile: base accuracy outside [0,1]");
    if (accuracy.quant_penalty_max < 0.0 ||
        accuracy.quant_penalty_max + 3.0 * accuracy.noise_sigma >= 0.01)
        throw std::invalid_argument(
            "profile: accuracy deviation bound violated (quant penalty + 3 sigma "
            "noise must stay under one percentage point)");
}

void DeviceProfile::validate() const {
    auto nonneg = [](double v, const char* what) {
        if (v < 0.0) throw std::invalid_argument(std::string("profile: negative ") + what);
    };
    nonneg(edge_idle_power.base_w, "edge idle power");
    nonneg(edge_active_power.base_w, "edge active power");
    nonneg(cloud_cpu_power_w, "cloud cpu power");
    nonneg(cloud_gpu_power_w, "cloud gpu power");
    if (bandwidth_bytes_per_s <= 0.0)
        throw std::invalid_argument("profile: bandwidth must be positive");
    nonneg(rtt_s, "round-trip time");
    if (edge_meter_interval_s <= 0.0 || cloud_meter_interval_s <= 0.0)
        throw std::invalid_argument("profile: meter intervals must be positive");
    if (tpu.speedup_std <= 0.0 || tpu.speedup_max <= 0.0)
        throw std::invalid_argument("profile: tpu speedup must be positive");
}

void Profile::validate() const {
    model.validate();
    device.validate();
    space.validate();
    if (space.model_id != model.model_id)
        throw std::invalid_argument("profile: search space model id mismatch");
    if (space.layer_count != model.layer_count)
        throw std::invalid_argument("profile: search space layer count mismatch");
    if (!model.tpu_supported && !space.has_constraint(NamedConstraint::NoTpu) &&
        space.tpu_modes.size() > 1)
        throw std::invalid_argument(
            "profile: model without tpu support must constrain tpu modes");
    if (noise.edge_sigma < 0.0 || noise.net_sigma < 0.0 || noise.cloud_sigma < 0.0)
        throw std::invalid_argument("profile: negative noise sigma");
    if (workload_bounds.min_ms >= workload_bounds.max_ms)
        throw std::invalid_argument("profile: workload bounds must satisfy min < max");
}

namespace {

PowerLaw parse_power_law(const json& j) {
    return PowerLaw{j.at("base_w").get<double>(), j.at("alpha").get<double>(),
                    j.at("beta").get<double>()};
}

}  // namespace

Profile parse_profile(const std::string& text) {
    json j = json::parse(text);
    Profile p;

    const json& m = j.at("model");
    p.model.model_id = m.at("model_id").get<std::string>();
    p.model.layer_count = m.at("layer_count").get<int>();
    p.model.reference_freq_ghz = m.at("reference_freq_ghz").get<double>();
    p.model.edge_cpu_cost_s = m.at("edge_layer_cost_s").at("cpu").get<std::vector<double>>();
    p.model.tpu_supported = m.at("tpu_supported").get<bool>();
    if (p.model.tpu_supported)
        p.model.edge_tpu_cost_s = m.at("edge_layer_cost_s").at("tpu").get<std::vector<double>>();
    p.model.cloud_cpu_cost_s = m.at("cloud_layer_cost_s").at("cpu").get<std::vector<double>>();
    p.model.cloud_gpu_cost_s = m.at("cloud_layer_cost_s").at("gpu").get<std::vector<double>>();
    p.model.intermediate_output_bytes = m.at("intermediate_output_bytes").get<std::vector<double>>();
    p.model.prep_pre_s = m.at("edge_prep_s").at("pre").get<double>();
    p.model.prep_post_s = m.at("edge_prep_s").at("post").get<double>();

    const json& acc = m.at("accuracy");
    p.model.accuracy.base = acc.at("base").get<double>();
    p.model.accuracy.quant_penalty_max = acc.at("quant_penalty_max").get<double>();
    p.model.accuracy.quant_exponent = acc.value("quant_exponent", 1.0);
    p.model.accuracy.quantization_enabled = acc.at("quantization_enabled").get<bool>();
    p.model.accuracy.noise_sigma = acc.value("noise_sigma", 0.001);

    const json& d = j.at("device");
    const json& edge = d.at("edge");
    p.device.edge_idle_power = parse_power_law(edge.at("idle_power_w"));
    p.device.edge_active_power = parse_power_law(edge.at("active_power_w"));
    p.device.edge_meter_interval_s = edge.at("meter_interval_s").get<double>();
    if (edge.contains("tpu")) {
        const json& t = edge.at("tpu");
        p.device.tpu.addon_power_std_w = t.at("addon_power_w").at("std").get<double>();
        p.device.tpu.addon_power_max_w = t.at("addon_power_w").at("max").get<double>();
        p.device.tpu.speedup_std = t.at("speedup").at("std").get<double>();
        p.device.tpu.speedup_max = t.at("speedup").at("max").get<double>();
    }
    const json& cloud = d.at("cloud");
    p.device.cloud_cpu_power_w = cloud.at("active_power_w").at("cpu").get<double>();
    p.device.cloud_gpu_power_w = cloud.at("active_power_w").at("gpu").get<double>();
    p.device.cloud_meter_interval_s = cloud.at("meter_interval_s").get<double>();
    const json& net = d.at("network");
    p.device.bandwidth_bytes_per_s = net.at("bandwidth_bytes_per_s").get<double>();
    p.device.rtt_s = net.at("rtt_s").get<double>();

    if (d.contains("overhead")) {
        const json& ov = d.at("overhead");
        if (ov.contains("selection")) {
            const json& s = ov.at("selection");
            p.device.selection_overhead.base_ms = s.value("base_ms", 2.0);
            p.device.selection_overhead.per_entry_ms = s.value("per_entry_ms", 0.2);
            p.device.selection_overhead.sigma = s.value("sigma", 0.2);
        }
        if (ov.contains("apply")) {
            const json& a = ov.at("apply");
            p.device.apply_overhead.freq_change_ms = a.value("freq_change_ms", 15.0);
            p.device.apply_overhead.tpu_toggle_ms = a.value("tpu_toggle_ms", 40.0);
            p.device.apply_overhead.model_load_ms = a.value("model_load_ms", 55.0);
            p.device.apply_overhead.cloud_init_ms = a.value("cloud_init_ms", 40.0);
            p.device.apply_overhead.sigma = a.value("sigma", 0.25);
        }
    }

    const json& ss = j.at("search_space");
    p.space.model_id = p.model.model_id;
    p.space.layer_count = p.model.layer_count;
    p.space.cpu_grid = ss.at("cpu_freq_ghz").get<std::vector<double>>();
    for (const auto& s : ss.at("tpu_modes").get<std::vector<std::string>>())
        p.space.tpu_modes.push_back(tpu_mode_from_string(s));
    p.space.gpu_options = ss.at("gpu_options").get<std::vector<bool>>();
    if (ss.contains("constraints"))
        for (const auto& name : ss.at("constraints").get<std::vector<std::string>>())
            p.space.extra_constraints.push_back(constraint_from_string(name));

    if (j.contains("noise")) {
        const json& n = j.at("noise");
        const double s = n.value("latency_sigma", 0.03);
        p.noise.edge_sigma = s;
        p.noise.net_sigma = s;
        p.noise.cloud_sigma = s;
        if (n.contains("components")) {
            const json& c = n.at("components");
            p.noise.edge_sigma = c.value("edge", p.noise.edge_sigma);
            p.noise.net_sigma = c.value("net", p.noise.net_sigma);
            p.noise.cloud_sigma = c.value("cloud", p.noise.cloud_sigma);
        }
    }

    const json& wb = j.at("workload_bounds_ms");
    p.workload_bounds.min_ms = wb.at("min").get<double>();
    p.workload_bounds.max_ms = wb.at("max").get<double>();

    p.validate();
    return p;
}

Profile load_profile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("profile: cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    try {
        return parse_profile(text);
    } catch (const json::exception& e) {
        throw std::runtime_error("profile: " + path + ": " + e.what());
    }
}

}  // namespace dynasplit
