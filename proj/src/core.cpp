#include "hapticsim/core.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace hapticsim {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

}  // namespace

Stimulus make_none_stimulus() {
    return Stimulus{};
}

Stimulus make_vibro_stimulus(std::string label, double accel_m_s2) {
    if (!(accel_m_s2 > 0.0 && accel_m_s2 <= 10.0)) {
        throw std::invalid_argument("vibro acceleration must be in (0, 10] m/s^2");
    }
    Stimulus s;
    s.kind = StimulusKind::Vibro;
    s.label = std::move(label);
    s.vibro_accel_m_s2 = accel_m_s2;
    return s;
}

Stimulus make_pneumo_stimulus(std::string label, double pressure_kpa) {
    if (!(pressure_kpa > 0.0 && pressure_kpa <= 12.0)) {
        throw std::invalid_argument("pneumatic pressure must be in (0, 12] kPa");
    }
    Stimulus s;
    s.kind = StimulusKind::Pneumo;
    s.label = std::move(label);
    s.pneumo_pressure_kpa = pressure_kpa;
    return s;
}

const std::array<Stimulus, 7>& canonical_stimuli() {
    static const std::array<Stimulus, 7> table = {
        make_none_stimulus(),
        make_vibro_stimulus("A1", 3.7),
        make_vibro_stimulus("A2", 4.9),
        make_vibro_stimulus("A3", 6.2),
        make_pneumo_stimulus("B1", 6.0),
        make_pneumo_stimulus("B2", 8.0),
        make_pneumo_stimulus("B3", 10.0),
    };
    return table;
}

const std::array<std::string_view, 7>& stimulus_energy_order() {
    static const std::array<std::string_view, 7> order = {"N", "A1", "B1", "A2",
                                                          "B2", "A3", "B3"};
    return order;
}

const Stimulus& stimulus_from_label(std::string_view label) {
    for (const auto& s : canonical_stimuli()) {
        if (s.label == label) return s;
    }
    throw std::invalid_argument("unknown stimulus label: '" + std::string(label) + "'");
}

bool is_stimulus_label(std::string_view label) {
    for (const auto& s : canonical_stimuli()) {
        if (s.label == label) return true;
    }
    return false;
}

int stimulus_energy_rank(std::string_view label) {
    const auto& order = stimulus_energy_order();
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (order[i] == label) return static_cast<int>(i);
    }
    throw std::invalid_argument("unknown stimulus label: '" + std::string(label) + "'");
}

std::string_view material_name(MaterialId id) {
    switch (id) {
        case MaterialId::Glass: return "glass";
        case MaterialId::Ceramics: return "ceramics";
        case MaterialId::Paper: return "paper";
        case MaterialId::Plywood: return "plywood";
        case MaterialId::BalsaWood: return "wood";
        case MaterialId::Cotton: return "cotton";
        case MaterialId::Leather: return "leather";
    }
    throw std::invalid_argument("invalid material id");
}

MaterialId material_from_name(std::string_view name) {
    const std::string n = lower(name);
    if (n == "glass") return MaterialId::Glass;
    if (n == "ceramics" || n == "ceramic") return MaterialId::Ceramics;
    if (n == "paper") return MaterialId::Paper;
    if (n == "plywood") return MaterialId::Plywood;
    if (n == "wood" || n == "balsa" || n == "balsa_wood" || n == "balsawood") {
        return MaterialId::BalsaWood;
    }
    if (n == "cotton") return MaterialId::Cotton;
    if (n == "leather") return MaterialId::Leather;
    throw std::invalid_argument("unknown material: '" + std::string(name) + "'");
}

const std::array<MaterialId, 7>& all_materials() {
    static const std::array<MaterialId, 7> ids = {
        MaterialId::Glass,   MaterialId::Ceramics,  MaterialId::Paper,
        MaterialId::Plywood, MaterialId::BalsaWood, MaterialId::Cotton,
        MaterialId::Leather,
    };
    return ids;
}

const std::array<MaterialId, 6>& test_materials() {
    static const std::array<MaterialId, 6> ids = {
        MaterialId::Glass,     MaterialId::Ceramics, MaterialId::Paper,
        MaterialId::BalsaWood, MaterialId::Cotton,   MaterialId::Leather,
    };
    return ids;
}

int roughness_rank(MaterialId id) {
    switch (id) {
        case MaterialId::Glass: return 0;
        case MaterialId::Ceramics: return 1;
        case MaterialId::Paper: return 2;
        case MaterialId::BalsaWood: return 3;
        case MaterialId::Cotton: return 4;
        case MaterialId::Leather: return 5;
        case MaterialId::Plywood: break;
    }
    throw std::invalid_argument("material has no roughness rank: " +
                                std::string(material_name(id)));
}

int WaveformParams::samples_per_frame() const {
    const double ratio = sample_rate_hz / frame_rate_hz;
    const double rounded = std::round(ratio);
    if (std::abs(ratio - rounded) > 1e-9 || rounded < 1.0) {
        throw std::invalid_argument(
            "sample_rate_hz must be an integer multiple of frame_rate_hz");
    }
    return static_cast<int>(rounded);
}

void WaveformParams::validate() const {
    if (!(amplitude >= 0.0 && amplitude <= 1.0)) {
        throw std::invalid_argument("amplitude must be in [0, 1]");
    }
    if (!(wavelength_mm > 0.0)) {
        throw std::invalid_argument("wavelength_mm must be positive");
    }
    if (!std::isfinite(phase_rad)) {
        throw std::invalid_argument("phase_rad must be finite");
    }
    if (!(frame_rate_hz > 0.0) || !(sample_rate_hz > 0.0)) {
        throw std::invalid_argument("rates must be positive");
    }
    samples_per_frame();
}

void PidGains::validate() const {
    if (!(kp >= 0.0 && ki >= 0.0 && kd >= 0.0)) {
        throw std::invalid_argument("gains must be non-negative");
    }
    if (!(period_s > 0.0)) {
        throw std::invalid_argument("period_s must be positive");
    }
    if (!(out_min < out_max)) {
        throw std::invalid_argument("out_min must be below out_max");
    }
}

}  // namespace hapticsim
