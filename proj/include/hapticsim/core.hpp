#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hapticsim {

// ---------------------------------------------------------------------------
// Stimuli
//
// The device has two actuation channels.  A stimulus is either nothing (N),
// a vibrotactile level (A1..A3, peak acceleration in m/s^2), or a pneumatic
// level (B1..B3, steady lift pressure in kPa).  The text labels are the
// stable identifiers used in files and on the wire.
// ---------------------------------------------------------------------------

enum class StimulusKind { None, Vibro, Pneumo };

struct Stimulus {
    StimulusKind kind = StimulusKind::None;
    std::string label = "N";
    // Exactly one of these is set for an active stimulus, neither for N.
    std::optional<double> vibro_accel_m_s2;
    std::optional<double> pneumo_pressure_kpa;

    bool is_active() const { return kind != StimulusKind::None; }
};

Stimulus make_none_stimulus();
Stimulus make_vibro_stimulus(std::string label, double accel_m_s2);
Stimulus make_pneumo_stimulus(std::string label, double pressure_kpa);

// The seven levels used throughout: N, A1 (3.7), A2 (4.9), A3 (6.2) m/s^2,
// B1 (6), B2 (8), B3 (10) kPa, in increasing intensity order per channel.
const std::array<Stimulus, 7>& canonical_stimuli();

// Canonical label list in energy order (weakest first): N A1 B1 A2 B2 A3 B3.
const std::array<std::string_view, 7>& stimulus_energy_order();

// Returns the canonical stimulus for a label; throws std::invalid_argument
// naming the offending text for anything else.
const Stimulus& stimulus_from_label(std::string_view label);

bool is_stimulus_label(std::string_view label);

// Position of a label in the energy order (N=0 ... B3=6).
int stimulus_energy_rank(std::string_view label);

// ---------------------------------------------------------------------------
// Materials
// ---------------------------------------------------------------------------

enum class MaterialId {
    Glass,
    Ceramics,
    Paper,
    Plywood,
    BalsaWood,
    Cotton,
    Leather,
};

// Canonical names: glass ceramics paper plywood wood cotton leather.
// ("wood" denotes the balsa test material; plywood is the bare-plate
// reference surface.)  Parsing accepts common aliases case-insensitively.
std::string_view material_name(MaterialId id);
MaterialId material_from_name(std::string_view name);

const std::array<MaterialId, 7>& all_materials();
// The six materials with perceptual ratings (everything except plywood).
const std::array<MaterialId, 6>& test_materials();

// Roughness order of the test materials, smoothest first.
// glass < ceramics < paper < wood < cotton < leather
int roughness_rank(MaterialId id);

// ---------------------------------------------------------------------------
// Waveform parameters
//
// Drive sample y(t) = A * sin(2*pi * integral(v)/lambda + phi), rendered at
// sample_rate_hz and delivered in frames of sample_rate/frame_rate samples.
// ---------------------------------------------------------------------------

struct WaveformParams {
    double amplitude = 1.0;        // normalized full-scale fraction, [0, 1]
    double wavelength_mm = 1.0;    // spatial period of the virtual texture
    double phase_rad = 0.0;
    double frame_rate_hz = 1000.0; // frame delivery rate
    double sample_rate_hz = 3000.0;

    // Samples per frame; sample_rate must be an integer multiple of the
    // frame rate so frames are exact.
    int samples_per_frame() const;

    // Throws std::invalid_argument on any out-of-range field.
    void validate() const;
};

// ---------------------------------------------------------------------------
// PID gains (positional form, fixed control period)
// ---------------------------------------------------------------------------

struct PidGains {
    double kp = 0.0;
    double ki = 0.0;
    double kd = 0.0;
    double period_s = 0.05;   // controller tick period
    double out_min = -1.0;    // duty limits; negative duty vents
    double out_max = 1.0;

    void validate() const;
};

}  // namespace hapticsim
