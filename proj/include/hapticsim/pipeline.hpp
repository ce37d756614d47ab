#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hapticsim/core.hpp"
#include "hapticsim/pneumo.hpp"
#include "hapticsim/session.hpp"
#include "hapticsim/tracking.hpp"

namespace hapticsim {

// ---------------------------------------------------------------------------
// Closed-loop scenario: tracking -> scheduling -> actuation on a 1 kHz
// master clock.  The camera path, contact events, and both actuator chains
// run against the simulated plant; the result is a per-millisecond trace.
// ---------------------------------------------------------------------------

// Transport/processing budgets (ms).  The vibrotactile chain is a pure
// delay of capture + estimation + synthesis; the pneumatic chain's response
// time comes out of the plant dynamics instead.
struct LatencyBudget {
    double capture_ms = 33.0;
    double estimation_ms = 19.53;
    double synthesis_ms = 1.0;
    double actuation_on_ms = 146.0;
    double actuation_off_ms = 329.0;

    double vibro_total_ms() const { return capture_ms + estimation_ms + synthesis_ms; }
};

struct ContactSpan {
    std::uint64_t t_begin_ms = 0;
    std::uint64_t t_end_ms = 0;
    MaterialId virtual_material = MaterialId::Glass;
};

struct ScenarioConfig {
    std::uint64_t seed = 0;
    std::uint64_t duration_ms = 6000;
    MaterialId physical_material = MaterialId::Plywood;
    double normal_force_n = 1.0;
    TrajectoryProfile trajectory = TrajectoryProfile::constant(100.0);
    std::vector<ContactSpan> contacts;
    // Empty mapping: derive each virtual material's stimulus from the
    // perception model for the physical prop.
    std::map<MaterialId, std::string> mapping;
    PlantParams plant;
    PidGains gains{0.25, 0.6, 0.0};  // calibrated; see config/plant_default.json
    WaveformParams waveform;
    LatencyBudget latency;
    std::uint64_t stimulus_max_ms = 5000;
    std::uint64_t refractory_ms = 0;

    void validate() const;
};

// JSON round-trip; errors name the offending field path.
ScenarioConfig scenario_config_from_json(const std::string& text);
std::string scenario_config_to_json(const ScenarioConfig& config);

struct ScenarioRow {
    std::uint64_t t_ms = 0;
    double speed_mm_s = 0.0;          // estimated fingertip speed
    double drive_rms = 0.0;           // vibro drive over this millisecond
    double pressure_kpa = 0.0;        // true plant pressure
    double lift_mm = 0.0;
    double area_reduction_pct = 0.0;
    std::string event;                // events this tick, ';'-joined
};

struct ScenarioResult {
    std::vector<ScenarioRow> rows;            // one per millisecond
    std::vector<SessionEvent> inputs;         // contact stream fed in
    std::vector<SessionEvent> responses;      // scheduler output
    std::vector<double> drive_samples;        // full 3 kHz drive signal
};

ScenarioResult run_scenario(const ScenarioConfig& config);

// CSV with header t_ms,speed_mm_s,drive_rms,pressure_kpa,lift_mm,
// area_reduction_pct,event.
std::string scenario_to_csv(const ScenarioResult& result);

}  // namespace hapticsim
