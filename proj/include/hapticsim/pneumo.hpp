#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hapticsim/core.hpp"

namespace hapticsim {

// ---------------------------------------------------------------------------
// Pneumatic lift channel: first-order plant, sampled PID, derived metrics.
//
// The plant is the sealed tube + fingertip balloon, linearized about
// atmosphere: dP/dt = (K / V) * (flow_in - leak * P) with P in kPa gauge.
// Positive duty drives the pump (flow droops with back-pressure); negative
// duty opens the vent valve.
// ---------------------------------------------------------------------------

// Pressure gained per unit relative volume of air added (isothermal ideal
// gas about one standard atmosphere).
constexpr double kPressurePerRelVolumeKpa = 101.325;

struct PlantParams {
    double tube_volume_ml = 8.0;
    double pump_max_flow_ml_s = 6.0;          // free-flow pump output at duty 1
    double pump_droop_ml_s_per_kpa = 0.25;    // flow lost per kPa back-pressure
    double leak_ml_s_per_kpa = 0.05;
    double vent_flow_ml_s = 2.0;              // valve outflow at duty -1
    double max_pressure_kpa = 15.0;           // mechanical burst clamp
    double sensor_rate_hz = 20.0;
    double sensor_noise_sd_kpa = 0.25;
    double sensor_quantization_kpa = 0.05;

    void validate() const;
};

struct PlantState {
    double t_s = 0.0;
    double pressure_kpa = 0.0;
};

// Advances the plant by dt (explicit Euler); duty is clamped to [-1, 1] and
// the result pressure to [0, max_pressure_kpa].  Pure: returns the new state.
PlantState plant_step(const PlantState& state, double duty, double dt_s,
                      const PlantParams& params);

// Closed-form equilibrium pressure for a constant duty >= 0 (before the
// mechanical clamp): the pressure where pump inflow balances leakage.
double plant_equilibrium_kpa(double duty, const PlantParams& params);

struct PidState {
    double integral = 0.0;
    double prev_error = 0.0;
    bool primed = false;
};

// One positional-PID tick.  Integration is conditional: the integral only
// accumulates while the unsaturated output stays inside the duty limits or
// the error pulls back toward them, so the term cannot wind up while the
// pump is pinned.
double pid_tick(double setpoint_kpa, double measured_kpa, const PidGains& gains,
                PidState& state);

struct StepMetrics {
    double mae_prop = 0.0;        // mean |error| from onset to first band entry
    double mme_prop = 0.0;        // max |error| over the same window
    double mae_stable = 0.0;      // mean |error| over the final 5 s at target
    double mme_stable = 0.0;
    double activation_s = 0.0;    // onset to 90% of target (true pressure)
    double deactivation_s = 0.0;  // setpoint->0 to 10% of target
};

struct StepTraceRow {
    double t_s = 0.0;
    double setpoint_kpa = 0.0;
    double measured_kpa = 0.0;
    double duty = 0.0;
};

struct StepResponse {
    std::vector<StepTraceRow> trace;       // one row per controller tick
    std::vector<double> true_pressure_kpa; // plant pressure at 1 kHz, t = i ms
    StepMetrics metrics;
};

// Simulates a setpoint step 0 -> target held for hold_s, then -> 0 until the
// pressure falls below 10% of target (5 s cap).  The plant integrates at
// 1 kHz; the sensor and controller run at the sensor rate.  Targets above
// 12 kPa are refused (std::invalid_argument): the balloon's safe ceiling.
// target == 0 returns an empty response.  The error band for the
// proportional stage is +/-0.5 kPa; timing metrics that never trigger are
// reported as -1.
StepResponse run_step_response(double target_kpa, double hold_s,
                               const PidGains& gains, const PlantParams& params,
                               std::uint64_t seed);

// Membrane lift (mm) for a steady pressure, piecewise-linear through the
// bench anchors (0,0) (6,2.24) (8,3.36) (10,4.07), extrapolated above
// 10 kPa with the last segment slope.  Domain [0, 12] kPa.
double pressure_to_lift(double pressure_kpa);

// Fractional contact-area reduction under a given fingertip normal force,
// bilinear over the bench grid (pressures 0/6/8/10 kPa, forces
// 0.75/1.0/1.5 N).  Pressure domain [0, 12] (extrapolated above 10); force
// must be in [0.3, 1.5] N and is clamped to the grid's 0.75 N edge below
// that.  Returns a fraction in [0, 1).
double contact_area_reduction(double pressure_kpa, double normal_force_n);

// CSV with header t_s,setpoint_kpa,measured_kpa,duty.
std::string step_trace_to_csv(const std::vector<StepTraceRow>& trace);

// CSV with header target_kpa,mae_prop,mme_prop,mae_stable,mme_stable.
std::string metrics_to_csv(const std::vector<std::pair<double, StepMetrics>>& rows);

// JSON config {schema:1, plant:{...}, gains:{...}}; unknown schema, missing
// or unknown fields raise errors naming the field path.
struct PneumoConfig {
    PlantParams plant;
    PidGains gains{0.25, 0.6, 0.0};  // calibrated; see config/plant_default.json
};

PneumoConfig pneumo_config_from_json(const std::string& text);
std::string pneumo_config_to_json(const PneumoConfig& config);

}  // namespace hapticsim
