#include "hapticsim/pneumo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "hapticsim/rng.hpp"
#include "hapticsim/textio.hpp"

namespace hapticsim {

void PlantParams::validate() const {
    if (!(tube_volume_ml > 0.0)) throw std::invalid_argument("tube_volume_ml must be positive");
    if (!(pump_max_flow_ml_s > 0.0)) throw std::invalid_argument("pump_max_flow_ml_s must be positive");
    if (!(pump_droop_ml_s_per_kpa >= 0.0)) throw std::invalid_argument("pump_droop_ml_s_per_kpa must be non-negative");
    if (!(leak_ml_s_per_kpa >= 0.0)) throw std::invalid_argument("leak_ml_s_per_kpa must be non-negative");
    if (!(vent_flow_ml_s >= 0.0)) throw std::invalid_argument("vent_flow_ml_s must be non-negative");
    if (!(max_pressure_kpa > 0.0)) throw std::invalid_argument("max_pressure_kpa must be positive");
    if (!(sensor_rate_hz > 0.0)) throw std::invalid_argument("sensor_rate_hz must be positive");
    if (!(sensor_noise_sd_kpa >= 0.0)) throw std::invalid_argument("sensor_noise_sd_kpa must be non-negative");
    if (!(sensor_quantization_kpa >= 0.0)) throw std::invalid_argument("sensor_quantization_kpa must be non-negative");
}

PlantState plant_step(const PlantState& state, double duty, double dt_s,
                      const PlantParams& params) {
    if (!(dt_s > 0.0)) throw std::invalid_argument("dt_s must be positive");
    const double u = std::clamp(duty, -1.0, 1.0);
    const double p = state.pressure_kpa;

    // Pump flow droops with back-pressure; the vent valve flow does not
    // depend on duty history, only on the commanded opening.
    double flow_ml_s;
    if (u >= 0.0) {
        flow_ml_s = u * std::max(0.0, params.pump_max_flow_ml_s -
                                          params.pump_droop_ml_s_per_kpa * p);
    } else {
        flow_ml_s = u * params.vent_flow_ml_s;
    }
    flow_ml_s -= params.leak_ml_s_per_kpa * p;

    PlantState next;
    next.t_s = state.t_s + dt_s;
    next.pressure_kpa =
        p + dt_s * (kPressurePerRelVolumeKpa / params.tube_volume_ml) * flow_ml_s;
    next.pressure_kpa = std::clamp(next.pressure_kpa, 0.0, params.max_pressure_kpa);
    return next;
}

double plant_equilibrium_kpa(double duty, const PlantParams& params) {
    if (!(duty >= 0.0 && duty <= 1.0)) {
        throw std::invalid_argument("equilibrium is defined for duty in [0, 1]");
    }
    // u*(Qmax - droop*P) = leak*P  =>  P = u*Qmax / (leak + u*droop)
    const double denom = params.leak_ml_s_per_kpa + duty * params.pump_droop_ml_s_per_kpa;
    if (denom <= 0.0) return params.max_pressure_kpa;
    return std::min(duty * params.pump_max_flow_ml_s / denom, params.max_pressure_kpa);
}

double pid_tick(double setpoint_kpa, double measured_kpa, const PidGains& gains,
                PidState& state) {
    gains.validate();
    const double e = setpoint_kpa - measured_kpa;
    const double d = state.primed ? (e - state.prev_error) / gains.period_s : 0.0;

    const double candidate = state.integral + e * gains.period_s;
    const double unsat = gains.kp * e + gains.ki * candidate + gains.kd * d;
    const bool inside = unsat >= gains.out_min && unsat <= gains.out_max;
    const bool unwinding = (unsat > gains.out_max && e < 0.0) ||
                           (unsat < gains.out_min && e > 0.0);
    if (inside || unwinding) state.integral = candidate;

    state.prev_error = e;
    state.primed = true;

    const double out = gains.kp * e + gains.ki * state.integral + gains.kd * d;
    return std::clamp(out, gains.out_min, gains.out_max);
}

namespace {

double quantize(double value, double step) {
    if (step <= 0.0) return value;
    return std::round(value / step) * step;
}

struct Window {
    double sum = 0.0;
    double max = 0.0;
    std::size_t count = 0;

    void add(double abs_err) {
        sum += abs_err;
        if (abs_err > max) max = abs_err;
        ++count;
    }
    double mean() const { return count == 0 ? 0.0 : sum / static_cast<double>(count); }
};

}  // namespace

StepResponse run_step_response(double target_kpa, double hold_s,
                               const PidGains& gains, const PlantParams& params,
                               std::uint64_t seed) {
    params.validate();
    gains.validate();
    if (!(target_kpa >= 0.0)) throw std::invalid_argument("target_kpa must be non-negative");
    if (target_kpa > 12.0) {
        throw std::invalid_argument("target " + fixed(target_kpa, 3) +
                                    " kPa exceeds the 12 kPa safety ceiling");
    }
    if (!(hold_s > 0.0)) throw std::invalid_argument("hold_s must be positive");

    StepResponse out;
    if (target_kpa == 0.0) return out;

    constexpr double kBandKpa = 0.5;
    const double dt = 1e-3;
    const long hold_ms = std::lround(hold_s * 1000.0);
    const long max_ms = hold_ms + 5000;
    const long sensor_period_ms =
        std::max(1L, std::lround(1000.0 / params.sensor_rate_hz));

    Rng rng(seed);
    PlantState plant;
    PidState pid;
    double duty = 0.0;

    out.true_pressure_kpa.reserve(static_cast<std::size_t>(max_ms) + 1);

    Window prop, stable;
    bool in_band = false;
    double activation = -1.0;
    double deactivation = -1.0;

    for (long ms = 0; ms <= max_ms; ++ms) {
        const double t = static_cast<double>(ms) * 1e-3;
        const double setpoint = ms < hold_ms ? target_kpa : 0.0;
        out.true_pressure_kpa.push_back(plant.pressure_kpa);

        if (activation < 0.0 && plant.pressure_kpa >= 0.9 * target_kpa) activation = t;
        if (ms >= hold_ms && plant.pressure_kpa <= 0.1 * target_kpa) {
            deactivation = t - hold_s;
            break;
        }

        if (ms % sensor_period_ms == 0) {
            double measured = plant.pressure_kpa;
            if (params.sensor_noise_sd_kpa > 0.0) {
                measured += params.sensor_noise_sd_kpa * rng.gaussian();
            }
            measured = quantize(measured, params.sensor_quantization_kpa);
            measured = std::clamp(measured, 0.0, params.max_pressure_kpa);

            duty = pid_tick(setpoint, measured, gains, pid);
            out.trace.push_back({t, setpoint, measured, duty});

            if (ms < hold_ms) {
                const double err = std::abs(target_kpa - measured);
                if (!in_band) {
                    prop.add(err);
                    if (err <= kBandKpa) in_band = true;
                }
                if (t >= hold_s - 5.0) stable.add(err);
            }
        }

        plant = plant_step(plant, duty, dt, params);
    }

    out.metrics.mae_prop = prop.mean();
    out.metrics.mme_prop = prop.max;
    out.metrics.mae_stable = stable.mean();
    out.metrics.mme_stable = stable.max;
    out.metrics.activation_s = activation;
    out.metrics.deactivation_s = deactivation;
    return out;
}

namespace {

constexpr double kLiftPressures[] = {0.0, 6.0, 8.0, 10.0};
constexpr double kLiftMm[] = {0.0, 2.24, 3.36, 4.07};

constexpr double kAreaForces[] = {0.75, 1.0, 1.5};
constexpr double kAreaPressures[] = {0.0, 6.0, 8.0, 10.0};
// Fractional reduction by [force][pressure].
constexpr double kAreaFraction[3][4] = {
    {0.0, 0.128, 0.255, 0.396},
    {0.0, 0.086, 0.152, 0.288},
    {0.0, 0.081, 0.119, 0.208},
};

// Piecewise-linear in pressure with end-slope extrapolation above the last
// anchor (the membrane keeps inflating past the measured range).
double interp_pressure(const double* xs, const double* ys, int n, double p) {
    if (p <= xs[0]) return ys[0];
    for (int i = 1; i < n; ++i) {
        if (p <= xs[i]) {
            const double u = (p - xs[i - 1]) / (xs[i] - xs[i - 1]);
            return ys[i - 1] + u * (ys[i] - ys[i - 1]);
        }
    }
    const double slope = (ys[n - 1] - ys[n - 2]) / (xs[n - 1] - xs[n - 2]);
    return ys[n - 1] + slope * (p - xs[n - 1]);
}

}  // namespace

double pressure_to_lift(double pressure_kpa) {
    if (!(pressure_kpa >= 0.0 && pressure_kpa <= 12.0)) {
        throw std::invalid_argument("pressure must be in [0, 12] kPa");
    }
    return interp_pressure(kLiftPressures, kLiftMm, 4, pressure_kpa);
}

double contact_area_reduction(double pressure_kpa, double normal_force_n) {
    if (!(pressure_kpa >= 0.0 && pressure_kpa <= 12.0)) {
        throw std::invalid_argument("pressure must be in [0, 12] kPa");
    }
    if (!(normal_force_n >= 0.3 && normal_force_n <= 1.5)) {
        throw std::invalid_argument("normal force must be in [0.3, 1.5] N");
    }
    const double f = std::max(normal_force_n, kAreaForces[0]);

    double by_force[3];
    for (int i = 0; i < 3; ++i) {
        by_force[i] = interp_pressure(kAreaPressures, kAreaFraction[i], 4, pressure_kpa);
    }
    int j = f <= kAreaForces[1] ? 0 : 1;
    const double u = (f - kAreaForces[j]) / (kAreaForces[j + 1] - kAreaForces[j]);
    return std::max(0.0, by_force[j] + u * (by_force[j + 1] - by_force[j]));
}

std::string step_trace_to_csv(const std::vector<StepTraceRow>& trace) {
    std::string out = "t_s,setpoint_kpa,measured_kpa,duty\n";
    for (const auto& r : trace) {
        out += fixed(r.t_s, 3);
        out += ',';
        out += fixed(r.setpoint_kpa, 3);
        out += ',';
        out += fixed(r.measured_kpa, 3);
        out += ',';
        out += fixed(r.duty, 4);
        out += '\n';
    }
    return out;
}

std::string metrics_to_csv(const std::vector<std::pair<double, StepMetrics>>& rows) {
    std::string out = "target_kpa,mae_prop,mme_prop,mae_stable,mme_stable\n";
    for (const auto& [target, m] : rows) {
        out += fixed(target, 3);
        out += ',';
        out += fixed(m.mae_prop, 3);
        out += ',';
        out += fixed(m.mme_prop, 3);
        out += ',';
        out += fixed(m.mae_stable, 3);
        out += ',';
        out += fixed(m.mme_stable, 3);
        out += '\n';
    }
    return out;
}

namespace {

using nlohmann::json;

double require_number(const json& obj, const std::string& scope, const char* key) {
    if (!obj.contains(key)) {
        throw std::runtime_error(scope + "." + key + ": missing field");
    }
    const auto& v = obj.at(key);
    if (!v.is_number()) {
        throw std::runtime_error(scope + "." + key + ": expected a number");
    }
    return v.get<double>();
}

void reject_unknown(const json& obj, const std::string& scope,
                    std::initializer_list<const char*> known) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (std::find_if(known.begin(), known.end(), [&](const char* k) {
                return key == k;
            }) == known.end()) {
            throw std::runtime_error(scope + "." + key + ": unknown field");
        }
    }
}

}  // namespace

PneumoConfig pneumo_config_from_json(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(std::string("config: invalid JSON: ") + e.what());
    }
    if (!root.is_object()) throw std::runtime_error("config: expected a JSON object");
    if (!root.contains("schema") || root["schema"] != 1) {
        throw std::runtime_error("schema: expected 1");
    }
    reject_unknown(root, "config", {"schema", "plant", "gains"});
    if (!root.contains("plant") || !root.contains("gains")) {
        throw std::runtime_error("config: plant and gains sections are required");
    }

    const json& p = root["plant"];
    reject_unknown(p, "plant",
                   {"tube_volume_ml", "pump_max_flow_ml_s", "pump_droop_ml_s_per_kpa",
                    "leak_ml_s_per_kpa", "vent_flow_ml_s", "max_pressure_kpa",
                    "sensor_rate_hz", "sensor_noise_sd_kpa", "sensor_quantization_kpa"});
    PneumoConfig cfg;
    cfg.plant.tube_volume_ml = require_number(p, "plant", "tube_volume_ml");
    cfg.plant.pump_max_flow_ml_s = require_number(p, "plant", "pump_max_flow_ml_s");
    cfg.plant.pump_droop_ml_s_per_kpa = require_number(p, "plant", "pump_droop_ml_s_per_kpa");
    cfg.plant.leak_ml_s_per_kpa = require_number(p, "plant", "leak_ml_s_per_kpa");
    cfg.plant.vent_flow_ml_s = require_number(p, "plant", "vent_flow_ml_s");
    cfg.plant.max_pressure_kpa = require_number(p, "plant", "max_pressure_kpa");
    cfg.plant.sensor_rate_hz = require_number(p, "plant", "sensor_rate_hz");
    cfg.plant.sensor_noise_sd_kpa = require_number(p, "plant", "sensor_noise_sd_kpa");
    cfg.plant.sensor_quantization_kpa = require_number(p, "plant", "sensor_quantization_kpa");

    const json& g = root["gains"];
    reject_unknown(g, "gains", {"kp", "ki", "kd", "period_s", "out_min", "out_max"});
    cfg.gains.kp = require_number(g, "gains", "kp");
    cfg.gains.ki = require_number(g, "gains", "ki");
    cfg.gains.kd = require_number(g, "gains", "kd");
    cfg.gains.period_s = require_number(g, "gains", "period_s");
    if (g.contains("out_min")) cfg.gains.out_min = g["out_min"].get<double>();
    if (g.contains("out_max")) cfg.gains.out_max = g["out_max"].get<double>();

    cfg.plant.validate();
    cfg.gains.validate();
    return cfg;
}

std::string pneumo_config_to_json(const PneumoConfig& config) {
    json root;
    root["schema"] = 1;
    root["plant"] = {
        {"tube_volume_ml", config.plant.tube_volume_ml},
        {"pump_max_flow_ml_s", config.plant.pump_max_flow_ml_s},
        {"pump_droop_ml_s_per_kpa", config.plant.pump_droop_ml_s_per_kpa},
        {"leak_ml_s_per_kpa", config.plant.leak_ml_s_per_kpa},
        {"vent_flow_ml_s", config.plant.vent_flow_ml_s},
        {"max_pressure_kpa", config.plant.max_pressure_kpa},
        {"sensor_rate_hz", config.plant.sensor_rate_hz},
        {"sensor_noise_sd_kpa", config.plant.sensor_noise_sd_kpa},
        {"sensor_quantization_kpa", config.plant.sensor_quantization_kpa},
    };
    root["gains"] = {
        {"kp", config.gains.kp},       {"ki", config.gains.ki},
        {"kd", config.gains.kd},       {"period_s", config.gains.period_s},
        {"out_min", config.gains.out_min}, {"out_max", config.gains.out_max},
    };
    return root.dump(2) + "\n";
}

}  // namespace hapticsim
