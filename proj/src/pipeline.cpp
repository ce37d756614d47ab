#include "hapticsim/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include <json.hpp>

#include "hapticsim/bridge.hpp"
#include "hapticsim/rng.hpp"
#include "hapticsim/textio.hpp"
#include "hapticsim/vibro.hpp"

namespace hapticsim {

void ScenarioConfig::validate() const {
    if (duration_ms == 0) throw std::invalid_argument("duration_ms must be positive");
    if (!(normal_force_n >= 0.3 && normal_force_n <= 1.5)) {
        throw std::invalid_argument("normal_force_n must be in [0.3, 1.5]");
    }
    trajectory.validate();
    plant.validate();
    gains.validate();
    waveform.validate();
    if (stimulus_max_ms == 0) throw std::invalid_argument("stimulus_max_ms must be positive");
    for (const auto& c : contacts) {
        if (c.t_end_ms <= c.t_begin_ms) {
            throw std::invalid_argument("contact spans must end after they begin");
        }
        if (c.t_begin_ms >= duration_ms) {
            throw std::invalid_argument("contact spans must begin inside the scenario");
        }
    }
    for (const auto& [material, label] : mapping) {
        (void)material;
        if (!is_stimulus_label(label)) {
            throw std::invalid_argument("mapping: unknown stimulus label '" + label + "'");
        }
    }
}

ScenarioResult run_scenario(const ScenarioConfig& config) {
    config.validate();

    const double duration_s = static_cast<double>(config.duration_ms) * 1e-3;

    // Tracking chain, computed up front: 30 Hz landmarks estimated and
    // upsampled to the 1 kHz master clock.
    const auto landmarks = synth_trajectory(config.trajectory, duration_s, 30.0);
    SmoothingConfig smoothing;
    smoothing.time_constant_s = config.latency.capture_ms * 1e-3;
    const VelocityTrace velocity = estimate_velocity(landmarks, 1000.0, smoothing);
    auto speed_at = [&](std::uint64_t ms) {
        if (velocity.speed_mm_s.empty()) return 0.0;
        const std::size_t i = std::min<std::size_t>(ms, velocity.speed_mm_s.size() - 1);
        return velocity.speed_mm_s[i];
    };

    // Scheduler and its input stream.
    std::map<MaterialId, std::string> mapping = config.mapping;
    if (mapping.empty()) mapping = mapping_for_physical(config.physical_material);

    SchedulerConfig sched_config;
    sched_config.stimulus_max_ms = config.stimulus_max_ms;
    sched_config.refractory_ms = config.refractory_ms;
    sched_config.mapping = mapping;
    StimulusScheduler scheduler(sched_config);

    ScenarioResult result;
    for (const auto& c : config.contacts) {
        SessionEvent begin;
        begin.t_ms = c.t_begin_ms;
        begin.kind = EventKind::ContactBegin;
        begin.material = c.virtual_material;
        result.inputs.push_back(begin);

        SessionEvent end;
        end.t_ms = std::min(c.t_end_ms, config.duration_ms - 1);
        end.kind = EventKind::ContactEnd;
        end.material = c.virtual_material;
        result.inputs.push_back(end);
    }
    // The scheduler consumes events in seq order, so number them along the
    // clock even when spans interleave.
    std::stable_sort(result.inputs.begin(), result.inputs.end(),
                     [](const SessionEvent& a, const SessionEvent& b) {
                         return a.t_ms < b.t_ms;
                     });
    for (std::size_t i = 0; i < result.inputs.size(); ++i) {
        result.inputs[i].seq = i + 1;
    }

    // Vibro chain state.  The synthesized drive passes through a whole-chain
    // transport delay before it reaches the skin.
    FrameStream stream(config.waveform);
    const auto vibro_delay_ms =
        static_cast<std::size_t>(std::ceil(config.latency.vibro_total_ms()));
    std::deque<std::vector<double>> delay_line;
    double vibro_gate = 0.0;

    // Pneumo chain state.
    PlantState plant;
    PidState pid;
    Rng sensor_rng = Rng(config.seed).child(1);
    double duty = 0.0;
    double setpoint = 0.0;
    const long sensor_period_ms =
        std::max(1L, std::lround(1000.0 / config.plant.sensor_rate_hz));

    const int spf = config.waveform.samples_per_frame();
    result.rows.reserve(config.duration_ms);
    result.drive_samples.reserve(config.duration_ms * static_cast<std::size_t>(spf));

    std::size_t input_idx = 0;
    for (std::uint64_t ms = 0; ms < config.duration_ms; ++ms) {
        ScenarioRow row;
        row.t_ms = ms;
        row.speed_mm_s = speed_at(ms);

        std::vector<std::string> tick_events;

        auto apply_reply = [&](SessionEvent reply) {
            std::string note(event_kind_name(reply.kind));
            if (reply.stimulus) note += ":" + *reply.stimulus;
            tick_events.push_back(std::move(note));

            if (reply.kind == EventKind::StimulusCmd) {
                const Stimulus& s = stimulus_from_label(*reply.stimulus);
                switch (s.kind) {
                    case StimulusKind::None:
                        vibro_gate = 0.0;
                        setpoint = 0.0;
                        break;
                    case StimulusKind::Vibro:
                        vibro_gate = amplitude_for_accel(*s.vibro_accel_m_s2);
                        setpoint = 0.0;
                        break;
                    case StimulusKind::Pneumo:
                        vibro_gate = 0.0;
                        setpoint = *s.pneumo_pressure_kpa;
                        break;
                }
            }
            result.responses.push_back(std::move(reply));
        };

        // The per-stimulus timeout may fall between contacts; poll first so
        // the stop lands on its due tick, then feed the events due now.
        for (auto& reply : scheduler.poll(ms)) apply_reply(std::move(reply));
        while (input_idx < result.inputs.size() &&
               result.inputs[input_idx].t_ms == ms) {
            const SessionEvent& in = result.inputs[input_idx];
            std::string note(event_kind_name(in.kind));
            if (in.material) note += ":" + std::string(material_name(*in.material));
            tick_events.push_back(std::move(note));

            for (auto& reply : scheduler.on_event(in)) apply_reply(std::move(reply));
            ++input_idx;
        }

        // Synthesize this tick's drive block at the waveform rate, gate it,
        // and push it into the transport delay line.
        std::vector<double> block;
        block.reserve(static_cast<std::size_t>(spf));
        for (int k = 0; k < spf; ++k) {
            if (auto frame = stream.push(row.speed_mm_s)) {
                for (double v : frame->samples) block.push_back(v * vibro_gate);
            }
        }
        delay_line.push_back(std::move(block));

        std::vector<double> out_block(static_cast<std::size_t>(spf), 0.0);
        if (delay_line.size() > vibro_delay_ms) {
            out_block = std::move(delay_line.front());
            delay_line.pop_front();
        }
        double acc = 0.0;
        for (double v : out_block) {
            acc += v * v;
            result.drive_samples.push_back(v);
        }
        row.drive_rms = std::sqrt(acc / static_cast<double>(out_block.size()));

        // Pneumatic loop: sensor + controller at the sensor rate, plant at
        // the master rate.
        if (ms % static_cast<std::uint64_t>(sensor_period_ms) == 0) {
            double measured = plant.pressure_kpa;
            if (config.plant.sensor_noise_sd_kpa > 0.0) {
                measured += config.plant.sensor_noise_sd_kpa * sensor_rng.gaussian();
            }
            if (config.plant.sensor_quantization_kpa > 0.0) {
                measured = std::round(measured / config.plant.sensor_quantization_kpa) *
                           config.plant.sensor_quantization_kpa;
            }
            measured = std::clamp(measured, 0.0, config.plant.max_pressure_kpa);
            duty = pid_tick(setpoint, measured, config.gains, pid);
        }

        row.pressure_kpa = plant.pressure_kpa;
        row.lift_mm = pressure_to_lift(std::min(plant.pressure_kpa, 12.0));
        row.area_reduction_pct =
            100.0 * contact_area_reduction(std::min(plant.pressure_kpa, 12.0),
                                           config.normal_force_n);

        plant = plant_step(plant, duty, 1e-3, config.plant);

        std::string joined;
        for (std::size_t i = 0; i < tick_events.size(); ++i) {
            if (i) joined += ';';
            joined += tick_events[i];
        }
        row.event = std::move(joined);
        result.rows.push_back(std::move(row));
    }

    for (auto& reply : scheduler.finish()) {
        result.responses.push_back(std::move(reply));
    }
    return result;
}

std::string scenario_to_csv(const ScenarioResult& result) {
    std::string out =
        "t_ms,speed_mm_s,drive_rms,pressure_kpa,lift_mm,area_reduction_pct,event\n";
    for (const auto& r : result.rows) {
        out += std::to_string(r.t_ms);
        out += ',';
        out += fixed(r.speed_mm_s, 3);
        out += ',';
        out += fixed(r.drive_rms, 4);
        out += ',';
        out += fixed(r.pressure_kpa, 3);
        out += ',';
        out += fixed(r.lift_mm, 3);
        out += ',';
        out += fixed(r.area_reduction_pct, 2);
        out += ',';
        out += r.event;
        out += '\n';
    }
    return out;
}

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& why) {
    throw std::runtime_error(path + ": " + why);
}

double num_at(const json& obj, const std::string& scope, const char* key,
              std::optional<double> fallback = std::nullopt) {
    if (!obj.contains(key)) {
        if (fallback) return *fallback;
        fail(scope + "." + key, "missing field");
    }
    if (!obj.at(key).is_number()) fail(scope + "." + key, "expected a number");
    return obj.at(key).get<double>();
}

std::uint64_t uint_at(const json& obj, const std::string& scope, const char* key,
                      std::optional<std::uint64_t> fallback = std::nullopt) {
    if (!obj.contains(key)) {
        if (fallback) return *fallback;
        fail(scope + "." + key, "missing field");
    }
    if (!obj.at(key).is_number_unsigned()) {
        fail(scope + "." + key, "expected a non-negative integer");
    }
    return obj.at(key).get<std::uint64_t>();
}

std::string str_at(const json& obj, const std::string& scope, const char* key) {
    if (!obj.contains(key)) fail(scope + "." + key, "missing field");
    if (!obj.at(key).is_string()) fail(scope + "." + key, "expected a string");
    return obj.at(key).get<std::string>();
}

TrajectoryProfile trajectory_from_json(const json& t) {
    const std::string kind = str_at(t, "trajectory", "kind");
    if (kind == "constant") {
        TrajectoryProfile p;
        p.kind = ProfileKind::Constant;
        p.speed_mm_s = num_at(t, "trajectory", "speed_mm_s");
        p.heading_rad = num_at(t, "trajectory", "heading_rad", 0.0);
        return p;
    }
    if (kind == "sweep") {
        TrajectoryProfile p;
        p.kind = ProfileKind::SinusoidSweep;
        p.min_speed_mm_s = num_at(t, "trajectory", "min_speed_mm_s");
        p.max_speed_mm_s = num_at(t, "trajectory", "max_speed_mm_s");
        p.sweep_period_s = num_at(t, "trajectory", "period_s", 2.0);
        return p;
    }
    if (kind == "waypoints") {
        if (!t.contains("points") || !t.at("points").is_array()) {
            fail("trajectory.points", "expected an array of [t_s, x_mm, y_mm]");
        }
        std::vector<LandmarkSample> pts;
        for (const auto& row : t.at("points")) {
            if (!row.is_array() || row.size() != 3) {
                fail("trajectory.points", "each point must be [t_s, x_mm, y_mm]");
            }
            pts.push_back({row[0].get<double>(), row[1].get<double>(),
                           row[2].get<double>()});
        }
        TrajectoryProfile p;
        p.kind = ProfileKind::Waypoints;
        p.waypoints = std::move(pts);
        return p;
    }
    fail("trajectory.kind", "expected constant, sweep or waypoints");
}

json trajectory_to_json(const TrajectoryProfile& p) {
    switch (p.kind) {
        case ProfileKind::Constant:
            return {{"kind", "constant"},
                    {"speed_mm_s", p.speed_mm_s},
                    {"heading_rad", p.heading_rad}};
        case ProfileKind::SinusoidSweep:
            return {{"kind", "sweep"},
                    {"min_speed_mm_s", p.min_speed_mm_s},
                    {"max_speed_mm_s", p.max_speed_mm_s},
                    {"period_s", p.sweep_period_s}};
        case ProfileKind::Waypoints: {
            json pts = json::array();
            for (const auto& w : p.waypoints) pts.push_back({w.t_s, w.x_mm, w.y_mm});
            return {{"kind", "waypoints"}, {"points", pts}};
        }
    }
    throw std::invalid_argument("invalid profile kind");
}

}  // namespace

ScenarioConfig scenario_config_from_json(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(std::string("config: invalid JSON: ") + e.what());
    }
    if (!root.is_object()) fail("config", "expected a JSON object");
    if (!root.contains("schema") || root["schema"] != 1) fail("schema", "expected 1");

    ScenarioConfig cfg;
    cfg.seed = uint_at(root, "config", "seed", 0);
    cfg.duration_ms = uint_at(root, "config", "duration_ms");
    cfg.physical_material = material_from_name(str_at(root, "config", "physical_material"));
    cfg.normal_force_n = num_at(root, "config", "normal_force_n", 1.0);

    if (!root.contains("trajectory")) fail("trajectory", "missing section");
    cfg.trajectory = trajectory_from_json(root["trajectory"]);

    if (root.contains("contacts")) {
        if (!root["contacts"].is_array()) fail("contacts", "expected an array");
        std::size_t i = 0;
        for (const auto& c : root["contacts"]) {
            const std::string scope = "contacts[" + std::to_string(i) + "]";
            ContactSpan span;
            span.t_begin_ms = uint_at(c, scope, "t_begin_ms");
            span.t_end_ms = uint_at(c, scope, "t_end_ms");
            span.virtual_material = material_from_name(str_at(c, scope, "virtual_material"));
            cfg.contacts.push_back(span);
            ++i;
        }
    }

    if (root.contains("mapping")) {
        if (!root["mapping"].is_object()) fail("mapping", "expected an object");
        for (const auto& [name, label] : root["mapping"].items()) {
            if (!label.is_string()) fail("mapping." + name, "expected a stimulus label");
            cfg.mapping[material_from_name(name)] = label.get<std::string>();
        }
    }

    if (root.contains("plant") || root.contains("gains")) {
        json sub;
        sub["schema"] = 1;
        sub["plant"] = root.contains("plant") ? root["plant"] : json::object();
        sub["gains"] = root.contains("gains") ? root["gains"] : json::object();
        if (root.contains("plant") && root.contains("gains")) {
            const PneumoConfig pc = pneumo_config_from_json(sub.dump());
            cfg.plant = pc.plant;
            cfg.gains = pc.gains;
        } else {
            fail("config", "plant and gains must be given together");
        }
    }

    if (root.contains("waveform")) {
        const json& w = root["waveform"];
        cfg.waveform.amplitude = num_at(w, "waveform", "amplitude", 1.0);
        cfg.waveform.wavelength_mm = num_at(w, "waveform", "wavelength_mm", 1.0);
        cfg.waveform.phase_rad = num_at(w, "waveform", "phase_rad", 0.0);
        cfg.waveform.frame_rate_hz = num_at(w, "waveform", "frame_rate_hz", 1000.0);
        cfg.waveform.sample_rate_hz = num_at(w, "waveform", "sample_rate_hz", 3000.0);
    }

    if (root.contains("latency")) {
        const json& l = root["latency"];
        cfg.latency.capture_ms = num_at(l, "latency", "capture_ms", 33.0);
        cfg.latency.estimation_ms = num_at(l, "latency", "estimation_ms", 19.53);
        cfg.latency.synthesis_ms = num_at(l, "latency", "synthesis_ms", 1.0);
        cfg.latency.actuation_on_ms = num_at(l, "latency", "actuation_on_ms", 146.0);
        cfg.latency.actuation_off_ms = num_at(l, "latency", "actuation_off_ms", 329.0);
    }

    if (root.contains("scheduler")) {
        const json& s = root["scheduler"];
        cfg.stimulus_max_ms = uint_at(s, "scheduler", "stimulus_max_ms", 5000);
        cfg.refractory_ms = uint_at(s, "scheduler", "refractory_ms", 0);
    }

    cfg.validate();
    return cfg;
}

std::string scenario_config_to_json(const ScenarioConfig& config) {
    json root;
    root["schema"] = 1;
    root["seed"] = config.seed;
    root["duration_ms"] = config.duration_ms;
    root["physical_material"] = std::string(material_name(config.physical_material));
    root["normal_force_n"] = config.normal_force_n;
    root["trajectory"] = trajectory_to_json(config.trajectory);
    root["contacts"] = json::array();
    for (const auto& c : config.contacts) {
        root["contacts"].push_back({{"t_begin_ms", c.t_begin_ms},
                                    {"t_end_ms", c.t_end_ms},
                                    {"virtual_material",
                                     std::string(material_name(c.virtual_material))}});
    }
    if (!config.mapping.empty()) {
        json m = json::object();
        for (const auto& [material, label] : config.mapping) {
            m[std::string(material_name(material))] = label;
        }
        root["mapping"] = m;
    }
    root["scheduler"] = {{"stimulus_max_ms", config.stimulus_max_ms},
                         {"refractory_ms", config.refractory_ms}};
    return root.dump(2) + "\n";
}

}  // namespace hapticsim
