#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hapticsim/perception.hpp"
#include "hapticsim/pipeline.hpp"
#include "hapticsim/pneumo.hpp"
#include "hapticsim/session.hpp"
#include "hapticsim/svg.hpp"
#include "hapticsim/textio.hpp"
#include "hapticsim/tracking.hpp"
#include "hapticsim/vibro.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string g_command_line;

// Every run leaves a manifest beside its outputs: the exact command, the
// seed, a fingerprint of the config file, and what was written.
void write_manifest(const fs::path& path, std::uint64_t seed,
                    const std::string& config_path,
                    const std::vector<std::string>& outputs) {
    json m;
    m["command"] = g_command_line;
    m["seed"] = seed;
    m["config_hash"] =
        config_path.empty() ? "none" : hapticsim::hex64(hapticsim::fnv1a64(
                                           hapticsim::read_file(config_path)));
    m["outputs"] = outputs;
    hapticsim::write_file(path.string(), m.dump(2) + "\n");
}

std::vector<double> parse_targets(const std::string& spec) {
    std::vector<double> targets;
    const auto range_pos = spec.find("..");
    if (range_pos != std::string::npos) {
        const long lo = hapticsim::parse_long(spec.substr(0, range_pos), "targets");
        const long hi = hapticsim::parse_long(spec.substr(range_pos + 2), "targets");
        if (hi < lo) throw std::runtime_error("targets: range end below start");
        for (long t = lo; t <= hi; ++t) targets.push_back(static_cast<double>(t));
        return targets;
    }
    for (const auto& field : hapticsim::split_csv_line(spec)) {
        targets.push_back(hapticsim::parse_double(field, "targets"));
    }
    if (targets.empty()) throw std::runtime_error("targets: none given");
    return targets;
}

hapticsim::RatingTable load_table(const std::string& table_path) {
    if (table_path.empty()) return hapticsim::RatingTable::builtin();
    return hapticsim::RatingTable::from_csv(hapticsim::read_file(table_path));
}

// An explicit --config wins; otherwise look for plant_default.json in
// $HAPTICSIM_CONFIG_DIR (or ./config), falling back to built-in defaults.
std::string resolve_plant_config(const std::string& explicit_path) {
    if (!explicit_path.empty()) return explicit_path;
    const char* env_dir = std::getenv("HAPTICSIM_CONFIG_DIR");
    const fs::path candidate =
        fs::path(env_dir != nullptr ? env_dir : "config") / "plant_default.json";
    if (fs::exists(candidate)) return candidate.string();
    return {};
}

int cmd_step_sweep(const std::string& targets_spec, double hold_s,
                   std::uint64_t seed, const std::string& config_arg,
                   const std::string& out_dir) {
    const std::string config_path = resolve_plant_config(config_arg);
    hapticsim::PneumoConfig config;
    if (!config_path.empty()) {
        config = hapticsim::pneumo_config_from_json(hapticsim::read_file(config_path));
    }
    const auto targets = parse_targets(targets_spec);

    fs::create_directories(out_dir);
    std::vector<std::string> outputs;
    std::vector<std::pair<double, hapticsim::StepMetrics>> metric_rows;

    for (double target : targets) {
        const auto response = hapticsim::run_step_response(
            target, hold_s, config.gains, config.plant, seed + std::llround(target));
        metric_rows.emplace_back(target, response.metrics);

        const std::string stem = "step_" + hapticsim::fixed(target, 0);
        const fs::path csv_path = fs::path(out_dir) / (stem + ".csv");
        hapticsim::write_file(csv_path.string(),
                              hapticsim::step_trace_to_csv(response.trace));
        outputs.push_back(csv_path.filename().string());

        hapticsim::SvgSeries setpoint{"setpoint", "#d62728", {}};
        hapticsim::SvgSeries measured{"measured", "#1f77b4", {}};
        for (const auto& row : response.trace) {
            setpoint.points.emplace_back(row.t_s, row.setpoint_kpa);
            measured.points.emplace_back(row.t_s, row.measured_kpa);
        }
        const fs::path svg_path = fs::path(out_dir) / (stem + ".svg");
        hapticsim::write_file(
            svg_path.string(),
            hapticsim::svg_line_chart("Step response to " + hapticsim::fixed(target, 0) +
                                          " kPa",
                                      "time (s)", "pressure (kPa)",
                                      {setpoint, measured}));
        outputs.push_back(svg_path.filename().string());
    }

    const fs::path metrics_path = fs::path(out_dir) / "metrics.csv";
    hapticsim::write_file(metrics_path.string(), hapticsim::metrics_to_csv(metric_rows));
    outputs.push_back("metrics.csv");

    write_manifest(fs::path(out_dir) / "manifest.json", seed, config_path, outputs);
    std::cout << "wrote " << outputs.size() << " files to " << out_dir << "\n";
    return 0;
}

int cmd_synth(const std::string& trace_path, double speed, double duration_s,
              const std::string& level, double lambda_mm, const std::string& out_wav) {
    const hapticsim::Stimulus& stimulus = hapticsim::stimulus_from_label(level);
    if (stimulus.kind != hapticsim::StimulusKind::Vibro) {
        throw std::runtime_error("level must be a vibrotactile stimulus (A1, A2, A3)");
    }

    hapticsim::WaveformParams params;
    params.wavelength_mm = lambda_mm;
    params.amplitude = hapticsim::amplitude_for_accel(*stimulus.vibro_accel_m_s2);

    hapticsim::VelocityTrace velocity;
    if (!trace_path.empty()) {
        const auto samples =
            hapticsim::trajectory_from_csv(hapticsim::read_file(trace_path));
        velocity = hapticsim::estimate_velocity(samples, params.sample_rate_hz);
    } else {
        velocity.rate_hz = params.sample_rate_hz;
        const auto n = static_cast<std::size_t>(
            std::ceil(duration_s * params.sample_rate_hz));
        velocity.speed_mm_s.assign(n, speed);
    }

    const auto frames = hapticsim::synthesize(velocity, params);
    hapticsim::write_wav16(out_wav, hapticsim::flatten(frames), params.sample_rate_hz);

    write_manifest(out_wav + ".manifest.json", 0, trace_path,
                   {fs::path(out_wav).filename().string()});
    std::cout << "wrote " << out_wav << " (" << frames.size() << " frames)\n";
    return 0;
}

int cmd_trials(std::uint64_t seed, int participant, const std::string& out_csv) {
    const auto plan = hapticsim::generate_trials(seed, participant);
    hapticsim::write_file(out_csv, hapticsim::trials_to_csv(plan));
    write_manifest(out_csv + ".manifest.json", seed, "",
                   {fs::path(out_csv).filename().string()});
    std::cout << "wrote " << plan.rows.size() << " rows to " << out_csv << "\n";
    return 0;
}

int cmd_recommend(const std::string& physical, const std::string& virt,
                  const std::string& table_path) {
    const auto table = load_table(table_path);
    const auto rec = hapticsim::recommend_stimulus(
        table, hapticsim::material_from_name(physical),
        hapticsim::material_from_name(virt));

    json out;
    out["physical"] = std::string(
        hapticsim::material_name(hapticsim::material_from_name(physical)));
    out["virtual"] =
        std::string(hapticsim::material_name(hapticsim::material_from_name(virt)));
    out["stimulus"] = rec.stimulus_label;
    out["score"] = rec.score;
    out["ranking"] = json::array();
    for (const auto& r : rec.ranking) {
        out["ranking"].push_back({{"stimulus", r.label}, {"score", r.score}});
    }
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_overlap(const std::string& material_a, const std::string& stimulus_a,
                const std::string& material_b, const std::string& stimulus_b,
                const std::string& table_path) {
    const auto table = load_table(table_path);
    const double score = hapticsim::overlap_coefficient(
        table.at(hapticsim::material_from_name(material_a), stimulus_a),
        table.at(hapticsim::material_from_name(material_b), stimulus_b));
    std::cout << hapticsim::fixed(score, 6) << "\n";
    return 0;
}

int cmd_scenario(const std::string& config_path, const std::string& out_dir) {
    const auto config =
        hapticsim::scenario_config_from_json(hapticsim::read_file(config_path));
    const auto result = hapticsim::run_scenario(config);

    fs::create_directories(out_dir);
    std::vector<std::string> outputs;

    hapticsim::write_file((fs::path(out_dir) / "trace.csv").string(),
                          hapticsim::scenario_to_csv(result));
    outputs.push_back("trace.csv");

    std::string inputs_ndjson, responses_ndjson;
    for (const auto& e : result.inputs) inputs_ndjson += hapticsim::encode_event(e) + "\n";
    for (const auto& e : result.responses) {
        responses_ndjson += hapticsim::encode_event(e) + "\n";
    }
    hapticsim::write_file((fs::path(out_dir) / "inputs.ndjson").string(), inputs_ndjson);
    hapticsim::write_file((fs::path(out_dir) / "responses.ndjson").string(),
                          responses_ndjson);
    outputs.push_back("inputs.ndjson");
    outputs.push_back("responses.ndjson");

    hapticsim::write_wav16((fs::path(out_dir) / "drive.wav").string(),
                           result.drive_samples, config.waveform.sample_rate_hz);
    outputs.push_back("drive.wav");

    hapticsim::SvgSeries pressure{"pressure (kPa)", "#1f77b4", {}};
    hapticsim::SvgSeries drive{"drive RMS x10", "#2ca02c", {}};
    for (const auto& row : result.rows) {
        pressure.points.emplace_back(static_cast<double>(row.t_ms) * 1e-3,
                                     row.pressure_kpa);
        drive.points.emplace_back(static_cast<double>(row.t_ms) * 1e-3,
                                  row.drive_rms * 10.0);
    }
    hapticsim::write_file(
        (fs::path(out_dir) / "trace.svg").string(),
        hapticsim::svg_line_chart("Scenario actuation", "time (s)", "",
                                  {pressure, drive}));
    outputs.push_back("trace.svg");

    write_manifest(fs::path(out_dir) / "manifest.json", config.seed, config_path,
                   outputs);
    std::cout << "wrote " << outputs.size() << " files to " << out_dir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    for (int i = 0; i < argc; ++i) {
        if (i) g_command_line += ' ';
        g_command_line += argv[i];
    }

    CLI::App app{"Simulation and control toolkit for a vibratory-pneumatic "
                 "fingertip haptic device"};
    app.require_subcommand(1);

    // step-sweep
    auto* sweep = app.add_subcommand(
        "step-sweep", "Closed-loop pressure step responses and their metrics");
    std::string sweep_targets = "1..12";
    double sweep_hold = 9.0;
    std::uint64_t sweep_seed = 42;
    std::string sweep_config, sweep_out = "out/step-sweep";
    sweep->add_option("--targets-kpa", sweep_targets,
                      "targets in kPa, e.g. 1..12 or 6,8,10");
    sweep->add_option("--hold-s", sweep_hold, "seconds to hold each target");
    sweep->add_option("--seed", sweep_seed, "sensor noise seed");
    sweep->add_option("--config", sweep_config,
                      "plant/gains JSON (default: plant_default.json under "
                      "$HAPTICSIM_CONFIG_DIR or ./config)");
    sweep->add_option("--out", sweep_out, "output directory");

    // synth
    auto* synth = app.add_subcommand(
        "synth", "Render a slide into the vibrotactile drive waveform");
    std::string synth_trace, synth_level = "A3", synth_out = "out/drive.wav";
    double synth_speed = 0.0, synth_duration = 1.0, synth_lambda = 1.0;
    synth->add_option("--trace", synth_trace, "trajectory CSV (t_s,x_mm,y_mm)");
    synth->add_option("--speed-mm-s", synth_speed, "constant slide speed (mm/s)");
    synth->add_option("--duration-s", synth_duration, "seconds (with --speed-mm-s)");
    synth->add_option("--level", synth_level, "vibro stimulus label (A1, A2, A3)");
    synth->add_option("--lambda-mm", synth_lambda, "texture wavelength (mm)");
    synth->add_option("--out", synth_out, "output WAV path");

    // trials
    auto* trials = app.add_subcommand("trials", "Generate a rating session trial plan");
    std::uint64_t trials_seed = 1;
    int trials_participant = 0;
    std::string trials_out = "out/trials.csv";
    trials->add_option("--seed", trials_seed, "shuffle seed");
    trials->add_option("--participant", trials_participant, "participant index");
    trials->add_option("--out", trials_out, "output CSV path");

    // recommend
    auto* recommend = app.add_subcommand(
        "recommend", "Best stimulus to render one material on another");
    std::string rec_physical, rec_virtual, rec_table;
    recommend->add_option("physical", rec_physical, "physical material under the finger")
        ->required();
    recommend->add_option("virtual", rec_virtual, "material to render")->required();
    recommend->add_option("--table", rec_table, "rating table CSV override");

    // overlap
    auto* overlap = app.add_subcommand(
        "overlap", "Overlap of two material/stimulus percepts");
    std::string ov_ma, ov_sa, ov_mb, ov_sb, ov_table;
    overlap->add_option("material_a", ov_ma)->required();
    overlap->add_option("stimulus_a", ov_sa)->required();
    overlap->add_option("material_b", ov_mb)->required();
    overlap->add_option("stimulus_b", ov_sb)->required();
    overlap->add_option("--table", ov_table, "rating table CSV override");

    // scenario
    auto* scenario = app.add_subcommand(
        "scenario", "Run a closed-loop contact scenario from a JSON config");
    std::string scen_config, scen_out = "out/scenario";
    scenario->add_option("--config", scen_config, "scenario JSON")->required();
    scenario->add_option("--out", scen_out, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sweep->parsed()) {
            return cmd_step_sweep(sweep_targets, sweep_hold, sweep_seed, sweep_config,
                                  sweep_out);
        }
        if (synth->parsed()) {
            if (synth_trace.empty() && synth_speed <= 0.0) {
                throw std::runtime_error(
                    "synth: give --trace or a positive --speed-mm-s");
            }
            return cmd_synth(synth_trace, synth_speed, synth_duration, synth_level,
                             synth_lambda, synth_out);
        }
        if (trials->parsed()) return cmd_trials(trials_seed, trials_participant, trials_out);
        if (recommend->parsed()) return cmd_recommend(rec_physical, rec_virtual, rec_table);
        if (overlap->parsed()) return cmd_overlap(ov_ma, ov_sa, ov_mb, ov_sb, ov_table);
        if (scenario->parsed()) return cmd_scenario(scen_config, scen_out);
    } catch (const std::exception& e) {
        json err;
        err["error"] = e.what();
        std::cerr << err.dump() << "\n";
        return 1;
    }
    return 0;
}
