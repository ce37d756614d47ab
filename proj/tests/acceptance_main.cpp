// Acceptance checks for the full device simulation: each check prints one
// [PASS]/[FAIL] line with the measured values, and the exit code is the
// number of failed checks.  Expected values come from independent numeric
// oracles and bench anchors, never from the code under test.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "hapticsim/core.hpp"
#include "hapticsim/perception.hpp"
#include "hapticsim/pipeline.hpp"
#include "hapticsim/pneumo.hpp"
#include "hapticsim/rng.hpp"
#include "hapticsim/session.hpp"
#include "hapticsim/textio.hpp"
#include "hapticsim/tracking.hpp"
#include "hapticsim/vibro.hpp"
#include "support/oracles.hpp"
#include "support/tempdir.hpp"

using namespace hapticsim;

namespace {

// --- c1: the drive tone sits at speed/wavelength ---------------------------

bool check_c1(std::string& detail) {
    const double speeds[] = {50.0, 100.0, 200.0, 250.0};
    const WaveformParams params;  // wavelength 1 mm, 3 kHz
    double worst_offset_hz = 0.0;
    for (double v : speeds) {
        VelocityTrace trace;
        trace.rate_hz = params.sample_rate_hz;
        trace.speed_mm_s.assign(static_cast<std::size_t>(params.sample_rate_hz), v);
        const auto samples = flatten(synthesize(trace, params));
        const double bin_hz = params.sample_rate_hz / static_cast<double>(samples.size());
        const double peak = oracle::dft_peak_hz(samples, params.sample_rate_hz);
        worst_offset_hz = std::max(worst_offset_hz, std::abs(peak - v / 1.0));
        if (std::abs(peak - v) > bin_hz + 1e-12) {
            detail = "peak " + fixed(peak, 3) + " Hz at " + fixed(v, 0) +
                     " mm/s, off by more than one bin";
            return false;
        }
    }
    detail = "1 s tones at 50/100/200/250 mm/s, worst peak offset " +
             fixed(worst_offset_hz, 3) + " Hz (bin width 1 Hz)";
    return true;
}

// --- c2: closed-loop step accuracy over the working range ------------------

bool check_c2(std::string& detail) {
    const PidGains gains{0.25, 0.6, 0.0};
    const PlantParams plant;
    double mae_sum = 0.0, worst_mae = 0.0, worst_mme = 0.0;
    bool ok = true;
    for (int t = 1; t <= 12; ++t) {
        const auto response = run_step_response(static_cast<double>(t), 9.0, gains,
                                                plant, 42 + t);
        const auto& m = response.metrics;
        mae_sum += m.mae_stable;
        worst_mae = std::max(worst_mae, m.mae_stable);
        worst_mme = std::max(worst_mme, m.mme_stable);
        if (m.mae_stable > 0.6 || m.mme_stable > 1.3) ok = false;
    }
    const double avg_mae = mae_sum / 12.0;
    if (std::abs(avg_mae - 0.386) > 0.25) ok = false;
    detail = "steps 1..12 kPa: worst mae_stable " + fixed(worst_mae, 3) +
             " (limit 0.6), worst mme_stable " + fixed(worst_mme, 3) +
             " (limit 1.3), avg mae " + fixed(avg_mae, 3) + " (0.386 +/- 0.25)";
    return ok;
}

// --- c3: pneumatic activation / release timing ------------------------------

bool check_c3(std::string& detail) {
    const auto response =
        run_step_response(10.0, 9.0, PidGains{0.25, 0.6, 0.0}, PlantParams{}, 52);
    const double on = response.metrics.activation_s;
    const double off = response.metrics.deactivation_s;
    detail = "10 kPa step: activation " + fixed(on, 3) + " s (window 0.10..0.30), release " +
             fixed(off, 3) + " s (window 0.20..0.60)";
    return on >= 0.10 && on <= 0.30 && off >= 0.20 && off <= 0.60;
}

// --- c4: lift and contact-area actuator curves ------------------------------

bool check_c4(std::string& detail) {
    if (std::abs(pressure_to_lift(10.0) - 4.07) > 1e-12) {
        detail = "lift(10 kPa) = " + fixed(pressure_to_lift(10.0), 4) + ", expected 4.07";
        return false;
    }

    const double forces[3] = {0.75, 1.0, 1.5};
    const double pressures[3] = {6.0, 8.0, 10.0};
    const double expected[3][3] = {{0.128, 0.255, 0.396},
                                   {0.086, 0.152, 0.288},
                                   {0.081, 0.119, 0.208}};
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            const double got = contact_area_reduction(pressures[j], forces[i]);
            if (std::abs(got - expected[i][j]) > 1e-12) {
                detail = "area(" + fixed(pressures[j], 0) + " kPa, " +
                         fixed(forces[i], 2) + " N) = " + fixed(got, 4) +
                         ", expected " + fixed(expected[i][j], 4);
                return false;
            }
        }
    }

    for (int i = 0; i < 50; ++i) {
        const double force = 0.75 + 0.75 * i / 49.0;
        double prev = -1.0;
        for (int j = 0; j < 50; ++j) {
            const double area = contact_area_reduction(12.0 * j / 49.0, force);
            if (area < prev - 1e-12) {
                detail = "area not monotone in pressure at force " + fixed(force, 3);
                return false;
            }
            prev = area;
        }
    }
    for (int j = 0; j < 50; ++j) {
        const double pressure = 12.0 * j / 49.0;
        double prev = 2.0;
        for (int i = 0; i < 50; ++i) {
            const double area = contact_area_reduction(pressure, 0.75 + 0.75 * i / 49.0);
            if (area > prev + 1e-12) {
                detail = "area not monotone in force at " + fixed(pressure, 3) + " kPa";
                return false;
            }
            prev = area;
        }
    }

    double prev = -1.0;
    for (int j = 0; j < 50; ++j) {
        const double lift = pressure_to_lift(12.0 * j / 49.0);
        if (lift < prev - 1e-12) {
            detail = "lift not monotone in pressure";
            return false;
        }
        prev = lift;
    }

    detail = "lift(10) = 4.07 mm, 9 bench grid points exact, lift and area monotone "
             "across a 50x50 hull";
    return true;
}

// --- c5: rating data integrity and percept overlap --------------------------

struct RatingRef {
    MaterialId material;
    const char* label;
    double mean;
    double sd;
};

// Independently transcribed rating data (energy order N A1 B1 A2 B2 A3 B3).
const RatingRef kRatingRef[42] = {
    {MaterialId::Glass, "N", 17.9, 7.03},      {MaterialId::Glass, "A1", 31.9, 11.72},
    {MaterialId::Glass, "B1", 15.7, 4.44},     {MaterialId::Glass, "A2", 36.8, 12.50},
    {MaterialId::Glass, "B2", 13.0, 6.27},     {MaterialId::Glass, "A3", 41.7, 12.57},
    {MaterialId::Glass, "B3", 11.0, 6.71},

    {MaterialId::Ceramics, "N", 30.3, 6.89},   {MaterialId::Ceramics, "A1", 40.8, 8.34},
    {MaterialId::Ceramics, "B1", 26.4, 6.19},  {MaterialId::Ceramics, "A2", 44.7, 8.43},
    {MaterialId::Ceramics, "B2", 20.5, 9.61},  {MaterialId::Ceramics, "A3", 49.7, 6.54},
    {MaterialId::Ceramics, "B3", 17.9, 9.36},

    {MaterialId::Paper, "N", 46.1, 5.78},      {MaterialId::Paper, "A1", 54.2, 5.45},
    {MaterialId::Paper, "B1", 41.0, 4.72},     {MaterialId::Paper, "A2", 60.5, 6.03},
    {MaterialId::Paper, "B2", 37.0, 7.16},     {MaterialId::Paper, "A3", 64.9, 7.38},
    {MaterialId::Paper, "B3", 31.9, 11.40},

    {MaterialId::BalsaWood, "N", 58.6, 7.10},  {MaterialId::BalsaWood, "A1", 62.4, 6.54},
    {MaterialId::BalsaWood, "B1", 49.3, 10.83},{MaterialId::BalsaWood, "A2", 69.2, 6.71},
    {MaterialId::BalsaWood, "B2", 45.4, 13.16},{MaterialId::BalsaWood, "A3", 71.2, 7.54},
    {MaterialId::BalsaWood, "B3", 38.6, 15.12},

    {MaterialId::Cotton, "N", 70.8, 10.84},    {MaterialId::Cotton, "A1", 73.3, 10.75},
    {MaterialId::Cotton, "B1", 64.2, 14.66},   {MaterialId::Cotton, "A2", 77.7, 8.86},
    {MaterialId::Cotton, "B2", 57.6, 15.34},   {MaterialId::Cotton, "A3", 82.2, 12.67},
    {MaterialId::Cotton, "B3", 53.4, 14.08},

    {MaterialId::Leather, "N", 74.1, 9.87},    {MaterialId::Leather, "A1", 77.5, 10.56},
    {MaterialId::Leather, "B1", 61.9, 7.08},   {MaterialId::Leather, "A2", 82.5, 11.05},
    {MaterialId::Leather, "B2", 60.0, 7.47},   {MaterialId::Leather, "A3", 84.1, 12.48},
    {MaterialId::Leather, "B3", 58.0, 6.09},
};

bool check_c5(std::string& detail) {
    const auto& table = RatingTable::builtin();

    for (const auto& ref : kRatingRef) {
        const auto& entry = table.at(ref.material, ref.label);
        if (std::abs(entry.mean - ref.mean) > 1e-12 || std::abs(entry.sd - ref.sd) > 1e-12) {
            detail = std::string(material_name(ref.material)) + "/" + ref.label +
                     " = (" + fixed(entry.mean, 2) + ", " + fixed(entry.sd, 2) +
                     "), expected (" + fixed(ref.mean, 2) + ", " + fixed(ref.sd, 2) + ")";
            return false;
        }
    }

    const char* order[7] = {"B3", "B2", "B1", "N", "A1", "A2", "A3"};
    for (MaterialId material : test_materials()) {
        for (int i = 1; i < 7; ++i) {
            if (!(table.at(material, order[i - 1]).mean < table.at(material, order[i]).mean)) {
                detail = std::string(material_name(material)) +
                         ": mean(" + order[i - 1] + ") not below mean(" + order[i] + ")";
                return false;
            }
        }
    }

    const double lib = overlap_coefficient(table.at(MaterialId::Glass, "A1"),
                                           table.at(MaterialId::Ceramics, "N"));
    const double oracle = oracle::simpson_min_overlap(31.9, 11.72, 30.3, 6.89);
    if (std::abs(lib - oracle) > 1e-6) {
        detail = "overlap " + fixed(lib, 6) + " disagrees with numeric oracle " +
                 fixed(oracle, 6);
        return false;
    }
    detail = "42 entries match the transcription, per-material ordering holds; "
             "overlap((glass,A1),(ceramics,N)) = " + fixed(lib, 6) +
             " against required >= 0.9";
    return lib >= 0.9;
}

// --- c6: recommendation direction and study-pair ranking ---------------------

bool check_c6(std::string& detail) {
    const auto& table = RatingTable::builtin();
    std::vector<std::string> violations;

    for (MaterialId physical : test_materials()) {
        for (MaterialId virt : test_materials()) {
            if (physical == virt) continue;
            const auto rec = recommend_stimulus(table, physical, virt);
            const char want =
                roughness_rank(virt) > roughness_rank(physical) ? 'A' : 'B';
            if (rec.stimulus_label.empty() || rec.stimulus_label[0] != want) {
                violations.push_back(std::string(material_name(physical)) + "->" +
                                     std::string(material_name(virt)) + " picked " +
                                     rec.stimulus_label + " not " + want + "-class");
            }
        }
    }

    const std::tuple<MaterialId, MaterialId, const char*> study_pairs[6] = {
        {MaterialId::Glass, MaterialId::Ceramics, "A1"},
        {MaterialId::Paper, MaterialId::BalsaWood, "A2"},
        {MaterialId::Cotton, MaterialId::Leather, "A2"},
        {MaterialId::Ceramics, MaterialId::Glass, "B3"},
        {MaterialId::BalsaWood, MaterialId::Paper, "B2"},
        {MaterialId::Leather, MaterialId::Cotton, "B1"},
    };
    for (const auto& [physical, virt, label] : study_pairs) {
        const auto rec = recommend_stimulus(table, physical, virt);
        int position = -1;
        for (std::size_t i = 0; i < rec.ranking.size(); ++i) {
            if (rec.ranking[i].label == label) position = static_cast<int>(i) + 1;
        }
        if (position < 1 || position > 3) {
            violations.push_back(std::string(material_name(physical)) + "->" +
                                 std::string(material_name(virt)) + ": " + label +
                                 " ranks " + std::to_string(position) + ", not top-3");
        }
    }

    if (violations.empty()) {
        detail = "all 30 ordered pairs pick the expected channel; all 6 study "
                 "stimuli rank top-3";
        return true;
    }
    detail.clear();
    for (const auto& v : violations) {
        if (!detail.empty()) detail += "; ";
        detail += v;
    }
    return false;
}

// --- c7: trial plan structure and balancing ----------------------------------

bool check_c7(std::string& detail) {
    const auto& materials = test_materials();

    for (int participant = 0; participant < 6; ++participant) {
        const auto plan = generate_trials(42, participant);
        if (plan.rows.size() != 245) {
            detail = "participant " + std::to_string(participant) + ": " +
                     std::to_string(plan.rows.size()) + " rows, expected 245";
            return false;
        }

        std::map<std::tuple<MaterialId, std::string, int>, int> counts;
        int measurements = 0, since_baseline = 0;
        for (std::size_t i = 0; i < plan.rows.size(); ++i) {
            const auto& row = plan.rows[i];
            const bool baseline_slot = (i % 7 == 6);
            if (row.is_baseline != baseline_slot) {
                detail = "participant " + std::to_string(participant) +
                         ": baseline misplaced at row " + std::to_string(i);
                return false;
            }
            if (row.is_baseline) {
                if (row.material != MaterialId::Plywood || row.stimulus != "N" ||
                    row.repetition != 0 || since_baseline != 6) {
                    detail = "bad baseline row " + std::to_string(i);
                    return false;
                }
                since_baseline = 0;
            } else {
                ++measurements;
                ++since_baseline;
                ++counts[{row.material, row.stimulus, row.repetition}];
                if (row.is_training != (row.repetition == 1)) {
                    detail = "training flag wrong at row " + std::to_string(i);
                    return false;
                }
            }
        }
        if (measurements != 210) {
            detail = std::to_string(measurements) + " measurements, expected 210";
            return false;
        }
        for (MaterialId material : materials) {
            for (std::string_view label : stimulus_energy_order()) {
                for (int rep = 1; rep <= 5; ++rep) {
                    if (counts[{material, std::string(label), rep}] != 1) {
                        detail = "missing trial " + std::string(material_name(material)) +
                                 "/" + std::string(label) + "/rep" + std::to_string(rep);
                        return false;
                    }
                }
            }
        }

        if (trials_to_csv(plan) != trials_to_csv(generate_trials(42, participant))) {
            detail = "same seed produced different plans";
            return false;
        }
    }

    for (int position = 0; position < 6; ++position) {
        std::set<MaterialId> seen;
        for (int participant = 0; participant < 6; ++participant) {
            seen.insert(material_order(participant)[position]);
        }
        if (seen.size() != 6) {
            detail = "material order position " + std::to_string(position) +
                     " repeats across participants 0..5";
            return false;
        }
    }

    if (trials_to_csv(generate_trials(42, 0)) == trials_to_csv(generate_trials(43, 0))) {
        detail = "different seeds produced identical plans";
        return false;
    }

    detail = "participants 0..5: 210 balanced measurements each (6 materials x 7 "
             "stimuli x 5 reps), baseline after every 6, Latin-square material "
             "order, seed-deterministic";
    return true;
}

// --- c8: protocol robustness and run determinism ------------------------------

bool check_c8(std::string& detail) {
    Rng rng(20260814);
    const EventKind kinds[] = {EventKind::ContactBegin, EventKind::ContactEnd,
                               EventKind::StimulusCmd, EventKind::Ack,
                               EventKind::Error};
    const auto& labels = stimulus_energy_order();
    const auto& materials = all_materials();

    int mismatches = 0;
    for (int i = 0; i < 10000; ++i) {
        SessionEvent event;
        event.seq = rng.uniform_below(1000000);
        event.t_ms = rng.uniform_below(10000000);
        event.kind = kinds[rng.uniform_below(5)];
        if (event.kind == EventKind::ContactBegin || rng.uniform_below(2) == 0) {
            event.material = materials[rng.uniform_below(materials.size())];
        }
        if (event.kind == EventKind::StimulusCmd || rng.uniform_below(2) == 0) {
            event.stimulus = std::string(labels[rng.uniform_below(labels.size())]);
        }
        const auto decoded = decode_event(encode_event(event));
        if (decoded.seq != event.seq || decoded.t_ms != event.t_ms ||
            decoded.kind != event.kind || decoded.material != event.material ||
            decoded.stimulus != event.stimulus) {
            ++mismatches;
        }
    }
    if (mismatches != 0) {
        detail = std::to_string(mismatches) + " of 10000 fuzzed events failed to round-trip";
        return false;
    }

    SchedulerConfig config = SchedulerConfig::mr_bridge();
    config.mapping[MaterialId::Glass] = "A1";
    StimulusScheduler scheduler(config);
    SessionEvent begin;
    begin.seq = 1;
    begin.t_ms = 1000;
    begin.kind = EventKind::ContactBegin;
    begin.material = MaterialId::Glass;
    auto replies = scheduler.on_event(begin);
    if (replies.size() != 1 || replies[0].kind != EventKind::StimulusCmd) {
        detail = "contact did not start a stimulus";
        return false;
    }
    const char* junk[] = {"{oops",
                          "[]",
                          "{\"seq\":2,\"t_ms\":1001,\"kind\":\"bogus\"}",
                          "{\"seq\":2}",
                          "not json at all",
                          "{\"seq\":-4,\"t_ms\":0,\"kind\":\"ack\"}"};
    for (const char* line : junk) {
        const auto responses = scheduler.on_line(line);
        if (responses.size() != 1 || responses[0].kind != EventKind::Error) {
            detail = std::string("malformed line '") + line + "' did not yield an Error";
            return false;
        }
    }
    SessionEvent end;
    end.seq = 2;
    end.t_ms = 2000;
    end.kind = EventKind::ContactEnd;
    replies = scheduler.on_event(end);
    if (replies.size() != 1 || replies[0].kind != EventKind::StimulusCmd ||
        replies[0].stimulus != "N") {
        detail = "scheduler stopped responding after malformed input";
        return false;
    }

    const auto config_text =
        read_file(std::string(HAPTICSIM_SOURCE_DIR) + "/config/scenarios/ceramic-as-glass.json");
    const auto scenario = scenario_config_from_json(config_text);
    testutil::TempDir dir;
    const std::string trace_a = dir.file("a.csv");
    const std::string trace_b = dir.file("b.csv");
    write_file(trace_a, scenario_to_csv(run_scenario(scenario)));
    write_file(trace_b, scenario_to_csv(run_scenario(scenario)));
    if (read_file(trace_a) != read_file(trace_b)) {
        detail = "two runs of the same scenario produced different traces";
        return false;
    }

    detail = "10000 fuzzed events round-trip, malformed lines answered with Error "
             "and the stream survives, repeated scenario traces byte-identical";
    return true;
}

// --- c9: velocity estimator accuracy and latency budget ------------------------

bool check_c9(std::string& detail) {
    double worst_rel = 0.0;
    for (double v = 50.0; v <= 200.0; v += 25.0) {
        const auto samples = synth_trajectory(TrajectoryProfile::constant(v), 2.0, 30.0);
        const auto estimate = estimate_velocity(samples, 1000.0);
        if (std::abs(estimate.latency_s - 0.05353) > 1e-9) {
            detail = "estimator latency " + fixed(estimate.latency_s * 1000.0, 3) +
                     " ms, expected 53.530";
            return false;
        }
        for (std::size_t i = 1000; i < estimate.speed_mm_s.size(); ++i) {
            worst_rel = std::max(worst_rel, std::abs(estimate.speed_mm_s[i] - v) / v);
        }
    }
    if (worst_rel > 0.02) {
        detail = "steady-state speed error " + fixed(worst_rel * 100.0, 3) +
                 "%, limit 2%";
        return false;
    }

    const double budget_ms = LatencyBudget{}.vibro_total_ms();
    if (std::abs(budget_ms - 53.53) > 1e-9) {
        detail = "vibro latency budget " + fixed(budget_ms, 4) + " ms, expected 53.53";
        return false;
    }
    detail = "constant slides 50..200 mm/s: steady-state speed error " +
             fixed(worst_rel * 100.0, 3) + "% (limit 2%), vibro chain latency " +
             fixed(budget_ms, 2) + " ms";
    return true;
}

struct Criterion {
    const char* id;
    const char* title;
    bool (*run)(std::string&);
};

const Criterion kCriteria[] = {
    {"c1", "drive tone frequency equals speed over wavelength", check_c1},
    {"c2", "closed-loop pressure accuracy across 1..12 kPa steps", check_c2},
    {"c3", "pneumatic activation and release timing", check_c3},
    {"c4", "lift and contact-area actuator curves", check_c4},
    {"c5", "rating data integrity and percept overlap", check_c5},
    {"c6", "recommendation direction and study-pair ranking", check_c6},
    {"c7", "trial plan structure and balancing", check_c7},
    {"c8", "protocol robustness and run determinism", check_c8},
    {"c9", "velocity estimator accuracy and latency budget", check_c9},
};

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> wanted(argv + 1, argv + argc);
    for (const auto& id : wanted) {
        const bool known = std::any_of(std::begin(kCriteria), std::end(kCriteria),
                                       [&](const Criterion& c) { return id == c.id; });
        if (!known) {
            std::cerr << "unknown criterion: " << id << " (expected c1..c9)\n";
            return 2;
        }
    }

    int failures = 0;
    for (const auto& criterion : kCriteria) {
        if (!wanted.empty() &&
            std::find(wanted.begin(), wanted.end(), criterion.id) == wanted.end()) {
            continue;
        }
        std::string detail;
        bool pass = false;
        try {
            pass = criterion.run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        std::cout << (pass ? "[PASS] " : "[FAIL] ") << criterion.id << " "
                  << criterion.title << " -- " << detail << "\n";
        if (!pass) ++failures;
    }
    return failures;
}
