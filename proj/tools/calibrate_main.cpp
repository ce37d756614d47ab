#include <cmath>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hapticsim/pneumo.hpp"
#include "hapticsim/textio.hpp"

// Gain search for the pressure loop.  The plant parameters are the bench
// model; this tool picks PID gains whose simulated sweep best matches the
// device's measured behaviour (stable-stage error around 0.39 kPa MAE,
// activation near 0.146 s, deactivation near 0.329 s at 10 kPa) while
// keeping every target inside the regression bounds the tests enforce.

namespace {

struct SweepSummary {
    double avg_mae_stable = 0.0;
    double worst_mae_stable = 0.0;
    double worst_mme_stable = 0.0;
    double activation10_s = 0.0;
    double deactivation10_s = 0.0;
    double worst_overshoot_kpa = 0.0;
    double band_entry10_s = 0.0;
};

SweepSummary run_sweep(const hapticsim::PidGains& gains,
                       const hapticsim::PlantParams& plant, std::uint64_t seed) {
    SweepSummary s;
    double mae_sum = 0.0;
    for (int target = 1; target <= 12; ++target) {
        const auto r = hapticsim::run_step_response(target, 9.0, gains, plant,
                                                    seed + static_cast<std::uint64_t>(target));
        mae_sum += r.metrics.mae_stable;
        s.worst_mae_stable = std::max(s.worst_mae_stable, r.metrics.mae_stable);
        s.worst_mme_stable = std::max(s.worst_mme_stable, r.metrics.mme_stable);

        double peak = 0.0;
        for (double p : r.true_pressure_kpa) peak = std::max(peak, p);
        s.worst_overshoot_kpa = std::max(s.worst_overshoot_kpa, peak - target);

        if (target == 10) {
            s.activation10_s = r.metrics.activation_s;
            s.deactivation10_s = r.metrics.deactivation_s;
            for (const auto& row : r.trace) {
                if (std::abs(row.measured_kpa - 10.0) <= 0.5) {
                    s.band_entry10_s = row.t_s;
                    break;
                }
            }
        }
    }
    s.avg_mae_stable = mae_sum / 12.0;
    return s;
}

double hard_violations(const SweepSummary& s) {
    double cost = 0.0;
    if (s.worst_mae_stable > 0.6) cost += 100.0;
    if (s.worst_mme_stable > 1.3) cost += 100.0;
    if (s.avg_mae_stable < 0.136 || s.avg_mae_stable > 0.636) cost += 100.0;
    if (s.activation10_s < 0.10 || s.activation10_s > 0.30) cost += 100.0;
    if (s.deactivation10_s < 0.20 || s.deactivation10_s > 0.60) cost += 100.0;
    if (s.worst_overshoot_kpa > 1.5) cost += 100.0;
    if (s.band_entry10_s <= 0.0 || s.band_entry10_s > 1.0) cost += 100.0;
    return cost;
}

double objective(const SweepSummary& s) {
    // Timing fidelity first, then error-level fidelity, with growing
    // penalties as the noise-sensitive stats eat into their headroom (a
    // different seed must not flip any requirement).
    return std::abs(s.activation10_s - 0.14583) +
           std::abs(s.deactivation10_s - 0.32917) +
           0.5 * std::abs(s.avg_mae_stable - 0.386) +
           5.0 * std::max(0.0, s.worst_mme_stable - 1.1) +
           2.0 * std::max(0.0, s.worst_overshoot_kpa - 1.0) +
           hard_violations(s);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"PID gain calibration against the pneumatic plant model"};
    std::string out_path = "config/plant_default.json";
    std::uint64_t seed = 42;
    app.add_option("--out", out_path, "config JSON to write");
    app.add_option("--seed", seed, "sensor noise seed");
    CLI11_PARSE(app, argc, argv);

    const hapticsim::PlantParams plant;

    const std::vector<double> kps = {0.10, 0.15, 0.20, 0.25, 0.30, 0.35};
    const std::vector<double> kis = {0.4, 0.6, 0.8, 1.0, 1.2, 1.4};
    const std::vector<double> kds = {0.0, 0.005, 0.01};

    hapticsim::PidGains best;
    SweepSummary best_summary;
    double best_cost = 1e18;

    for (double kp : kps) {
        for (double ki : kis) {
            for (double kd : kds) {
                hapticsim::PidGains gains;
                gains.kp = kp;
                gains.ki = ki;
                gains.kd = kd;
                const SweepSummary s = run_sweep(gains, plant, seed);
                double cost = objective(s);
                // Requirements must also hold under other noise realizations.
                for (std::uint64_t alt : {7ULL, 123ULL, 9001ULL}) {
                    cost += hard_violations(run_sweep(gains, plant, alt));
                }
                if (cost < best_cost) {
                    best_cost = cost;
                    best = gains;
                    best_summary = s;
                }
            }
        }
    }

    std::cout << "best gains: kp=" << best.kp << " ki=" << best.ki
              << " kd=" << best.kd << "\n"
              << "  avg mae_stable    " << hapticsim::fixed(best_summary.avg_mae_stable, 3)
              << " kPa\n"
              << "  worst mae_stable  " << hapticsim::fixed(best_summary.worst_mae_stable, 3)
              << " kPa\n"
              << "  worst mme_stable  " << hapticsim::fixed(best_summary.worst_mme_stable, 3)
              << " kPa\n"
              << "  activation @10    " << hapticsim::fixed(best_summary.activation10_s, 3)
              << " s\n"
              << "  deactivation @10  " << hapticsim::fixed(best_summary.deactivation10_s, 3)
              << " s\n"
              << "  worst overshoot   " << hapticsim::fixed(best_summary.worst_overshoot_kpa, 3)
              << " kPa\n"
              << "  band entry @10    " << hapticsim::fixed(best_summary.band_entry10_s, 3)
              << " s\n"
              << "  cost              " << hapticsim::fixed(best_cost, 4) << "\n";

    if (best_cost >= 100.0) {
        std::cerr << "no gain set met every requirement\n";
        return 1;
    }

    hapticsim::PneumoConfig config;
    config.plant = plant;
    config.gains = best;
    hapticsim::write_file(out_path, hapticsim::pneumo_config_to_json(config));
    std::cout << "wrote " << out_path << "\n";
    return 0;
}
