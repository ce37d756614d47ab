#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hapticsim {

// ---------------------------------------------------------------------------
// Fingertip tracking simulation.
//
// A camera samples the fingertip landmark at 30 Hz; the estimator smooths the
// positions, differentiates, and upsamples the speed to the waveform rate.
// Ground-truth speed stays available from the profile for accuracy tests.
// ---------------------------------------------------------------------------

struct LandmarkSample {
    double t_s = 0.0;
    double x_mm = 0.0;
    double y_mm = 0.0;
};

enum class ProfileKind { Constant, SinusoidSweep, Waypoints };

struct TrajectoryProfile {
    ProfileKind kind = ProfileKind::Constant;

    // Constant: straight-line slide at constant speed.
    double speed_mm_s = 100.0;
    double heading_rad = 0.0;

    // SinusoidSweep: straight-line slide whose speed oscillates between
    // min_speed and max_speed with the given period, starting at min_speed.
    double min_speed_mm_s = 50.0;
    double max_speed_mm_s = 200.0;
    double sweep_period_s = 2.0;

    // Waypoints: piecewise-linear path through recorded samples.
    std::vector<LandmarkSample> waypoints;

    double x0_mm = 0.0;
    double y0_mm = 0.0;

    static TrajectoryProfile constant(double speed_mm_s, double heading_rad = 0.0);
    static TrajectoryProfile sweep(double min_speed_mm_s, double max_speed_mm_s,
                                   double period_s = 2.0);
    static TrajectoryProfile from_waypoints(std::vector<LandmarkSample> waypoints);

    void validate() const;

    // Ground-truth position / speed at time t (t >= 0).
    void position_at(double t_s, double& x_mm, double& y_mm) const;
    double speed_at(double t_s) const;
};

// Samples the profile at the capture rate: t_i = i / rate_hz for
// i = 0 .. ceil(duration_s * rate_hz) - 1.  Throws on non-positive duration
// or rate, or on speeds outside [0, 400] mm/s.
std::vector<LandmarkSample> synth_trajectory(const TrajectoryProfile& profile,
                                             double duration_s,
                                             double rate_hz = 30.0);

enum class Upsampling { Linear, ZeroOrderHold };

struct SmoothingConfig {
    // First-order exponential smoothing of positions; the time constant also
    // sets the filter's contribution to end-to-end latency.
    double time_constant_s = 0.033;
    // Fixed processing budget downstream of the filter (landmark inference
    // plus resampling), reported as part of the latency figure.
    double pipeline_budget_s = 0.02053;
    Upsampling upsampling = Upsampling::Linear;
    // Optional per-trace latency jitter (standard deviation, seconds).
    double latency_jitter_sd_s = 0.0;
    std::uint64_t jitter_seed = 0;
};

struct VelocityTrace {
    double rate_hz = 3000.0;
    std::vector<double> speed_mm_s;   // speed_mm_s[i] is at t = t0 + i/rate
    double t0_s = 0.0;                // timestamp of the first output sample
    double latency_s = 0.0;           // filter time constant + pipeline budget

    double duration_s() const {
        return speed_mm_s.empty() ? 0.0 : static_cast<double>(speed_mm_s.size()) / rate_hz;
    }
};

// Speed estimation from landmark samples: exponential smoothing of the
// positions, finite differences between consecutive smoothed positions, then
// upsampling to out_rate_hz.  Requires at least two samples and
// out_rate_hz >= capture rate.  Output covers [t0, tN) of the input span with
// ceil(span * out_rate) samples; the first speed is copied from the second
// (a single difference cannot be centered).
VelocityTrace estimate_velocity(const std::vector<LandmarkSample>& samples,
                                double out_rate_hz = 3000.0,
                                const SmoothingConfig& config = {});

// CSV: header "t_s,x_mm,y_mm" (or "t_s,speed_mm_s" for trace review).
std::string trajectory_to_csv(const std::vector<LandmarkSample>& samples);
std::vector<LandmarkSample> trajectory_from_csv(const std::string& text);
std::string velocity_to_csv(const VelocityTrace& trace);

}  // namespace hapticsim
