#include "hapticsim/tracking.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "hapticsim/rng.hpp"
#include "hapticsim/textio.hpp"

namespace hapticsim {

namespace {

constexpr double kMaxSpeed = 400.0;
constexpr double kTwoPi = 6.283185307179586476925286766559;

void check_speed(double v, const char* what) {
    if (!(v >= 0.0 && v <= kMaxSpeed)) {
        throw std::invalid_argument(std::string(what) +
                                    " must be in [0, 400] mm/s");
    }
}

}  // namespace

TrajectoryProfile TrajectoryProfile::constant(double speed_mm_s, double heading_rad) {
    TrajectoryProfile p;
    p.kind = ProfileKind::Constant;
    p.speed_mm_s = speed_mm_s;
    p.heading_rad = heading_rad;
    p.validate();
    return p;
}

TrajectoryProfile TrajectoryProfile::sweep(double min_speed_mm_s, double max_speed_mm_s,
                                           double period_s) {
    TrajectoryProfile p;
    p.kind = ProfileKind::SinusoidSweep;
    p.min_speed_mm_s = min_speed_mm_s;
    p.max_speed_mm_s = max_speed_mm_s;
    p.sweep_period_s = period_s;
    p.validate();
    return p;
}

TrajectoryProfile TrajectoryProfile::from_waypoints(std::vector<LandmarkSample> waypoints) {
    TrajectoryProfile p;
    p.kind = ProfileKind::Waypoints;
    p.waypoints = std::move(waypoints);
    p.validate();
    return p;
}

void TrajectoryProfile::validate() const {
    switch (kind) {
        case ProfileKind::Constant:
            check_speed(speed_mm_s, "constant speed");
            return;
        case ProfileKind::SinusoidSweep:
            check_speed(min_speed_mm_s, "sweep min speed");
            check_speed(max_speed_mm_s, "sweep max speed");
            if (!(min_speed_mm_s <= max_speed_mm_s)) {
                throw std::invalid_argument("sweep min speed must not exceed max speed");
            }
            if (!(sweep_period_s > 0.0)) {
                throw std::invalid_argument("sweep period must be positive");
            }
            return;
        case ProfileKind::Waypoints: {
            if (waypoints.size() < 2) {
                throw std::invalid_argument("waypoint profile needs at least two samples");
            }
            for (std::size_t i = 1; i < waypoints.size(); ++i) {
                const auto& a = waypoints[i - 1];
                const auto& b = waypoints[i];
                if (!(b.t_s > a.t_s)) {
                    throw std::invalid_argument("waypoint timestamps must strictly increase");
                }
                const double d = std::hypot(b.x_mm - a.x_mm, b.y_mm - a.y_mm);
                check_speed(d / (b.t_s - a.t_s), "waypoint segment speed");
            }
            return;
        }
    }
    throw std::invalid_argument("invalid profile kind");
}

void TrajectoryProfile::position_at(double t_s, double& x_mm, double& y_mm) const {
    switch (kind) {
        case ProfileKind::Constant: {
            const double s = speed_mm_s * t_s;
            x_mm = x0_mm + s * std::cos(heading_rad);
            y_mm = y0_mm + s * std::sin(heading_rad);
            return;
        }
        case ProfileKind::SinusoidSweep: {
            const double mid = 0.5 * (min_speed_mm_s + max_speed_mm_s);
            const double amp = 0.5 * (max_speed_mm_s - min_speed_mm_s);
            const double w = kTwoPi / sweep_period_s;
            // Integral of v(t) = mid - amp*cos(w t), so the slide starts at
            // min speed and peaks half a period in.
            const double s = mid * t_s - (amp / w) * std::sin(w * t_s);
            x_mm = x0_mm + s * std::cos(heading_rad);
            y_mm = y0_mm + s * std::sin(heading_rad);
            return;
        }
        case ProfileKind::Waypoints: {
            const auto& w = waypoints;
            if (t_s <= w.front().t_s) {
                x_mm = w.front().x_mm;
                y_mm = w.front().y_mm;
                return;
            }
            if (t_s >= w.back().t_s) {
                x_mm = w.back().x_mm;
                y_mm = w.back().y_mm;
                return;
            }
            for (std::size_t i = 1; i < w.size(); ++i) {
                if (t_s <= w[i].t_s) {
                    const double u = (t_s - w[i - 1].t_s) / (w[i].t_s - w[i - 1].t_s);
                    x_mm = w[i - 1].x_mm + u * (w[i].x_mm - w[i - 1].x_mm);
                    y_mm = w[i - 1].y_mm + u * (w[i].y_mm - w[i - 1].y_mm);
                    return;
                }
            }
            return;
        }
    }
    throw std::invalid_argument("invalid profile kind");
}

double TrajectoryProfile::speed_at(double t_s) const {
    switch (kind) {
        case ProfileKind::Constant:
            return speed_mm_s;
        case ProfileKind::SinusoidSweep: {
            const double mid = 0.5 * (min_speed_mm_s + max_speed_mm_s);
            const double amp = 0.5 * (max_speed_mm_s - min_speed_mm_s);
            return mid - amp * std::cos(kTwoPi * t_s / sweep_period_s);
        }
        case ProfileKind::Waypoints: {
            const auto& w = waypoints;
            if (t_s >= w.back().t_s) return 0.0;
            std::size_t i = 1;
            while (i < w.size() - 1 && t_s > w[i].t_s) ++i;
            const double d = std::hypot(w[i].x_mm - w[i - 1].x_mm,
                                        w[i].y_mm - w[i - 1].y_mm);
            return d / (w[i].t_s - w[i - 1].t_s);
        }
    }
    throw std::invalid_argument("invalid profile kind");
}

std::vector<LandmarkSample> synth_trajectory(const TrajectoryProfile& profile,
                                             double duration_s, double rate_hz) {
    profile.validate();
    if (!(duration_s > 0.0)) throw std::invalid_argument("duration_s must be positive");
    if (!(rate_hz > 0.0)) throw std::invalid_argument("rate_hz must be positive");

    const auto n = static_cast<std::size_t>(std::ceil(duration_s * rate_hz));
    std::vector<LandmarkSample> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        LandmarkSample s;
        s.t_s = static_cast<double>(i) / rate_hz;
        profile.position_at(s.t_s, s.x_mm, s.y_mm);
        out.push_back(s);
    }
    return out;
}

VelocityTrace estimate_velocity(const std::vector<LandmarkSample>& samples,
                                double out_rate_hz, const SmoothingConfig& config) {
    if (samples.size() < 2) {
        throw std::invalid_argument("estimate_velocity needs at least two samples");
    }
    if (!(out_rate_hz >= 30.0)) {
        throw std::invalid_argument("out_rate_hz must be at least the capture rate (30 Hz)");
    }
    if (!(config.time_constant_s >= 0.0) || !(config.pipeline_budget_s >= 0.0) ||
        !(config.latency_jitter_sd_s >= 0.0)) {
        throw std::invalid_argument("smoothing config values must be non-negative");
    }
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (!std::isfinite(samples[i].t_s) || !std::isfinite(samples[i].x_mm) ||
            !std::isfinite(samples[i].y_mm)) {
            throw std::invalid_argument("landmark samples must be finite");
        }
        if (i > 0 && !(samples[i].t_s > samples[i - 1].t_s)) {
            throw std::invalid_argument("landmark timestamps must strictly increase");
        }
    }

    // Exponential smoothing of positions; alpha adapts to the sample gap so
    // irregular capture timing keeps the same effective time constant.
    const std::size_t n = samples.size();
    std::vector<double> sx(n), sy(n);
    sx[0] = samples[0].x_mm;
    sy[0] = samples[0].y_mm;
    for (std::size_t i = 1; i < n; ++i) {
        const double dt = samples[i].t_s - samples[i - 1].t_s;
        const double alpha =
            config.time_constant_s > 0.0 ? 1.0 - std::exp(-dt / config.time_constant_s) : 1.0;
        sx[i] = sx[i - 1] + alpha * (samples[i].x_mm - sx[i - 1]);
        sy[i] = sy[i - 1] + alpha * (samples[i].y_mm - sy[i - 1]);
    }

    // Finite differences of the smoothed path give speeds at the sample
    // times; the first value is copied from the second.
    std::vector<double> speed(n);
    for (std::size_t i = 1; i < n; ++i) {
        const double dt = samples[i].t_s - samples[i - 1].t_s;
        speed[i] = std::hypot(sx[i] - sx[i - 1], sy[i] - sy[i - 1]) / dt;
    }
    speed[0] = speed[1];

    VelocityTrace trace;
    trace.rate_hz = out_rate_hz;
    trace.t0_s = samples.front().t_s;

    const double span = samples.back().t_s - samples.front().t_s;
    const auto out_len = static_cast<std::size_t>(std::ceil(span * out_rate_hz));
    trace.speed_mm_s.reserve(out_len);

    std::size_t k = 0;  // index of the knot at or before the output time
    for (std::size_t j = 0; j < out_len; ++j) {
        const double t = samples.front().t_s + static_cast<double>(j) / out_rate_hz;
        while (k + 1 < n && samples[k + 1].t_s <= t) ++k;
        double v = speed[k];
        if (config.upsampling == Upsampling::Linear && k + 1 < n) {
            const double u = (t - samples[k].t_s) / (samples[k + 1].t_s - samples[k].t_s);
            v = speed[k] + u * (speed[k + 1] - speed[k]);
        }
        trace.speed_mm_s.push_back(v);
    }

    trace.latency_s = config.time_constant_s + config.pipeline_budget_s;
    if (config.latency_jitter_sd_s > 0.0) {
        Rng rng(config.jitter_seed);
        trace.latency_s += config.latency_jitter_sd_s * rng.gaussian();
        trace.latency_s = std::max(trace.latency_s, 0.0);
    }
    return trace;
}

std::string trajectory_to_csv(const std::vector<LandmarkSample>& samples) {
    std::string out = "t_s,x_mm,y_mm\n";
    for (const auto& s : samples) {
        out += fixed(s.t_s, 6);
        out += ',';
        out += fixed(s.x_mm, 6);
        out += ',';
        out += fixed(s.y_mm, 6);
        out += '\n';
    }
    return out;
}

std::vector<LandmarkSample> trajectory_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || split_csv_line(line) !=
        std::vector<std::string>{"t_s", "x_mm", "y_mm"}) {
        throw std::runtime_error("trajectory csv: expected header t_s,x_mm,y_mm");
    }
    std::vector<LandmarkSample> samples;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 3) {
            throw std::runtime_error("trajectory csv row " + std::to_string(row) +
                                     ": expected 3 fields");
        }
        const std::string where = "trajectory csv row " + std::to_string(row);
        samples.push_back({parse_double(f[0], where), parse_double(f[1], where),
                           parse_double(f[2], where)});
        ++row;
    }
    return samples;
}

std::string velocity_to_csv(const VelocityTrace& trace) {
    std::string out = "t_s,speed_mm_s\n";
    for (std::size_t i = 0; i < trace.speed_mm_s.size(); ++i) {
        out += fixed(trace.t0_s + static_cast<double>(i) / trace.rate_hz, 6);
        out += ',';
        out += fixed(trace.speed_mm_s[i], 6);
        out += '\n';
    }
    return out;
}

}  // namespace hapticsim
