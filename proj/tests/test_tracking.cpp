#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "hapticsim/rng.hpp"
#include "hapticsim/tracking.hpp"

using namespace hapticsim;

namespace {

// Fraction of the trace treated as settled for accuracy checks: the
// smoothing filter needs a few time constants to converge.
std::size_t steady_start(const VelocityTrace& trace) {
    return trace.speed_mm_s.size() * 3 / 4;
}

std::vector<LandmarkSample> random_walk_waypoints(std::uint64_t seed) {
    Rng rng(seed);
    std::vector<LandmarkSample> pts;
    double x = 0.0, y = 0.0;
    for (int i = 0; i < 60; ++i) {
        const double t = static_cast<double>(i) / 30.0;
        pts.push_back({t, x, y});
        const double speed = 20.0 + 330.0 * rng.uniform();
        const double heading = 6.283185307179586 * rng.uniform();
        x += speed / 30.0 * std::cos(heading);
        y += speed / 30.0 * std::sin(heading);
    }
    return pts;
}

}  // namespace

TEST_CASE("constant profile samples a straight slide at the capture rate") {
    const auto profile = TrajectoryProfile::constant(100.0);
    const auto samples = synth_trajectory(profile, 2.0, 30.0);

    REQUIRE(samples.size() == 60);
    CHECK(samples[0].t_s == 0.0);
    CHECK(samples[30].t_s == doctest::Approx(1.0));
    CHECK(samples[30].x_mm == doctest::Approx(100.0));
    CHECK(samples[30].y_mm == doctest::Approx(0.0));
    CHECK(profile.speed_at(1.7) == 100.0);
}

TEST_CASE("sweep profile position is the integral of its speed") {
    const auto profile = TrajectoryProfile::sweep(50.0, 200.0, 2.0);

    CHECK(profile.speed_at(0.0) == doctest::Approx(50.0));
    CHECK(profile.speed_at(1.0) == doctest::Approx(200.0));
    CHECK(profile.speed_at(2.0) == doctest::Approx(50.0));

    // March the speed with a fine trapezoid and compare with the closed-form
    // positions along the way.
    const double dt = 1e-5;
    double s = 0.0;
    for (double t = 0.0; t < 1.3; t += dt) {
        s += 0.5 * (profile.speed_at(t) + profile.speed_at(t + dt)) * dt;
    }
    double x = 0.0, y = 0.0;
    profile.position_at(1.3, x, y);
    CHECK(x == doctest::Approx(s).epsilon(1e-6));
    CHECK(y == 0.0);
}

TEST_CASE("profile validation rejects out-of-range speeds and bad shapes") {
    CHECK_THROWS_AS(TrajectoryProfile::constant(450.0), std::invalid_argument);
    CHECK_THROWS_AS(TrajectoryProfile::constant(-1.0), std::invalid_argument);
    CHECK_THROWS_AS(TrajectoryProfile::sweep(200.0, 50.0), std::invalid_argument);
    CHECK_THROWS_AS(TrajectoryProfile::sweep(50.0, 200.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(TrajectoryProfile::sweep(50.0, 500.0), std::invalid_argument);

    CHECK_THROWS_AS(TrajectoryProfile::from_waypoints({{0.0, 0.0, 0.0}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        TrajectoryProfile::from_waypoints({{0.0, 0.0, 0.0}, {0.0, 1.0, 0.0}}),
        std::invalid_argument);
    // 60 mm in 0.1 s is 600 mm/s: faster than a fingertip slide.
    CHECK_THROWS_AS(
        TrajectoryProfile::from_waypoints({{0.0, 0.0, 0.0}, {0.1, 60.0, 0.0}}),
        std::invalid_argument);

    const auto profile = TrajectoryProfile::constant(100.0);
    CHECK_THROWS_AS(synth_trajectory(profile, 0.0, 30.0), std::invalid_argument);
    CHECK_THROWS_AS(synth_trajectory(profile, 2.0, 0.0), std::invalid_argument);
}

TEST_CASE("estimator recovers constant speeds within 2% once settled") {
    for (double v : {50.0, 100.0, 200.0}) {
        const auto samples = synth_trajectory(TrajectoryProfile::constant(v), 2.0, 30.0);
        const auto trace = estimate_velocity(samples);

        CHECK(trace.rate_hz == 3000.0);
        CHECK(trace.t0_s == 0.0);
        CHECK(trace.duration_s() == doctest::Approx(59.0 / 30.0).epsilon(1e-3));

        for (std::size_t i = steady_start(trace); i < trace.speed_mm_s.size(); ++i) {
            CHECK(std::abs(trace.speed_mm_s[i] - v) / v <= 0.02);
        }
    }
}

TEST_CASE("estimator reports a stationary finger as zero speed") {
    const auto samples = synth_trajectory(TrajectoryProfile::constant(0.0), 1.0, 30.0);
    const auto trace = estimate_velocity(samples);
    for (double v : trace.speed_mm_s) {
        CHECK(std::abs(v) < 1e-9);
    }
}

TEST_CASE("estimator latency is the filter constant plus the processing budget") {
    const auto samples = synth_trajectory(TrajectoryProfile::constant(100.0), 1.0, 30.0);

    const auto trace = estimate_velocity(samples);
    CHECK(trace.latency_s == doctest::Approx(0.05353).epsilon(1e-12));

    SmoothingConfig jittered;
    jittered.latency_jitter_sd_s = 0.005;
    jittered.jitter_seed = 9;
    const auto a = estimate_velocity(samples, 3000.0, jittered);
    const auto b = estimate_velocity(samples, 3000.0, jittered);
    CHECK(a.latency_s == b.latency_s);
    CHECK(a.latency_s >= 0.0);

    jittered.jitter_seed = 10;
    const auto c = estimate_velocity(samples, 3000.0, jittered);
    CHECK(c.latency_s != a.latency_s);
}

TEST_CASE("estimated speed is invariant under rotation and translation") {
    const auto base = random_walk_waypoints(7);

    const double angle = 0.6458;  // an arbitrary rotation
    std::vector<LandmarkSample> moved;
    for (const auto& p : base) {
        moved.push_back({p.t_s,
                         12.0 + p.x_mm * std::cos(angle) - p.y_mm * std::sin(angle),
                         -5.0 + p.x_mm * std::sin(angle) + p.y_mm * std::cos(angle)});
    }

    const auto ta = estimate_velocity(base, 1000.0);
    const auto tb = estimate_velocity(moved, 1000.0);
    REQUIRE(ta.speed_mm_s.size() == tb.speed_mm_s.size());
    for (std::size_t i = 0; i < ta.speed_mm_s.size(); ++i) {
        CHECK(ta.speed_mm_s[i] == doctest::Approx(tb.speed_mm_s[i]).epsilon(1e-9));
    }
}

TEST_CASE("zero-order-hold upsampling steps between knot speeds") {
    const auto samples = synth_trajectory(TrajectoryProfile::constant(100.0), 1.0, 30.0);
    SmoothingConfig config;
    config.upsampling = Upsampling::ZeroOrderHold;
    const auto trace = estimate_velocity(samples, 3000.0, config);

    std::set<double> distinct(trace.speed_mm_s.begin(), trace.speed_mm_s.end());
    CHECK(distinct.size() <= samples.size());
}

TEST_CASE("estimator rejects unusable input") {
    CHECK_THROWS_AS(estimate_velocity({{0.0, 0.0, 0.0}}), std::invalid_argument);
    CHECK_THROWS_AS(estimate_velocity({{0.0, 0.0, 0.0}, {0.1, 1.0, 0.0}}, 10.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(estimate_velocity({{0.1, 0.0, 0.0}, {0.1, 1.0, 0.0}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(estimate_velocity({{0.2, 0.0, 0.0}, {0.1, 1.0, 0.0}}),
                    std::invalid_argument);
    const double nan = std::nan("");
    CHECK_THROWS_AS(estimate_velocity({{0.0, nan, 0.0}, {0.1, 1.0, 0.0}}),
                    std::invalid_argument);
}

TEST_CASE("every estimated speed is finite") {
    const auto samples = random_walk_waypoints(3);
    const auto trace = estimate_velocity(samples, 3000.0);
    for (double v : trace.speed_mm_s) {
        CHECK(std::isfinite(v));
        CHECK(v >= 0.0);
    }
}

TEST_CASE("trajectory CSV round-trips") {
    const auto samples = synth_trajectory(TrajectoryProfile::sweep(50.0, 200.0), 1.0, 30.0);
    const auto parsed = trajectory_from_csv(trajectory_to_csv(samples));
    REQUIRE(parsed.size() == samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        CHECK(parsed[i].t_s == doctest::Approx(samples[i].t_s).epsilon(1e-6));
        CHECK(parsed[i].x_mm == doctest::Approx(samples[i].x_mm).epsilon(1e-6));
    }

    CHECK_THROWS_AS(trajectory_from_csv("x,y,z\n1,2,3\n"), std::runtime_error);
    CHECK_THROWS_AS(trajectory_from_csv("t_s,x_mm,y_mm\n1,2\n"), std::runtime_error);
    CHECK_THROWS_AS(trajectory_from_csv("t_s,x_mm,y_mm\n1,2,abc\n"), std::runtime_error);

    VelocityTrace trace;
    trace.rate_hz = 1000.0;
    trace.speed_mm_s = {1.0, 2.0};
    CHECK(velocity_to_csv(trace) == "t_s,speed_mm_s\n0.000000,1.000000\n0.001000,2.000000\n");
}
