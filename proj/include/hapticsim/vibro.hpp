#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hapticsim/core.hpp"
#include "hapticsim/tracking.hpp"

namespace hapticsim {

// ---------------------------------------------------------------------------
// Velocity-driven vibrotactile synthesis.
//
// The drive signal is a sine whose instantaneous frequency is v(t)/lambda:
// sliding over a virtual grating of spatial period lambda at v mm/s produces
// a v/lambda Hz tone.  Phase accumulates across samples, so speed changes
// never cause discontinuities.
// ---------------------------------------------------------------------------

struct NyquistError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DriveFrame {
    double t0_s = 0.0;
    std::vector<double> samples;  // normalized drive, each in [-A, A]
};

// Renders the whole trace into frames of params.samples_per_frame() samples.
// The trace must be sampled at params.sample_rate_hz.  The final frame is
// completed by holding the last speed.  Throws NyquistError if any
// instantaneous frequency max(v)/lambda exceeds sample_rate/2.
std::vector<DriveFrame> synthesize(const VelocityTrace& trace,
                                   const WaveformParams& params);

// Incremental variant with the same output: push one speed sample per call;
// a completed frame is returned every samples_per_frame() calls.  The frame
// deadline under the simulation clock is one frame period, which this meets
// by construction (a frame is emitted the moment its last sample arrives).
class FrameStream {
public:
    explicit FrameStream(const WaveformParams& params, double t0_s = 0.0);

    std::optional<DriveFrame> push(double speed_mm_s);

    // Completes and returns the partial frame, holding the last speed.
    std::optional<DriveFrame> flush();

private:
    WaveformParams params_;
    int spf_ = 0;
    double phase_rad_ = 0.0;
    double last_speed_ = 0.0;
    double frame_t0_s_ = 0.0;
    std::vector<double> pending_;
    long frames_done_ = 0;
};

// Resonant actuator model: drive amplitude 1.0 yields full_scale_accel_m_s2
// at the skin, linear below that.
struct LraModel {
    double resonant_freq_hz = 250.0;
    double full_scale_accel_m_s2 = 6.2;
};

// Maps a requested peak acceleration to normalized drive amplitude in (0, 1].
// Throws std::invalid_argument outside (0, full_scale].
double amplitude_for_accel(double accel_m_s2, const LraModel& model = {});

// Concatenates frame samples into one buffer.
std::vector<double> flatten(const std::vector<DriveFrame>& frames);

double rms(const std::vector<double>& samples);

// 16-bit PCM mono WAV, little-endian.  Samples are clipped to [-1, 1].
void write_wav16(const std::string& path, const std::vector<double>& samples,
                 double sample_rate_hz);

struct WavData {
    double sample_rate_hz = 0.0;
    std::vector<double> samples;
};

WavData read_wav16(const std::string& path);

}  // namespace hapticsim
