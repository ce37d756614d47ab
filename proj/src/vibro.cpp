#include "hapticsim/vibro.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>

namespace hapticsim {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

void check_nyquist(double speed_mm_s, const WaveformParams& params) {
    if (speed_mm_s / params.wavelength_mm > params.sample_rate_hz / 2.0) {
        throw NyquistError("instantaneous frequency " +
                           std::to_string(speed_mm_s / params.wavelength_mm) +
                           " Hz exceeds sample_rate/2 = " +
                           std::to_string(params.sample_rate_hz / 2.0) + " Hz");
    }
}

}  // namespace

FrameStream::FrameStream(const WaveformParams& params, double t0_s)
    : params_(params), frame_t0_s_(t0_s) {
    params_.validate();
    spf_ = params_.samples_per_frame();
    phase_rad_ = params_.phase_rad;
    pending_.reserve(static_cast<std::size_t>(spf_));
}

std::optional<DriveFrame> FrameStream::push(double speed_mm_s) {
    if (!(speed_mm_s >= 0.0) || !std::isfinite(speed_mm_s)) {
        throw std::invalid_argument("speed samples must be finite and non-negative");
    }
    check_nyquist(speed_mm_s, params_);
    last_speed_ = speed_mm_s;

    pending_.push_back(params_.amplitude * std::sin(phase_rad_));
    phase_rad_ += kTwoPi * (speed_mm_s / params_.wavelength_mm) / params_.sample_rate_hz;
    // Wrap to keep precision over long sessions; sin() period makes this exact.
    if (phase_rad_ > 1e6) phase_rad_ = std::fmod(phase_rad_, kTwoPi);

    if (pending_.size() < static_cast<std::size_t>(spf_)) return std::nullopt;

    DriveFrame frame;
    frame.t0_s = frame_t0_s_ + static_cast<double>(frames_done_) / params_.frame_rate_hz;
    frame.samples = std::move(pending_);
    pending_.clear();
    pending_.reserve(static_cast<std::size_t>(spf_));
    ++frames_done_;
    return frame;
}

std::optional<DriveFrame> FrameStream::flush() {
    if (pending_.empty()) return std::nullopt;
    while (true) {
        auto frame = push(last_speed_);
        if (frame) return frame;
    }
}

std::vector<DriveFrame> synthesize(const VelocityTrace& trace,
                                   const WaveformParams& params) {
    params.validate();
    if (std::abs(trace.rate_hz - params.sample_rate_hz) > 1e-9) {
        throw std::invalid_argument("velocity trace rate must equal the sample rate");
    }
    if (trace.speed_mm_s.empty()) return {};

    FrameStream stream(params, trace.t0_s);
    std::vector<DriveFrame> frames;
    for (double v : trace.speed_mm_s) {
        if (auto f = stream.push(v)) frames.push_back(std::move(*f));
    }
    if (auto f = stream.flush()) frames.push_back(std::move(*f));
    return frames;
}

double amplitude_for_accel(double accel_m_s2, const LraModel& model) {
    if (!(accel_m_s2 > 0.0 && accel_m_s2 <= model.full_scale_accel_m_s2)) {
        throw std::invalid_argument(
            "acceleration must be in (0, " +
            std::to_string(model.full_scale_accel_m_s2) + "] m/s^2");
    }
    return accel_m_s2 / model.full_scale_accel_m_s2;
}

std::vector<double> flatten(const std::vector<DriveFrame>& frames) {
    std::vector<double> out;
    for (const auto& f : frames) out.insert(out.end(), f.samples.begin(), f.samples.end());
    return out;
}

double rms(const std::vector<double>& samples) {
    if (samples.empty()) return 0.0;
    double acc = 0.0;
    for (double s : samples) acc += s * s;
    return std::sqrt(acc / static_cast<double>(samples.size()));
}

namespace {

void put_u16(std::string& out, std::uint16_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put_u32(std::string& out, std::uint32_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
    out.push_back(static_cast<char>((v >> 16) & 0xff));
    out.push_back(static_cast<char>((v >> 24) & 0xff));
}

std::uint32_t get_u32(const std::string& s, std::size_t off) {
    return static_cast<std::uint32_t>(static_cast<unsigned char>(s[off])) |
           (static_cast<std::uint32_t>(static_cast<unsigned char>(s[off + 1])) << 8) |
           (static_cast<std::uint32_t>(static_cast<unsigned char>(s[off + 2])) << 16) |
           (static_cast<std::uint32_t>(static_cast<unsigned char>(s[off + 3])) << 24);
}

std::uint16_t get_u16(const std::string& s, std::size_t off) {
    return static_cast<std::uint16_t>(
        static_cast<unsigned char>(s[off]) |
        (static_cast<unsigned char>(s[off + 1]) << 8));
}

}  // namespace

void write_wav16(const std::string& path, const std::vector<double>& samples,
                 double sample_rate_hz) {
    if (!(sample_rate_hz > 0.0)) {
        throw std::invalid_argument("sample rate must be positive");
    }
    const auto rate = static_cast<std::uint32_t>(std::lround(sample_rate_hz));
    const auto data_bytes = static_cast<std::uint32_t>(samples.size() * 2);

    std::string out;
    out.reserve(44 + data_bytes);
    out += "RIFF";
    put_u32(out, 36 + data_bytes);
    out += "WAVEfmt ";
    put_u32(out, 16);          // PCM fmt chunk size
    put_u16(out, 1);           // PCM
    put_u16(out, 1);           // mono
    put_u32(out, rate);
    put_u32(out, rate * 2);    // byte rate
    put_u16(out, 2);           // block align
    put_u16(out, 16);          // bits per sample
    out += "data";
    put_u32(out, data_bytes);

    for (double s : samples) {
        const double clipped = s < -1.0 ? -1.0 : (s > 1.0 ? 1.0 : s);
        const auto q = static_cast<std::int16_t>(std::lround(clipped * 32767.0));
        put_u16(out, static_cast<std::uint16_t>(q));
    }

    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write file: " + path);
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) throw std::runtime_error("write failed: " + path);
}

WavData read_wav16(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open file: " + path);
    std::string bytes((std::istreambuf_iterator<char>(f)),
                      std::istreambuf_iterator<char>());
    if (bytes.size() < 44 || bytes.compare(0, 4, "RIFF") != 0 ||
        bytes.compare(8, 4, "WAVE") != 0) {
        throw std::runtime_error("not a RIFF/WAVE file: " + path);
    }
    if (bytes.compare(12, 4, "fmt ") != 0 || get_u16(bytes, 20) != 1 ||
        get_u16(bytes, 22) != 1 || get_u16(bytes, 34) != 16) {
        throw std::runtime_error("expected 16-bit PCM mono: " + path);
    }
    WavData wav;
    wav.sample_rate_hz = get_u32(bytes, 24);

    // Locate the data chunk (some writers insert extra chunks after fmt).
    std::size_t off = 20 + get_u32(bytes, 16);
    while (off + 8 <= bytes.size()) {
        const std::string id = bytes.substr(off, 4);
        const std::uint32_t len = get_u32(bytes, off + 4);
        if (id == "data") {
            const std::size_t count = std::min<std::size_t>(len, bytes.size() - off - 8) / 2;
            wav.samples.reserve(count);
            for (std::size_t i = 0; i < count; ++i) {
                const auto raw = static_cast<std::int16_t>(get_u16(bytes, off + 8 + 2 * i));
                wav.samples.push_back(static_cast<double>(raw) / 32767.0);
            }
            return wav;
        }
        off += 8 + len + (len & 1);
    }
    throw std::runtime_error("no data chunk: " + path);
}

}  // namespace hapticsim
