#pragma once

// Independent numeric oracles for the tests: spectral peak location via
// Goertzel bins, Gaussian densities, and brute-force numerical integration
// of the density-minimum overlap.  Deliberately separate from the library
// implementations so the two can disagree.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace oracle {

// Power of bin k of an n-point DFT (Goertzel recurrence).
inline double goertzel_power(const std::vector<double>& x, std::size_t k) {
    const double w = 2.0 * M_PI * static_cast<double>(k) / static_cast<double>(x.size());
    const double coeff = 2.0 * std::cos(w);
    double s1 = 0.0, s2 = 0.0;
    for (double sample : x) {
        const double s0 = sample + coeff * s1 - s2;
        s2 = s1;
        s1 = s0;
    }
    return s1 * s1 + s2 * s2 - coeff * s1 * s2;
}

// Frequency (Hz) of the strongest DFT bin in (0, rate/2].
inline double dft_peak_hz(const std::vector<double>& x, double rate_hz) {
    if (x.size() < 4) throw std::invalid_argument("dft_peak_hz: signal too short");
    const std::size_t n = x.size();
    std::size_t best = 1;
    double best_power = -1.0;
    for (std::size_t k = 1; k <= n / 2; ++k) {
        const double p = goertzel_power(x, k);
        if (p > best_power) {
            best_power = p;
            best = k;
        }
    }
    return static_cast<double>(best) * rate_hz / static_cast<double>(n);
}

// Rising zero crossings; for a sine this counts whole cycles.
inline std::size_t up_crossings(const std::vector<double>& x) {
    std::size_t count = 0;
    for (std::size_t i = 1; i < x.size(); ++i) {
        if (x[i - 1] < 0.0 && x[i] >= 0.0) ++count;
    }
    return count;
}

inline double normal_pdf(double x, double mean, double sd) {
    const double z = (x - mean) / sd;
    return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * M_PI));
}

inline double normal_cdf(double x, double mean, double sd) {
    return 0.5 * std::erfc(-(x - mean) / (sd * std::sqrt(2.0)));
}

// integral of min(pdf_a, pdf_b) by Simpson's rule over the joint +/-10 sd
// span.  Slow and simple; the library's closed form must agree with it.
inline double simpson_min_overlap(double mean_a, double sd_a, double mean_b,
                                  double sd_b, int intervals = 200000) {
    if (intervals % 2 != 0) ++intervals;
    const double lo = std::min(mean_a - 10.0 * sd_a, mean_b - 10.0 * sd_b);
    const double hi = std::max(mean_a + 10.0 * sd_a, mean_b + 10.0 * sd_b);
    const double h = (hi - lo) / intervals;
    auto f = [&](double x) {
        return std::min(normal_pdf(x, mean_a, sd_a), normal_pdf(x, mean_b, sd_b));
    };
    double sum = f(lo) + f(hi);
    for (int i = 1; i < intervals; ++i) {
        sum += f(lo + h * i) * (i % 2 == 1 ? 4.0 : 2.0);
    }
    return sum * h / 3.0;
}

}  // namespace oracle
