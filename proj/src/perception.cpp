#include "hapticsim/perception.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "hapticsim/textio.hpp"

namespace hapticsim {

namespace {

// Rating means/sds by [material roughness rank][stimulus energy rank], with
// stimuli in energy order N A1 B1 A2 B2 A3 B3.
constexpr double kMeans[6][7] = {
    {17.9, 31.9, 15.7, 36.8, 13.0, 41.7, 11.0},   // glass
    {30.3, 40.8, 26.4, 44.7, 20.5, 49.7, 17.9},   // ceramics
    {46.1, 54.2, 41.0, 60.5, 37.0, 64.9, 31.9},   // paper
    {58.6, 62.4, 49.3, 69.2, 45.4, 71.2, 38.6},   // wood
    {70.8, 73.3, 64.2, 77.7, 57.6, 82.2, 53.4},   // cotton
    {74.1, 77.5, 61.9, 82.5, 60.0, 84.1, 58.0},   // leather
};
constexpr double kSds[6][7] = {
    {7.03, 11.72, 4.44, 12.5, 6.27, 12.57, 6.71},
    {6.89, 8.34, 6.19, 8.43, 9.61, 6.54, 9.36},
    {5.78, 5.45, 4.72, 6.03, 7.16, 7.38, 11.4},
    {7.10, 6.54, 10.83, 6.71, 13.16, 7.54, 15.12},
    {10.84, 10.75, 14.66, 8.86, 15.34, 12.67, 14.08},
    {9.87, 10.56, 7.08, 11.05, 7.47, 12.48, 6.09},
};

// Log density, so comparisons stay meaningful far in the tails where the
// densities themselves underflow to zero.
double normal_log_pdf(double x, double m, double s) {
    const double z = (x - m) / s;
    return -0.5 * z * z - std::log(s);
}

double normal_cdf(double x, double m, double s) {
    return 0.5 * std::erfc(-(x - m) / (s * 1.4142135623730950488));
}

void check_entry_order(const RatingEntry entries[7], std::string_view material) {
    // In perceived-roughness order the labels run B3 B2 B1 N A1 A2 A3; the
    // energy-rank layout is N A1 B1 A2 B2 A3 B3.
    const int perceived[7] = {6, 4, 2, 0, 1, 3, 5};
    for (int i = 1; i < 7; ++i) {
        if (!(entries[perceived[i]].mean > entries[perceived[i - 1]].mean)) {
            throw std::runtime_error(
                "rating table: means for '" + std::string(material) +
                "' must increase strictly from B3 through N to A3");
        }
    }
}

}  // namespace

const RatingTable& RatingTable::builtin() {
    static const RatingTable table = [] {
        RatingTable t;
        for (int m = 0; m < 6; ++m) {
            for (int s = 0; s < 7; ++s) {
                t.entries_[m][s] = {kMeans[m][s], kSds[m][s]};
            }
        }
        return t;
    }();
    return table;
}

RatingTable RatingTable::from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) ||
        split_csv_line(line) != std::vector<std::string>{"material", "stimulus", "mean", "sd"}) {
        throw std::runtime_error("rating csv: expected header material,stimulus,mean,sd");
    }

    RatingTable table;
    std::set<std::pair<int, int>> seen;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        const std::string where = "rating csv row " + std::to_string(row);
        if (f.size() != 4) throw std::runtime_error(where + ": expected 4 fields");

        const MaterialId material = material_from_name(f[0]);
        if (material == MaterialId::Plywood) {
            throw std::runtime_error(where + ": plywood is the fixed reference, not a table row");
        }
        const int m = roughness_rank(material);
        const int s = stimulus_energy_rank(f[1]);
        const double mean = parse_double(f[2], where);
        const double sd = parse_double(f[3], where);
        if (!(mean >= 0.0 && mean <= 100.0)) {
            throw std::runtime_error(where + ": mean must be on the 0-100 scale");
        }
        if (!(sd > 0.0)) throw std::runtime_error(where + ": sd must be positive");
        if (!seen.insert({m, s}).second) {
            throw std::runtime_error(where + ": duplicate entry " + f[0] + "/" + f[1]);
        }
        table.entries_[m][s] = {mean, sd};
        ++row;
    }
    if (seen.size() != 42) {
        throw std::runtime_error("rating csv: expected 42 entries, found " +
                                 std::to_string(seen.size()));
    }
    for (MaterialId material : test_materials()) {
        check_entry_order(table.entries_[roughness_rank(material)], material_name(material));
    }
    return table;
}

std::string RatingTable::to_csv() const {
    std::string out = "material,stimulus,mean,sd\n";
    for (MaterialId material : test_materials()) {
        const int m = roughness_rank(material);
        for (std::string_view label : stimulus_energy_order()) {
            const int s = stimulus_energy_rank(label);
            out += material_name(material);
            out += ',';
            out += label;
            out += ',';
            out += fixed(entries_[m][s].mean, 2);
            out += ',';
            out += fixed(entries_[m][s].sd, 2);
            out += '\n';
        }
    }
    return out;
}

const RatingEntry& RatingTable::at(MaterialId material,
                                   std::string_view stimulus_label) const {
    const int s = stimulus_energy_rank(stimulus_label);
    if (material == MaterialId::Plywood) {
        if (s != 0) {
            throw std::invalid_argument(
                "no rating for plywood under stimulus '" +
                std::string(stimulus_label) + "' (reference surface is rated bare)");
        }
        return anchor_;
    }
    return entries_[roughness_rank(material)][s];
}

bool RatingTable::has(MaterialId material, std::string_view stimulus_label) const {
    if (!is_stimulus_label(stimulus_label)) return false;
    if (material == MaterialId::Plywood) return stimulus_label == "N";
    return true;
}

double overlap_coefficient(const RatingEntry& a, const RatingEntry& b) {
    if (a.sd < 0.0 || b.sd < 0.0) {
        throw std::invalid_argument("sd must be non-negative");
    }
    if (a.sd == 0.0 || b.sd == 0.0) {
        return (a.sd == b.sd && a.mean == b.mean) ? 1.0 : 0.0;
    }
    if (a.mean == b.mean && a.sd == b.sd) return 1.0;

    // Intersection points of the two densities solve a quadratic; between
    // consecutive breakpoints one density lies entirely below the other, so
    // the integral of the minimum is a sum of CDF spans.
    std::vector<double> breaks;
    const double ia = 1.0 / (a.sd * a.sd);
    const double ib = 1.0 / (b.sd * b.sd);
    const double qa = ia - ib;
    const double qb = -2.0 * (a.mean * ia - b.mean * ib);
    const double qc = a.mean * a.mean * ia - b.mean * b.mean * ib -
                      2.0 * std::log(b.sd / a.sd);
    if (std::abs(qa) < 1e-300) {
        if (std::abs(qb) > 0.0) breaks.push_back(-qc / qb);
    } else {
        const double disc = qb * qb - 4.0 * qa * qc;
        if (disc > 0.0) {
            const double r = std::sqrt(disc);
            breaks.push_back((-qb - r) / (2.0 * qa));
            breaks.push_back((-qb + r) / (2.0 * qa));
            std::sort(breaks.begin(), breaks.end());
        } else if (disc == 0.0) {
            breaks.push_back(-qb / (2.0 * qa));
        }
    }

    double total = 0.0;
    double lo = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i <= breaks.size(); ++i) {
        const double hi = i < breaks.size() ? breaks[i] : std::numeric_limits<double>::infinity();
        // Probe which density is smaller on this stretch.
        double probe;
        if (std::isinf(lo) && std::isinf(hi)) {
            probe = 0.5 * (a.mean + b.mean);
        } else if (std::isinf(lo)) {
            probe = hi - 1.0;
        } else if (std::isinf(hi)) {
            probe = lo + 1.0;
        } else {
            probe = 0.5 * (lo + hi);
        }
        const bool a_smaller =
            normal_log_pdf(probe, a.mean, a.sd) <= normal_log_pdf(probe, b.mean, b.sd);
        const RatingEntry& low = a_smaller ? a : b;
        const double cdf_hi = std::isinf(hi) ? 1.0 : normal_cdf(hi, low.mean, low.sd);
        const double cdf_lo = std::isinf(lo) ? 0.0 : normal_cdf(lo, low.mean, low.sd);
        total += cdf_hi - cdf_lo;
        lo = hi;
    }
    return std::clamp(total, 0.0, 1.0);
}

std::vector<RankedStimulus> rank_stimuli(const RatingTable& table,
                                         MaterialId physical_material,
                                         MaterialId virtual_material) {
    if (physical_material == MaterialId::Plywood ||
        virtual_material == MaterialId::Plywood) {
        throw std::invalid_argument("plywood is the reference surface, not a render target");
    }
    const RatingEntry& target = table.at(virtual_material, "N");

    std::vector<RankedStimulus> ranked;
    ranked.reserve(7);
    for (std::string_view label : stimulus_energy_order()) {
        const double score = overlap_coefficient(table.at(physical_material, label), target);
        ranked.push_back({std::string(label), score});
    }
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const RankedStimulus& x, const RankedStimulus& y) {
                         return x.score > y.score;
                     });
    return ranked;
}

Recommendation recommend_stimulus(const RatingTable& table,
                                  MaterialId physical_material,
                                  MaterialId virtual_material) {
    if (physical_material == virtual_material) {
        throw std::invalid_argument(
            "physical and virtual material are the same ('" +
            std::string(material_name(physical_material)) + "'): nothing to render");
    }
    Recommendation rec;
    rec.ranking = rank_stimuli(table, physical_material, virtual_material);
    rec.stimulus_label = rec.ranking.front().label;
    rec.score = rec.ranking.front().score;
    return rec;
}

}  // namespace hapticsim
