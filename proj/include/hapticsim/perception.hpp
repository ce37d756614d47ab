#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "hapticsim/core.hpp"

namespace hapticsim {

// ---------------------------------------------------------------------------
// Perceived-roughness model and stimulus recommendation.
//
// The study data gives, for each test material under each stimulus, the mean
// and standard deviation of roughness ratings on a 0-100 scale.  Each entry
// is treated as a normal distribution; the similarity of two percepts is the
// overlapping coefficient of their densities.  Virtually rendering material
// V on physical material P picks the stimulus whose percept on P best
// overlaps the natural percept of V.
// ---------------------------------------------------------------------------

struct RatingEntry {
    double mean = 0.0;
    double sd = 0.0;
};

class RatingTable {
public:
    // The study values, compiled in.
    static const RatingTable& builtin();

    // CSV with header material,stimulus,mean,sd; must contain exactly the
    // 42 test-material/stimulus pairs, each once, means on the rating scale,
    // sd positive, and per-material means ordered
    // A3 > A2 > A1 > N > B1 > B2 > B3.
    static RatingTable from_csv(const std::string& text);

    std::string to_csv() const;

    // Rating distribution for a material/stimulus pair.  The bare reference
    // surface (plywood, N) anchors the scale midpoint with zero spread.
    // Throws std::invalid_argument for pairs outside the table.
    const RatingEntry& at(MaterialId material, std::string_view stimulus_label) const;

    bool has(MaterialId material, std::string_view stimulus_label) const;

private:
    RatingTable() = default;
    // entries_[material rank 0..5][energy-ordered stimulus 0..6]
    RatingEntry entries_[6][7] = {};
    RatingEntry anchor_{50.0, 0.0};
};

// Overlapping coefficient of two normal densities: the integral of their
// pointwise minimum, in [0, 1].  Computed in closed form from the density
// intersection points.  Point masses (sd 0) overlap only with an identical
// point mass.  Throws std::invalid_argument on negative sd.
double overlap_coefficient(const RatingEntry& a, const RatingEntry& b);

struct RankedStimulus {
    std::string label;
    double score = 0.0;
};

// All seven stimuli on the physical material, scored against the natural
// percept of the virtual material and sorted best-first.  Ties break toward
// the lower-energy stimulus.
std::vector<RankedStimulus> rank_stimuli(const RatingTable& table,
                                         MaterialId physical_material,
                                         MaterialId virtual_material);

struct Recommendation {
    std::string stimulus_label;
    double score = 0.0;
    std::vector<RankedStimulus> ranking;
};

// Top of rank_stimuli() for distinct test materials; identity requests are
// rejected (nothing to render).
Recommendation recommend_stimulus(const RatingTable& table,
                                  MaterialId physical_material,
                                  MaterialId virtual_material);

}  // namespace hapticsim
