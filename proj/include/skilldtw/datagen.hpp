#pragma once

#include "skilldtw/core.hpp"

#include <string>
#include <vector>

namespace skilldtw {

// Per skill class perturbation, in template units.
struct ClassParams {
    double noise = 0.1;      // white amplitude noise sigma
    double warp = 0.1;       // time-warp strength, < 0.5
    double tremor_hz = 5.0;  // tremor frequency at 500 Hz sampling
};

struct GeneratorConfig {
    std::uint64_t seed = 0;
    std::string name = "synthetic";
    std::vector<Skill> layout = {Skill::Novice, Skill::Intermediate, Skill::Expert, Skill::Expert,
                                 Skill::Intermediate, Skill::Novice, Skill::Novice, Skill::Novice};
    std::size_t series_per_participant = 5;
    Index base_length = 500;
    double length_jitter = 0.2;  // lengths vary uniformly within +-20%
    ClassParams novice{0.12, 0.15, 8.0};
    ClassParams intermediate{0.08, 0.10, 6.0};
    ClassParams expert{0.04, 0.05, 4.0};
    double bias_scale = 0.35;    // sigma of each participant's smooth per-channel deviation, for novices
    double class_scale = 0.25;   // same, shared by every participant of a skill class
    // Both deviations are scaled by noise / novice.noise, so experts stay nearest the template.

    const ClassParams& params(Skill s) const;
};

// Throws InvalidArgument unless the config is usable (noise ordered N > I > E,
// positive parameters, non-empty layout).
void validate_config(const GeneratorConfig& config);

inline constexpr double kLossOfResistance = 0.7;  // fraction of template length

// Noise-free template in recording units (columns x, y, z, pressure, force).
Series synth_template(Index length);

// Participants are named p01, p02, ... in layout order. Each series draws from
// its own generator seeded by mix_seed(seed, item index).
Dataset synth_dataset(const GeneratorConfig& config);

}  // namespace skilldtw
