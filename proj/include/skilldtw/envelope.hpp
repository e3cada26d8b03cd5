#pragma once

#include "skilldtw/core.hpp"
#include "skilldtw/distance.hpp"

#include <vector>

namespace skilldtw {

// Upper/lower bound sequences, one column per variable.
struct Envelope {
    Series upper;
    Series lower;
    Index window = 0;
    std::size_t source_count = 0;

    Index length() const { return upper.rows(); }
};

// Sliding-window max/min of each variable over [i - r, i + r], clipped at the ends.
Envelope keogh_envelope(const Series& series, Index r);

// Window radius as a percentage of the series length, rounded; at least 0, below n.
Index window_from_percent(Index length, double percent);

// sqrt of the summed squared exceedance of candidate outside env; 0 inside.
double lb_keogh(const Envelope& env, const Series& candidate);

// Elementwise max of uppers and min of lowers.
Envelope summative_envelope(const std::vector<Envelope>& envelopes);

struct OutsideDistance {
    double distance = 0;
    Eigen::VectorXd trace;  // per-step sqrt(sum_v exceedance^2)

    // Fraction of steps with non-zero exceedance.
    double proportion_outside() const;
};

// sum_i sqrt(sum_v max(a_vi - su_vi, sl_vi - a_vi, 0)^2)
OutsideDistance outside_distance(const Series& series, const Envelope& env);

// First `length` steps of an envelope.
Envelope envelope_prefix(const Envelope& env, Index length);

// Envelope resampled to a new length (both bounds interpolated linearly).
Envelope resample(const Envelope& env, Index length);

struct ClusterEnvelope {
    Envelope envelope;
    std::vector<std::size_t> contributors;  // member indices, nearest first
};

// Summative envelope over the prototype and its `nearest` DTW-closest members,
// each resampled to the prototype length before enveloping.
ClusterEnvelope cluster_envelope(const Series& prototype, const std::vector<Series>& members, Index window,
                                 std::size_t nearest = 4, Metric metric = Metric::Euclidean);

}  // namespace skilldtw
