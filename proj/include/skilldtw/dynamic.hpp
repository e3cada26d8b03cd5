#pragma once

#include "skilldtw/cluster.hpp"
#include "skilldtw/core.hpp"
#include "skilldtw/envelope.hpp"
#include "skilldtw/prototype.hpp"

#include <optional>
#include <string>
#include <vector>

namespace skilldtw {

inline constexpr Index kPhaseResampleLimit = 500;
inline constexpr std::size_t kDefaultCadence = 25;
inline constexpr std::size_t kAlarmDebounce = 3;

struct PhaseEstimate {
    int decile = 10;          // 1..10, i.e. 10%..100%
    double distance = 0;      // path-normalized DTW to the matching prefix
    Index prefix_length = 0;  // in prototype samples

    int percent() const { return decile * 10; }
};

// Prefix length of the prototype for a decile: round(d / 10 * L), at least 1.
Index decile_prefix_length(Index prototype_length, int decile);

// Best-matching prototype prefix among the ten deciles. Inputs longer than
// kPhaseResampleLimit are downsampled first; ties go to the smaller decile.
PhaseEstimate phase_estimate(const Series& partial, const Series& prototype, Metric metric = Metric::Euclidean);

struct DynamicScore {
    double score = 0;
    double proportion_outside = 0;
    Eigen::VectorXd trace;
};

// Outside distance of the buffer against the decile prefix of env, resampled to the
// buffer length.
DynamicScore dynamic_score(const Series& partial, const Envelope& env, int decile);

// One cluster's immutable scoring snapshot.
struct ClusterModel {
    Prototype prototype;
    Envelope envelope;
    std::vector<std::size_t> members;       // dataset indices
    std::vector<std::size_t> contributors;  // dataset indices, nearest first
};

struct Model {
    std::vector<ClusterModel> clusters;
    Metric metric = Metric::Euclidean;
};

struct ModelOptions {
    PrototypeOptions prototype;
    double window_pct = 5.0;
    std::size_t nearest = 4;
};

Model build_model(const Dataset& dataset, const Clustering& clustering, const ModelOptions& options = {});

// Nearest prototype by path-normalized DTW; ties go to the lower cluster.
std::size_t assign_cluster(const Model& model, const Series& series);

struct RecordingScore {
    std::size_t cluster = 0;  // zero-based
    double score = 0;
    double proportion_outside = 0;
    double prototype_distance = 0;  // path-normalized DTW
};

// Batch score of a complete recording: the series is resampled to the length
// of its cluster's envelope and scored by outside distance.
RecordingScore score_recording(const Model& model, const Series& series);

struct MemberRank {
    std::size_t index = 0;  // dataset index
    double distance = 0;    // cumulative DTW cost to the prototype
    double normalized = 0;  // distance / path length
    double score = 0;       // outside distance to the cluster envelope
};

// Cluster members ordered best first by cumulative DTW cost to the prototype
// (ties by index). The last entry is the cluster's discord.
std::vector<MemberRank> rank_members(const ClusterModel& cluster, const Dataset& dataset, Metric metric = Metric::Euclidean,
                                     int jobs = 1);

struct Alarm {
    std::size_t index = 0;  // sample (zero-based) completing the debounce
    std::size_t tick = 0;   // sample count at the evaluation that raised it
    double exceedance = 0;
};

struct StreamOptions {
    std::size_t cadence = kDefaultCadence;
    double alarm_threshold = 0.0;
    std::size_t debounce = kAlarmDebounce;
};

struct SessionEvent {
    std::size_t index = 0;
    int phase = 0;  // percent
    double pace = 0;
    double score = 0;
    std::size_t cluster = 0;
    std::optional<Alarm> alarm;
};

struct SessionState {
    Series buffer;
    int phase = 10;  // percent
    double pace = 1.0;
    double score = 0;
    std::vector<Alarm> alarms;
    std::size_t cluster = 0;

    std::size_t evaluated = 0;  // samples already examined for alarms
    std::size_t run = 0;        // current consecutive exceedance run
    bool alarm_active = false;
    std::vector<SessionEvent> events;
};

SessionState start_session(const Model& model);

// Appends one sample; every `cadence` samples the phase, pace, score and
// alarms are refreshed and an event is appended to state.events.
void ingest(SessionState& state, const Eigen::Ref<const Eigen::RowVectorXd>& sample, const Model& model,
            const StreamOptions& options = {});

// Final evaluation once the recording is complete; equals score_recording on
// the buffer.
RecordingScore finish(SessionState& state, const Model& model, const StreamOptions& options = {});

enum class AdaptMode { Recompute, Weighted };

struct AdaptResult {
    ClusterModel cluster;
    bool envelope_regenerated = false;
};

// New snapshot of a cluster after a completed recording joins it. `members`
// holds the current member series (aligned with cluster.members); the new
// series is appended under dataset index `new_index`.
AdaptResult adapt_prototype(const ClusterModel& cluster, const std::vector<Series>& members, const Series& new_series,
                            std::size_t new_index, AdaptMode mode, double weight, const ModelOptions& options = {});

std::string event_json(const SessionEvent& event);

}  // namespace skilldtw
