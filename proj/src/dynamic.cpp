#include "skilldtw/dynamic.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace skilldtw {

Index decile_prefix_length(Index prototype_length, int decile)
{
    if (decile < 1 || decile > 10) throw Error(Errc::InvalidArgument, "decile must lie in 1..10");
    const Index len = Index(std::llround(double(decile) / 10.0 * double(prototype_length)));
    return std::clamp<Index>(len, 1, prototype_length);
}

namespace {

Series capped(const Series& s)
{
    return s.rows() > kPhaseResampleLimit ? resample(s, kPhaseResampleLimit) : s;
}

}  // namespace

PhaseEstimate phase_estimate(const Series& partial, const Series& prototype, Metric metric)
{
    if (partial.rows() < 2) throw Error(Errc::TooShort, "phase estimation needs at least 2 samples");
    if (prototype.rows() < 10) throw Error(Errc::TooShort, "phase estimation needs a prototype of length >= 10");
    validate_series(partial);
    validate_series(prototype);
    const Series query = capped(partial);
    PhaseEstimate best;
    best.distance = std::numeric_limits<double>::infinity();
    for (int d = 1; d <= 10; ++d) {
        const Index len = decile_prefix_length(prototype.rows(), d);
        const Series prefix = capped(prototype.topRows(len));
        const double dist = dtw_summary(query, prefix, ConstraintBand::none(), metric).normalized_distance();
        if (dist < best.distance) {
            best.decile = d;
            best.distance = dist;
            best.prefix_length = len;
        }
    }
    return best;
}

DynamicScore dynamic_score(const Series& partial, const Envelope& env, int decile)
{
    const Envelope prefix = envelope_prefix(env, decile_prefix_length(env.length(), decile));
    const auto od = outside_distance(partial, resample(prefix, partial.rows()));
    return {od.distance, od.proportion_outside(), od.trace};
}

Model build_model(const Dataset& dataset, const Clustering& clustering, const ModelOptions& options)
{
    validate_dataset(dataset);
    if (clustering.assignment.size() != dataset.items.size())
        throw Error(Errc::InvalidArgument, "clustering does not match the dataset");
    Model model;
    model.metric = options.prototype.metric;
    for (const auto& members : clustering.members()) {
        if (members.empty()) throw Error(Errc::EmptyCluster, "cannot model an empty cluster");
        std::vector<Series> series;
        for (std::size_t i : members) series.push_back(dataset.items[i].series);
        ClusterModel cm;
        cm.members = members;
        cm.prototype = make_prototype(series, options.prototype);
        const Index window = window_from_percent(cm.prototype.series.rows(), options.window_pct);
        auto ce = cluster_envelope(cm.prototype.series, series, window, options.nearest, model.metric);
        cm.envelope = std::move(ce.envelope);
        for (std::size_t k : ce.contributors) cm.contributors.push_back(members[k]);
        model.clusters.push_back(std::move(cm));
    }
    return model;
}

namespace {

std::pair<std::size_t, double> nearest_cluster(const Model& model, const Series& series)
{
    if (model.clusters.empty()) throw Error(Errc::MissingPrototype, "model has no clusters");
    std::size_t best = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < model.clusters.size(); ++c) {
        const double d =
            dtw_summary(series, model.clusters[c].prototype.series, ConstraintBand::none(), model.metric).normalized_distance();
        if (d < bd) {
            bd = d;
            best = c;
        }
    }
    return {best, bd};
}

}  // namespace

std::size_t assign_cluster(const Model& model, const Series& series)
{
    return nearest_cluster(model, series).first;
}

RecordingScore score_recording(const Model& model, const Series& series)
{
    validate_series(series);
    const auto [c, d] = nearest_cluster(model, series);
    const Envelope& env = model.clusters[c].envelope;
    const auto od = outside_distance(series.rows() == env.length() ? series : resample(series, env.length()), env);
    return {c, od.distance, od.proportion_outside(), d};
}

std::vector<MemberRank> rank_members(const ClusterModel& cluster, const Dataset& dataset, Metric metric, int jobs)
{
    std::vector<MemberRank> out(cluster.members.size());
    const Envelope& env = cluster.envelope;
    parallel_for(out.size(), jobs, [&](std::size_t k) {
        const std::size_t i = cluster.members[k];
        const Series& s = dataset.items.at(i).series;
        const auto w = dtw_summary(cluster.prototype.series, s, ConstraintBand::none(), metric);
        const double score = outside_distance(s.rows() == env.length() ? s : resample(s, env.length()), env).distance;
        out[k] = {i, w.distance, w.normalized_distance(), score};
    });
    std::stable_sort(out.begin(), out.end(), [](const MemberRank& a, const MemberRank& b) {
        if (a.distance != b.distance) return a.distance < b.distance;
        return a.index < b.index;
    });
    return out;
}

SessionState start_session(const Model& model)
{
    if (model.clusters.empty()) throw Error(Errc::MissingPrototype, "model has no clusters");
    SessionState state;
    state.buffer.resize(0, model.clusters.front().prototype.series.cols());
    return state;
}

namespace {

void tick(SessionState& state, const Model& model, const StreamOptions& options)
{
    const Index n = state.buffer.rows();
    if (n < 2) return;
    PhaseEstimate best;
    best.distance = std::numeric_limits<double>::infinity();
    std::size_t cluster = 0;
    for (std::size_t c = 0; c < model.clusters.size(); ++c) {
        const auto pe = phase_estimate(state.buffer, model.clusters[c].prototype.series, model.metric);
        if (pe.distance < best.distance) {
            best = pe;
            cluster = c;
        }
    }
    state.cluster = cluster;
    state.phase = best.percent();
    state.pace = double(n) / double(best.prefix_length);
    const auto ds = dynamic_score(state.buffer, model.clusters[cluster].envelope, best.decile);
    // The recomputed value can shrink when the phase moves; the reported total never does.
    state.score = std::max(state.score, ds.score);

    SessionEvent event{std::size_t(n - 1), state.phase, state.pace, state.score, cluster, std::nullopt};
    std::vector<Alarm> raised;
    for (std::size_t i = state.evaluated; i < std::size_t(n); ++i) {
        const double e = ds.trace(Index(i));
        if (e > options.alarm_threshold) {
            ++state.run;
        } else {
            state.run = 0;
            state.alarm_active = false;
        }
        if (state.run >= options.debounce && !state.alarm_active) {
            state.alarm_active = true;
            raised.push_back({i, std::size_t(n), e});
        }
    }
    state.evaluated = std::size_t(n);
    if (raised.empty()) {
        state.events.push_back(event);
        return;
    }
    for (const auto& a : raised) {
        state.alarms.push_back(a);
        event.alarm = a;
        state.events.push_back(event);
    }
}

}  // namespace

void ingest(SessionState& state, const Eigen::Ref<const Eigen::RowVectorXd>& sample, const Model& model,
            const StreamOptions& options)
{
    if (options.cadence < 1) throw Error(Errc::InvalidArgument, "cadence must be at least 1");
    if (sample.size() != state.buffer.cols())
        throw Error(Errc::DimensionMismatch, "sample has " + std::to_string(sample.size()) + " values, expected " +
                                                 std::to_string(state.buffer.cols()));
    if (!sample.allFinite())
        throw Error(Errc::NonFiniteSample, "non-finite value at sample " + std::to_string(state.buffer.rows()));
    const Index n = state.buffer.rows();
    state.buffer.conservativeResize(n + 1, Eigen::NoChange);
    state.buffer.row(n) = sample;
    if (std::size_t(n + 1) % options.cadence == 0) tick(state, model, options);
}

RecordingScore finish(SessionState& state, const Model& model, const StreamOptions& options)
{
    if (state.buffer.rows() < 1) throw Error(Errc::TooShort, "no samples were ingested");
    if (state.evaluated < std::size_t(state.buffer.rows())) tick(state, model, options);
    const auto r = score_recording(model, state.buffer);
    state.cluster = r.cluster;
    return r;
}

AdaptResult adapt_prototype(const ClusterModel& cluster, const std::vector<Series>& members, const Series& new_series,
                            std::size_t new_index, AdaptMode mode, double weight, const ModelOptions& options)
{
    validate_series(new_series);
    if (members.size() != cluster.members.size())
        throw Error(Errc::InvalidArgument, "member series do not match the cluster");
    std::vector<Series> all = members;
    all.push_back(new_series);

    AdaptResult out;
    out.cluster = cluster;
    out.cluster.members.push_back(new_index);
    if (mode == AdaptMode::Weighted) {
        if (!(weight > 0.0 && weight < 1.0)) throw Error(Errc::InvalidWeight, "weight must lie in (0, 1)");
        out.cluster.prototype.series =
            dtwmp_pair(cluster.prototype.series, new_series, MultiVariant::Dependent, weight, options.prototype.metric);
        out.cluster.prototype.source_count += 1;
    } else {
        PrototypeOptions po = options.prototype;
        po.method = cluster.prototype.method;
        out.cluster.prototype = make_prototype(all, po);
    }

    const Series& proto = out.cluster.prototype.series;
    std::vector<double> d(all.size());
    for (std::size_t k = 0; k < all.size(); ++k)
        d[k] = dtw_summary(proto, all[k], ConstraintBand::none(), options.prototype.metric).distance;
    std::size_t rank = 0;
    for (std::size_t k = 0; k + 1 < all.size(); ++k)
        if (d[k] <= d.back()) ++rank;
    if (rank < options.nearest) {
        const Index window = window_from_percent(proto.rows(), options.window_pct);
        auto ce = cluster_envelope(proto, all, window, options.nearest, options.prototype.metric);
        out.cluster.envelope = std::move(ce.envelope);
        out.cluster.contributors.clear();
        for (std::size_t k : ce.contributors) out.cluster.contributors.push_back(out.cluster.members[k]);
        out.envelope_regenerated = true;
    }
    return out;
}

std::string event_json(const SessionEvent& event)
{
    nlohmann::ordered_json j;
    j["index"] = event.index;
    j["phase"] = event.phase;
    j["pace"] = event.pace;
    j["score"] = event.score;
    j["cluster"] = event.cluster + 1;
    if (event.alarm) j["alarm"] = {{"index", event.alarm->index}, {"exceedance", event.alarm->exceedance}};
    return j.dump();
}

}  // namespace skilldtw
