#include "skilldtw/core.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>

namespace skilldtw {

const char* to_string(Errc code) noexcept
{
    switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::NonFinite: return "NonFinite";
    case Errc::InfeasibleBand: return "InfeasibleBand";
    case Errc::ResourceLimit: return "ResourceLimit";
    case Errc::EmptyCluster: return "EmptyCluster";
    case Errc::NonFiniteObjective: return "NonFiniteObjective";
    case Errc::EmptyTrainingSet: return "EmptyTrainingSet";
    case Errc::MissingPrototype: return "MissingPrototype";
    case Errc::DegenerateFold: return "DegenerateFold";
    case Errc::SingletonOnly: return "SingletonOnly";
    case Errc::DegenerateClustering: return "DegenerateClustering";
    case Errc::EmptySet: return "EmptySet";
    case Errc::TooShort: return "TooShort";
    case Errc::NonFiniteSample: return "NonFiniteSample";
    case Errc::InvalidWeight: return "InvalidWeight";
    case Errc::InsufficientData: return "InsufficientData";
    case Errc::ParseError: return "ParseError";
    case Errc::ValidationError: return "ValidationError";
    }
    return "Unknown";
}

char to_char(Skill s) noexcept
{
    switch (s) {
    case Skill::Novice: return 'N';
    case Skill::Intermediate: return 'I';
    case Skill::Expert: return 'E';
    }
    return '?';
}

Skill skill_from_string(const std::string& s)
{
    if (s == "N") return Skill::Novice;
    if (s == "I") return Skill::Intermediate;
    if (s == "E") return Skill::Expert;
    throw Error(Errc::ValidationError, "unknown skill label '" + s + "' (expected N, I or E)");
}

Index Dataset::variable_count() const
{
    if (items.empty()) return static_cast<Index>(variables.size());
    return items.front().series.cols();
}

std::vector<Series> Dataset::series() const
{
    std::vector<Series> out;
    out.reserve(items.size());
    for (const auto& item : items) out.push_back(item.series);
    return out;
}

void validate_series(const Series& s)
{
    if (s.rows() < 1) throw Error(Errc::InvalidArgument, "series must have at least one time step");
    if (s.cols() < 1) throw Error(Errc::InvalidArgument, "series must have at least one variable");
    if (!s.allFinite()) throw Error(Errc::NonFinite, "series contains NaN or infinite samples");
}

void validate_dataset(const Dataset& d)
{
    if (d.items.empty()) throw Error(Errc::EmptySet, "dataset '" + d.name + "' is empty");
    const Index v = d.items.front().series.cols();
    for (std::size_t i = 0; i < d.items.size(); ++i) {
        const auto& item = d.items[i];
        validate_series(item.series);
        if (item.series.cols() != v)
            throw Error(Errc::DimensionMismatch, "item " + std::to_string(i) + " has " +
                                                     std::to_string(item.series.cols()) + " variables, expected " +
                                                     std::to_string(v));
        if (item.participant.empty())
            throw Error(Errc::ValidationError, "item " + std::to_string(i) + " has an empty participant id");
    }
}

ChannelStats channel_stats(const Series& s)
{
    ChannelStats st;
    st.mean = s.colwise().mean().transpose();
    st.stddev = ((s.rowwise() - st.mean.transpose()).array().square().colwise().sum() / double(s.rows()))
                    .sqrt()
                    .transpose();
    return st;
}

ChannelStats channel_stats(const Dataset& d)
{
    validate_dataset(d);
    const Index v = d.variable_count();
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(v);
    double count = 0;
    for (const auto& item : d.items) {
        sum += item.series.colwise().sum().transpose();
        count += double(item.series.rows());
    }
    ChannelStats st;
    st.mean = sum / count;
    Eigen::VectorXd sq = Eigen::VectorXd::Zero(v);
    for (const auto& item : d.items)
        sq += (item.series.rowwise() - st.mean.transpose()).array().square().colwise().sum().matrix().transpose();
    st.stddev = (sq / count).array().sqrt();
    return st;
}

Normalized normalize(const Series& s, NormalizeMode mode, const std::optional<ChannelStats>& stats)
{
    validate_series(s);
    ChannelStats st;
    if (mode == NormalizeMode::PerDataset) {
        if (!stats) throw Error(Errc::InvalidArgument, "per-dataset normalization requires channel statistics");
        st = *stats;
    } else {
        st = stats ? *stats : channel_stats(s);
    }
    if (st.mean.size() != s.cols() || st.stddev.size() != s.cols())
        throw Error(Errc::DimensionMismatch, "channel statistics do not match the series variable count");

    Normalized out;
    out.series.resize(s.rows(), s.cols());
    for (Index v = 0; v < s.cols(); ++v) {
        if (!(st.stddev(v) > 0.0)) {
            out.series.col(v).setZero();
            out.constant_channels.push_back(v);
            continue;
        }
        out.series.col(v) = (s.col(v).array() - st.mean(v)) / st.stddev(v);
    }
    return out;
}

Dataset normalize(const Dataset& d, NormalizeMode mode)
{
    validate_dataset(d);
    Dataset out = d;
    std::optional<ChannelStats> stats;
    if (mode == NormalizeMode::PerDataset) stats = channel_stats(d);
    for (auto& item : out.items) item.series = normalize(item.series, mode, stats).series;
    return out;
}

Series resample(const Series& s, Index target_length)
{
    validate_series(s);
    if (target_length < 2) throw Error(Errc::InvalidArgument, "resample target length must be at least 2");
    const Index n = s.rows();
    if (n == target_length) return s;
    Series out(target_length, s.cols());
    if (n == 1) {
        out.rowwise() = s.row(0);
        return out;
    }
    const double scale = double(n - 1) / double(target_length - 1);
    for (Index k = 0; k < target_length; ++k) {
        if (k == target_length - 1) {
            out.row(k) = s.row(n - 1);
            continue;
        }
        const double pos = double(k) * scale;
        const Index i0 = std::min<Index>(static_cast<Index>(std::floor(pos)), n - 2);
        const double frac = pos - double(i0);
        out.row(k) = (1.0 - frac) * s.row(i0) + frac * s.row(i0 + 1);
    }
    return out;
}

Dataset epidural40_split(const Dataset& d)
{
    validate_dataset(d);
    constexpr std::array<Skill, 8> layout = {Skill::Novice, Skill::Intermediate, Skill::Expert, Skill::Expert,
                                             Skill::Intermediate, Skill::Novice, Skill::Novice, Skill::Novice};
    constexpr std::size_t per_participant = 5;

    // participant -> indices of their series per skill, in recording order
    std::map<std::string, std::map<Skill, std::vector<std::size_t>>> by_participant;
    for (std::size_t i = 0; i < d.items.size(); ++i)
        by_participant[d.items[i].participant][d.items[i].skill].push_back(i);

    std::map<Skill, std::vector<std::string>> eligible;  // lexicographic by construction of std::map
    for (const auto& [participant, skills] : by_participant)
        for (const auto& [skill, indices] : skills)
            if (indices.size() >= per_participant) eligible[skill].push_back(participant);

    std::map<Skill, std::size_t> needed;
    for (Skill s : layout) ++needed[s];

    std::map<Skill, std::size_t> cursor;
    std::vector<std::string> used;
    std::vector<std::pair<std::string, Skill>> chosen;
    for (Skill s : layout) {
        auto& pool = eligible[s];
        auto& c = cursor[s];
        // A participant may only fill one slot.
        while (c < pool.size() && std::find(used.begin(), used.end(), pool[c]) != used.end()) ++c;
        if (c >= pool.size()) {
            throw Error(Errc::InsufficientData, std::string("not enough participants with ") +
                                                    std::to_string(per_participant) + " series of skill " +
                                                    to_char(s) + " (need " + std::to_string(needed[s]) + ")");
        }
        used.push_back(pool[c]);
        chosen.emplace_back(pool[c], s);
        ++c;
    }

    Dataset out;
    out.name = d.name + "-epidural40";
    out.variables = d.variables;
    for (const auto& [participant, skill] : chosen) {
        const auto& indices = by_participant[participant][skill];
        for (std::size_t k = 0; k < per_participant; ++k) out.items.push_back(d.items[indices[k]]);
    }
    return out;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) noexcept
{
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace skilldtw
