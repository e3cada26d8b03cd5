#include "skilldtw/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

namespace skilldtw {

namespace {

// Monotone-deque sliding extremum; `better(x, y)` is true when x should replace y.
template <typename Better>
Eigen::VectorXd sliding_extreme(const Eigen::VectorXd& x, Index r, Better better)
{
    const Index n = x.size();
    Eigen::VectorXd out(n);
    std::deque<Index> dq;
    Index next = 0;
    for (Index i = 0; i < n; ++i) {
        const Index right = std::min(n - 1, i + r);
        for (; next <= right; ++next) {
            while (!dq.empty() && !better(x(dq.back()), x(next))) dq.pop_back();
            dq.push_back(next);
        }
        while (dq.front() < i - r) dq.pop_front();
        out(i) = x(dq.front());
    }
    return out;
}

void check_same_shape(const Series& s, const Envelope& env, const char* what)
{
    if (s.rows() != env.length())
        throw Error(Errc::LengthMismatch, std::string(what) + ": series length " + std::to_string(s.rows()) +
                                              " vs envelope length " + std::to_string(env.length()));
    if (s.cols() != env.upper.cols())
        throw Error(Errc::DimensionMismatch, std::string(what) + ": variable count differs from envelope");
}

}  // namespace

Envelope keogh_envelope(const Series& series, Index r)
{
    validate_series(series);
    if (r < 0 || r >= series.rows())
        throw Error(Errc::InvalidArgument, "envelope radius must satisfy 0 <= r < n");
    Envelope env;
    env.upper.resize(series.rows(), series.cols());
    env.lower.resize(series.rows(), series.cols());
    for (Index v = 0; v < series.cols(); ++v) {
        const Eigen::VectorXd x = series.col(v);
        env.upper.col(v) = sliding_extreme(x, r, [](double kept, double incoming) { return kept > incoming; });
        env.lower.col(v) = sliding_extreme(x, r, [](double kept, double incoming) { return kept < incoming; });
    }
    env.window = r;
    env.source_count = 1;
    return env;
}

Index window_from_percent(Index length, double percent)
{
    if (!(percent >= 0.0)) throw Error(Errc::InvalidArgument, "window percentage must be non-negative");
    const Index r = Index(std::llround(double(length) * percent / 100.0));
    return std::clamp<Index>(r, 0, std::max<Index>(0, length - 1));
}

double lb_keogh(const Envelope& env, const Series& candidate)
{
    check_same_shape(candidate, env, "lb_keogh");
    const Series above = (candidate - env.upper).cwiseMax(0.0);
    const Series below = (env.lower - candidate).cwiseMax(0.0);
    return std::sqrt(above.squaredNorm() + below.squaredNorm());
}

Envelope summative_envelope(const std::vector<Envelope>& envelopes)
{
    if (envelopes.empty()) throw Error(Errc::EmptySet, "summative envelope of no envelopes");
    Envelope out = envelopes.front();
    for (std::size_t k = 1; k < envelopes.size(); ++k) {
        const auto& e = envelopes[k];
        if (e.length() != out.length())
            throw Error(Errc::LengthMismatch, "summative envelope members differ in length (" +
                                                  std::to_string(e.length()) + " vs " + std::to_string(out.length()) + ")");
        if (e.upper.cols() != out.upper.cols())
            throw Error(Errc::DimensionMismatch, "summative envelope members differ in variable count");
        out.upper = out.upper.cwiseMax(e.upper);
        out.lower = out.lower.cwiseMin(e.lower);
        out.window = std::max(out.window, e.window);
        out.source_count += e.source_count;
    }
    return out;
}

double OutsideDistance::proportion_outside() const
{
    if (trace.size() == 0) return 0.0;
    return double((trace.array() > 0.0).count()) / double(trace.size());
}

OutsideDistance outside_distance(const Series& series, const Envelope& env)
{
    check_same_shape(series, env, "outside_distance");
    OutsideDistance out;
    out.trace.resize(series.rows());
    for (Index i = 0; i < series.rows(); ++i) {
        double sq = 0;
        for (Index v = 0; v < series.cols(); ++v) {
            const double a = series(i, v);
            const double e = std::max({a - env.upper(i, v), env.lower(i, v) - a, 0.0});
            sq += e * e;
        }
        out.trace(i) = std::sqrt(sq);
    }
    // Summed in step order so prefixes accumulate identically.
    out.distance = 0;
    for (Index i = 0; i < out.trace.size(); ++i) out.distance += out.trace(i);
    return out;
}

Envelope envelope_prefix(const Envelope& env, Index length)
{
    if (length < 1 || length > env.length())
        throw Error(Errc::InvalidArgument, "envelope prefix length out of range");
    Envelope out = env;
    out.upper = env.upper.topRows(length);
    out.lower = env.lower.topRows(length);
    return out;
}

Envelope resample(const Envelope& env, Index length)
{
    Envelope out = env;
    if (env.length() == length) return out;
    if (length == 1) {
        out.upper = env.upper.topRows(1);
        out.lower = env.lower.topRows(1);
        return out;
    }
    out.upper = resample(env.upper, length);
    out.lower = resample(env.lower, length);
    return out;
}

ClusterEnvelope cluster_envelope(const Series& prototype, const std::vector<Series>& members, Index window,
                                 std::size_t nearest, Metric metric)
{
    validate_series(prototype);
    const Index length = prototype.rows();
    std::vector<double> d(members.size());
    for (std::size_t k = 0; k < members.size(); ++k) d[k] = dtw_summary(prototype, members[k], ConstraintBand::none(), metric).distance;
    std::vector<std::size_t> order(members.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return d[x] < d[y]; });
    order.resize(std::min(nearest, order.size()));

    std::vector<Envelope> parts;
    parts.push_back(keogh_envelope(prototype, window));
    for (std::size_t k : order) {
        const Series& m = members[k];
        parts.push_back(keogh_envelope(m.rows() == length ? m : resample(m, length), window));
    }
    return {summative_envelope(parts), order};
}

}  // namespace skilldtw
