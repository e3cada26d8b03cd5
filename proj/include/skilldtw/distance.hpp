#pragma once

#include "skilldtw/core.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

namespace skilldtw {

enum class Metric { Euclidean, SquaredEuclidean, Manhattan };

const char* to_string(Metric m) noexcept;
Metric metric_from_string(const std::string& s);

// Global constraint on the warping path.
struct ConstraintBand {
    enum class Kind { None, Itakura, SakoeChiba };
    Kind kind = Kind::None;
    Index radius = 0;    // Sakoe-Chiba only
    double slope = 2.0;  // Itakura only, must be > 1

    static ConstraintBand none() { return {}; }
    static ConstraintBand sakoe_chiba(Index r) { return {Kind::SakoeChiba, r, 2.0}; }
    static ConstraintBand itakura(double s = 2.0) { return {Kind::Itakura, 0, s}; }
};

std::string to_string(const ConstraintBand& band);
ConstraintBand band_from_string(const std::string& s);  // "none" | "itakura" | "itakura:S" | "sc:R"

// Per-row inclusive column range of admissible cells. Rows are contiguous and
// connected under the (1,1), (1,0), (0,1) step set.
struct BandWindow {
    std::vector<Index> lo;
    std::vector<Index> hi;
    bool contains(Index i, Index j) const { return j >= lo[std::size_t(i)] && j <= hi[std::size_t(i)]; }
    std::size_t cell_count() const;
};

// Throws InfeasibleBand when no path from (0,0) to (n-1,m-1) survives the constraint.
BandWindow band_window(Index n, Index m, const ConstraintBand& band);

// dtw() fills lcm/ccm only up to this length per dimension.
inline constexpr Index kFullMatrixLimit = 4000;
// Path extraction keeps one byte per admissible cell; beyond this, use a band or dtw_summary().
inline constexpr std::size_t kPathCellLimit = std::size_t(200) * 1000 * 1000;

namespace detail {
inline std::atomic<std::uint64_t> dtw_calls{0};
}

// Number of DTW evaluations (dtw, dtw_summary) performed by this process.
inline std::uint64_t dtw_call_count() noexcept { return detail::dtw_calls.load(); }

// ---------------------------------------------------------------------------
// Local and lockstep costs

template <typename Scalar>
Scalar local_cost(const Scalar* x, const Scalar* y, Index v, Metric metric)
{
    Scalar acc = 0;
    switch (metric) {
    case Metric::Euclidean:
        for (Index k = 0; k < v; ++k) acc += (x[k] - y[k]) * (x[k] - y[k]);
        return std::sqrt(acc);
    case Metric::SquaredEuclidean:
        for (Index k = 0; k < v; ++k) acc += (x[k] - y[k]) * (x[k] - y[k]);
        return acc;
    case Metric::Manhattan:
        for (Index k = 0; k < v; ++k) acc += std::abs(x[k] - y[k]);
        return acc;
    }
    return acc;
}

template <typename DerivedX, typename DerivedY>
typename DerivedX::Scalar local_cost(const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedY>& y,
                                     Metric metric = Metric::Euclidean)
{
    using Scalar = typename DerivedX::Scalar;
    if (x.size() != y.size()) throw Error(Errc::DimensionMismatch, "local cost on vectors of different size");
    const VectorX<Scalar> xs = x.reshaped();
    const VectorX<Scalar> ys = y.template cast<Scalar>().reshaped();
    return local_cost<Scalar>(xs.data(), ys.data(), xs.size(), metric);
}

// Sum over time steps of the per-step local cost; requires equal shapes.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar lockstep_distance(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b,
                                            Metric metric = Metric::Euclidean)
{
    using Scalar = typename DerivedA::Scalar;
    if (a.rows() != b.rows())
        throw Error(Errc::LengthMismatch, "lockstep distance needs equal lengths (" + std::to_string(a.rows()) +
                                              " vs " + std::to_string(b.rows()) + ")");
    if (a.cols() != b.cols()) throw Error(Errc::DimensionMismatch, "lockstep distance needs equal variable counts");
    const SeriesX<Scalar> sa = a;
    const SeriesX<Scalar> sb = b.template cast<Scalar>();
    Scalar total = 0;
    for (Index i = 0; i < sa.rows(); ++i) total += local_cost<Scalar>(sa.row(i).data(), sb.row(i).data(), sa.cols(), metric);
    return total;
}

// ---------------------------------------------------------------------------
// Dynamic time warping

using PathStep = std::pair<Index, Index>;  // (i, j), zero-based
using WarpPath = std::vector<PathStep>;

template <typename Scalar>
struct BasicWarpResult {
    Scalar distance = 0;
    // n x m matrices; cells outside the band are +inf. Left empty when either
    // length exceeds kFullMatrixLimit.
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> lcm;
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> ccm;
    WarpPath path;

    Scalar normalized_distance() const { return distance / Scalar(path.size()); }
};
using WarpResult = BasicWarpResult<double>;

template <typename Scalar>
struct BasicWarpSummary {
    Scalar distance = 0;
    Index path_length = 0;
    Scalar normalized_distance() const { return distance / Scalar(path_length); }
};
using WarpSummary = BasicWarpSummary<double>;

namespace detail {

// Predecessor choice shared by the forward pass and backtracking:
// diagonal, then vertical (i-1, j), then horizontal (i, j-1).
enum class Step : unsigned char { Start, Diagonal, Vertical, Horizontal };

template <typename Scalar>
inline std::pair<Scalar, Step> best_predecessor(Scalar diag, Scalar vert, Scalar horiz)
{
    if (diag <= vert && diag <= horiz) return {diag, Step::Diagonal};
    if (vert <= horiz) return {vert, Step::Vertical};
    return {horiz, Step::Horizontal};
}

inline void check_pair(Index n, Index m, Index va, Index vb)
{
    if (n < 1 || m < 1) throw Error(Errc::InvalidArgument, "DTW needs non-empty series");
    if (va != vb)
        throw Error(Errc::DimensionMismatch,
                    "DTW on series with " + std::to_string(va) + " and " + std::to_string(vb) + " variables");
}

template <typename DerivedA, typename DerivedB>
BasicWarpResult<typename DerivedA::Scalar> dtw_impl(const Eigen::MatrixBase<DerivedA>& a,
                                                    const Eigen::MatrixBase<DerivedB>& b, const ConstraintBand& band,
                                                    Metric metric, bool materialize)
{
    using Scalar = typename DerivedA::Scalar;
    constexpr Scalar inf = std::numeric_limits<Scalar>::infinity();
    const SeriesX<Scalar> sa = a;
    const SeriesX<Scalar> sb = b.template cast<Scalar>();
    const Index n = sa.rows(), m = sb.rows(), v = sa.cols();
    detail::check_pair(n, m, v, sb.cols());
    const BandWindow win = band_window(n, m, band);
    if (win.cell_count() > kPathCellLimit)
        throw Error(Errc::ResourceLimit, "path extraction over " + std::to_string(win.cell_count()) +
                                             " cells exceeds the limit of " + std::to_string(kPathCellLimit) +
                                             "; use a band or dtw_summary");
    detail::dtw_calls.fetch_add(1, std::memory_order_relaxed);

    BasicWarpResult<Scalar> out;
    const bool full = materialize && n <= kFullMatrixLimit && m <= kFullMatrixLimit;
    if (full) {
        out.lcm.setConstant(n, m, inf);
        out.ccm.setConstant(n, m, inf);
    }

    // One predecessor byte per band cell; row i holds columns lo[i]..hi[i].
    std::vector<std::size_t> offset(std::size_t(n) + 1, 0);
    for (Index i = 0; i < n; ++i)
        offset[std::size_t(i) + 1] = offset[std::size_t(i)] + std::size_t(win.hi[std::size_t(i)] - win.lo[std::size_t(i)] + 1);
    std::vector<Step> from(offset.back(), Step::Start);
    std::vector<Scalar> prev(std::size_t(m), inf), cur(std::size_t(m), inf);
    Index prev_lo = 0, prev_hi = -1;
    for (Index i = 0; i < n; ++i) {
        const Index lo = win.lo[std::size_t(i)], hi = win.hi[std::size_t(i)];
        std::fill(cur.begin(), cur.end(), inf);
        for (Index j = lo; j <= hi; ++j) {
            const Scalar c = local_cost<Scalar>(sa.row(i).data(), sb.row(j).data(), v, metric);
            Scalar acc = c;
            if (i > 0 || j > 0) {
                const Scalar diag = (i > 0 && j - 1 >= prev_lo && j - 1 <= prev_hi) ? prev[std::size_t(j - 1)] : inf;
                const Scalar vert = (i > 0 && j >= prev_lo && j <= prev_hi) ? prev[std::size_t(j)] : inf;
                const Scalar horiz = j > lo ? cur[std::size_t(j - 1)] : inf;
                const auto [best, step] = detail::best_predecessor(diag, vert, horiz);
                acc = c + best;
                from[offset[std::size_t(i)] + std::size_t(j - lo)] = step;
            }
            cur[std::size_t(j)] = acc;
            if (full) {
                out.lcm(i, j) = c;
                out.ccm(i, j) = acc;
            }
        }
        std::swap(prev, cur);
        prev_lo = lo;
        prev_hi = hi;
    }

    out.distance = prev[std::size_t(m - 1)];
    if (!std::isfinite(double(out.distance)))
        throw Error(Errc::InfeasibleBand, "no admissible warping path under " + to_string(band));

    Index i = n - 1, j = m - 1;
    out.path.emplace_back(i, j);
    while (i > 0 || j > 0) {
        switch (from[offset[std::size_t(i)] + std::size_t(j - win.lo[std::size_t(i)])]) {
        case Step::Diagonal: --i; --j; break;
        case Step::Vertical: --i; break;
        default: --j; break;
        }
        out.path.emplace_back(i, j);
    }
    std::reverse(out.path.begin(), out.path.end());
    return out;
}

}  // namespace detail

// Dependent multivariate DTW: one V-dimensional local cost per cell.
template <typename DerivedA, typename DerivedB>
BasicWarpResult<typename DerivedA::Scalar> dtw(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b,
                                               const ConstraintBand& band = ConstraintBand::none(),
                                               Metric metric = Metric::Euclidean)
{
    return detail::dtw_impl(a, b, band, metric, true);
}

// As dtw() but leaves lcm/ccm empty; for callers that only need the path.
template <typename DerivedA, typename DerivedB>
BasicWarpResult<typename DerivedA::Scalar> dtw_path(const Eigen::MatrixBase<DerivedA>& a,
                                                    const Eigen::MatrixBase<DerivedB>& b,
                                                    const ConstraintBand& band = ConstraintBand::none(),
                                                    Metric metric = Metric::Euclidean)
{
    return detail::dtw_impl(a, b, band, metric, false);
}

// Distance and path length with two rolling rows; no size limit. Produces the
// same distance and the same path length as dtw().
template <typename DerivedA, typename DerivedB>
BasicWarpSummary<typename DerivedA::Scalar> dtw_summary(const Eigen::MatrixBase<DerivedA>& a,
                                                        const Eigen::MatrixBase<DerivedB>& b,
                                                        const ConstraintBand& band = ConstraintBand::none(),
                                                        Metric metric = Metric::Euclidean)
{
    using Scalar = typename DerivedA::Scalar;
    constexpr Scalar inf = std::numeric_limits<Scalar>::infinity();
    const SeriesX<Scalar> sa = a;
    const SeriesX<Scalar> sb = b.template cast<Scalar>();
    const Index n = sa.rows(), m = sb.rows(), v = sa.cols();
    detail::check_pair(n, m, v, sb.cols());
    const BandWindow win = band_window(n, m, band);
    detail::dtw_calls.fetch_add(1, std::memory_order_relaxed);

    std::vector<Scalar> prev(std::size_t(m), inf), cur(std::size_t(m), inf);
    std::vector<Index> prev_len(std::size_t(m), 0), cur_len(std::size_t(m), 0);
    Index prev_lo = 0, prev_hi = -1;
    for (Index i = 0; i < n; ++i) {
        const Index lo = win.lo[std::size_t(i)], hi = win.hi[std::size_t(i)];
        std::fill(cur.begin(), cur.end(), inf);
        for (Index j = lo; j <= hi; ++j) {
            const Scalar c = local_cost<Scalar>(sa.row(i).data(), sb.row(j).data(), v, metric);
            if (i == 0 && j == 0) {
                cur[0] = c;
                cur_len[0] = 1;
                continue;
            }
            const bool has_prev_j = i > 0 && j >= prev_lo && j <= prev_hi;
            const bool has_prev_jm1 = i > 0 && j - 1 >= prev_lo && j - 1 <= prev_hi;
            const Scalar diag = has_prev_jm1 ? prev[std::size_t(j - 1)] : inf;
            const Scalar vert = has_prev_j ? prev[std::size_t(j)] : inf;
            const Scalar horiz = j > lo ? cur[std::size_t(j - 1)] : inf;
            const auto [best, step] = detail::best_predecessor(diag, vert, horiz);
            cur[std::size_t(j)] = c + best;
            switch (step) {
            case detail::Step::Diagonal: cur_len[std::size_t(j)] = prev_len[std::size_t(j - 1)] + 1; break;
            case detail::Step::Vertical: cur_len[std::size_t(j)] = prev_len[std::size_t(j)] + 1; break;
            default: cur_len[std::size_t(j)] = cur_len[std::size_t(j - 1)] + 1; break;
            }
        }
        std::swap(prev, cur);
        std::swap(prev_len, cur_len);
        prev_lo = lo;
        prev_hi = hi;
    }
    BasicWarpSummary<Scalar> out{prev[std::size_t(m - 1)], prev_len[std::size_t(m - 1)]};
    if (!std::isfinite(double(out.distance)))
        throw Error(Errc::InfeasibleBand, "no admissible warping path under " + to_string(band));
    return out;
}

// Independent multivariate DTW: one univariate alignment per variable.
template <typename DerivedA, typename DerivedB>
std::vector<BasicWarpResult<typename DerivedA::Scalar>> dtw_independent(
    const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b,
    const ConstraintBand& band = ConstraintBand::none(), Metric metric = Metric::Euclidean)
{
    using Scalar = typename DerivedA::Scalar;
    detail::check_pair(a.rows(), b.rows(), a.cols(), b.cols());
    std::vector<BasicWarpResult<Scalar>> out;
    out.reserve(std::size_t(a.cols()));
    for (Index v = 0; v < a.cols(); ++v) {
        const SeriesX<Scalar> ca = a.col(v);
        const SeriesX<Scalar> cb = b.col(v).template cast<Scalar>();
        out.push_back(dtw(ca, cb, band, metric));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Soft-DTW (squared Euclidean local cost)

namespace detail {

template <typename Scalar>
Scalar softmin3(Scalar a, Scalar b, Scalar c, Scalar gamma)
{
    constexpr Scalar inf = std::numeric_limits<Scalar>::infinity();
    const Scalar lo = std::min({a, b, c});
    if (lo == inf) return inf;
    Scalar s = 0;
    for (Scalar x : {a, b, c})
        if (x != inf) s += std::exp(-(x - lo) / gamma);
    return lo - gamma * std::log(s);
}

template <typename Scalar>
using DynMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

// Squared-Euclidean cost matrix D and the (n+1) x (m+1) soft accumulated matrix R.
template <typename Scalar>
void softdtw_forward(const SeriesX<Scalar>& a, const SeriesX<Scalar>& b, Scalar gamma, DynMatrix<Scalar>& D,
                     DynMatrix<Scalar>& R)
{
    constexpr Scalar inf = std::numeric_limits<Scalar>::infinity();
    const Index n = a.rows(), m = b.rows();
    D.resize(n, m);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < m; ++j) D(i, j) = local_cost<Scalar>(a.row(i).data(), b.row(j).data(), a.cols(), Metric::SquaredEuclidean);
    R.setConstant(n + 1, m + 1, inf);
    R(0, 0) = 0;
    for (Index i = 1; i <= n; ++i)
        for (Index j = 1; j <= m; ++j)
            R(i, j) = D(i - 1, j - 1) + softmin3(R(i - 1, j - 1), R(i - 1, j), R(i, j - 1), gamma);
}

inline void check_gamma(double gamma)
{
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw Error(Errc::InvalidArgument, "gamma must be a positive real");
}

}  // namespace detail

template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar softdtw(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b,
                                  typename DerivedA::Scalar gamma)
{
    using Scalar = typename DerivedA::Scalar;
    detail::check_gamma(double(gamma));
    const SeriesX<Scalar> sa = a;
    const SeriesX<Scalar> sb = b.template cast<Scalar>();
    detail::check_pair(sa.rows(), sb.rows(), sa.cols(), sb.cols());
    detail::DynMatrix<Scalar> D, R;
    detail::softdtw_forward(sa, sb, gamma, D, R);
    return R(sa.rows(), sb.rows());
}

// Gradient of softdtw(a, b, gamma) with respect to the samples of a (n x V).
template <typename DerivedA, typename DerivedB>
SeriesX<typename DerivedA::Scalar> softdtw_gradient(const Eigen::MatrixBase<DerivedA>& a,
                                                    const Eigen::MatrixBase<DerivedB>& b,
                                                    typename DerivedA::Scalar gamma, typename DerivedA::Scalar* value = nullptr)
{
    using Scalar = typename DerivedA::Scalar;
    constexpr Scalar inf = std::numeric_limits<Scalar>::infinity();
    detail::check_gamma(double(gamma));
    const SeriesX<Scalar> sa = a;
    const SeriesX<Scalar> sb = b.template cast<Scalar>();
    const Index n = sa.rows(), m = sb.rows();
    detail::check_pair(n, m, sa.cols(), sb.cols());
    detail::DynMatrix<Scalar> D, R;
    detail::softdtw_forward(sa, sb, gamma, D, R);
    if (value) *value = R(n, m);

    // Backward pass over padded matrices; E(i, j) = dR(n,m)/dD(i-1, j-1).
    detail::DynMatrix<Scalar> Rp = detail::DynMatrix<Scalar>::Constant(n + 2, m + 2, -inf);
    Rp.block(0, 0, n + 1, m + 1) = R;
    Rp(n + 1, m + 1) = R(n, m);
    detail::DynMatrix<Scalar> Dp = detail::DynMatrix<Scalar>::Zero(n + 2, m + 2);
    Dp.block(1, 1, n, m) = D;
    detail::DynMatrix<Scalar> E = detail::DynMatrix<Scalar>::Zero(n + 2, m + 2);
    E(n + 1, m + 1) = 1;
    for (Index j = 1; j <= m; ++j) Rp(n + 1, j) = -inf;
    for (Index i = 1; i <= n; ++i) Rp(i, m + 1) = -inf;

    for (Index i = n; i >= 1; --i) {
        for (Index j = m; j >= 1; --j) {
            const Scalar r = Rp(i, j);
            const Scalar wa = std::exp((Rp(i + 1, j) - r - Dp(i + 1, j)) / gamma);
            const Scalar wb = std::exp((Rp(i, j + 1) - r - Dp(i, j + 1)) / gamma);
            const Scalar wc = std::exp((Rp(i + 1, j + 1) - r - Dp(i + 1, j + 1)) / gamma);
            E(i, j) = E(i + 1, j) * wa + E(i, j + 1) * wb + E(i + 1, j + 1) * wc;
        }
    }

    SeriesX<Scalar> grad = SeriesX<Scalar>::Zero(n, sa.cols());
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < m; ++j) grad.row(i) += Scalar(2) * E(i + 1, j + 1) * (sa.row(i) - sb.row(j));
    return grad;
}

}  // namespace skilldtw
