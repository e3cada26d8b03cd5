#pragma once

// Independent reference implementations used as test oracles. They favour
// obviousness over speed and share no code with the library beyond types.

#include "skilldtw/core.hpp"
#include "skilldtw/distance.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

namespace oracle {

using skilldtw::Index;
using skilldtw::Series;

inline double cell_cost(const Series& a, const Series& b, Index i, Index j, skilldtw::Metric metric)
{
    const Eigen::RowVectorXd d = a.row(i) - b.row(j);
    switch (metric) {
    case skilldtw::Metric::Euclidean: return d.norm();
    case skilldtw::Metric::SquaredEuclidean: return d.squaredNorm();
    case skilldtw::Metric::Manhattan: return d.cwiseAbs().sum();
    }
    return 0;
}

// Visits every monotone, continuous alignment from (0,0) to (n-1,m-1).
inline void for_each_path(Index n, Index m, const std::function<void(const skilldtw::WarpPath&)>& visit)
{
    skilldtw::WarpPath path{{0, 0}};
    std::function<void()> walk = [&] {
        const auto [i, j] = path.back();
        if (i == n - 1 && j == m - 1) {
            visit(path);
            return;
        }
        const std::pair<Index, Index> moves[3] = {{i + 1, j + 1}, {i + 1, j}, {i, j + 1}};
        for (const auto& mv : moves) {
            if (mv.first >= n || mv.second >= m) continue;
            path.push_back(mv);
            walk();
            path.pop_back();
        }
    };
    walk();
}

inline double path_cost(const Series& a, const Series& b, const skilldtw::WarpPath& p,
                        skilldtw::Metric metric = skilldtw::Metric::Euclidean)
{
    double s = 0;
    for (const auto& [i, j] : p) s += cell_cost(a, b, i, j, metric);
    return s;
}

// Minimum over all alignments, optionally restricted to cells inside `allowed`.
inline double brute_dtw(const Series& a, const Series& b, skilldtw::Metric metric = skilldtw::Metric::Euclidean,
                        const std::function<bool(Index, Index)>& allowed = nullptr)
{
    double best = std::numeric_limits<double>::infinity();
    for_each_path(a.rows(), b.rows(), [&](const skilldtw::WarpPath& p) {
        if (allowed)
            for (const auto& [i, j] : p)
                if (!allowed(i, j)) return;
        best = std::min(best, path_cost(a, b, p, metric));
    });
    return best;
}

// Textbook full-matrix recurrence, for lengths too large to enumerate.
inline double naive_dtw(const Series& a, const Series& b, skilldtw::Metric metric = skilldtw::Metric::Euclidean)
{
    const double inf = std::numeric_limits<double>::infinity();
    Eigen::MatrixXd acc = Eigen::MatrixXd::Constant(a.rows() + 1, b.rows() + 1, inf);
    acc(0, 0) = 0;
    for (Index i = 1; i <= a.rows(); ++i)
        for (Index j = 1; j <= b.rows(); ++j)
            acc(i, j) = cell_cost(a, b, i - 1, j - 1, metric) + std::min({acc(i - 1, j - 1), acc(i - 1, j), acc(i, j - 1)});
    return acc(a.rows(), b.rows());
}

// Soft minimum over all alignments of the summed squared-Euclidean cost.
inline double brute_softdtw(const Series& a, const Series& b, double gamma)
{
    std::vector<double> costs;
    for_each_path(a.rows(), b.rows(),
                  [&](const skilldtw::WarpPath& p) { costs.push_back(path_cost(a, b, p, skilldtw::Metric::SquaredEuclidean)); });
    double lo = std::numeric_limits<double>::infinity();
    for (double c : costs) lo = std::min(lo, c);
    double s = 0;
    for (double c : costs) s += std::exp(-(c - lo) / gamma);
    return lo - gamma * std::log(s);
}

// Central differences of f with respect to every entry of x.
inline Series finite_difference(const std::function<double(const Series&)>& f, const Series& x, double h = 1e-5)
{
    Series g(x.rows(), x.cols());
    for (Index i = 0; i < x.rows(); ++i)
        for (Index v = 0; v < x.cols(); ++v) {
            Series hi = x, lo = x;
            hi(i, v) += h;
            lo(i, v) -= h;
            g(i, v) = (f(hi) - f(lo)) / (2 * h);
        }
    return g;
}

// O(n r) sliding max/min.
inline std::pair<Series, Series> naive_envelope(const Series& s, Index r)
{
    Series up(s.rows(), s.cols()), lo(s.rows(), s.cols());
    for (Index i = 0; i < s.rows(); ++i)
        for (Index v = 0; v < s.cols(); ++v) {
            double mx = -std::numeric_limits<double>::infinity(), mn = std::numeric_limits<double>::infinity();
            for (Index k = std::max<Index>(0, i - r); k <= std::min<Index>(s.rows() - 1, i + r); ++k) {
                mx = std::max(mx, s(k, v));
                mn = std::min(mn, s(k, v));
            }
            up(i, v) = mx;
            lo(i, v) = mn;
        }
    return {up, lo};
}

// Cluster distance from its definition over all member pairs.
inline double linkage_distance(const Eigen::MatrixXd& d, const std::vector<std::size_t>& x,
                               const std::vector<std::size_t>& y, int kind /*0 single, 1 complete, 2 average*/)
{
    double mn = std::numeric_limits<double>::infinity(), mx = 0, sum = 0;
    for (auto i : x)
        for (auto j : y) {
            const double v = d(Index(i), Index(j));
            mn = std::min(mn, v);
            mx = std::max(mx, v);
            sum += v;
        }
    if (kind == 0) return mn;
    if (kind == 1) return mx;
    return sum / double(x.size() * y.size());
}

inline Series random_series(std::mt19937_64& rng, Index n, Index v, double scale = 1.0)
{
    std::normal_distribution<double> g(0.0, scale);
    Series s(n, v);
    for (Index i = 0; i < n; ++i)
        for (Index k = 0; k < v; ++k) s(i, k) = g(rng);
    return s;
}

inline Series univariate(std::initializer_list<double> xs)
{
    Series s(Index(xs.size()), 1);
    Index i = 0;
    for (double x : xs) s(i++, 0) = x;
    return s;
}

}  // namespace oracle
