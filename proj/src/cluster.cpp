#include "skilldtw/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace skilldtw {

DistanceMatrix DistanceMatrix::from_dense(const Eigen::MatrixXd& dense)
{
    if (dense.rows() != dense.cols()) throw Error(Errc::InvalidArgument, "distance matrix must be square");
    DistanceMatrix m(std::size_t(dense.rows()));
    for (Index i = 0; i < dense.rows(); ++i)
        for (Index j = i + 1; j < dense.cols(); ++j) m.set(std::size_t(i), std::size_t(j), dense(i, j));
    return m;
}

std::size_t DistanceMatrix::slot(std::size_t i, std::size_t j) const
{
    if (i > j) std::swap(i, j);
    // Row-major strict upper triangle.
    return i * n_ - i * (i + 1) / 2 + (j - i - 1);
}

double DistanceMatrix::operator()(std::size_t i, std::size_t j) const
{
    if (i >= n_ || j >= n_) throw Error(Errc::InvalidArgument, "distance matrix index out of range");
    if (i == j) return 0.0;
    return data_[slot(i, j)];
}

void DistanceMatrix::set(std::size_t i, std::size_t j, double value)
{
    if (i >= n_ || j >= n_ || i == j) throw Error(Errc::InvalidArgument, "distance matrix entry out of range");
    if (!(value >= 0.0)) throw Error(Errc::InvalidArgument, "distances must be non-negative");
    data_[slot(i, j)] = value;
}

Eigen::MatrixXd DistanceMatrix::dense() const
{
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(Index(n_), Index(n_));
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = i + 1; j < n_; ++j) out(Index(i), Index(j)) = out(Index(j), Index(i)) = (*this)(i, j);
    return out;
}

DistanceMatrix distance_matrix(const std::vector<Series>& series, const DistanceMatrixOptions& options)
{
    const std::size_t n = series.size();
    if (n < 2) throw Error(Errc::InvalidArgument, "distance matrix needs at least two series");
    DistanceMatrix out(n);
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    pairs.reserve(out.stored_entries());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
    std::vector<double> values(pairs.size());
    parallel_for(pairs.size(), options.jobs, [&](std::size_t p) {
        const auto [i, j] = pairs[p];
        try {
            const auto s = dtw_summary(series[i], series[j], options.band, options.metric);
            values[p] = options.normalization == DistanceNormalization::PathLength ? s.normalized_distance() : s.distance;
        } catch (const Error& e) {
            throw Error(e.code(), "pair (" + std::to_string(i) + ", " + std::to_string(j) + "): " + e.what());
        }
    });
    for (std::size_t p = 0; p < pairs.size(); ++p) out.set(pairs[p].first, pairs[p].second, values[p]);
    return out;
}

const char* to_string(Linkage l) noexcept
{
    switch (l) {
    case Linkage::Single: return "single";
    case Linkage::Complete: return "complete";
    case Linkage::Average: return "average";
    }
    return "unknown";
}

Linkage linkage_from_string(const std::string& s)
{
    if (s == "single") return Linkage::Single;
    if (s == "complete") return Linkage::Complete;
    if (s == "average") return Linkage::Average;
    throw Error(Errc::InvalidArgument, "unknown linkage '" + s + "'");
}

std::vector<std::vector<std::size_t>> Clustering::members() const
{
    std::vector<std::vector<std::size_t>> out(cluster_count);
    for (std::size_t i = 0; i < assignment.size(); ++i) out[assignment[i] - 1].push_back(i);
    return out;
}

namespace {

// Renumber labels 1..C in order of first appearance over items.
std::vector<std::size_t> relabel(const std::vector<std::size_t>& raw, std::vector<std::size_t>* mapping_out = nullptr)
{
    std::vector<std::size_t> out(raw.size());
    std::vector<std::pair<std::size_t, std::size_t>> seen;  // raw -> new
    for (std::size_t i = 0; i < raw.size(); ++i) {
        auto it = std::find_if(seen.begin(), seen.end(), [&](const auto& p) { return p.first == raw[i]; });
        if (it == seen.end()) {
            seen.emplace_back(raw[i], seen.size() + 1);
            it = seen.end() - 1;
        }
        out[i] = it->second;
    }
    if (mapping_out) {
        mapping_out->clear();
        for (const auto& [from, to] : seen) {
            (void)to;
            mapping_out->push_back(from);
        }
    }
    return out;
}

void check_cluster_count(std::size_t c, std::size_t n)
{
    if (c < 1 || c > n)
        throw Error(Errc::InvalidArgument, "cluster count " + std::to_string(c) + " outside [1, " + std::to_string(n) + "]");
}

}  // namespace

std::vector<std::size_t> cut_dendrogram(const std::vector<Merge>& dendrogram, std::size_t n, std::size_t clusters)
{
    check_cluster_count(clusters, n);
    if (dendrogram.size() + 1 != n) throw Error(Errc::InvalidArgument, "dendrogram must hold N - 1 merges");
    std::vector<std::size_t> parent(2 * n - 1);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t t = 0; t < n - clusters; ++t) {
        const auto& m = dendrogram[t];
        parent[find(m.left)] = n + t;
        parent[find(m.right)] = n + t;
    }
    std::vector<std::size_t> roots(n);
    for (std::size_t i = 0; i < n; ++i) roots[i] = find(i);
    return relabel(roots);
}

Clustering hierarchical_cluster(const DistanceMatrix& d, Linkage linkage, std::size_t clusters)
{
    const std::size_t n = d.size();
    check_cluster_count(clusters, n);
    Eigen::MatrixXd D = d.dense();
    std::vector<bool> active(n, true);
    std::vector<std::size_t> node(n), size(n, 1);
    std::iota(node.begin(), node.end(), 0);

    Clustering out;
    out.method = std::string("hierarchical(") + to_string(linkage) + ")";
    for (std::size_t t = 0; t + 1 < n; ++t) {
        // Clusters are keyed by their smallest item index; scanning (a, b) in
        // lexicographic order with a strict comparison resolves ties.
        std::size_t ba = 0, bb = 0;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < n; ++a) {
            if (!active[a]) continue;
            for (std::size_t b = a + 1; b < n; ++b) {
                if (!active[b]) continue;
                if (D(Index(a), Index(b)) < best) {
                    best = D(Index(a), Index(b));
                    ba = a;
                    bb = b;
                }
            }
        }
        out.dendrogram.push_back({node[ba], node[bb], best, size[ba] + size[bb]});
        for (std::size_t x = 0; x < n; ++x) {
            if (!active[x] || x == ba || x == bb) continue;
            const double da = D(Index(ba), Index(x)), db = D(Index(bb), Index(x));
            double merged = 0;
            switch (linkage) {
            case Linkage::Single: merged = std::min(da, db); break;
            case Linkage::Complete: merged = std::max(da, db); break;
            case Linkage::Average:
                merged = (double(size[ba]) * da + double(size[bb]) * db) / double(size[ba] + size[bb]);
                break;
            }
            D(Index(ba), Index(x)) = D(Index(x), Index(ba)) = merged;
        }
        active[bb] = false;
        size[ba] += size[bb];
        node[ba] = n + t;
    }
    out.assignment = cut_dendrogram(out.dendrogram, n, clusters);
    out.cluster_count = clusters;
    return out;
}

Clustering partitional_cluster(const DistanceMatrix& d, std::size_t k, std::uint64_t seed, int max_iterations)
{
    const std::size_t n = d.size();
    check_cluster_count(k, n);
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> medoids{std::size_t(rng() % n)};
    std::vector<bool> is_medoid(n, false);
    is_medoid[medoids[0]] = true;
    while (medoids.size() < k) {
        std::size_t pick = n;
        double far = -1;
        for (std::size_t i = 0; i < n; ++i) {
            if (is_medoid[i]) continue;
            double near = std::numeric_limits<double>::infinity();
            for (std::size_t m : medoids) near = std::min(near, d(i, m));
            if (near > far) {
                far = near;
                pick = i;
            }
        }
        medoids.push_back(pick);
        is_medoid[pick] = true;
    }

    std::vector<std::size_t> assign(n, 0);
    auto assign_all = [&] {
        double cost = 0;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t best = 0;
            double bd = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < k; ++c) {
                if (medoids[c] == i) {
                    best = c;
                    bd = 0;
                    break;
                }
                if (d(i, medoids[c]) < bd) {
                    bd = d(i, medoids[c]);
                    best = c;
                }
            }
            assign[i] = best;
            cost += bd;
        }
        return cost;
    };

    Clustering out;
    out.method = "partitional(k-medoids)";
    out.cost_trace.push_back(assign_all());
    for (int it = 0; it < max_iterations; ++it) {
        bool changed = false;
        for (std::size_t c = 0; c < k; ++c) {
            std::vector<std::size_t> members;
            for (std::size_t i = 0; i < n; ++i)
                if (assign[i] == c) members.push_back(i);
            auto total = [&](std::size_t cand) {
                double s = 0;
                for (std::size_t j : members) s += d(cand, j);
                return s;
            };
            std::size_t best = medoids[c];
            double bs = total(best);
            for (std::size_t cand : members) {
                const double s = total(cand);
                if (s < bs) {
                    bs = s;
                    best = cand;
                }
            }
            if (best != medoids[c]) {
                medoids[c] = best;
                changed = true;
            }
        }
        if (!changed) break;
        out.cost_trace.push_back(assign_all());
    }

    std::vector<std::size_t> order;
    out.assignment = relabel(assign, &order);
    out.cluster_count = k;
    for (std::size_t raw : order) out.medoids.push_back(medoids[raw]);
    return out;
}

namespace {

std::size_t medoid_of(const DistanceMatrix& d, const std::vector<std::size_t>& members)
{
    std::size_t best = members.front();
    double bs = std::numeric_limits<double>::infinity();
    for (std::size_t cand : members) {
        double s = 0;
        for (std::size_t j : members) s += d(cand, j);
        if (s < bs) {
            bs = s;
            best = cand;
        }
    }
    return best;
}

}  // namespace

std::map<std::string, ValidityIndex> cvi_suite(const DistanceMatrix& d, const Clustering& clustering)
{
    const std::size_t n = d.size();
    if (clustering.assignment.size() != n) throw Error(Errc::InvalidArgument, "clustering does not match the matrix");
    const auto groups = clustering.members();
    const std::size_t c = groups.size();
    if (c < 2) throw Error(Errc::DegenerateClustering, "validity indices need at least two clusters");
    for (const auto& g : groups)
        if (g.empty()) throw Error(Errc::DegenerateClustering, "validity indices need non-empty clusters");
    if (std::all_of(groups.begin(), groups.end(), [](const auto& g) { return g.size() == 1; }))
        throw Error(Errc::SingletonOnly, "every cluster is a singleton");

    constexpr double inf = std::numeric_limits<double>::infinity();
    std::map<std::string, ValidityIndex> out;

    // Silhouette; singleton members score 0.
    double sil = 0;
    for (std::size_t g = 0; g < c; ++g) {
        for (std::size_t i : groups[g]) {
            if (groups[g].size() == 1) continue;
            double a = 0;
            for (std::size_t j : groups[g]) a += d(i, j);
            a /= double(groups[g].size() - 1);
            double b = inf;
            for (std::size_t h = 0; h < c; ++h) {
                if (h == g) continue;
                double s = 0;
                for (std::size_t j : groups[h]) s += d(i, j);
                b = std::min(b, s / double(groups[h].size()));
            }
            const double denom = std::max(a, b);
            sil += denom > 0 ? (b - a) / denom : 0.0;
        }
    }
    out["silhouette"] = {sil / double(n), true};

    // Dunn: closest pair across clusters over the widest cluster diameter.
    double min_between = inf, max_diameter = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            if (clustering.assignment[i] == clustering.assignment[j])
                max_diameter = std::max(max_diameter, d(i, j));
            else
                min_between = std::min(min_between, d(i, j));
        }
    out["dunn"] = {max_diameter > 0 ? min_between / max_diameter : inf, true};

    std::vector<std::size_t> medoids;
    std::vector<double> scatter;
    for (const auto& g : groups) {
        const std::size_t m = medoid_of(d, g);
        medoids.push_back(m);
        double s = 0;
        for (std::size_t i : g) s += d(i, m);
        scatter.push_back(s / double(g.size()));
    }
    auto ratio = [&](std::size_t g, std::size_t h) {
        const double sep = d(medoids[g], medoids[h]);
        return sep > 0 ? (scatter[g] + scatter[h]) / sep : inf;
    };
    double db = 0, dbstar = 0;
    for (std::size_t g = 0; g < c; ++g) {
        double worst = 0, max_scatter = 0, min_sep = inf;
        for (std::size_t h = 0; h < c; ++h) {
            if (h == g) continue;
            worst = std::max(worst, ratio(g, h));
            max_scatter = std::max(max_scatter, scatter[g] + scatter[h]);
            min_sep = std::min(min_sep, d(medoids[g], medoids[h]));
        }
        db += worst;
        dbstar += min_sep > 0 ? max_scatter / min_sep : inf;
    }
    out["davies_bouldin"] = {db / double(c), false};
    out["davies_bouldin_star"] = {dbstar / double(c), false};

    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), 0);
    const std::size_t global = medoid_of(d, all);
    double between = 0, within = 0;
    for (std::size_t g = 0; g < c; ++g) {
        const double dm = d(medoids[g], global);
        between += double(groups[g].size()) * dm * dm;
        for (std::size_t i : groups[g]) within += d(i, medoids[g]) * d(i, medoids[g]);
    }
    const double ch = (within > 0 && n > c) ? (between / double(c - 1)) / (within / double(n - c)) : inf;
    out["calinski_harabasz"] = {ch, true};
    return out;
}

std::vector<ClusterComposition> composition_report(const Clustering& clustering, const Dataset& dataset)
{
    if (clustering.assignment.size() != dataset.items.size())
        throw Error(Errc::InvalidArgument, "clustering does not match the dataset");
    std::vector<ClusterComposition> out;
    const auto groups = clustering.members();
    for (std::size_t g = 0; g < groups.size(); ++g) {
        ClusterComposition comp;
        comp.cluster = g + 1;
        comp.size = groups[g].size();
        for (std::size_t i : groups[g]) {
            comp.by_participant[dataset.items[i].participant] += 1.0;
            comp.by_skill[std::string(1, to_char(dataset.items[i].skill))] += 1.0;
        }
        for (auto& [k, v] : comp.by_participant) v /= double(comp.size);
        for (auto& [k, v] : comp.by_skill) v /= double(comp.size);
        out.push_back(std::move(comp));
    }
    return out;
}

}  // namespace skilldtw
