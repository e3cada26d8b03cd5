#include "skilldtw/prototype.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace skilldtw {

const char* to_string(ProtoMethod m) noexcept
{
    switch (m) {
    case ProtoMethod::Mean: return "mean";
    case ProtoMethod::Pam: return "pam";
    case ProtoMethod::Dba: return "dba";
    case ProtoMethod::SoftDtw: return "softdtw";
    case ProtoMethod::DtwMpDependent: return "dtwmp-d";
    case ProtoMethod::DtwMpIndependent: return "dtwmp-i";
    }
    return "unknown";
}

ProtoMethod proto_method_from_string(const std::string& s)
{
    if (s == "mean") return ProtoMethod::Mean;
    if (s == "pam") return ProtoMethod::Pam;
    if (s == "dba") return ProtoMethod::Dba;
    if (s == "softdtw") return ProtoMethod::SoftDtw;
    if (s == "dtwmp-d") return ProtoMethod::DtwMpDependent;
    if (s == "dtwmp-i") return ProtoMethod::DtwMpIndependent;
    throw Error(Errc::InvalidArgument, "unknown prototype method '" + s + "'");
}

namespace {

void require_cluster(const std::vector<Series>& cluster)
{
    if (cluster.empty()) throw Error(Errc::EmptyCluster, "prototype of an empty cluster");
    const Index v = cluster.front().cols();
    for (const auto& s : cluster) {
        validate_series(s);
        if (s.cols() != v) throw Error(Errc::DimensionMismatch, "cluster members differ in variable count");
    }
}

Series fit_length(const Series& s, Index length)
{
    if (s.rows() == length) return s;
    if (length == 1) return s.colwise().mean();
    return resample(s, length);
}

}  // namespace

Prototype mean_prototype(const std::vector<Series>& cluster)
{
    require_cluster(cluster);
    std::vector<Index> lengths;
    for (const auto& s : cluster) lengths.push_back(s.rows());
    std::sort(lengths.begin(), lengths.end());
    const Index length = lengths[(lengths.size() - 1) / 2];

    Series acc = Series::Zero(length, cluster.front().cols());
    for (const auto& s : cluster) acc += fit_length(s, length);
    return {acc / double(cluster.size()), ProtoMethod::Mean, cluster.size()};
}

Eigen::MatrixXd pairwise_dtw(const std::vector<Series>& cluster, Metric metric, const ConstraintBand& band, int jobs)
{
    const std::size_t k = cluster.size();
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(Index(k), Index(k));
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j) pairs.emplace_back(i, j);
    std::vector<double> values(pairs.size());
    parallel_for(pairs.size(), jobs, [&](std::size_t p) {
        values[p] = dtw_summary(cluster[pairs[p].first], cluster[pairs[p].second], band, metric).distance;
    });
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        d(Index(pairs[p].first), Index(pairs[p].second)) = values[p];
        d(Index(pairs[p].second), Index(pairs[p].first)) = values[p];
    }
    return d;
}

std::size_t pam_index(const Eigen::MatrixXd& distances)
{
    if (distances.rows() == 0) throw Error(Errc::EmptyCluster, "medoid of an empty distance matrix");
    if (distances.rows() != distances.cols()) throw Error(Errc::InvalidArgument, "distance matrix must be square");
    std::size_t best = 0;
    double best_sum = distances.row(0).sum();
    for (Index i = 1; i < distances.rows(); ++i) {
        const double sum = distances.row(i).sum();
        if (sum < best_sum) {
            best_sum = sum;
            best = std::size_t(i);
        }
    }
    return best;
}

Prototype pam_prototype(const std::vector<Series>& cluster, const Eigen::MatrixXd& distances)
{
    require_cluster(cluster);
    if (distances.rows() != Index(cluster.size()))
        throw Error(Errc::InvalidArgument, "distance matrix size does not match the cluster");
    return {cluster[pam_index(distances)], ProtoMethod::Pam, cluster.size()};
}

Prototype pam_prototype(const std::vector<Series>& cluster, Metric metric, const ConstraintBand& band)
{
    require_cluster(cluster);
    return pam_prototype(cluster, pairwise_dtw(cluster, metric, band));
}

double dba_objective(const std::vector<Series>& cluster, const Series& proto)
{
    double total = 0;
    for (const auto& s : cluster) total += dtw_summary(proto, s, ConstraintBand::none(), Metric::SquaredEuclidean).distance;
    return total;
}

Prototype dba_prototype(const std::vector<Series>& cluster, const Series& init, const DbaOptions& options,
                        std::vector<double>* objective_trace)
{
    require_cluster(cluster);
    validate_series(init);
    if (init.cols() != cluster.front().cols())
        throw Error(Errc::DimensionMismatch, "DBA init differs from the cluster in variable count");
    if (options.iterations < 1) throw Error(Errc::InvalidArgument, "DBA needs at least one iteration");

    Series proto = init;
    double objective = dba_objective(cluster, proto);
    if (objective_trace) objective_trace->assign(1, objective);

    std::vector<WarpPath> paths(cluster.size());
    for (int it = 0; it < options.iterations; ++it) {
        parallel_for(cluster.size(), options.jobs, [&](std::size_t k) {
            paths[k] = dtw_path(proto, cluster[k], ConstraintBand::none(), Metric::SquaredEuclidean).path;
        });
        Series sums = Series::Zero(proto.rows(), proto.cols());
        Eigen::VectorXd counts = Eigen::VectorXd::Zero(proto.rows());
        for (std::size_t k = 0; k < cluster.size(); ++k) {
            for (const auto& [i, j] : paths[k]) {
                sums.row(i) += cluster[k].row(j);
                counts(i) += 1.0;
            }
        }
        Series next = sums.array().colwise() / counts.array();
        const double next_objective = dba_objective(cluster, next);
        if (!(next_objective <= objective)) break;  // rounding-level increase: keep the previous prototype
        const double decrease = objective - next_objective;
        proto = std::move(next);
        objective = next_objective;
        if (objective_trace) objective_trace->push_back(objective);
        if (decrease <= options.tolerance * std::max(objective + decrease, 1e-300)) break;
    }
    return {proto, ProtoMethod::Dba, cluster.size()};
}

double softdtw_objective(const std::vector<Series>& cluster, const Series& proto, double gamma, Series* gradient,
                         int jobs)
{
    std::vector<double> values(cluster.size());
    std::vector<Series> grads(gradient ? cluster.size() : 0);
    parallel_for(cluster.size(), jobs, [&](std::size_t k) {
        if (gradient)
            grads[k] = softdtw_gradient(proto, cluster[k], gamma, &values[k]);
        else
            values[k] = softdtw(proto, cluster[k], gamma);
    });
    if (gradient) {
        gradient->setZero(proto.rows(), proto.cols());
        for (const auto& g : grads) *gradient += g;
    }
    return std::accumulate(values.begin(), values.end(), 0.0);
}

Prototype softdtw_barycenter(const std::vector<Series>& cluster, const Series& init,
                             const SoftDtwBarycenterOptions& options, std::vector<double>* objective_trace)
{
    require_cluster(cluster);
    validate_series(init);
    if (init.cols() != cluster.front().cols())
        throw Error(Errc::DimensionMismatch, "barycenter init differs from the cluster in variable count");
    detail::check_gamma(options.gamma);

    Series proto = init;
    Series grad;
    double objective = softdtw_objective(cluster, proto, options.gamma, &grad, options.jobs);
    if (!std::isfinite(objective)) throw Error(Errc::NonFiniteObjective, "objective is not finite at init");
    if (objective_trace) objective_trace->assign(1, objective);

    double step = options.step;
    for (int it = 0; it < options.max_iterations; ++it) {
        if (grad.norm() <= options.gradient_tolerance) break;
        bool accepted = false;
        bool saw_finite = false;
        Series candidate, candidate_grad;
        double candidate_objective = 0;
        for (int h = 0; h <= options.max_halvings; ++h) {
            candidate = proto - step * grad;
            candidate_objective = softdtw_objective(cluster, candidate, options.gamma, &candidate_grad, options.jobs);
            if (std::isfinite(candidate_objective)) {
                saw_finite = true;
                if (candidate_objective <= objective) {
                    accepted = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if (!accepted) {
            if (!saw_finite)
                throw Error(Errc::NonFiniteObjective,
                            "objective stayed non-finite after " + std::to_string(options.max_halvings) + " halvings");
            break;
        }
        proto = std::move(candidate);
        grad = std::move(candidate_grad);
        objective = candidate_objective;
        if (objective_trace) objective_trace->push_back(objective);
    }
    return {proto, ProtoMethod::SoftDtw, cluster.size()};
}

namespace {

Series merge_along(const Series& a, const Series& b, const WarpPath& path, double weight)
{
    Series out(Index(path.size()), a.cols());
    for (std::size_t k = 0; k < path.size(); ++k) {
        const auto x = a.row(path[k].first), y = b.row(path[k].second);
        // Equal samples are copied so a self-merge is exact for any weight.
        if (x == y)
            out.row(Index(k)) = x;
        else
            out.row(Index(k)) = (1.0 - weight) * x + weight * y;
    }
    return out;
}

}  // namespace

Series dtwmp_pair(const Series& a, const Series& b, MultiVariant variant, double weight, Metric metric)
{
    validate_series(a);
    validate_series(b);
    if (a.cols() != b.cols()) throw Error(Errc::DimensionMismatch, "DTW-MP merge of series with different variable counts");
    if (!(weight >= 0.0 && weight <= 1.0)) throw Error(Errc::InvalidWeight, "merge weight must lie in [0, 1]");

    if (variant == MultiVariant::Dependent)
        return merge_along(a, b, dtw_path(a, b, ConstraintBand::none(), metric).path, weight);

    std::vector<Series> channels;
    Index longest = 0;
    for (Index v = 0; v < a.cols(); ++v) {
        const Series ca = a.col(v);
        const Series cb = b.col(v);
        channels.push_back(merge_along(ca, cb, dtw_path(ca, cb, ConstraintBand::none(), metric).path, weight));
        longest = std::max(longest, channels.back().rows());
    }
    Series out(longest, a.cols());
    for (Index v = 0; v < a.cols(); ++v) out.col(v) = fit_length(channels[std::size_t(v)], longest).col(0);
    return out;
}

std::vector<std::size_t> dtwmp_merge_order(const std::vector<Series>& cluster, Metric metric)
{
    require_cluster(cluster);
    const Eigen::MatrixXd d = pairwise_dtw(cluster, metric);
    const std::size_t medoid = pam_index(d);
    std::vector<std::size_t> order(cluster.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        if (x == medoid || y == medoid) return x == medoid && y != medoid;
        return d(Index(medoid), Index(x)) < d(Index(medoid), Index(y));
    });
    return order;
}

Prototype dtwmp_multi(const std::vector<Series>& cluster, MultiVariant variant, Metric metric)
{
    require_cluster(cluster);
    const auto order = dtwmp_merge_order(cluster, metric);
    Series acc = cluster[order.front()];
    // The k-th merge gives the newcomer weight 1/(k+1) so every member counts equally.
    for (std::size_t k = 1; k < order.size(); ++k)
        acc = dtwmp_pair(acc, cluster[order[k]], variant, 1.0 / double(k + 1), metric);
    const auto method = variant == MultiVariant::Dependent ? ProtoMethod::DtwMpDependent : ProtoMethod::DtwMpIndependent;
    return {acc, method, cluster.size()};
}

Prototype make_prototype(const std::vector<Series>& cluster, const PrototypeOptions& options)
{
    require_cluster(cluster);
    switch (options.method) {
    case ProtoMethod::Mean: return mean_prototype(cluster);
    case ProtoMethod::Pam: return pam_prototype(cluster, pairwise_dtw(cluster, options.metric, ConstraintBand::none(), options.jobs));
    case ProtoMethod::Dba: {
        const auto init = pam_prototype(cluster, pairwise_dtw(cluster, options.metric, ConstraintBand::none(), options.jobs));
        DbaOptions dba;
        dba.iterations = options.dba_iterations;
        dba.jobs = options.jobs;
        return dba_prototype(cluster, init.series, dba);
    }
    case ProtoMethod::SoftDtw: {
        const auto init = pam_prototype(cluster, pairwise_dtw(cluster, options.metric, ConstraintBand::none(), options.jobs));
        SoftDtwBarycenterOptions sd;
        sd.gamma = options.gamma;
        sd.max_iterations = options.softdtw_iterations;
        sd.jobs = options.jobs;
        return softdtw_barycenter(cluster, init.series, sd);
    }
    case ProtoMethod::DtwMpDependent: return dtwmp_multi(cluster, MultiVariant::Dependent, options.metric);
    case ProtoMethod::DtwMpIndependent: return dtwmp_multi(cluster, MultiVariant::Independent, options.metric);
    }
    throw Error(Errc::InvalidArgument, "unknown prototype method");
}

}  // namespace skilldtw
