#include "skilldtw/classify.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

namespace skilldtw {

std::string label_of(const LabeledSeries& item, LabelField field)
{
    return field == LabelField::Skill ? std::string(1, to_char(item.skill)) : item.participant;
}

std::string vote(const std::vector<Neighbor>& ranked)
{
    if (ranked.empty()) throw Error(Errc::EmptyTrainingSet, "vote over no neighbors");
    std::map<std::string, std::size_t> counts;
    for (const auto& nb : ranked) ++counts[nb.label];
    std::size_t top = 0;
    for (const auto& [label, c] : counts) top = std::max(top, c);
    // First label in distance order that reaches the top count.
    for (const auto& nb : ranked)
        if (counts[nb.label] == top) return nb.label;
    return ranked.front().label;
}

namespace {

std::vector<Neighbor> rank_neighbors(std::vector<Neighbor> candidates, std::size_t k)
{
    std::stable_sort(candidates.begin(), candidates.end(), [](const Neighbor& x, const Neighbor& y) {
        if (x.distance != y.distance) return x.distance < y.distance;
        return x.index < y.index;
    });
    candidates.resize(std::min(k, candidates.size()));
    return candidates;
}

}  // namespace

KnnResult knn_classify(const Series& query, const Dataset& training, std::size_t k, LabelField field,
                       const DistanceOptions& dist)
{
    if (training.items.empty()) throw Error(Errc::EmptyTrainingSet, "kNN with an empty training set");
    if (k < 1 || k > training.items.size())
        throw Error(Errc::InvalidArgument, "k must lie in [1, training size]");
    std::vector<Neighbor> all;
    all.reserve(training.items.size());
    for (std::size_t i = 0; i < training.items.size(); ++i) {
        const double d = dtw_summary(query, training.items[i].series, dist.band, dist.metric).distance;
        all.push_back({i, d, label_of(training.items[i], field)});
    }
    KnnResult out;
    out.neighbors = rank_neighbors(std::move(all), k);
    out.label = vote(out.neighbors);
    return out;
}

CentroidResult centroid_classify(const Series& query, const std::map<std::string, Prototype>& prototypes,
                                 const DistanceOptions& dist)
{
    if (prototypes.size() < 2)
        throw Error(Errc::MissingPrototype, "nearest-centroid classification needs a prototype for at least two labels");
    CentroidResult out;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [label, proto] : prototypes) {
        const double d = dtw_summary(query, proto.series, dist.band, dist.metric).normalized_distance();
        out.distances[label] = d;
        if (d < best) {
            best = d;
            out.label = label;
        }
    }
    return out;
}

std::string ClassifierMethod::describe() const
{
    if (kind == Kind::Knn) return "knn(k=" + std::to_string(k) + ")";
    return std::string("centroid(") + to_string(prototype.method) + ")";
}

std::string Scheme::describe() const
{
    if (kind == Kind::Loocv) return "loocv";
    return "kfold(k=" + std::to_string(folds) + ",seed=" + std::to_string(seed) + ")";
}

std::vector<std::size_t> assign_folds(std::size_t n, const Scheme& scheme)
{
    std::vector<std::size_t> fold(n);
    if (scheme.kind == Scheme::Kind::Loocv) {
        std::iota(fold.begin(), fold.end(), 0);
        return fold;
    }
    if (scheme.folds < 2 || scheme.folds > n)
        throw Error(Errc::InvalidArgument, "k-fold needs 2 <= folds <= dataset size");
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::mt19937_64 rng(scheme.seed);
    for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng() % i]);
    for (std::size_t p = 0; p < n; ++p) fold[perm[p]] = p % scheme.folds;
    return fold;
}

ClassifierReport cross_validate(const Dataset& dataset, const ClassifierMethod& method, const Scheme& scheme,
                                const CrossValidationOptions& options)
{
    validate_dataset(dataset);
    Eigen::MatrixXd distances;
    if (method.kind == ClassifierMethod::Kind::Knn)
        distances = pairwise_dtw(dataset.series(), options.distance.metric, options.distance.band, options.jobs);
    return cross_validate(dataset, distances, method, scheme, options);
}

ClassifierReport cross_validate(const Dataset& dataset, const Eigen::MatrixXd& distances, const ClassifierMethod& method,
                                const Scheme& scheme, const CrossValidationOptions& options)
{
    validate_dataset(dataset);
    const std::size_t n = dataset.items.size();
    if (n < 2) throw Error(Errc::InvalidArgument, "cross-validation needs at least two items");

    std::vector<std::string> truth(n);
    std::set<std::string> alphabet;
    for (std::size_t i = 0; i < n; ++i) {
        truth[i] = label_of(dataset.items[i], options.field);
        alphabet.insert(truth[i]);
    }
    const auto fold = assign_folds(n, scheme);
    const std::size_t fold_count = *std::max_element(fold.begin(), fold.end()) + 1;
    std::vector<std::string> predicted(n);

    if (method.kind == ClassifierMethod::Kind::Knn) {
        if (distances.rows() != Index(n) || distances.cols() != Index(n))
            throw Error(Errc::InvalidArgument, "distance matrix does not match the dataset");
        parallel_for(n, options.jobs, [&](std::size_t i) {
            std::vector<Neighbor> candidates;
            for (std::size_t j = 0; j < n; ++j)
                if (fold[j] != fold[i]) candidates.push_back({j, distances(Index(i), Index(j)), truth[j]});
            if (candidates.empty()) throw Error(Errc::EmptyTrainingSet, "fold leaves no training items");
            if (method.k > candidates.size())
                throw Error(Errc::InvalidArgument, "k exceeds the training-fold size");
            predicted[i] = vote(rank_neighbors(std::move(candidates), method.k));
        });
    } else {
        // Folds are checked up front so the error names the first degenerate fold.
        for (std::size_t f = 0; f < fold_count; ++f) {
            std::set<std::string> present;
            for (std::size_t j = 0; j < n; ++j)
                if (fold[j] != f) present.insert(truth[j]);
            for (const auto& label : alphabet)
                if (!present.count(label))
                    throw Error(Errc::DegenerateFold,
                                "fold " + std::to_string(f) + " has no training items labelled '" + label + "'");
        }
        parallel_for(fold_count, options.jobs, [&](std::size_t f) {
            std::map<std::string, std::vector<Series>> members;
            for (std::size_t j = 0; j < n; ++j)
                if (fold[j] != f) members[truth[j]].push_back(dataset.items[j].series);
            PrototypeOptions proto_opts = method.prototype;
            proto_opts.jobs = 1;
            std::map<std::string, Prototype> prototypes;
            for (const auto& [label, cluster] : members) prototypes.emplace(label, make_prototype(cluster, proto_opts));
            for (std::size_t i = 0; i < n; ++i)
                if (fold[i] == f) predicted[i] = centroid_classify(dataset.items[i].series, prototypes, options.distance).label;
        });
    }

    ClassifierReport report;
    report.scheme = scheme.describe();
    report.method = method.describe();
    report.labels.assign(alphabet.begin(), alphabet.end());
    std::map<std::string, Index> pos;
    for (std::size_t k = 0; k < report.labels.size(); ++k) pos[report.labels[k]] = Index(k);
    report.confusion = Eigen::MatrixXi::Zero(Index(report.labels.size()), Index(report.labels.size()));
    std::size_t correct = 0;
    for (std::size_t i = 0; i < n; ++i) {
        report.confusion(pos[truth[i]], pos[predicted[i]]) += 1;
        if (truth[i] == predicted[i]) ++correct;
        report.per_item.push_back({i, truth[i], predicted[i], fold[i]});
    }
    report.accuracy = double(correct) / double(n);
    return report;
}

}  // namespace skilldtw
