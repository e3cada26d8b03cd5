#pragma once

#include "skilldtw/core.hpp"
#include "skilldtw/distance.hpp"
#include "skilldtw/prototype.hpp"

#include <map>
#include <string>
#include <vector>

namespace skilldtw {

enum class LabelField { Skill, Participant };

std::string label_of(const LabeledSeries& item, LabelField field);

struct Neighbor {
    std::size_t index = 0;  // position in the training set
    double distance = 0;
    std::string label;
};

struct KnnResult {
    std::string label;
    std::vector<Neighbor> neighbors;  // k nearest, ascending distance (ties by index)
};

struct DistanceOptions {
    ConstraintBand band = ConstraintBand::none();
    Metric metric = Metric::Euclidean;
};

// Majority vote over the k DTW-nearest training series. Among tied labels the
// one holding the nearest neighbor wins.
KnnResult knn_classify(const Series& query, const Dataset& training, std::size_t k = 1,
                       LabelField field = LabelField::Skill, const DistanceOptions& dist = {});

// Vote over already-ranked neighbors (ascending distance).
std::string vote(const std::vector<Neighbor>& ranked);

struct CentroidResult {
    std::string label;
    std::map<std::string, double> distances;  // one DTW evaluation per label
};

CentroidResult centroid_classify(const Series& query, const std::map<std::string, Prototype>& prototypes,
                                 const DistanceOptions& dist = {});

struct ClassifierMethod {
    enum class Kind { Knn, Centroid };
    Kind kind = Kind::Knn;
    std::size_t k = 1;
    PrototypeOptions prototype;

    std::string describe() const;
};

struct Scheme {
    enum class Kind { Loocv, KFold };
    Kind kind = Kind::Loocv;
    std::size_t folds = 5;
    std::uint64_t seed = 0;

    std::string describe() const;
};

struct ItemPrediction {
    std::size_t index = 0;
    std::string truth;
    std::string predicted;
    std::size_t fold = 0;
};

struct ClassifierReport {
    std::string scheme;
    std::string method;
    double accuracy = 0;
    std::vector<std::string> labels;  // sorted label alphabet
    Eigen::MatrixXi confusion;        // rows: true label, cols: predicted label
    std::vector<ItemPrediction> per_item;
};

// Fold id for each item. LOOCV gives each item its own fold; k-fold shuffles
// with the seed and deals items round-robin.
std::vector<std::size_t> assign_folds(std::size_t n, const Scheme& scheme);

struct CrossValidationOptions {
    LabelField field = LabelField::Skill;
    DistanceOptions distance;
    int jobs = 1;
};

ClassifierReport cross_validate(const Dataset& dataset, const ClassifierMethod& method, const Scheme& scheme,
                                const CrossValidationOptions& options = {});

// Same as above with a precomputed full pairwise DTW matrix (knn only reads it).
ClassifierReport cross_validate(const Dataset& dataset, const Eigen::MatrixXd& distances, const ClassifierMethod& method,
                                const Scheme& scheme, const CrossValidationOptions& options = {});

}  // namespace skilldtw
