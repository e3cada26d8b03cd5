#pragma once

#include "skilldtw/core.hpp"
#include "skilldtw/distance.hpp"

#include <map>
#include <string>
#include <vector>

namespace skilldtw {

// Symmetric, zero-diagonal matrix stored as its strict upper triangle.
class DistanceMatrix {
public:
    DistanceMatrix() = default;
    explicit DistanceMatrix(std::size_t n) : n_(n), data_(n * (n - (n > 0 ? 1 : 0)) / 2, 0.0) {}
    static DistanceMatrix from_dense(const Eigen::MatrixXd& dense);

    std::size_t size() const noexcept { return n_; }
    std::size_t stored_entries() const noexcept { return data_.size(); }

    double operator()(std::size_t i, std::size_t j) const;
    void set(std::size_t i, std::size_t j, double value);

    Eigen::MatrixXd dense() const;

private:
    std::size_t slot(std::size_t i, std::size_t j) const;

    std::size_t n_ = 0;
    std::vector<double> data_;
};

enum class DistanceNormalization { PathLength, Raw };

struct DistanceMatrixOptions {
    ConstraintBand band = ConstraintBand::none();
    Metric metric = Metric::Euclidean;
    DistanceNormalization normalization = DistanceNormalization::PathLength;
    int jobs = 1;
};

// (N^2 - N) / 2 DTW evaluations; output is independent of the job count.
DistanceMatrix distance_matrix(const std::vector<Series>& series, const DistanceMatrixOptions& options = {});

enum class Linkage { Single, Complete, Average };

const char* to_string(Linkage l) noexcept;
Linkage linkage_from_string(const std::string& s);

struct Merge {
    std::size_t left = 0;   // node id: leaves 0..N-1, merge t creates node N + t
    std::size_t right = 0;
    double height = 0;
    std::size_t size = 0;
};

struct Clustering {
    std::vector<std::size_t> assignment;  // cluster id per item, 1..C
    std::size_t cluster_count = 0;
    std::string method;
    std::vector<Merge> dendrogram;          // hierarchical only, N - 1 merges
    std::vector<std::size_t> medoids;       // partitional only, item index per cluster id - 1
    std::vector<double> cost_trace;         // partitional only, total cost per iteration

    std::vector<std::vector<std::size_t>> members() const;
};

// Agglomerative clustering; ties merge the pair with the smallest item indices.
Clustering hierarchical_cluster(const DistanceMatrix& d, Linkage linkage, std::size_t clusters);

// Flat assignment from a dendrogram after applying its first N - C merges.
std::vector<std::size_t> cut_dendrogram(const std::vector<Merge>& dendrogram, std::size_t n, std::size_t clusters);

// k-medoids by alternating assignment / medoid update, seeded farthest-first start.
Clustering partitional_cluster(const DistanceMatrix& d, std::size_t k, std::uint64_t seed, int max_iterations = 100);

struct ValidityIndex {
    double value = 0;
    bool higher_is_better = true;
};

// Silhouette, Dunn, Davies-Bouldin, DB*, Calinski-Harabasz (medoid-based).
std::map<std::string, ValidityIndex> cvi_suite(const DistanceMatrix& d, const Clustering& clustering);

struct ClusterComposition {
    std::size_t cluster = 0;
    std::size_t size = 0;
    std::map<std::string, double> by_participant;
    std::map<std::string, double> by_skill;
};

std::vector<ClusterComposition> composition_report(const Clustering& clustering, const Dataset& dataset);

}  // namespace skilldtw
