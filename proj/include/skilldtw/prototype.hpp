#pragma once

#include "skilldtw/core.hpp"
#include "skilldtw/distance.hpp"

#include <string>
#include <vector>

namespace skilldtw {

enum class ProtoMethod { Mean, Pam, Dba, SoftDtw, DtwMpDependent, DtwMpIndependent };

const char* to_string(ProtoMethod m) noexcept;
ProtoMethod proto_method_from_string(const std::string& s);  // mean|pam|dba|softdtw|dtwmp-d|dtwmp-i

struct Prototype {
    Series series;
    ProtoMethod method = ProtoMethod::Mean;
    std::size_t source_count = 0;
};

enum class MultiVariant { Dependent, Independent };

// Elementwise mean after resampling every member to the (lower) median member length.
Prototype mean_prototype(const std::vector<Series>& cluster);

// Medoid under a precomputed symmetric distance matrix (lowest distance sum). Ties go to
// the lower index.
Prototype pam_prototype(const std::vector<Series>& cluster, const Eigen::MatrixXd& distances);
Prototype pam_prototype(const std::vector<Series>& cluster, Metric metric = Metric::Euclidean,
                        const ConstraintBand& band = ConstraintBand::none());
std::size_t pam_index(const Eigen::MatrixXd& distances);

Eigen::MatrixXd pairwise_dtw(const std::vector<Series>& cluster, Metric metric = Metric::Euclidean,
                             const ConstraintBand& band = ConstraintBand::none(), int jobs = 1);

struct DbaOptions {
    int iterations = 10;
    double tolerance = 1e-6;  // relative objective decrease that stops iteration
    int jobs = 1;
};

// DTW barycenter averaging under squared-Euclidean alignment cost. The
// prototype length is fixed by init. objective_trace (optional) receives
// sum_k DTW(proto, member_k) for the initial prototype and after each accepted
// iteration; it is non-increasing.
Prototype dba_prototype(const std::vector<Series>& cluster, const Series& init, const DbaOptions& options = {},
                        std::vector<double>* objective_trace = nullptr);

double dba_objective(const std::vector<Series>& cluster, const Series& proto);

struct SoftDtwBarycenterOptions {
    double gamma = 1.0;
    int max_iterations = 50;
    double step = 1e-2;
    int max_halvings = 20;
    double gradient_tolerance = 0.0;  // stop once ||grad F|| falls below this
    int jobs = 1;
};

// Gradient descent on F(p) = sum_k softdtw(p, member_k). A step that raises F
// or makes it non-finite is halved and retried.
Prototype softdtw_barycenter(const std::vector<Series>& cluster, const Series& init,
                             const SoftDtwBarycenterOptions& options = {},
                             std::vector<double>* objective_trace = nullptr);

double softdtw_objective(const std::vector<Series>& cluster, const Series& proto, double gamma,
                         Series* gradient = nullptr, int jobs = 1);

// Merge two series along their warping path. Element j is
// (1 - weight) * a[i1] + weight * b[i2] for path step j = (i1, i2).
// The independent variant aligns and merges each variable separately and
// resamples every channel to the longest merged channel.
Series dtwmp_pair(const Series& a, const Series& b, MultiVariant variant = MultiVariant::Dependent,
                  double weight = 0.5, Metric metric = Metric::Euclidean);

// Pairwise merge order: PAM medoid first, then remaining members by ascending
// DTW distance to the medoid (ties by index).
std::vector<std::size_t> dtwmp_merge_order(const std::vector<Series>& cluster, Metric metric = Metric::Euclidean);

// Iterated pairwise merge in that order; the accumulated prototype is a running
// mean, so the k-th newcomer is weighted 1/(k+1).
Prototype dtwmp_multi(const std::vector<Series>& cluster, MultiVariant variant = MultiVariant::Dependent,
                      Metric metric = Metric::Euclidean);

struct PrototypeOptions {
    ProtoMethod method = ProtoMethod::DtwMpDependent;
    Metric metric = Metric::Euclidean;
    double gamma = 1.0;
    int dba_iterations = 10;
    int softdtw_iterations = 50;
    int jobs = 1;
};

// Builds a prototype with any method, using the documented defaults
// (DBA and SoftDTW start from the PAM medoid).
Prototype make_prototype(const std::vector<Series>& cluster, const PrototypeOptions& options);

}  // namespace skilldtw
