#include "oracles.hpp"

#include "skilldtw/cluster.hpp"

#include <doctest.h>

#include <set>

using namespace skilldtw;
using oracle::univariate;

namespace {

DistanceMatrix points_1d(const std::vector<double>& x)
{
    DistanceMatrix d(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = i + 1; j < x.size(); ++j) d.set(i, j, std::abs(x[i] - x[j]));
    return d;
}

// Agglomeration straight from the linkage definitions, recomputed from scratch each round.
std::vector<double> naive_heights(const Eigen::MatrixXd& d, int kind)
{
    std::vector<std::vector<std::size_t>> clusters;
    for (Index i = 0; i < d.rows(); ++i) clusters.push_back({std::size_t(i)});
    std::vector<double> heights;
    while (clusters.size() > 1) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t ba = 0, bb = 0;
        for (std::size_t a = 0; a < clusters.size(); ++a)
            for (std::size_t b = a + 1; b < clusters.size(); ++b) {
                const double v = oracle::linkage_distance(d, clusters[a], clusters[b], kind);
                if (v < best) {
                    best = v;
                    ba = a;
                    bb = b;
                }
            }
        heights.push_back(best);
        clusters[ba].insert(clusters[ba].end(), clusters[bb].begin(), clusters[bb].end());
        clusters.erase(clusters.begin() + std::ptrdiff_t(bb));
    }
    return heights;
}

}  // namespace

TEST_CASE("distance matrix storage")
{
    DistanceMatrix d(4);
    CHECK(d.stored_entries() == 6);
    d.set(2, 1, 3.5);
    CHECK(d(1, 2) == 3.5);
    CHECK(d(2, 1) == 3.5);
    CHECK(d(3, 3) == 0.0);
    CHECK(DistanceMatrix::from_dense(d.dense()).dense() == d.dense());
    CHECK_THROWS_AS(d.set(1, 1, 1.0), Error);
}

TEST_CASE("distance matrix counts and duplicates")
{
    std::mt19937_64 rng(1);
    const Series a = oracle::random_series(rng, 10, 2), b = oracle::random_series(rng, 12, 2);
    const auto before = dtw_call_count();
    const auto d = distance_matrix({a, b, a});
    CHECK(dtw_call_count() - before == 3);
    CHECK(d(0, 2) == 0.0);
    CHECK(d(0, 1) == doctest::Approx(dtw(a, b).normalized_distance()));
    DistanceMatrixOptions raw;
    raw.normalization = DistanceNormalization::Raw;
    CHECK(distance_matrix({a, b}, raw)(0, 1) == dtw(a, b).distance);

    std::vector<Series> many;
    for (int k = 0; k < 9; ++k) many.push_back(oracle::random_series(rng, 8 + k, 2));
    DistanceMatrixOptions par;
    par.jobs = 4;
    CHECK(distance_matrix(many).dense() == distance_matrix(many, par).dense());
}

TEST_CASE("hierarchical example and extremes")
{
    const auto d = distance_matrix({univariate({0}), univariate({0.1}), univariate({10}), univariate({10.1})});
    const auto c = hierarchical_cluster(d, Linkage::Average, 2);
    CHECK(c.assignment == std::vector<std::size_t>{1, 1, 2, 2});
    CHECK(c.dendrogram.size() == 3);
    CHECK(hierarchical_cluster(d, Linkage::Single, 4).assignment == std::vector<std::size_t>{1, 2, 3, 4});
    CHECK(hierarchical_cluster(d, Linkage::Complete, 1).assignment == std::vector<std::size_t>{1, 1, 1, 1});
    CHECK_THROWS_AS(hierarchical_cluster(d, Linkage::Average, 5), Error);
}

TEST_CASE("hierarchical clustering reproduces the scipy reference")
{
    const auto d = points_1d({0.0, 0.3, 1.1, 4.0, 4.6, 5.9, 9.0, 9.4});
    struct Ref {
        Linkage linkage;
        std::vector<std::array<double, 4>> z;
        std::vector<std::size_t> cut3;
    };
    const std::vector<Ref> refs = {
        {Linkage::Single,
         {{{0, 1, 0.3, 2}}, {{6, 7, 0.4, 2}}, {{3, 4, 0.6, 2}}, {{2, 8, 0.8, 3}}, {{5, 10, 1.3, 3}}, {{11, 12, 2.9, 6}}, {{9, 13, 3.1, 8}}},
         {1, 1, 1, 2, 2, 2, 3, 3}},
        {Linkage::Complete,
         {{{0, 1, 0.3, 2}}, {{6, 7, 0.4, 2}}, {{3, 4, 0.6, 2}}, {{2, 8, 1.1, 3}}, {{5, 10, 1.9, 3}}, {{9, 12, 5.4, 5}}, {{11, 13, 9.4, 8}}},
         {1, 1, 1, 2, 2, 2, 3, 3}},
        {Linkage::Average,
         {{{0, 1, 0.3, 2}}, {{6, 7, 0.4, 2}}, {{3, 4, 0.6, 2}}, {{2, 8, 0.95, 3}}, {{5, 10, 1.6, 3}}, {{11, 12, 4.366666666666666, 6}}, {{9, 13, 6.55, 8}}},
         {1, 1, 1, 2, 2, 2, 3, 3}},
    };
    for (const auto& ref : refs) {
        CAPTURE(to_string(ref.linkage));
        const auto c = hierarchical_cluster(d, ref.linkage, 3);
        REQUIRE(c.dendrogram.size() == ref.z.size());
        for (std::size_t t = 0; t < ref.z.size(); ++t) {
            const auto& m = c.dendrogram[t];
            CHECK(std::min(m.left, m.right) == std::size_t(ref.z[t][0]));
            CHECK(std::max(m.left, m.right) == std::size_t(ref.z[t][1]));
            CHECK(m.height == doctest::Approx(ref.z[t][2]).epsilon(1e-12));
            CHECK(m.size == std::size_t(ref.z[t][3]));
        }
        CHECK(c.assignment == ref.cut3);
        CHECK(cut_dendrogram(c.dendrogram, 8, 3) == ref.cut3);
    }
}

TEST_CASE("hierarchical heights match linkage definitions on random matrices")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.1, 10.0);
    for (int t = 0; t < 20; ++t) {
        const std::size_t n = 3 + std::size_t(t % 8);
        DistanceMatrix d(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) d.set(i, j, u(rng));
        const Linkage kinds[3] = {Linkage::Single, Linkage::Complete, Linkage::Average};
        for (int k = 0; k < 3; ++k) {
            const auto c = hierarchical_cluster(d, kinds[k], 1);
            const auto want = naive_heights(d.dense(), k);
            REQUIRE(c.dendrogram.size() == want.size());
            for (std::size_t s = 0; s < want.size(); ++s)
                CHECK(c.dendrogram[s].height == doctest::Approx(want[s]).epsilon(1e-12));
        }
    }
}

TEST_CASE("k-medoids on two blobs")
{
    std::vector<double> x;
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0, 1);
    for (int k = 0; k < 6; ++k) x.push_back(u(rng));
    for (int k = 0; k < 6; ++k) x.push_back(100 + u(rng));
    const auto d = points_1d(x);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto c = partitional_cluster(d, 2, seed);
        std::set<std::size_t> left(c.assignment.begin(), c.assignment.begin() + 6);
        std::set<std::size_t> right(c.assignment.begin() + 6, c.assignment.end());
        CHECK(left.size() == 1);
        CHECK(right.size() == 1);
        CHECK(*left.begin() != *right.begin());
        CHECK(c.assignment == partitional_cluster(d, 2, seed).assignment);
    }
    const auto all = partitional_cluster(d, 12, 3);
    CHECK(all.cost_trace.back() == 0.0);
    CHECK(std::set<std::size_t>(all.medoids.begin(), all.medoids.end()).size() == 12);
}

TEST_CASE("k-medoids cost never increases")
{
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0, 10);
    for (int t = 0; t < 20; ++t) {
        std::vector<double> x;
        for (int k = 0; k < 25; ++k) x.push_back(u(rng));
        const auto c = partitional_cluster(points_1d(x), 4, std::uint64_t(t));
        for (std::size_t s = 1; s < c.cost_trace.size(); ++s) CHECK(c.cost_trace[s] <= c.cost_trace[s - 1]);
        CHECK(c.cluster_count == 4);
    }
}

TEST_CASE("validity index examples")
{
    const auto d = points_1d({0, 0.1, 10, 10.1});
    Clustering c;
    c.assignment = {1, 1, 2, 2};
    c.cluster_count = 2;
    const auto cvi = cvi_suite(d, c);
    CHECK(cvi.at("silhouette").value == doctest::Approx(((1 - 0.1 / 10.05) + (1 - 0.1 / 9.95)) / 2));
    CHECK(cvi.at("silhouette").value == doctest::Approx(0.99));
    CHECK(cvi.at("dunn").value == doctest::Approx(99.0));
    CHECK(cvi.at("davies_bouldin").value == doctest::Approx((0.05 + 0.05) / 10.0));
    CHECK(!cvi.at("davies_bouldin").higher_is_better);

    Clustering one;
    one.assignment = {1, 1, 1, 1};
    one.cluster_count = 1;
    CHECK_THROWS_AS(cvi_suite(d, one), Error);
    Clustering singles;
    singles.assignment = {1, 2, 3, 4};
    singles.cluster_count = 4;
    try {
        cvi_suite(d, singles);
        FAIL("expected SingletonOnly");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::SingletonOnly);
    }
}

TEST_CASE("silhouette matches the sklearn reference")
{
    const auto d = points_1d({0.0, 0.3, 1.1, 4.0, 4.6, 5.9, 9.0, 9.4});
    Clustering c;
    c.assignment = {1, 1, 1, 2, 2, 2, 3, 3};
    c.cluster_count = 3;
    CHECK(cvi_suite(d, c).at("silhouette").value == doctest::Approx(0.778416572294947).epsilon(1e-12));
}

TEST_CASE("composition report")
{
    Dataset ds;
    ds.variables = {"x"};
    for (const char* p : {"A", "A", "B", "B"}) ds.items.push_back({univariate({1, 2}), Skill::Novice, p});
    Clustering c;
    c.assignment = {1, 1, 1, 1};
    c.cluster_count = 1;
    auto r = composition_report(c, ds);
    CHECK(r[0].by_participant.at("A") == 0.5);
    CHECK(r[0].by_participant.at("B") == 0.5);
    CHECK(r[0].by_skill.at("N") == 1.0);
    for (auto& it : ds.items) it.participant = "A";
    c.assignment = {1, 2, 1, 2};
    c.cluster_count = 2;
    r = composition_report(c, ds);
    for (const auto& comp : r) CHECK(comp.by_participant.at("A") == 1.0);
}
