#include "oracles.hpp"

#include "skilldtw/classify.hpp"

#include <doctest.h>

using namespace skilldtw;
using oracle::univariate;

namespace {

Dataset make(const std::vector<std::pair<Series, Skill>>& items)
{
    Dataset d;
    d.variables = {"x"};
    int k = 0;
    for (const auto& [s, skill] : items) d.items.push_back({s, skill, "p" + std::to_string(k++)});
    return d;
}

// Three well separated classes: inter-class DTW far above intra-class.
Dataset separable(std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    Dataset d;
    d.variables = {"x", "y"};
    const Skill skills[3] = {Skill::Novice, Skill::Intermediate, Skill::Expert};
    for (int c = 0; c < 3; ++c)
        for (int k = 0; k < 6; ++k) {
            Series s = oracle::random_series(rng, 12 + k % 3, 2, 0.05);
            s.array() += 10.0 * c;
            d.items.push_back({s, skills[c], "p" + std::to_string(k % 2)});
        }
    return d;
}

}  // namespace

TEST_CASE("knn examples")
{
    const Dataset train = make({{univariate({0}), Skill::Novice}, {univariate({10}), Skill::Expert}});
    const auto r = knn_classify(univariate({1}), train, 1);
    CHECK(r.label == "N");
    CHECK(r.neighbors[0].distance == 1.0);
    const auto same = knn_classify(univariate({10}), train, 1);
    CHECK(same.label == "E");
    CHECK(same.neighbors[0].distance == 0.0);
    CHECK_THROWS_AS(knn_classify(univariate({1}), train, 3), Error);
    CHECK(knn_classify(univariate({1}), train, 1, LabelField::Participant).label == "p0");
}

TEST_CASE("vote tie goes to the label of the nearest neighbor")
{
    CHECK(vote({{0, 1.0, "N"}, {1, 2.0, "E"}}) == "N");
    CHECK(vote({{0, 1.0, "E"}, {1, 2.0, "N"}, {2, 3.0, "N"}}) == "N");
    const Dataset train = make({{univariate({1}), Skill::Novice}, {univariate({-2}), Skill::Expert}});
    CHECK(knn_classify(univariate({0}), train, 2).label == "N");
}

TEST_CASE("centroid examples")
{
    std::map<std::string, Prototype> protos;
    protos["N"] = {univariate({0, 0}), ProtoMethod::Mean, 1};
    protos["E"] = {univariate({10, 10}), ProtoMethod::Mean, 1};
    const auto r = centroid_classify(univariate({2, 2}), protos, {ConstraintBand::none(), Metric::Manhattan});
    CHECK(r.label == "N");
    CHECK(r.distances.at("N") < r.distances.at("E"));
    CHECK(centroid_classify(univariate({10, 10}), protos).label == "E");
    std::map<std::string, Prototype> one{{"N", protos["N"]}};
    CHECK_THROWS_AS(centroid_classify(univariate({1}), one), Error);
}

TEST_CASE("cross validation on a separable set")
{
    const Dataset d = separable(3);
    const auto r = cross_validate(d, ClassifierMethod{}, Scheme{});
    CHECK(r.accuracy == 1.0);
    CHECK(r.labels == std::vector<std::string>{"E", "I", "N"});
    CHECK(r.confusion.sum() == int(d.size()));
    CHECK(r.confusion.trace() == int(d.size()));
    for (const char* m : {"mean", "pam", "dba", "dtwmp-d"}) {
        ClassifierMethod cm{ClassifierMethod::Kind::Centroid, 1, {}, };
        cm.prototype.method = proto_method_from_string(m);
        const auto c = cross_validate(d, cm, Scheme{Scheme::Kind::KFold, 3, 7});
        CHECK(c.accuracy == 1.0);
    }
}

TEST_CASE("cross validation with two opposite items scores zero")
{
    const Dataset d = make({{univariate({0, 1}), Skill::Novice}, {univariate({5, 6}), Skill::Expert}});
    CHECK(cross_validate(d, ClassifierMethod{}, Scheme{}).accuracy == 0.0);
}

TEST_CASE("k-fold is deterministic and balanced")
{
    const Dataset d = separable(5);
    const Scheme s{Scheme::Kind::KFold, 4, 99};
    const auto f = assign_folds(d.size(), s);
    CHECK(f == assign_folds(d.size(), s));
    std::vector<int> sizes(4, 0);
    for (auto x : f) sizes[x]++;
    for (int sz : sizes) CHECK((sz == 4 || sz == 5));
    const auto a = cross_validate(d, ClassifierMethod{}, s), b = cross_validate(d, ClassifierMethod{}, s);
    CHECK(a.confusion == b.confusion);
    for (std::size_t i = 0; i < d.size(); ++i) CHECK(a.per_item[i].predicted == b.per_item[i].predicted);
}

TEST_CASE("confusion invariants and job independence")
{
    Dataset d = separable(6);
    std::mt19937_64 rng(1);
    for (auto& it : d.items) it.series += oracle::random_series(rng, it.series.rows(), 2, 8.0);
    CrossValidationOptions one, four;
    four.jobs = 4;
    const auto a = cross_validate(d, ClassifierMethod{}, Scheme{}, one);
    const auto b = cross_validate(d, ClassifierMethod{}, Scheme{}, four);
    CHECK(a.confusion == b.confusion);
    CHECK(a.accuracy == doctest::Approx(double(a.confusion.trace()) / double(d.size())));
    for (Index r = 0; r < a.confusion.rows(); ++r) CHECK(a.confusion.row(r).sum() == 6);
}

TEST_CASE("centroid fold missing a label is rejected")
{
    const Dataset d = make({{univariate({0, 1}), Skill::Novice},
                            {univariate({0, 2}), Skill::Novice},
                            {univariate({5, 6}), Skill::Expert}});
    ClassifierMethod cm;
    cm.kind = ClassifierMethod::Kind::Centroid;
    try {
        cross_validate(d, cm, Scheme{});
        FAIL("expected DegenerateFold");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::DegenerateFold);
    }
}
