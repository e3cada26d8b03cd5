#include "oracles.hpp"

#include "skilldtw/core.hpp"
#include "skilldtw/datagen.hpp"

#include <doctest.h>

using namespace skilldtw;
using oracle::univariate;

TEST_CASE("normalize univariate per series")
{
    const auto out = normalize(univariate({1, 2, 3}));
    const double sigma = std::sqrt(2.0 / 3.0);
    CHECK(out.series(0, 0) == doctest::Approx(-1.0 / sigma).epsilon(1e-12));
    CHECK(out.series(1, 0) == doctest::Approx(0.0));
    CHECK(out.series(2, 0) == doctest::Approx(1.0 / sigma).epsilon(1e-12));
    CHECK(out.series(2, 0) == doctest::Approx(1.2247).epsilon(1e-4));
    CHECK(out.constant_channels.empty());
}

TEST_CASE("normalize is idempotent on standardized input")
{
    std::mt19937_64 rng(3);
    const Series s = oracle::random_series(rng, 50, 3);
    const Series once = normalize(s).series;
    const Series twice = normalize(once).series;
    CHECK((once - twice).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("constant channel normalizes to zero and is reported")
{
    Series s(3, 2);
    s << 5, 1, 5, 2, 5, 3;
    const auto out = normalize(s);
    CHECK(out.series.col(0).isZero());
    REQUIRE(out.constant_channels.size() == 1);
    CHECK(out.constant_channels[0] == 0);
}

TEST_CASE("per-dataset normalization uses pooled statistics")
{
    Dataset d;
    d.variables = {"x"};
    d.items.push_back({univariate({0, 2}), Skill::Novice, "a"});
    d.items.push_back({univariate({4, 6}), Skill::Expert, "b"});
    const auto st = channel_stats(d);
    CHECK(st.mean(0) == doctest::Approx(3.0));
    CHECK(st.stddev(0) == doctest::Approx(std::sqrt(5.0)));
    const Dataset n = normalize(d, NormalizeMode::PerDataset);
    CHECK(n.items[0].series(0, 0) == doctest::Approx(-3.0 / std::sqrt(5.0)));
    CHECK_THROWS_AS(normalize(univariate({1, 2}), NormalizeMode::PerDataset), Error);
}

TEST_CASE("resample examples")
{
    const Series a = resample(univariate({0, 2}), 3);
    CHECK(a(0, 0) == 0.0);
    CHECK(a(1, 0) == doctest::Approx(1.0));
    CHECK(a(2, 0) == 2.0);

    const Series b = resample(univariate({0, 1, 2, 3}), 2);
    CHECK(b(0, 0) == 0.0);
    CHECK(b(1, 0) == 3.0);

    std::mt19937_64 rng(1);
    const Series s = oracle::random_series(rng, 17, 4);
    CHECK(resample(s, 17) == s);
}

TEST_CASE("resample preserves endpoints and stays within range")
{
    std::mt19937_64 rng(9);
    for (int t = 0; t < 20; ++t) {
        const Series s = oracle::random_series(rng, 5 + t, 2);
        const Series r = resample(s, 3 + 7 * t);
        CHECK(r.row(0) == s.row(0));
        CHECK(r.row(r.rows() - 1) == s.row(s.rows() - 1));
        for (Index v = 0; v < 2; ++v) {
            CHECK(r.col(v).maxCoeff() <= s.col(v).maxCoeff() + 1e-12);
            CHECK(r.col(v).minCoeff() >= s.col(v).minCoeff() - 1e-12);
        }
    }
}

TEST_CASE("validation rejects non-finite samples")
{
    Series s = univariate({1, 2, 3});
    s(1, 0) = std::nan("");
    CHECK_THROWS_AS(validate_series(s), Error);
    try {
        validate_series(s);
    } catch (const Error& e) {
        CHECK(e.code() == Errc::NonFinite);
    }
}

namespace {

Dataset corpus(const std::vector<std::pair<std::string, Skill>>& participants)
{
    Dataset d;
    d.variables = {"x"};
    for (const auto& [p, s] : participants)
        for (int k = 0; k < 5; ++k) d.items.push_back({univariate({double(k), 1.0}), s, p});
    return d;
}

}  // namespace

TEST_CASE("epidural40 split on the exact layout returns the corpus")
{
    GeneratorConfig cfg;
    cfg.seed = 4;
    cfg.base_length = 40;
    const Dataset d = synth_dataset(cfg);
    const Dataset s = epidural40_split(d);
    REQUIRE(s.size() == 40);
    for (std::size_t i = 0; i < 40; ++i) {
        CHECK(s.items[i].participant == d.items[i].participant);
        CHECK(s.items[i].series == d.items[i].series);
    }
}

TEST_CASE("epidural40 split fails with a single expert participant")
{
    const Dataset d = corpus({{"a", Skill::Novice}, {"b", Skill::Novice}, {"c", Skill::Novice}, {"d", Skill::Novice},
                              {"e", Skill::Intermediate}, {"f", Skill::Intermediate}, {"g", Skill::Expert}});
    try {
        epidural40_split(d);
        FAIL("expected InsufficientData");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::InsufficientData);
    }
}

TEST_CASE("epidural40 split picks the first participants by identifier")
{
    std::vector<std::pair<std::string, Skill>> ps;
    for (int k = 9; k >= 0; --k) ps.push_back({"n" + std::to_string(k), Skill::Novice});
    ps.push_back({"i0", Skill::Intermediate});
    ps.push_back({"i1", Skill::Intermediate});
    ps.push_back({"e0", Skill::Expert});
    ps.push_back({"e1", Skill::Expert});
    const Dataset s = epidural40_split(corpus(ps));
    std::vector<std::string> order;
    for (std::size_t i = 0; i < s.size(); i += 5) order.push_back(s.items[i].participant);
    CHECK(order == std::vector<std::string>{"n0", "i0", "e0", "e1", "i1", "n1", "n2", "n3"});
    const Dataset again = epidural40_split(corpus(ps));
    for (std::size_t i = 0; i < s.size(); ++i) CHECK(again.items[i].participant == s.items[i].participant);
}

TEST_CASE("parallel_for visits each index once and rethrows")
{
    std::vector<int> hits(100, 0);
    parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
    for (int h : hits) CHECK(h == 1);
    CHECK_THROWS_AS(parallel_for(10, 3, [](std::size_t i) {
                        if (i == 7) throw Error(Errc::InvalidArgument, "boom");
                    }),
                    Error);
}
