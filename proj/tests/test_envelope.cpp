#include "oracles.hpp"

#include "skilldtw/envelope.hpp"

#include <doctest.h>

using namespace skilldtw;
using oracle::univariate;

TEST_CASE("keogh envelope examples")
{
    const Series c = Series::Constant(7, 2, 3.5);
    for (Index r : {0, 2, 6}) {
        const auto e = keogh_envelope(c, r);
        CHECK(e.upper == c);
        CHECK(e.lower == c);
    }
    const auto e = keogh_envelope(univariate({1, 5, 1}), 1);
    CHECK(e.upper == univariate({5, 5, 5}));
    CHECK(e.lower == univariate({1, 1, 1}));
    std::mt19937_64 rng(1);
    const Series s = oracle::random_series(rng, 9, 3);
    CHECK(keogh_envelope(s, 0).upper == s);
    CHECK(keogh_envelope(s, 0).lower == s);
    CHECK_THROWS_AS(keogh_envelope(s, 9), Error);
}

TEST_CASE("keogh envelope matches a naive sliding window")
{
    std::mt19937_64 rng(2);
    for (int t = 0; t < 30; ++t) {
        const Series s = oracle::random_series(rng, 5 + 3 * t, 2);
        const Index r = t % (s.rows() - 1);
        const auto e = keogh_envelope(s, r);
        const auto [up, lo] = oracle::naive_envelope(s, r);
        CHECK(e.upper == up);
        CHECK(e.lower == lo);
    }
}

TEST_CASE("lb_keogh examples and soundness")
{
    Envelope env{univariate({5, 5, 5}), univariate({1, 1, 1}), 1, 1};
    CHECK(lb_keogh(env, univariate({6, 6, 6})) == doctest::Approx(std::sqrt(3.0)));
    std::mt19937_64 rng(3);
    const Series s = oracle::random_series(rng, 20, 2);
    CHECK(lb_keogh(keogh_envelope(s, 3), s) == 0.0);
    for (int t = 0; t < 50; ++t) {
        const Series q = oracle::random_series(rng, 15, 2), c = oracle::random_series(rng, 15, 2);
        const Index r = t % 5;
        CHECK(lb_keogh(keogh_envelope(q, r), c) <= dtw(q, c, ConstraintBand::sakoe_chiba(r)).distance + 1e-12);
    }
}

TEST_CASE("summative envelope")
{
    const Envelope a{univariate({1, 2}), univariate({0, 0}), 0, 1};
    const Envelope b{univariate({2, 1}), univariate({-1, 0.5}), 0, 1};
    const auto s = summative_envelope({a, b});
    CHECK(s.upper == univariate({2, 2}));
    CHECK(s.lower == univariate({-1, 0}));
    CHECK(s.source_count == 2);
    CHECK(summative_envelope({a}).upper == a.upper);
    CHECK_THROWS_AS(summative_envelope({}), Error);
}

TEST_CASE("outside distance examples")
{
    const Envelope e{univariate({2}), univariate({0}), 0, 1};
    CHECK(outside_distance(univariate({3}), e).distance == 1.0);
    CHECK(outside_distance(univariate({-2}), e).distance == 2.0);
    CHECK(outside_distance(univariate({1}), e).distance == 0.0);

    Series up(1, 2), lo(1, 2), x(1, 2);
    up << 1, 1;
    lo << 0, 0;
    x << 4, -4;
    const auto d = outside_distance(x, Envelope{up, lo, 0, 1});
    CHECK(d.distance == doctest::Approx(5.0));
    CHECK(d.proportion_outside() == 1.0);
    CHECK_THROWS_AS(outside_distance(univariate({1, 2}), e), Error);
}

TEST_CASE("contributors score zero and excursions are charged exactly")
{
    std::mt19937_64 rng(4);
    for (int t = 0; t < 10; ++t) {
        std::vector<Series> members;
        std::vector<Envelope> envs;
        for (int k = 0; k < 4; ++k) {
            members.push_back(oracle::random_series(rng, 30, 2));
            envs.push_back(keogh_envelope(members.back(), 2));
        }
        const auto sum = summative_envelope(envs);
        for (const auto& m : members) CHECK(outside_distance(m, sum).distance == 0.0);

        // Push one contributor above its own envelope by delta at step 10, channel 0.
        const Index step = 10;
        const double margin = sum.upper(step, 0) - envs[0].upper(step, 0);
        for (double delta : {margin + 0.5, margin * 0.5, margin + 3.0}) {
            Series x = members[0];
            x(step, 0) = envs[0].upper(step, 0) + delta;
            const auto d = outside_distance(x, sum);
            CHECK(d.trace(step) == doctest::Approx(std::max(0.0, delta - margin)).epsilon(1e-12));
        }
        // Exceeding the summative bound itself by delta adds exactly delta.
        Series y = members[1];
        y(step, 1) = sum.lower(step, 1) - 2.5;
        CHECK(outside_distance(y, sum).trace(step) == doctest::Approx(2.5).epsilon(1e-12));
    }
}

TEST_CASE("envelope prefix and resample")
{
    std::mt19937_64 rng(5);
    const auto e = keogh_envelope(oracle::random_series(rng, 40, 2), 3);
    const auto p = envelope_prefix(e, 12);
    CHECK(p.length() == 12);
    CHECK(p.upper == e.upper.topRows(12));
    const auto r = resample(e, 80);
    CHECK(r.length() == 80);
    CHECK((r.upper.array() >= r.lower.array()).all());
    CHECK(window_from_percent(500, 5.0) == 25);
    CHECK(window_from_percent(3, 100.0) == 2);
}

TEST_CASE("cluster envelope contains its contributors after resampling")
{
    std::mt19937_64 rng(6);
    const Series proto = oracle::random_series(rng, 30, 2);
    std::vector<Series> members;
    for (int k = 0; k < 6; ++k) members.push_back(proto + oracle::random_series(rng, 30, 2, 0.1 * (k + 1)));
    members.push_back(oracle::random_series(rng, 45, 2));
    const auto ce = cluster_envelope(proto, members, 2, 4);
    CHECK(ce.contributors == std::vector<std::size_t>{0, 1, 2, 3});
    CHECK(outside_distance(proto, ce.envelope).distance == 0.0);
    for (auto k : ce.contributors) CHECK(outside_distance(members[k], ce.envelope).distance == 0.0);
    CHECK(ce.envelope.source_count == 5);
}
