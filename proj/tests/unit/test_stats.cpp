#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "coalesce/rng.hpp"
#include "coalesce/stats.hpp"

using coalesce::stats::CategoricalSample;

namespace {

CategoricalSample coin(double bias, std::size_t n, std::uint64_t seed)
{
    CategoricalSample s(2);
    coalesce::CounterRng rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        s.add(rng.uniform() < bias ? 1 : 0);
    }
    return s;
}

} // namespace

TEST_CASE("tv distance")
{
    CategoricalSample a(4);
    CategoricalSample b(4);
    a.add(0, 3);
    a.add(1, 1);
    b.add(0, 3);
    b.add(1, 1);
    CHECK(coalesce::stats::tv_distance(a, b) == 0.0);

    CategoricalSample c(4);
    c.add(2, 5);
    CHECK(coalesce::stats::tv_distance(a, c) == 1.0);

    CategoricalSample d(4);
    d.add(0, 1);
    d.add(1, 1);
    CHECK(coalesce::stats::tv_distance(a, d) == doctest::Approx(0.25));
    CHECK(coalesce::stats::tv_scale(a, d) == doctest::Approx(std::sqrt(2.0 / 2.0)));

    CHECK_THROWS_AS(coalesce::stats::tv_distance(a, CategoricalSample(8)), std::invalid_argument);
    CHECK_THROWS_AS(a.add(4), std::out_of_range);
}

TEST_CASE("merge is order independent")
{
    CategoricalSample parts[3] = {CategoricalSample(16), CategoricalSample(16), CategoricalSample(16)};
    coalesce::CounterRng rng(9);
    for (int i = 0; i < 300; ++i) {
        parts[i % 3].add(rng.below(16));
    }
    CategoricalSample left(16);
    left.merge(parts[0]);
    left.merge(parts[1]);
    left.merge(parts[2]);
    CategoricalSample right(16);
    right.merge(parts[2]);
    right.merge(parts[0]);
    right.merge(parts[1]);
    CHECK(left.counts() == right.counts());
    CHECK(left.total() == 300);
}

TEST_CASE("chi-square survival matches the distribution")
{
    for (double dof : {1.0, 3.0, 10.0, 40.0}) {
        const boost::math::chi_squared dist(dof);
        for (double x : {0.5, 2.0, 9.0, 30.0}) {
            CHECK(coalesce::stats::chi_square_survival(x, dof) ==
                  doctest::Approx(boost::math::cdf(boost::math::complement(dist, x))).epsilon(1e-12));
        }
    }
    CHECK(coalesce::stats::chi_square_survival(0.0, 3.0) == 1.0);
}

TEST_CASE("two-sample test")
{
    const CategoricalSample fair = coin(0.5, 10000, 1);
    const auto same = coalesce::stats::two_sample_test(fair, fair);
    CHECK(same.p_value == 1.0);
    CHECK(same.pass);

    const auto biased = coalesce::stats::two_sample_test(fair, coin(0.9, 10000, 2));
    CHECK(biased.p_value < 1e-6);
    CHECK_FALSE(biased.pass);

    const auto twin = coalesce::stats::two_sample_test(fair, coin(0.5, 10000, 3));
    CHECK(twin.p_value > 1e-3);
    CHECK(twin.pass);

    CHECK_THROWS_AS(coalesce::stats::two_sample_test(coin(0.5, 10, 4), coin(0.5, 10, 5)),
                    std::invalid_argument);
    CategoricalSample one(2);
    one.add(1, 2000);
    CHECK_THROWS_AS(coalesce::stats::two_sample_test(one, one), std::invalid_argument);
}

TEST_CASE("two-sample test size under the null")
{
    // Fraction of rejections at level 0.05 for equal laws on 6 symbols.
    int rejections = 0;
    const int trials = 400;
    for (int trial = 0; trial < trials; ++trial) {
        CategoricalSample a(8);
        CategoricalSample b(8);
        coalesce::CounterRng rng(coalesce::StreamId{5, 0, static_cast<std::uint64_t>(trial)});
        for (int i = 0; i < 2000; ++i) {
            a.add(rng.below(6));
            b.add(rng.below(6));
        }
        coalesce::stats::Thresholds level;
        level.p_value = 0.05;
        level.tv_multiplier = 1e9;
        rejections += coalesce::stats::two_sample_test(a, b, level).pass ? 0 : 1;
    }
    const double rate = static_cast<double>(rejections) / trials;
    CHECK(rate > 0.02);
    CHECK(rate < 0.09);
}

TEST_CASE("report json")
{
    const auto report = coalesce::stats::two_sample_test(coin(0.5, 2000, 6), coin(0.5, 2000, 7));
    const auto j = coalesce::stats::to_json(report);
    CHECK(j["n"][0] == 2000);
    CHECK(j["verdict"] == (report.pass ? "pass" : "fail"));
    CHECK(j.contains("p_value"));
}

TEST_CASE("mean estimate")
{
    const std::vector<double> v{1, 2, 3, 4};
    const auto e = coalesce::stats::mean_estimate(v);
    CHECK(e.mean == 2.5);
    CHECK(e.n == 4);
    CHECK(e.standard_error == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
    CHECK(coalesce::stats::mean_estimate(std::vector<double>{}).n == 0);
}
