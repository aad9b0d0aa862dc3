#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "coalesce/parallel.hpp"
#include "coalesce/rng.hpp"

using coalesce::Counter;

TEST_CASE("Philox4x32-10 known answers")
{
    CHECK(coalesce::philox4x32({0, 0, 0, 0}, {0, 0}) ==
          Counter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(coalesce::philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                               {0xffffffff, 0xffffffff}) ==
          Counter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(coalesce::philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                               {0xa4093822, 0x299f31d0}) ==
          Counter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("derived seeds separate streams and replicates")
{
    std::set<std::uint64_t> seen;
    for (std::uint64_t stream = 0; stream < 20; ++stream) {
        for (std::uint64_t r = 0; r < 50; ++r) {
            seen.insert(coalesce::derive_seed(2718, stream, r));
        }
    }
    CHECK(seen.size() == 1000);
    CHECK(coalesce::derive_seed(1, 2, 3) == coalesce::StreamId{1, 2, 3}.seed());
}

TEST_CASE("counter generator moments")
{
    coalesce::CounterRng rng(123);
    const int n = 200000;
    double sum = 0.0;
    double squares = 0.0;
    double below_sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal();
        sum += z;
        squares += z * z;
        below_sum += static_cast<double>(rng.below(10));
    }
    CHECK(std::abs(sum / n) < 4.0 / std::sqrt(n));
    CHECK(std::abs(squares / n - 1.0) < 4.0 * std::sqrt(2.0 / n));
    CHECK(std::abs(below_sum / n - 4.5) < 4.0 * std::sqrt(8.25 / n));

    double poisson = 0.0;
    for (int i = 0; i < 20000; ++i) {
        poisson += static_cast<double>(rng.poisson(45.0));
    }
    CHECK(std::abs(poisson / 20000 - 45.0) < 4.0 * std::sqrt(45.0 / 20000));

    coalesce::CounterRng a(7);
    coalesce::CounterRng b(7);
    for (int i = 0; i < 10; ++i) {
        CHECK(a() == b());
    }
}

TEST_CASE("random field is addressed, not sequential")
{
    const coalesce::RandomField field(99);
    const double first = field.normal(5, 3);
    (void)field.normal(6, 3);
    CHECK(field.normal(5, 3) == first);
    CHECK(field.normal(5, 4) != first);
    CHECK(field.normal2(5, 3) != first);
    CHECK(field.uniform(5, 3, 4, 0) != field.uniform(5, 4, 3, 0));
    CHECK(field.uniform(5, 3, 4, 0) != field.uniform(5, 3, 4, 1));
    const double u = field.uniform(1, 2, 3, 0);
    CHECK(u > 0.0);
    CHECK(u < 1.0);
}

TEST_CASE("replicate results do not depend on the worker count")
{
    auto job = [](std::size_t r) {
        coalesce::CounterRng rng(coalesce::StreamId{1, 2, r});
        double s = 0.0;
        for (int i = 0; i < 100; ++i) {
            s += rng.normal();
        }
        return s;
    };
    const auto serial = coalesce::run_replicates(1000, 1, job);
    for (unsigned workers : {2u, 3u, 8u}) {
        CHECK(coalesce::run_replicates(1000, workers, job) == serial);
    }
    CHECK_THROWS_AS(coalesce::run_replicates(100, 3,
                                             [](std::size_t r) -> int {
                                                 if (r == 77) {
                                                     throw std::runtime_error("boom");
                                                 }
                                                 return 0;
                                             }),
                    std::runtime_error);
}
