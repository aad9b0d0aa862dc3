#include <doctest.h>

#include <random>
#include <stdexcept>
#include <vector>

#include "coalesce/partitions.hpp"

using coalesce::IntervalPartition;
using Blocks = std::vector<std::vector<std::size_t>>;

TEST_CASE("partition_of groups equal coordinates")
{
    CHECK(coalesce::partition_of(std::vector<double>{1, 1, 3}).blocks() == Blocks{{0, 1}, {2}});
    CHECK(coalesce::partition_of(std::vector<double>{0, 1, 2}).blocks() == Blocks{{0}, {1}, {2}});
    const IntervalPartition full = coalesce::partition_of(std::vector<double>{5, 5, 5});
    CHECK(full.length() == 1);
    CHECK(full.leader_of(2) == 0);
    CHECK_THROWS_AS(coalesce::partition_of(std::vector<double>{2, 1}), std::invalid_argument);
}

TEST_CASE("project and lift")
{
    const std::vector<std::size_t> sizes{2, 1};
    const IntervalPartition pi = IntervalPartition::from_block_sizes(sizes);
    CHECK(coalesce::project(std::vector<double>{5, 5, 7}, pi) == std::vector<double>{5, 7});
    CHECK(coalesce::lift(std::vector<double>{5, 7}, pi) == std::vector<double>{5, 5, 7});

    const IntervalPartition discrete = IntervalPartition::discrete(3);
    CHECK(coalesce::project(std::vector<double>{0, 1, 2}, discrete) == std::vector<double>{0, 1, 2});

    const std::vector<std::size_t> one{3};
    const IntervalPartition single = IntervalPartition::from_block_sizes(one);
    CHECK(coalesce::project(std::vector<double>{2, 2, 2}, single) == std::vector<double>{2});
    CHECK(coalesce::lift(std::vector<double>{3}, single) == std::vector<double>{3, 3, 3});

    CHECK_THROWS_AS(coalesce::project(std::vector<double>{5, 6, 7}, pi), std::invalid_argument);
    CHECK_THROWS_AS(coalesce::lift(std::vector<double>{7, 5}, pi), std::invalid_argument);
    CHECK_THROWS_AS(coalesce::lift(std::vector<double>{1, 2, 3}, pi), std::invalid_argument);
    const std::vector<std::size_t> bad{2, 0};
    CHECK_THROWS_AS(IntervalPartition::from_block_sizes(bad), std::invalid_argument);
}

TEST_CASE("merges only coarsen")
{
    std::mt19937_64 gen(7);
    for (int trial = 0; trial < 200; ++trial) {
        IntervalPartition pi = IntervalPartition::discrete(8);
        while (pi.length() > 1) {
            const IntervalPartition before = pi;
            std::uniform_int_distribution<std::size_t> pick(0, pi.length() - 2);
            pi.merge_with_right(pick(gen));
            CHECK(before.refines(pi));
            CHECK_FALSE(pi.refines(before));
            // Leaders stay the smallest index of their block.
            for (std::size_t i = 0; i < pi.size(); ++i) {
                CHECK(pi.leader_of(i) <= i);
                CHECK(pi.leader_of(pi.leader_of(i)) == pi.leader_of(i));
            }
        }
        CHECK_THROWS_AS(pi.merge_with_right(0), std::out_of_range);
    }
}

TEST_CASE("lift inverts project on random level sets")
{
    std::mt19937_64 gen(11);
    std::uniform_int_distribution<int> site(-3, 3);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<double> x(6);
        for (double& v : x) {
            v = site(gen);
        }
        std::sort(x.begin(), x.end());
        const IntervalPartition pi = coalesce::partition_of(x);
        const std::vector<double> reduced = coalesce::project(x, pi);
        CHECK(reduced.size() == pi.length());
        CHECK(coalesce::lift(reduced, pi) == x);
        for (std::size_t b = 0; b < pi.length(); ++b) {
            CHECK(pi.block_of(pi.block_begin(b)) == b);
        }
    }
}
