#pragma once

// Interval partitions of the particle indices {0, ..., m-1}.
//
// A coalescing ensemble of m ordered particles is described by which
// consecutive runs of indices have merged. Each run (block) is led by its
// smallest index; the other members are attached to that leader and copy
// its motion. Indices are 0-based throughout the library.

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace coalesce {

class IntervalPartition {
public:
    IntervalPartition() = default;

    // Every index in its own block.
    static IntervalPartition discrete(std::size_t m);

    // Blocks given by their sizes, left to right. Sizes must be positive.
    static IntervalPartition from_block_sizes(std::span<const std::size_t> sizes);

    std::size_t size() const noexcept { return leader_of_.size(); }

    // Number of blocks.
    std::size_t length() const noexcept { return leaders_.size(); }

    // Leader (smallest index) of the block that contains `index`.
    std::size_t leader_of(std::size_t index) const { return leader_of_.at(index); }

    // Leaders in increasing order; leaders()[i] is the left end of block i.
    const std::vector<std::size_t>& leaders() const noexcept { return leaders_; }

    // Position of the block holding `index` in the left-to-right order.
    std::size_t block_of(std::size_t index) const;

    // Half-open index range [first, last) of block `block`.
    std::size_t block_begin(std::size_t block) const { return leaders_.at(block); }
    std::size_t block_end(std::size_t block) const
    {
        return block + 1 < leaders_.size() ? leaders_[block + 1] : size();
    }

    bool same_block(std::size_t i, std::size_t j) const
    {
        return leader_of(i) == leader_of(j);
    }

    // Merges block `block` with block `block + 1`. The right block attaches
    // to the left leader. This is the only mutation the type allows.
    void merge_with_right(std::size_t block);

    // True if every block of *this lies inside a block of `coarser`.
    bool refines(const IntervalPartition& coarser) const;

    std::vector<std::vector<std::size_t>> blocks() const;

    friend bool operator==(const IntervalPartition&, const IntervalPartition&) = default;

private:
    explicit IntervalPartition(std::vector<std::size_t> leader_of);
    void rebuild_leaders();

    std::vector<std::size_t> leader_of_;
    std::vector<std::size_t> leaders_;
};

// Level-set partition of a nondecreasing vector: i and j share a block iff
// positions[i] == positions[j]. Throws std::invalid_argument otherwise.
IntervalPartition partition_of(std::span<const double> positions);

// Leader coordinates (x at each block leader). Throws if x is not constant
// on a block or not nondecreasing.
std::vector<double> project(std::span<const double> x, const IntervalPartition& partition);

// Inverse of project: block i of the output is filled with reduced[i].
// Throws if reduced is not nondecreasing or has the wrong length.
std::vector<double> lift(std::span<const double> reduced, const IntervalPartition& partition);

bool is_nondecreasing(std::span<const double> values) noexcept;

} // namespace coalesce
