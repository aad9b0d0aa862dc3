#include "coalesce/partitions.hpp"

#include <string>

namespace coalesce {

IntervalPartition::IntervalPartition(std::vector<std::size_t> leader_of)
    : leader_of_(std::move(leader_of))
{
    rebuild_leaders();
}

void IntervalPartition::rebuild_leaders()
{
    leaders_.clear();
    for (std::size_t i = 0; i < leader_of_.size(); ++i) {
        if (leader_of_[i] == i) {
            leaders_.push_back(i);
        }
    }
}

IntervalPartition IntervalPartition::discrete(std::size_t m)
{
    std::vector<std::size_t> leader(m);
    for (std::size_t i = 0; i < m; ++i) {
        leader[i] = i;
    }
    return IntervalPartition(std::move(leader));
}

IntervalPartition IntervalPartition::from_block_sizes(std::span<const std::size_t> sizes)
{
    std::vector<std::size_t> leader;
    for (std::size_t size : sizes) {
        if (size == 0) {
            throw std::invalid_argument("interval partition: empty block");
        }
        const std::size_t first = leader.size();
        leader.insert(leader.end(), size, first);
    }
    return IntervalPartition(std::move(leader));
}

std::size_t IntervalPartition::block_of(std::size_t index) const
{
    const std::size_t lead = leader_of(index);
    // Leaders are sorted; binary search.
    std::size_t lo = 0;
    std::size_t hi = leaders_.size();
    while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        if (leaders_[mid] <= lead) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return lo;
}

void IntervalPartition::merge_with_right(std::size_t block)
{
    if (block + 1 >= leaders_.size()) {
        throw std::out_of_range("interval partition: no block to the right of " +
                                std::to_string(block));
    }
    const std::size_t left_leader = leaders_[block];
    for (std::size_t i = leaders_[block + 1]; i < block_end(block + 1); ++i) {
        leader_of_[i] = left_leader;
    }
    leaders_.erase(leaders_.begin() + static_cast<std::ptrdiff_t>(block) + 1);
}

bool IntervalPartition::refines(const IntervalPartition& coarser) const
{
    if (coarser.size() != size()) {
        return false;
    }
    for (std::size_t i = 0; i + 1 < size(); ++i) {
        if (same_block(i, i + 1) && !coarser.same_block(i, i + 1)) {
            return false;
        }
    }
    return true;
}

std::vector<std::vector<std::size_t>> IntervalPartition::blocks() const
{
    std::vector<std::vector<std::size_t>> out;
    out.reserve(length());
    for (std::size_t b = 0; b < length(); ++b) {
        auto& block = out.emplace_back();
        for (std::size_t i = block_begin(b); i < block_end(b); ++i) {
            block.push_back(i);
        }
    }
    return out;
}

bool is_nondecreasing(std::span<const double> values) noexcept
{
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (!(values[i - 1] <= values[i])) {
            return false;
        }
    }
    return true;
}

IntervalPartition partition_of(std::span<const double> positions)
{
    if (!is_nondecreasing(positions)) {
        throw std::invalid_argument("partition_of: positions must be nondecreasing");
    }
    std::vector<std::size_t> sizes;
    for (std::size_t i = 0; i < positions.size(); ++i) {
        if (i > 0 && positions[i] == positions[i - 1]) {
            ++sizes.back();
        } else {
            sizes.push_back(1);
        }
    }
    return IntervalPartition::from_block_sizes(sizes);
}

std::vector<double> project(std::span<const double> x, const IntervalPartition& partition)
{
    if (x.size() != partition.size()) {
        throw std::invalid_argument("project: length does not match the partition");
    }
    if (!is_nondecreasing(x)) {
        throw std::invalid_argument("project: x must be nondecreasing");
    }
    std::vector<double> reduced;
    reduced.reserve(partition.length());
    for (std::size_t b = 0; b < partition.length(); ++b) {
        const double value = x[partition.block_begin(b)];
        for (std::size_t i = partition.block_begin(b); i < partition.block_end(b); ++i) {
            if (x[i] != value) {
                throw std::invalid_argument("project: x is not constant on block " +
                                            std::to_string(b));
            }
        }
        reduced.push_back(value);
    }
    return reduced;
}

std::vector<double> lift(std::span<const double> reduced, const IntervalPartition& partition)
{
    if (reduced.size() != partition.length()) {
        throw std::invalid_argument("lift: reduced length must equal the number of blocks");
    }
    if (!is_nondecreasing(reduced)) {
        throw std::invalid_argument("lift: reduced vector must be nondecreasing");
    }
    std::vector<double> x(partition.size());
    for (std::size_t b = 0; b < partition.length(); ++b) {
        for (std::size_t i = partition.block_begin(b); i < partition.block_end(b); ++i) {
            x[i] = reduced[b];
        }
    }
    return x;
}

} // namespace coalesce
