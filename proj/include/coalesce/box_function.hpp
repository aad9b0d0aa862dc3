#pragma once

// Balls-in-boxes indicator arrays and the test functions evaluated on them.
//
// For balls b_0..b_{m-1} and box boundaries y_0 <= ... <= y_{n-1}, entry
// (i, j) of the indicator array is 1 when b_i lies in the closed box
// [y_j, y_{j+1}]. Arrays are flattened ball-major: bit i*(n-1)+j of the
// symbol code holds entry (i, j).

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "coalesce/partitions.hpp"

namespace coalesce {

class IndicatorArray {
public:
    IndicatorArray(std::size_t balls, std::size_t boxes);

    std::size_t balls() const noexcept { return balls_; }
    std::size_t boxes() const noexcept { return boxes_; }

    bool at(std::size_t ball, std::size_t box) const { return bits_.at(ball * boxes_ + box) != 0; }
    void set(std::size_t ball, std::size_t box, bool value)
    {
        bits_.at(ball * boxes_ + box) = value ? 1 : 0;
    }

    // Flattened symbol; requires balls * boxes <= 63.
    std::uint64_t code() const;

    friend bool operator==(const IndicatorArray&, const IndicatorArray&) = default;

private:
    std::size_t balls_;
    std::size_t boxes_;
    std::vector<std::uint8_t> bits_;
};

// Throws std::invalid_argument when fewer than two boundaries are given or
// the boundaries decrease somewhere. Coincident boundaries are accepted:
// they arise whenever moving boxes coalesce, and give a degenerate box.
IndicatorArray indicator_array(std::span<const double> balls, std::span<const double> boxes);

// Symbol code of indicator_array(balls, boxes) without materialising it.
std::uint64_t indicator_code(std::span<const double> balls, std::span<const double> boxes);

/// A bounded function g on {0,1}^{m(n-1)}, addressed by symbol code.
class BoxFunction {
public:
    using Rule = std::function<double(std::uint64_t)>;

    // Largest bit count for which an explicit table is stored.
    static constexpr std::size_t kMaxTableBits = 20;

    static BoxFunction constant(std::size_t m, std::size_t n, double value);

    // Entry (ball, box) of the array.
    static BoxFunction bit(std::size_t m, std::size_t n, std::size_t ball, std::size_t box);

    // Product of all entries.
    static BoxFunction all_bits(std::size_t m, std::size_t n);

    static BoxFunction from_table(std::size_t m, std::size_t n, std::vector<double> table);

    // Explicit table of i.i.d. uniform values on [-1, 1].
    static BoxFunction random_table(std::size_t m, std::size_t n, std::uint64_t seed);

    // Same law as random_table but evaluated lazily by hashing the symbol,
    // so it works for bit counts where a table would be too large.
    static BoxFunction random_rule(std::size_t m, std::size_t n, std::uint64_t seed);

    // prod_j prod_{i in A_j} 1{ball i in [y_{2j}, y_{2j+1}]} for the blocks
    // A_j of `groups`; n = 2 * groups.length() boundaries. With this g the
    // duality reduces to "group j of the balls sits in box pair j".
    static BoxFunction interval_product(const IntervalPartition& groups);

    // prod_i (1 - prod_j (1 - 1{ball i in [y_{2j}, y_{2j+1}]})): every ball
    // lies in the union of the k even boxes; n = 2k boundaries.
    static BoxFunction union_cover(std::size_t m, std::size_t intervals);

    std::size_t balls() const noexcept { return m_; }
    std::size_t boundaries() const noexcept { return n_; }
    std::size_t bit_count() const noexcept { return m_ * (n_ - 1); }
    bool has_table() const noexcept { return !table_.empty(); }

    double operator()(std::uint64_t code) const;
    double operator()(const IndicatorArray& array) const;

private:
    BoxFunction(std::size_t m, std::size_t n);

    std::size_t m_;
    std::size_t n_;
    std::vector<double> table_;
    Rule rule_;
};

// g evaluated at the indicator array of balls x in boxes y.
double gbar(const BoxFunction& g, std::span<const double> x, std::span<const double> y);

} // namespace coalesce
