#include "coalesce/box_function.hpp"

#include <stdexcept>
#include <string>

#include "coalesce/rng.hpp"

namespace coalesce {

IndicatorArray::IndicatorArray(std::size_t balls, std::size_t boxes)
    : balls_(balls), boxes_(boxes), bits_(balls * boxes, 0)
{
}

std::uint64_t IndicatorArray::code() const
{
    if (bits_.size() > 63) {
        throw std::length_error("indicator array too large for a 64-bit symbol");
    }
    std::uint64_t out = 0;
    for (std::size_t k = 0; k < bits_.size(); ++k) {
        out |= static_cast<std::uint64_t>(bits_[k]) << k;
    }
    return out;
}

namespace {

void require_boundaries(std::span<const double> boxes)
{
    if (boxes.size() < 2) {
        throw std::invalid_argument("indicator array: need at least two box boundaries");
    }
    if (!is_nondecreasing(boxes)) {
        throw std::invalid_argument("indicator array: box boundaries must not decrease");
    }
}

} // namespace

IndicatorArray indicator_array(std::span<const double> balls, std::span<const double> boxes)
{
    require_boundaries(boxes);
    IndicatorArray array(balls.size(), boxes.size() - 1);
    for (std::size_t i = 0; i < balls.size(); ++i) {
        for (std::size_t j = 0; j + 1 < boxes.size(); ++j) {
            array.set(i, j, boxes[j] <= balls[i] && balls[i] <= boxes[j + 1]);
        }
    }
    return array;
}

std::uint64_t indicator_code(std::span<const double> balls, std::span<const double> boxes)
{
    require_boundaries(boxes);
    const std::size_t width = boxes.size() - 1;
    if (balls.size() * width > 63) {
        throw std::length_error("indicator array too large for a 64-bit symbol");
    }
    std::uint64_t out = 0;
    for (std::size_t i = 0; i < balls.size(); ++i) {
        for (std::size_t j = 0; j < width; ++j) {
            if (boxes[j] <= balls[i] && balls[i] <= boxes[j + 1]) {
                out |= std::uint64_t{1} << (i * width + j);
            }
        }
    }
    return out;
}

BoxFunction::BoxFunction(std::size_t m, std::size_t n) : m_(m), n_(n)
{
    if (m == 0 || n < 2) {
        throw std::invalid_argument("box function: need m >= 1 balls and n >= 2 boundaries");
    }
    if (m * (n - 1) > 63) {
        throw std::invalid_argument("box function: more than 63 indicator bits");
    }
}

BoxFunction BoxFunction::constant(std::size_t m, std::size_t n, double value)
{
    BoxFunction g(m, n);
    g.rule_ = [value](std::uint64_t) { return value; };
    return g;
}

BoxFunction BoxFunction::bit(std::size_t m, std::size_t n, std::size_t ball, std::size_t box)
{
    BoxFunction g(m, n);
    if (ball >= m || box + 1 >= n) {
        throw std::out_of_range("box function: bit index outside the array");
    }
    const std::size_t shift = ball * (n - 1) + box;
    g.rule_ = [shift](std::uint64_t code) { return static_cast<double>((code >> shift) & 1u); };
    return g;
}

BoxFunction BoxFunction::all_bits(std::size_t m, std::size_t n)
{
    BoxFunction g(m, n);
    const std::size_t bits = g.bit_count();
    const std::uint64_t full = bits == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << bits) - 1;
    g.rule_ = [full](std::uint64_t code) { return code == full ? 1.0 : 0.0; };
    return g;
}

BoxFunction BoxFunction::from_table(std::size_t m, std::size_t n, std::vector<double> table)
{
    BoxFunction g(m, n);
    if (g.bit_count() > kMaxTableBits) {
        throw std::invalid_argument("box function: table would exceed 2^" +
                                    std::to_string(kMaxTableBits) + " entries");
    }
    if (table.size() != (std::size_t{1} << g.bit_count())) {
        throw std::invalid_argument("box function: table must have 2^(m(n-1)) entries");
    }
    g.table_ = std::move(table);
    return g;
}

BoxFunction BoxFunction::random_table(std::size_t m, std::size_t n, std::uint64_t seed)
{
    BoxFunction probe(m, n);
    if (probe.bit_count() > kMaxTableBits) {
        throw std::invalid_argument("box function: table too large, use random_rule");
    }
    const std::size_t size = std::size_t{1} << probe.bit_count();
    std::vector<double> table(size);
    for (std::size_t code = 0; code < size; ++code) {
        table[code] = 2.0 * to_unit(mix64(seed ^ mix64(code))) - 1.0;
    }
    return from_table(m, n, std::move(table));
}

BoxFunction BoxFunction::random_rule(std::size_t m, std::size_t n, std::uint64_t seed)
{
    BoxFunction g(m, n);
    g.rule_ = [seed](std::uint64_t code) { return 2.0 * to_unit(mix64(seed ^ mix64(code))) - 1.0; };
    return g;
}

BoxFunction BoxFunction::interval_product(const IntervalPartition& groups)
{
    const std::size_t m = groups.size();
    const std::size_t n = 2 * groups.length();
    BoxFunction g(m, n);
    std::uint64_t required = 0;
    for (std::size_t j = 0; j < groups.length(); ++j) {
        for (std::size_t i = groups.block_begin(j); i < groups.block_end(j); ++i) {
            required |= std::uint64_t{1} << (i * (n - 1) + 2 * j);
        }
    }
    g.rule_ = [required](std::uint64_t code) { return (code & required) == required ? 1.0 : 0.0; };
    return g;
}

BoxFunction BoxFunction::union_cover(std::size_t m, std::size_t intervals)
{
    const std::size_t n = 2 * intervals;
    BoxFunction g(m, n);
    std::uint64_t even_boxes = 0;
    for (std::size_t j = 0; j < intervals; ++j) {
        even_boxes |= std::uint64_t{1} << (2 * j);
    }
    g.rule_ = [m, n, even_boxes](std::uint64_t code) {
        for (std::size_t i = 0; i < m; ++i) {
            if (((code >> (i * (n - 1))) & even_boxes) == 0) {
                return 0.0;
            }
        }
        return 1.0;
    };
    return g;
}

double BoxFunction::operator()(std::uint64_t code) const
{
    if (!table_.empty()) {
        return table_.at(code);
    }
    return rule_(code);
}

double BoxFunction::operator()(const IndicatorArray& array) const
{
    if (array.balls() != m_ || array.boxes() + 1 != n_) {
        throw std::invalid_argument("box function: array shape mismatch");
    }
    return (*this)(array.code());
}

double gbar(const BoxFunction& g, std::span<const double> x, std::span<const double> y)
{
    if (x.size() != g.balls() || y.size() != g.boundaries()) {
        throw std::invalid_argument("gbar: vector lengths do not match the box function");
    }
    return g(indicator_code(x, y));
}

} // namespace coalesce
