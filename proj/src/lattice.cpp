#include "coalesce/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace coalesce {

bool on_lattice(double v, double offset) noexcept
{
    const double shifted = v - offset;
    return std::isfinite(shifted) && shifted == std::floor(shifted);
}

void WalkConfig::validate() const
{
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument("walk config: p must lie in [0, 1]");
    }
    if (lattice_offset != 0.0 && lattice_offset != 0.5) {
        throw std::invalid_argument("walk config: lattice offset must be 0 or 1/2");
    }
    if (!is_nondecreasing(start)) {
        throw std::invalid_argument("walk config: start must be nondecreasing");
    }
    for (double s : start) {
        if (!on_lattice(s, lattice_offset)) {
            throw std::invalid_argument("walk config: start site off the lattice");
        }
    }
}

LatticeEnsemble simulate_crw(const WalkConfig& config, double t, CounterRng& rng,
                             std::vector<WalkEvent>* log)
{
    config.validate();
    if (!(t >= 0.0)) {
        throw std::invalid_argument("simulate_crw: t must be nonnegative");
    }
    IntervalPartition partition = partition_of(config.start);
    std::vector<double> reduced = project(config.start, partition);

    double clock = 0.0;
    while (!reduced.empty()) {
        const std::size_t blocks = reduced.size();
        clock += rng.exponential(static_cast<double>(blocks));
        if (clock > t) {
            break;
        }
        const auto b = static_cast<std::size_t>(rng.below(blocks));
        const double step = rng.uniform() < config.p ? 1.0 : -1.0;
        WalkEvent event{clock, partition.block_begin(b), reduced[b], reduced[b] + step, {}};
        reduced[b] = event.new_pos;
        if (step > 0.0 && b + 1 < blocks && reduced[b] == reduced[b + 1]) {
            event.merged_with = partition.block_begin(b + 1);
            partition.merge_with_right(b);
            reduced.erase(reduced.begin() + static_cast<std::ptrdiff_t>(b) + 1);
        } else if (step < 0.0 && b > 0 && reduced[b] == reduced[b - 1]) {
            event.merged_with = partition.block_begin(b - 1);
            partition.merge_with_right(b - 1);
            reduced.erase(reduced.begin() + static_cast<std::ptrdiff_t>(b));
        }
        if (log != nullptr) {
            log->push_back(event);
        }
    }
    return {lift(reduced, partition), std::move(partition), t};
}

void write_event_csv(std::ostream& out, std::span<const WalkEvent> events)
{
    out << "time,block,old_pos,new_pos,merged_with\n";
    const auto precision = out.precision(17);
    for (const WalkEvent& e : events) {
        out << e.time << ',' << e.block << ',' << e.old_pos << ',' << e.new_pos << ',';
        if (e.merged_with) {
            out << *e.merged_with;
        }
        out << '\n';
    }
    out.precision(precision);
}

namespace {

// sum over moves of rate * (f(after) - f(before)) for one walk configuration.
template <class Evaluate>
double generator_sum(std::span<const double> moving, double right_probability, int jump,
                     Evaluate&& evaluate)
{
    const IntervalPartition partition = partition_of(moving);
    const std::vector<double> reduced = project(moving, partition);
    const std::size_t blocks = reduced.size();
    const double here = evaluate(std::span<const double>(moving));

    double total = 0.0;
    std::vector<double> moved = reduced;
    for (std::size_t b = 0; b < blocks; ++b) {
        for (const int direction : {+1, -1}) {
            double target = reduced[b] + direction * jump;
            if (direction > 0 && b + 1 < blocks) {
                target = std::min(target, reduced[b + 1]);
            }
            if (direction < 0 && b > 0) {
                target = std::max(target, reduced[b - 1]);
            }
            moved[b] = target;
            const double rate = direction > 0 ? right_probability : 1.0 - right_probability;
            const std::vector<double> lifted = lift(moved, partition);
            total += rate * evaluate(std::span<const double>(lifted));
        }
        moved[b] = reduced[b];
    }
    return total - static_cast<double>(blocks) * here;
}

void require_generator_inputs(std::span<const double> x, std::span<const double> y, double p,
                              int jump)
{
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument("generator: p must lie in [0, 1]");
    }
    if (jump < 1) {
        throw std::invalid_argument("generator: jump size must be positive");
    }
    if (!is_nondecreasing(x) || !is_nondecreasing(y)) {
        throw std::invalid_argument("generator: x and y must be nondecreasing");
    }
    for (double v : x) {
        if (!on_lattice(v, 0.0)) {
            throw std::invalid_argument("generator: balls must lie on Z");
        }
    }
    for (double v : y) {
        if (!on_lattice(v, 0.5)) {
            throw std::invalid_argument("generator: box boundaries must lie on Z + 1/2");
        }
    }
}

} // namespace

double apply_generator(Side side, const BoxFunction& g, std::span<const double> x,
                       std::span<const double> y, double p, int jump)
{
    require_generator_inputs(x, y, p, jump);
    if (x.size() != g.balls() || y.size() != g.boundaries()) {
        throw std::invalid_argument("generator: vector lengths do not match the box function");
    }
    if (side == Side::balls) {
        return generator_sum(x, p, jump, [&](std::span<const double> balls) {
            return g(indicator_code(balls, y));
        });
    }
    return generator_sum(y, 1.0 - p, jump, [&](std::span<const double> boxes) {
        return g(indicator_code(x, boxes));
    });
}

double duality_gap(const BoxFunction& g, std::span<const double> x, std::span<const double> y,
                   double p, int jump)
{
    return apply_generator(Side::balls, g, x, y, p, jump) -
           apply_generator(Side::boxes, g, x, y, p, jump);
}

double skellam_pmf(double p, double t, long k)
{
    if (!(p >= 0.0 && p <= 1.0) || !(t >= 0.0)) {
        throw std::invalid_argument("skellam_pmf: need p in [0, 1] and t >= 0");
    }
    const double right = p * t;
    const double left = (1.0 - p) * t;
    auto log_poisson = [](long n, double mean) {
        if (mean == 0.0) {
            return n == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
        }
        return static_cast<double>(n) * std::log(mean) - mean - std::lgamma(static_cast<double>(n) + 1.0);
    };
    // P(R - L = k) = sum_j P(R = j + k) P(L = j), j >= max(0, -k).
    const long first = std::max(0L, -k);
    const long peak = first + static_cast<long>(std::ceil(std::sqrt(right * left) + left));
    double sum = 0.0;
    for (long j = first;; ++j) {
        const double term = std::exp(log_poisson(j + k, right) + log_poisson(j, left));
        sum += term;
        if (j > peak && (term == 0.0 || term < 1e-18 * sum)) {
            break;
        }
    }
    return sum;
}

} // namespace coalesce
