#pragma once

// p-simple coalescing random walks on Z and on Z + 1/2.
//
// Each free block jumps at rate 1, to the right with probability p and to
// the left otherwise. A block that lands on its neighbour's site merges with
// it; the higher-index block attaches to the lower-index one.

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "coalesce/box_function.hpp"
#include "coalesce/partitions.hpp"
#include "coalesce/rng.hpp"

namespace coalesce {

// True when v lies on Z + offset (offset 0 or 1/2).
bool on_lattice(double v, double offset) noexcept;

struct WalkConfig {
    double p = 0.5;
    std::vector<double> start;
    double lattice_offset = 0.0;

    // Throws std::invalid_argument on p outside [0, 1], a decreasing start,
    // an offset other than 0 or 1/2, or a start site off the lattice.
    void validate() const;
};

struct LatticeEnsemble {
    std::vector<double> positions;
    IntervalPartition partition;
    double clock = 0.0;
};

struct WalkEvent {
    double time = 0.0;
    std::size_t block = 0;  // leader index of the block that jumped
    double old_pos = 0.0;
    double new_pos = 0.0;
    std::optional<std::size_t> merged_with;  // leader it merged with, if any
};

LatticeEnsemble simulate_crw(const WalkConfig& config, double t, CounterRng& rng,
                             std::vector<WalkEvent>* log = nullptr);

// CSV with header time,block,old_pos,new_pos,merged_with.
void write_event_csv(std::ostream& out, std::span<const WalkEvent> events);

enum class Side { balls, boxes };

/// Generator of the walk on `side` applied to gbar with the other argument
/// frozen: side == balls gives G(gbar_y)(x) for the p-walk of x on Z,
/// side == boxes gives H(gbar_x)(y) for the (1-p)-walk of y on Z + 1/2.
/// `jump` > 1 selects a non-nearest-neighbour variant in which a block
/// stops at (and merges with) a neighbour it would reach or pass; it exists
/// only to show the identity fails without nearest-neighbour jumps.
double apply_generator(Side side, const BoxFunction& g, std::span<const double> x,
                       std::span<const double> y, double p, int jump = 1);

// G(gbar_y)(x) - H(gbar_x)(y).
double duality_gap(const BoxFunction& g, std::span<const double> x, std::span<const double> y,
                   double p, int jump = 1);

// Law of a single walker's displacement after time t:
// Poisson(p t) - Poisson((1 - p) t).
double skellam_pmf(double p, double t, long k);

} // namespace coalesce
