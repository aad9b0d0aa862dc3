#pragma once

// Coalescing Brownian motion on a time grid.
//
// Free blocks take independent Gaussian steps. Within a step, an adjacent
// pair whose gap is positive at both ends is merged with the exact
// probability that the gap bridge (a Brownian bridge of variance rate 2)
// touched zero, so isolated pairs coalesce with the correct law at any step
// size. Merged blocks sit at the right-endpoint value of their leader, the
// member with the smallest label, and move with the leader's increments.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "coalesce/partitions.hpp"
#include "coalesce/rng.hpp"

namespace coalesce {

inline constexpr double kNever = std::numeric_limits<double>::infinity();

// Probability that the difference of two independent standard Brownian
// motions, observed at gaps d0 and d1 a time h apart, hit zero in between.
// Throws std::invalid_argument for negative gaps or h <= 0.
double bridge_cross_prob(double d0, double d1, double h);

/// Mutable state of a coalescing ensemble. Increments are read from a
/// RandomField at (step index, leader label), so two ensembles that share a
/// field, a labelling and a step size evolve identically; copying an
/// ensemble is a checkpoint.
class CoalescingEnsemble {
public:
    struct Block {
        double pos = 0.0;
        std::uint32_t leader = 0;
        std::vector<std::uint32_t> members;
    };

    // Called as (time, left members, right members) whenever two groups merge.
    using MergeObserver = std::function<void(double, std::span<const std::uint32_t>,
                                             std::span<const std::uint32_t>)>;

    CoalescingEnsemble(RandomField field, double start_time = 0.0);

    // Adds a particle at the current time. Landing exactly on an existing
    // block joins it at once.
    void insert(std::uint32_t label, double x);

    // Advances by dt > 0 using step index step_index() for the draws.
    void advance(double dt);

    void set_merge_observer(MergeObserver observer) { observer_ = std::move(observer); }

    double time() const noexcept { return time_; }
    std::uint64_t step_index() const noexcept { return step_; }
    const std::vector<Block>& blocks() const noexcept { return blocks_; }
    std::size_t particle_count() const noexcept { return particles_; }

    // Position of every particle by label; labels must be dense in [0, m).
    std::vector<double> positions(std::size_t m) const;
    void positions_into(std::vector<double>& out) const;

private:
    void merge_range(std::vector<Block>& out, std::size_t first, std::size_t last);
    Block combine(Block left, Block right);

    RandomField field_;
    double time_;
    std::uint64_t step_ = 0;
    std::size_t particles_ = 0;
    std::vector<Block> blocks_;
    std::vector<double> next_;
    std::vector<std::uint8_t> flags_;
    MergeObserver observer_;
};

struct BMEnsembleConfig {
    std::vector<double> starts;
    double step = 1e-3;
    double horizon = 1.0;

    void validate() const;
};

struct StaggeredEntry {
    double birth = 0.0;
    double position = 0.0;
};

struct StaggeredConfig {
    std::vector<StaggeredEntry> entries;  // sorted by birth time

    void validate() const;
};

/// Ensemble paths on the grid 0, h, 2h, ..., T (the last step is shortened
/// when T is not a multiple of h). Particle i exists from grid index
/// alive_from[i] on; before that it has no position.
struct PathGrid {
    std::vector<double> times;
    std::vector<std::vector<double>> paths;
    std::vector<std::size_t> alive_from;
    // Meeting times as recorded by the simulator (kNever if not met).
    std::vector<std::vector<double>> meet;

    std::size_t particles() const noexcept { return paths.size(); }
    std::size_t points() const noexcept { return times.size(); }
    bool alive(std::size_t i, std::size_t k) const { return k >= alive_from.at(i); }
    std::optional<double> at(std::size_t i, std::size_t k) const;
};

// Grid of step h on [0, T].
std::vector<double> time_grid(double h, double horizon);

// Grid index of time s on the grid of step h (nearest point).
std::size_t grid_index(double s, double h, std::size_t last);

PathGrid simulate_cbm(const BMEnsembleConfig& config, const RandomField& field);

// Positions at the horizon only.
std::vector<double> simulate_cbm_final(const BMEnsembleConfig& config, const RandomField& field);

// Arbitrary starting order. Runs the ordered system on the sorted starts and
// hands path i back to the particle that started at starts[i].
PathGrid simulate_unordered(std::span<const double> starts, double step, double horizon,
                            const RandomField& field);

// Particles enter at their birth times (rounded to the nearest grid point)
// and join the running unordered ensemble. Throws if a birth lies outside
// [0, horizon].
PathGrid simulate_staggered(const StaggeredConfig& config, double step, double horizon,
                            const RandomField& field);

// The ensemble at the horizon, for callers that need blocks and members.
CoalescingEnsemble evolve_staggered(const StaggeredConfig& config, double step, double horizon,
                                    const RandomField& field);

std::vector<double> simulate_staggered_final(const StaggeredConfig& config, double step,
                                             double horizon, const RandomField& field);

// First grid time at which two paths coincide, from the paths alone.
std::vector<std::vector<double>> meeting_times(const PathGrid& grid);

// Running sum of dX_i dX_j over the grid (zero until both particles exist).
std::vector<double> quadratic_covariation(const PathGrid& grid, std::size_t i, std::size_t j);

enum class Direction { forward, backward };

using PathFunction = std::function<double(double)>;

// Linear interpolation of particle i's path.
PathFunction path_function(const PathGrid& grid, std::size_t i);

/// Whether (s, x) lies strictly between the two graphs on [0, t]
/// (forward), or between them after reversing time at t (backward):
/// lower(t - s) < x < upper(t - s). Throws if s is outside [0, t].
bool region_contains(const PathFunction& lower, const PathFunction& upper, double t, double s,
                     double x, Direction direction);

// CSV with a time column and one column per particle; cells before a
// particle's birth are empty.
void write_path_csv(std::ostream& out, const PathGrid& grid);

// Meeting-time matrix with null for pairs that never met.
nlohmann::ordered_json meeting_times_json(const std::vector<std::vector<double>>& meet);

} // namespace coalesce
