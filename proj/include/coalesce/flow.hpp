#pragma once

// Coalescing flow with Poisson immigration.
//
// Immigrants arrive at the atoms (s, x) of a Poisson field of intensity
// lambda on time x space and are carried forward by one coalescing
// Brownian ensemble, so all trajectories in a replicate are coupled. The
// infinite line is replaced by a finite window; statistics are taken only
// on a core sub-window inset by a margin.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "coalesce/brownian.hpp"
#include "coalesce/stats.hpp"

namespace coalesce {

struct FlowConfig {
    double lambda = 1.0;
    double x_lo = -10.0;
    double x_hi = 10.0;
    double horizon = 2.0;
    double step = 2e-3;
    double truncation = 8.0;  // T_back for the stationary construction
    double margin = -1.0;     // negative: 4 sqrt(duration)

    void validate() const;

    double margin_for(double duration) const;

    // Window whose core, after the margin for `duration`, is [lo, hi].
    static FlowConfig around_core(double lo, double hi, double duration, double margin = -1.0);
};

struct Atom {
    double time = 0.0;
    double location = 0.0;
};

// Poisson field on [t0, t1] x [x0, x1], atoms sorted by time.
std::vector<Atom> sample_poisson_field(double lambda, double t0, double t1, double x0, double x1,
                                       std::uint64_t seed);

/// Distinct locations with the number of immigrants merged into each.
struct PointSample {
    std::vector<double> locations;  // increasing
    std::vector<std::uint64_t> multiplicities;

    std::size_t size() const noexcept { return locations.size(); }

    // Points in ]a, b].
    std::size_t count(double a, double b) const;

    // Immigrants carried into ]a, b].
    std::uint64_t weighted_count(double a, double b) const;
};

// Points of the ensemble lying in [lo, hi].
PointSample point_sample(const CoalescingEnsemble& ensemble, double lo, double hi);

// CSV with header location,multiplicity.
void write_point_csv(std::ostream& out, const PointSample& sample);

struct ImmigrationRun {
    std::vector<Atom> atoms;
    PointSample points;  // restricted to the core
    double core_lo = 0.0;
    double core_hi = 0.0;
    std::optional<PathGrid> paths;
};

ImmigrationRun simulate_immigration_system(const FlowConfig& config, std::uint64_t seed,
                                           bool keep_paths = false);

// Half-open interval ]lo, hi].
struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

// Throws std::invalid_argument unless lo < hi and the intervals are
// increasing and pairwise disjoint.
void validate_intervals(std::span<const Interval> intervals);

enum class AvoidanceSide { direct, dual };

// One run of the immigration system seen through the intervals.
struct DirectRun {
    double miss = 0.0;      // 1 if no point falls in any interval
    double count = 0.0;     // points in the intervals
    double weighted = 0.0;  // immigrants carried into the intervals
};

std::vector<DirectRun> avoidance_direct_runs(std::span<const Interval> intervals, double t,
                                             double lambda, std::size_t n, std::uint64_t seed,
                                             double step, unsigned workers);

// Probability that the immigration point process at time t misses all the
// intervals. direct: fraction of runs of the immigration system with no
// point in any interval. dual: mean of exp(-lambda * integral of the
// interval widths) along a coalescing ensemble started at the endpoints.
stats::MeanEstimate avoidance_probability_mc(std::span<const Interval> intervals, double t,
                                             double lambda, std::size_t n, std::uint64_t seed,
                                             AvoidanceSide side, double step, unsigned workers);

// One sample of the dual integrand (before exponentiation) for the given
// field.
double dual_interval_integral(std::span<const Interval> intervals, double t, double step,
                              const RandomField& field);

inline constexpr std::uint64_t kWedgeStepCap = 1'000'000;

struct WedgeSample {
    double area = 0.0;
    std::uint64_t steps = 0;
    bool capped = false;  // cap reached before coalescence; area is partial
};

/// Integrated gaps of one coupled ensemble started at `points`
/// (nondecreasing). value(i, j) is the integral over [0, t] of
/// X_j - X_i, the mass of ]points[i], points[j]] under the wedge measure.
/// With t = kNever the ensemble runs until everything has coalesced, with
/// steps of h * max(1, (g / g0)^2) for g the smallest open gap and g0 the
/// smallest initial one.
class WedgeMeasure {
public:
    WedgeMeasure(std::span<const double> points, double t, double step, const RandomField& field,
                 std::uint64_t cap = kWedgeStepCap);

    double value(std::size_t i, std::size_t j) const;
    std::uint64_t steps() const noexcept { return steps_; }
    bool capped() const noexcept { return capped_; }

private:
    std::vector<double> gaps_;  // integral of X_{k+1} - X_k
    std::uint64_t steps_ = 0;
    bool capped_ = false;
};

// Throws std::invalid_argument if a > b.
WedgeSample wedge_area(double a, double b, double t, double step, const RandomField& field,
                       std::uint64_t cap = kWedgeStepCap);

// Stationary point process: Poisson immigrants on [-T_back, 0] x window
// flowed to time 0, restricted to the core (margin from T_back).
PointSample sample_S_infty(const FlowConfig& config, std::uint64_t seed);

} // namespace coalesce
