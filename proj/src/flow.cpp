#include "coalesce/flow.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "coalesce/parallel.hpp"

namespace coalesce {

namespace {

// Stream ids below the per-run seed.
constexpr std::uint64_t kAtomStream = 1;
constexpr std::uint64_t kFieldStream = 2;
constexpr std::uint64_t kDirectStream = 11;
constexpr std::uint64_t kDualStream = 12;

StaggeredConfig immigrants(const std::vector<Atom>& atoms, double shift)
{
    StaggeredConfig config;
    config.entries.reserve(atoms.size());
    for (const Atom& a : atoms) {
        config.entries.push_back({a.time + shift, a.location});
    }
    return config;
}

PointSample points_from_column(const PathGrid& grid, double lo, double hi)
{
    std::vector<double> column;
    const std::size_t last = grid.points() - 1;
    for (std::size_t i = 0; i < grid.particles(); ++i) {
        if (grid.alive(i, last)) {
            column.push_back(grid.paths[i][last]);
        }
    }
    std::sort(column.begin(), column.end());
    PointSample out;
    for (double v : column) {
        if (v < lo || v > hi) {
            continue;
        }
        if (!out.locations.empty() && out.locations.back() == v) {
            ++out.multiplicities.back();
        } else {
            out.locations.push_back(v);
            out.multiplicities.push_back(1);
        }
    }
    return out;
}

} // namespace

void FlowConfig::validate() const
{
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw std::invalid_argument("flow config: lambda must be nonnegative");
    }
    if (!(x_lo < x_hi) || !std::isfinite(x_lo) || !std::isfinite(x_hi)) {
        throw std::invalid_argument("flow config: window must satisfy x_lo < x_hi");
    }
    if (!(horizon > 0.0) || !(truncation > 0.0) || !(step > 0.0) || !std::isfinite(horizon) ||
        !std::isfinite(truncation) || !std::isfinite(step)) {
        throw std::invalid_argument("flow config: horizon, truncation and step must be positive");
    }
    if (std::isnan(margin)) {
        throw std::invalid_argument("flow config: margin is NaN");
    }
}

double FlowConfig::margin_for(double duration) const
{
    return margin >= 0.0 ? margin : 4.0 * std::sqrt(duration);
}

FlowConfig FlowConfig::around_core(double lo, double hi, double duration, double margin)
{
    FlowConfig config;
    config.margin = margin;
    const double m = config.margin_for(duration);
    config.x_lo = lo - m;
    config.x_hi = hi + m;
    return config;
}

std::vector<Atom> sample_poisson_field(double lambda, double t0, double t1, double x0, double x1,
                                       std::uint64_t seed)
{
    if (!(lambda >= 0.0) || !(t0 <= t1) || !(x0 <= x1)) {
        throw std::invalid_argument("poisson field: need lambda >= 0 and ordered windows");
    }
    CounterRng rng(seed);
    const std::uint64_t count = rng.poisson(lambda * (t1 - t0) * (x1 - x0));
    std::vector<Atom> atoms(count);
    for (Atom& a : atoms) {
        a.time = t0 + (t1 - t0) * rng.uniform();
        a.location = x0 + (x1 - x0) * rng.uniform();
    }
    std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) {
        return a.time < b.time || (a.time == b.time && a.location < b.location);
    });
    return atoms;
}

std::size_t PointSample::count(double a, double b) const
{
    const auto first = std::upper_bound(locations.begin(), locations.end(), a);
    const auto last = std::upper_bound(locations.begin(), locations.end(), b);
    return last > first ? static_cast<std::size_t>(last - first) : 0;
}

std::uint64_t PointSample::weighted_count(double a, double b) const
{
    const auto first = std::upper_bound(locations.begin(), locations.end(), a) - locations.begin();
    const auto last = std::upper_bound(locations.begin(), locations.end(), b) - locations.begin();
    std::uint64_t total = 0;
    for (auto k = first; k < last; ++k) {
        total += multiplicities[static_cast<std::size_t>(k)];
    }
    return total;
}

PointSample point_sample(const CoalescingEnsemble& ensemble, double lo, double hi)
{
    PointSample out;
    for (const auto& block : ensemble.blocks()) {
        if (block.pos >= lo && block.pos <= hi) {
            out.locations.push_back(block.pos);
            out.multiplicities.push_back(block.members.size());
        }
    }
    return out;
}

void write_point_csv(std::ostream& out, const PointSample& sample)
{
    out << "location,multiplicity\n";
    const auto precision = out.precision(17);
    for (std::size_t k = 0; k < sample.size(); ++k) {
        out << sample.locations[k] << ',' << sample.multiplicities[k] << '\n';
    }
    out.precision(precision);
}

ImmigrationRun simulate_immigration_system(const FlowConfig& config, std::uint64_t seed,
                                           bool keep_paths)
{
    config.validate();
    const double m = config.margin_for(config.horizon);
    ImmigrationRun run;
    run.core_lo = config.x_lo + m;
    run.core_hi = config.x_hi - m;
    if (!(run.core_lo < run.core_hi)) {
        throw std::invalid_argument("immigration: margin leaves an empty core window");
    }
    run.atoms = sample_poisson_field(config.lambda, 0.0, config.horizon, config.x_lo, config.x_hi,
                                     derive_seed(seed, kAtomStream, 0));
    const RandomField field(derive_seed(seed, kFieldStream, 0));
    const StaggeredConfig staggered = immigrants(run.atoms, 0.0);
    if (keep_paths) {
        run.paths = simulate_staggered(staggered, config.step, config.horizon, field);
        run.points = points_from_column(*run.paths, run.core_lo, run.core_hi);
    } else {
        const CoalescingEnsemble ensemble =
            evolve_staggered(staggered, config.step, config.horizon, field);
        run.points = point_sample(ensemble, run.core_lo, run.core_hi);
    }
    return run;
}

void validate_intervals(std::span<const Interval> intervals)
{
    if (intervals.empty()) {
        throw std::invalid_argument("intervals: need at least one interval");
    }
    for (std::size_t j = 0; j < intervals.size(); ++j) {
        if (!(intervals[j].lo < intervals[j].hi) || !std::isfinite(intervals[j].lo) ||
            !std::isfinite(intervals[j].hi)) {
            throw std::invalid_argument("intervals: each needs lo < hi");
        }
        if (j > 0 && intervals[j].lo < intervals[j - 1].hi) {
            throw std::invalid_argument("intervals: must be increasing and disjoint");
        }
    }
}

double dual_interval_integral(std::span<const Interval> intervals, double t, double step,
                              const RandomField& field)
{
    validate_intervals(intervals);
    const std::vector<double> times = time_grid(step, t);
    const std::size_t m = 2 * intervals.size();
    CoalescingEnsemble ensemble(field);
    for (std::size_t j = 0; j < intervals.size(); ++j) {
        ensemble.insert(static_cast<std::uint32_t>(2 * j), intervals[j].lo);
        ensemble.insert(static_cast<std::uint32_t>(2 * j + 1), intervals[j].hi);
    }
    std::vector<double> pos(m);
    auto width = [&] {
        ensemble.positions_into(pos);
        double total = 0.0;
        for (std::size_t j = 0; j < m; j += 2) {
            total += pos[j + 1] - pos[j];
        }
        return total;
    };

    double integral = 0.0;
    double before = width();
    for (std::size_t k = 0; k + 1 < times.size() && before > 0.0; ++k) {
        const double dt = times[k + 1] - times[k];
        ensemble.advance(dt);
        const double after = width();
        integral += 0.5 * dt * (before + after);
        before = after;
    }
    return integral;
}

std::vector<DirectRun> avoidance_direct_runs(std::span<const Interval> intervals, double t,
                                             double lambda, std::size_t n, std::uint64_t seed,
                                             double step, unsigned workers)
{
    validate_intervals(intervals);
    if (!(t > 0.0) || !(lambda >= 0.0)) {
        throw std::invalid_argument("avoidance: need t > 0 and lambda >= 0");
    }
    const std::vector<Interval> held(intervals.begin(), intervals.end());
    FlowConfig config = FlowConfig::around_core(held.front().lo, held.back().hi, t);
    config.lambda = lambda;
    config.horizon = t;
    config.step = step;
    return run_replicates(n, workers, [&](std::size_t r) {
        const ImmigrationRun run =
            simulate_immigration_system(config, derive_seed(seed, kDirectStream, r));
        DirectRun out;
        for (const Interval& iv : held) {
            out.count += static_cast<double>(run.points.count(iv.lo, iv.hi));
            out.weighted += static_cast<double>(run.points.weighted_count(iv.lo, iv.hi));
        }
        out.miss = out.count == 0.0 ? 1.0 : 0.0;
        return out;
    });
}

stats::MeanEstimate avoidance_probability_mc(std::span<const Interval> intervals, double t,
                                             double lambda, std::size_t n, std::uint64_t seed,
                                             AvoidanceSide side, double step, unsigned workers)
{
    validate_intervals(intervals);
    if (!(t > 0.0) || !(lambda >= 0.0) || n == 0) {
        throw std::invalid_argument("avoidance: need t > 0, lambda >= 0, n >= 1");
    }
    std::vector<double> values;
    if (side == AvoidanceSide::direct) {
        for (const DirectRun& run :
             avoidance_direct_runs(intervals, t, lambda, n, seed, step, workers)) {
            values.push_back(run.miss);
        }
    } else {
        const std::vector<Interval> held(intervals.begin(), intervals.end());
        values = run_replicates(n, workers, [&](std::size_t r) {
            const RandomField field(derive_seed(seed, kDualStream, r));
            return std::exp(-lambda * dual_interval_integral(held, t, step, field));
        });
    }
    return stats::mean_estimate(values);
}

WedgeMeasure::WedgeMeasure(std::span<const double> points, double t, double step,
                           const RandomField& field, std::uint64_t cap)
{
    if (!is_nondecreasing(points)) {
        throw std::invalid_argument("wedge: points must be nondecreasing");
    }
    if (!(step > 0.0) || !(t >= 0.0)) {
        throw std::invalid_argument("wedge: need step > 0 and t >= 0");
    }
    const std::size_t m = points.size();
    gaps_.assign(m > 0 ? m - 1 : 0, 0.0);
    if (m < 2) {
        return;
    }
    CoalescingEnsemble ensemble(field);
    for (std::size_t i = 0; i < m; ++i) {
        ensemble.insert(static_cast<std::uint32_t>(i), points[i]);
    }
    std::vector<double> before(m);
    std::vector<double> after(m);
    ensemble.positions_into(before);

    auto integrate = [&](double dt) {
        ensemble.advance(dt);
        ensemble.positions_into(after);
        for (std::size_t k = 0; k + 1 < m; ++k) {
            gaps_[k] += 0.5 * dt * ((before[k + 1] - before[k]) + (after[k + 1] - after[k]));
        }
        std::swap(before, after);
        ++steps_;
    };

    if (std::isfinite(t)) {
        const std::vector<double> times = time_grid(step, t);
        for (std::size_t k = 0; k + 1 < times.size() && ensemble.blocks().size() > 1; ++k) {
            integrate(times[k + 1] - times[k]);
        }
        return;
    }

    double initial = kNever;
    for (std::size_t k = 0; k + 1 < m; ++k) {
        if (points[k + 1] > points[k]) {
            initial = std::min(initial, points[k + 1] - points[k]);
        }
    }
    while (ensemble.blocks().size() > 1) {
        if (steps_ >= cap) {
            capped_ = true;
            return;
        }
        const auto& blocks = ensemble.blocks();
        double smallest = kNever;
        for (std::size_t b = 0; b + 1 < blocks.size(); ++b) {
            smallest = std::min(smallest, blocks[b + 1].pos - blocks[b].pos);
        }
        const double ratio = smallest / initial;
        integrate(step * std::max(1.0, ratio * ratio));
    }
}

double WedgeMeasure::value(std::size_t i, std::size_t j) const
{
    if (i > j || j > gaps_.size()) {
        throw std::out_of_range("wedge: need i <= j < number of points");
    }
    double total = 0.0;
    for (std::size_t k = i; k < j; ++k) {
        total += gaps_[k];
    }
    return total;
}

WedgeSample wedge_area(double a, double b, double t, double step, const RandomField& field,
                       std::uint64_t cap)
{
    if (a > b) {
        throw std::invalid_argument("wedge_area: need a <= b");
    }
    const double points[] = {a, b};
    const WedgeMeasure measure(points, t, step, field, cap);
    return {measure.value(0, 1), measure.steps(), measure.capped()};
}

PointSample sample_S_infty(const FlowConfig& config, std::uint64_t seed)
{
    config.validate();
    const double back = config.truncation;
    const double m = config.margin_for(back);
    const double core_lo = config.x_lo + m;
    const double core_hi = config.x_hi - m;
    if (!(core_lo < core_hi)) {
        throw std::invalid_argument("stationary: margin leaves an empty core window");
    }
    const std::vector<Atom> atoms = sample_poisson_field(
        config.lambda, -back, 0.0, config.x_lo, config.x_hi, derive_seed(seed, kAtomStream, 0));
    const RandomField field(derive_seed(seed, kFieldStream, 0));
    const CoalescingEnsemble ensemble =
        evolve_staggered(immigrants(atoms, back), config.step, back, field);
    return point_sample(ensemble, core_lo, core_hi);
}

} // namespace coalesce
