#include "coalesce/brownian.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace coalesce {

namespace {

constexpr std::uint32_t kMaxLabel = 1u << 28;

// Above this exponent the crossing probability is below 2e-22 and the
// uniform draw is skipped.
constexpr double kNegligibleExponent = 50.0;

struct Birth {
    std::size_t index;
    std::uint32_t label;
    double position;
};

// Inserts births due at each grid index, calls on_grid(k), then steps.
template <class OnGrid>
void drive(CoalescingEnsemble& ensemble, const std::vector<double>& times,
           const std::vector<Birth>& births, OnGrid&& on_grid)
{
    std::size_t next = 0;
    for (std::size_t k = 0; k < times.size(); ++k) {
        while (next < births.size() && births[next].index == k) {
            ensemble.insert(births[next].label, births[next].position);
            ++next;
        }
        on_grid(k);
        if (k + 1 < times.size()) {
            ensemble.advance(times[k + 1] - times[k]);
        }
    }
}

std::vector<std::vector<double>> never_met(std::size_t m)
{
    std::vector<std::vector<double>> meet(m, std::vector<double>(m, kNever));
    for (std::size_t i = 0; i < m; ++i) {
        meet[i][i] = 0.0;
    }
    return meet;
}

// Fills a PathGrid while driving the ensemble.
PathGrid record(CoalescingEnsemble& ensemble, std::vector<double> times,
                const std::vector<Birth>& births, std::size_t m)
{
    PathGrid grid;
    grid.times = std::move(times);
    grid.paths.assign(m, std::vector<double>(grid.times.size(), std::nan("")));
    grid.alive_from.assign(m, 0);
    for (const Birth& b : births) {
        grid.alive_from[b.label] = b.index;
    }
    grid.meet = never_met(m);
    ensemble.set_merge_observer([&grid](double t, std::span<const std::uint32_t> left,
                                        std::span<const std::uint32_t> right) {
        for (std::uint32_t a : left) {
            for (std::uint32_t b : right) {
                grid.meet[a][b] = std::min(grid.meet[a][b], t);
                grid.meet[b][a] = grid.meet[a][b];
            }
        }
    });
    drive(ensemble, grid.times, births, [&](std::size_t k) {
        for (const auto& block : ensemble.blocks()) {
            for (std::uint32_t label : block.members) {
                grid.paths[label][k] = block.pos;
            }
        }
    });
    ensemble.set_merge_observer(nullptr);
    return grid;
}

std::vector<Birth> births_at_zero(std::span<const double> starts)
{
    std::vector<Birth> births;
    births.reserve(starts.size());
    for (std::size_t i = 0; i < starts.size(); ++i) {
        births.push_back({0, static_cast<std::uint32_t>(i), starts[i]});
    }
    return births;
}

std::vector<Birth> staggered_births(const StaggeredConfig& config, double step, double horizon,
                                    std::size_t last)
{
    config.validate();
    if (!(step > 0.0) || !std::isfinite(step)) {
        throw std::invalid_argument("staggered: step must be positive");
    }
    std::vector<Birth> births;
    births.reserve(config.entries.size());
    for (std::size_t i = 0; i < config.entries.size(); ++i) {
        const StaggeredEntry& e = config.entries[i];
        if (e.birth > horizon) {
            throw std::invalid_argument("staggered: birth time outside [0, horizon]");
        }
        births.push_back({grid_index(e.birth, step, last), static_cast<std::uint32_t>(i),
                          e.position});
    }
    return births;
}

void require_horizon(double step, double horizon)
{
    if (!(step > 0.0) || !std::isfinite(step)) {
        throw std::invalid_argument("step must be positive and finite");
    }
    if (!(horizon >= 0.0) || !std::isfinite(horizon)) {
        throw std::invalid_argument("horizon must be nonnegative and finite");
    }
}

} // namespace

double bridge_cross_prob(double d0, double d1, double h)
{
    if (!(d0 >= 0.0) || !(d1 >= 0.0)) {
        throw std::invalid_argument("bridge_cross_prob: gaps must be nonnegative");
    }
    if (!(h > 0.0)) {
        throw std::invalid_argument("bridge_cross_prob: step must be positive");
    }
    if (d0 == 0.0 || d1 == 0.0) {
        return 1.0;
    }
    return std::exp(-d0 * d1 / h);
}

CoalescingEnsemble::CoalescingEnsemble(RandomField field, double start_time)
    : field_(field), time_(start_time)
{
}

void CoalescingEnsemble::insert(std::uint32_t label, double x)
{
    if (label >= kMaxLabel) {
        throw std::out_of_range("ensemble: particle label must stay below 2^28");
    }
    if (!std::isfinite(x)) {
        throw std::invalid_argument("ensemble: position must be finite");
    }
    auto it = std::lower_bound(blocks_.begin(), blocks_.end(), x,
                               [](const Block& b, double v) { return b.pos < v; });
    ++particles_;
    if (it != blocks_.end() && it->pos == x) {
        const std::uint32_t joined[] = {label};
        if (observer_) {
            observer_(time_, it->members, joined);
        }
        it->members.push_back(label);
        it->leader = std::min(it->leader, label);
        return;
    }
    blocks_.insert(it, Block{x, label, {label}});
}

CoalescingEnsemble::Block CoalescingEnsemble::combine(Block left, Block right)
{
    if (observer_) {
        observer_(time_, left.members, right.members);
    }
    if (right.leader < left.leader) {
        left.pos = right.pos;
        left.leader = right.leader;
    }
    left.members.insert(left.members.end(), right.members.begin(), right.members.end());
    return left;
}

void CoalescingEnsemble::merge_range(std::vector<Block>& out, std::size_t first, std::size_t last)
{
    Block cluster = std::move(blocks_[first]);
    for (std::size_t b = first + 1; b <= last; ++b) {
        cluster = combine(std::move(cluster), std::move(blocks_[b]));
    }
    out.push_back(std::move(cluster));
    // Re-check order against the clusters already placed.
    while (out.size() >= 2 && out[out.size() - 2].pos >= out.back().pos) {
        Block right = std::move(out.back());
        out.pop_back();
        out.back() = combine(std::move(out.back()), std::move(right));
    }
}

void CoalescingEnsemble::advance(double dt)
{
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw std::invalid_argument("ensemble: time step must be positive");
    }
    const std::size_t count = blocks_.size();
    const double root = std::sqrt(dt);
    next_.resize(count);
    for (std::size_t b = 0; b < count; ++b) {
        next_[b] = blocks_[b].pos + root * field_.normal(step_, blocks_[b].leader);
    }

    bool any = false;
    flags_.assign(count == 0 ? 0 : count - 1, 0);
    for (std::size_t b = 0; b + 1 < count; ++b) {
        const double d1 = next_[b + 1] - next_[b];
        bool hit = d1 <= 0.0;
        if (!hit) {
            const double exponent = (blocks_[b + 1].pos - blocks_[b].pos) * d1 / dt;
            hit = exponent < kNegligibleExponent &&
                  field_.uniform(step_, blocks_[b].leader, blocks_[b + 1].leader, 0) <
                      std::exp(-exponent);
        }
        flags_[b] = hit ? 1 : 0;
        any = any || hit;
    }

    for (std::size_t b = 0; b < count; ++b) {
        blocks_[b].pos = next_[b];
    }
    ++step_;
    time_ += dt;
    if (!any) {
        return;
    }

    std::vector<Block> merged;
    merged.reserve(count);
    std::size_t first = 0;
    while (first < count) {
        std::size_t last = first;
        while (last + 1 < count && flags_[last] != 0) {
            ++last;
        }
        merge_range(merged, first, last);
        first = last + 1;
    }
    blocks_ = std::move(merged);
}

std::vector<double> CoalescingEnsemble::positions(std::size_t m) const
{
    std::vector<double> out(m, std::nan(""));
    positions_into(out);
    return out;
}

void CoalescingEnsemble::positions_into(std::vector<double>& out) const
{
    for (const Block& block : blocks_) {
        for (std::uint32_t label : block.members) {
            out.at(label) = block.pos;
        }
    }
}

void BMEnsembleConfig::validate() const
{
    require_horizon(step, horizon);
    if (!is_nondecreasing(starts)) {
        throw std::invalid_argument("cbm config: starts must be nondecreasing");
    }
    for (double s : starts) {
        if (!std::isfinite(s)) {
            throw std::invalid_argument("cbm config: starts must be finite");
        }
    }
    if (starts.size() >= kMaxLabel) {
        throw std::invalid_argument("cbm config: too many particles");
    }
}

void StaggeredConfig::validate() const
{
    double previous = 0.0;
    for (const StaggeredEntry& e : entries) {
        if (!(e.birth >= previous) || !std::isfinite(e.birth)) {
            throw std::invalid_argument(
                "staggered config: births must be nonnegative and sorted");
        }
        if (!std::isfinite(e.position)) {
            throw std::invalid_argument("staggered config: positions must be finite");
        }
        previous = e.birth;
    }
    if (entries.size() >= kMaxLabel) {
        throw std::invalid_argument("staggered config: too many particles");
    }
}

std::optional<double> PathGrid::at(std::size_t i, std::size_t k) const
{
    if (!alive(i, k)) {
        return std::nullopt;
    }
    return paths.at(i).at(k);
}

std::vector<double> time_grid(double h, double horizon)
{
    require_horizon(h, horizon);
    const double ratio = horizon / h;
    const double nearest = std::round(ratio);
    const auto steps = static_cast<std::size_t>(
        std::abs(ratio - nearest) <= 1e-9 * std::max(1.0, ratio) ? nearest : std::ceil(ratio));
    std::vector<double> times(steps + 1);
    for (std::size_t k = 0; k < steps; ++k) {
        times[k] = static_cast<double>(k) * h;
    }
    times[steps] = horizon;
    return times;
}

std::size_t grid_index(double s, double h, std::size_t last)
{
    const double k = std::round(s / h);
    return k <= 0.0 ? 0 : std::min(last, static_cast<std::size_t>(k));
}

PathGrid simulate_cbm(const BMEnsembleConfig& config, const RandomField& field)
{
    config.validate();
    CoalescingEnsemble ensemble(field);
    return record(ensemble, time_grid(config.step, config.horizon), births_at_zero(config.starts),
                  config.starts.size());
}

std::vector<double> simulate_cbm_final(const BMEnsembleConfig& config, const RandomField& field)
{
    config.validate();
    CoalescingEnsemble ensemble(field);
    drive(ensemble, time_grid(config.step, config.horizon), births_at_zero(config.starts),
          [](std::size_t) {});
    return ensemble.positions(config.starts.size());
}

PathGrid simulate_unordered(std::span<const double> starts, double step, double horizon,
                            const RandomField& field)
{
    std::vector<std::size_t> order(starts.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return starts[a] < starts[b]; });

    BMEnsembleConfig config;
    config.step = step;
    config.horizon = horizon;
    for (std::size_t i : order) {
        config.starts.push_back(starts[i]);
    }
    PathGrid sorted = simulate_cbm(config, field);

    // order[r] is the input index of sorted particle r.
    PathGrid out;
    out.times = std::move(sorted.times);
    out.paths.resize(starts.size());
    out.alive_from.assign(starts.size(), 0);
    out.meet = never_met(starts.size());
    for (std::size_t r = 0; r < order.size(); ++r) {
        out.paths[order[r]] = std::move(sorted.paths[r]);
        for (std::size_t s = 0; s < order.size(); ++s) {
            out.meet[order[r]][order[s]] = sorted.meet[r][s];
        }
    }
    return out;
}

PathGrid simulate_staggered(const StaggeredConfig& config, double step, double horizon,
                            const RandomField& field)
{
    std::vector<double> times = time_grid(step, horizon);
    const std::vector<Birth> births = staggered_births(config, step, horizon, times.size() - 1);
    CoalescingEnsemble ensemble(field);
    return record(ensemble, std::move(times), births, config.entries.size());
}

CoalescingEnsemble evolve_staggered(const StaggeredConfig& config, double step, double horizon,
                                    const RandomField& field)
{
    const std::vector<double> times = time_grid(step, horizon);
    const std::vector<Birth> births = staggered_births(config, step, horizon, times.size() - 1);
    CoalescingEnsemble ensemble(field);
    drive(ensemble, times, births, [](std::size_t) {});
    return ensemble;
}

std::vector<double> simulate_staggered_final(const StaggeredConfig& config, double step,
                                             double horizon, const RandomField& field)
{
    return evolve_staggered(config, step, horizon, field).positions(config.entries.size());
}

std::vector<std::vector<double>> meeting_times(const PathGrid& grid)
{
    const std::size_t m = grid.particles();
    std::vector<std::vector<double>> meet = never_met(m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            const std::size_t from = std::max(grid.alive_from[i], grid.alive_from[j]);
            for (std::size_t k = from; k < grid.points(); ++k) {
                if (grid.paths[i][k] == grid.paths[j][k]) {
                    meet[i][j] = meet[j][i] = grid.times[k];
                    break;
                }
            }
        }
    }
    return meet;
}

std::vector<double> quadratic_covariation(const PathGrid& grid, std::size_t i, std::size_t j)
{
    if (i >= grid.particles() || j >= grid.particles()) {
        throw std::out_of_range("quadratic_covariation: particle index");
    }
    std::vector<double> out(grid.points(), 0.0);
    const std::size_t from = std::max(grid.alive_from[i], grid.alive_from[j]);
    for (std::size_t k = from; k + 1 < grid.points(); ++k) {
        const double di = grid.paths[i][k + 1] - grid.paths[i][k];
        const double dj = grid.paths[j][k + 1] - grid.paths[j][k];
        out[k + 1] = out[k] + di * dj;
    }
    return out;
}

PathFunction path_function(const PathGrid& grid, std::size_t i)
{
    if (i >= grid.particles()) {
        throw std::out_of_range("path_function: particle index");
    }
    const std::size_t from = grid.alive_from[i];
    std::vector<double> times(grid.times.begin() + static_cast<std::ptrdiff_t>(from),
                              grid.times.end());
    std::vector<double> values(grid.paths[i].begin() + static_cast<std::ptrdiff_t>(from),
                               grid.paths[i].end());
    return [times = std::move(times), values = std::move(values)](double s) {
        if (times.empty() || s < times.front()) {
            return std::nan("");
        }
        if (s >= times.back()) {
            return values.back();
        }
        const auto hi = static_cast<std::size_t>(
            std::upper_bound(times.begin(), times.end(), s) - times.begin());
        const std::size_t lo = hi - 1;
        const double w = (s - times[lo]) / (times[hi] - times[lo]);
        return values[lo] + w * (values[hi] - values[lo]);
    };
}

bool region_contains(const PathFunction& lower, const PathFunction& upper, double t, double s,
                     double x, Direction direction)
{
    if (!(s >= 0.0 && s <= t)) {
        throw std::invalid_argument("region_contains: s must lie in [0, t]");
    }
    const double u = direction == Direction::forward ? s : t - s;
    return lower(u) < x && x < upper(u);
}

void write_path_csv(std::ostream& out, const PathGrid& grid)
{
    out << "time";
    for (std::size_t i = 0; i < grid.particles(); ++i) {
        out << ",x" << i;
    }
    out << '\n';
    const auto precision = out.precision(17);
    for (std::size_t k = 0; k < grid.points(); ++k) {
        out << grid.times[k];
        for (std::size_t i = 0; i < grid.particles(); ++i) {
            out << ',';
            if (grid.alive(i, k)) {
                out << grid.paths[i][k];
            }
        }
        out << '\n';
    }
    out.precision(precision);
}

nlohmann::ordered_json meeting_times_json(const std::vector<std::vector<double>>& meet)
{
    auto rows = nlohmann::ordered_json::array();
    for (const auto& row : meet) {
        auto cells = nlohmann::ordered_json::array();
        for (double v : row) {
            cells.push_back(std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json());
        }
        rows.push_back(std::move(cells));
    }
    return rows;
}

} // namespace coalesce
