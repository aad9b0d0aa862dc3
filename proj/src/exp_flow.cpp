// Experiments on the immigration system and its stationary limit.

#include <cmath>

#include "coalesce/flow.hpp"
#include "coalesce/parallel.hpp"
#include "coalesce/special.hpp"
#include "experiment_support.hpp"

namespace coalesce::detail {

namespace {

constexpr std::uint64_t kAvoidanceStream = 800;
constexpr std::uint64_t kWedgeStream = 900;
constexpr std::uint64_t kStationaryStream = 1000;
constexpr std::uint64_t kMarginStream = 1100;

std::vector<Interval> interval_list(const KeyValueConfig& config, const std::string& key)
{
    const std::vector<double> v = list(config, key, 2);
    require(v.size() % 2 == 0, "config: '" + key + "' must hold lo,hi pairs");
    std::vector<Interval> out;
    for (std::size_t k = 0; k < v.size(); k += 2) {
        out.push_back({v[k], v[k + 1]});
    }
    try {
        validate_intervals(out);
    } catch (const std::invalid_argument& e) {
        throw ConfigError("config: '" + key + "': " + e.what());
    }
    return out;
}

double variance(const std::vector<double>& v)
{
    const stats::MeanEstimate e = stats::mean_estimate(v);
    return e.standard_error * e.standard_error * static_cast<double>(e.n);
}

Json dispersion_json(const std::vector<double>& counts)
{
    const stats::MeanEstimate e = stats::mean_estimate(counts);
    const double var = variance(counts);
    return {{"mean", e.mean}, {"variance", var},
            {"variance_to_mean", e.mean > 0.0 ? var / e.mean : 0.0}};
}

} // namespace

ExperimentResult run_avoidance(const KeyValueConfig& config, const RunContext& context)
{
    const std::uint64_t n = config.count("replicates");
    const double t = config.real("t");
    const double lambda = config.real("lambda");
    const double h = config.real("step");
    require(n >= 2, "config: replicates must be at least 2");
    require(t > 0.0, "config: t must be positive");
    require(lambda >= 0.0, "config: lambda must be nonnegative");
    require(h > 0.0, "config: step must be positive");
    const std::vector<std::vector<Interval>> sets = {interval_list(config, "intervals_one"),
                                                     interval_list(config, "intervals_two")};
    const std::uint64_t seed = seed_of(config);

    Json cases = Json::array();
    std::vector<std::string> summary;
    bool pass = true;
    for (std::size_t s = 0; s < sets.size(); ++s) {
        const std::uint64_t set_seed = derive_seed(seed, kAvoidanceStream, s);
        const std::vector<DirectRun> runs =
            avoidance_direct_runs(sets[s], t, lambda, n, set_seed, h, context.workers);
        std::vector<double> miss;
        std::vector<double> counts;
        std::vector<double> weighted;
        for (const DirectRun& r : runs) {
            miss.push_back(r.miss);
            counts.push_back(r.count);
            weighted.push_back(r.weighted);
        }
        const stats::MeanEstimate direct = stats::mean_estimate(miss);
        const stats::MeanEstimate dual = avoidance_probability_mc(
            sets[s], t, lambda, n, set_seed, AvoidanceSide::dual, h, context.workers);
        const double se = std::hypot(direct.standard_error, dual.standard_error);
        const double diff = direct.mean - dual.mean;
        const bool ok = std::abs(diff) <= 3.0 * se;
        pass = pass && ok;

        Json intervals = Json::array();
        for (const Interval& iv : sets[s]) {
            intervals.push_back({iv.lo, iv.hi});
        }
        cases.push_back({{"intervals", intervals},
                         {"direct", estimate_json(direct)},
                         {"dual", estimate_json(dual)},
                         {"difference", diff},
                         {"combined_standard_error", se},
                         {"within_3se", ok},
                         {"point_counts", dispersion_json(counts)},
                         {"immigrant_counts", dispersion_json(weighted)}});
        summary.push_back(format("%zu interval(s): direct %.5f +- %.5f, dual %.5f +- %.5f, "
                                 "diff %.2f SE %s",
                                 sets[s].size(), direct.mean, direct.standard_error, dual.mean,
                                 dual.standard_error, se > 0.0 ? diff / se : 0.0, verdict(ok)));
    }
    Json out;
    out["replicates_per_side"] = n;
    out["cases"] = std::move(cases);
    return finish("avoidance", config, std::move(out), pass, std::move(summary));
}

ExperimentResult run_airy_transform(const KeyValueConfig& config, const RunContext& context)
{
    const std::uint64_t n = config.count("replicates");
    const double lambda = config.real("lambda");
    const double gap = config.real("gap");
    const double h = config.real("step");
    const double tolerance = config.real("tolerance");
    const std::uint64_t cap = config.count("cap");
    const double max_cap_fraction = config.real("max_cap_fraction");
    require(n >= 2, "config: replicates must be at least 2");
    require(lambda >= 0.0 && gap >= 0.0, "config: lambda and gap must be nonnegative");
    require(h > 0.0 && cap > 0, "config: step and cap must be positive");
    const std::uint64_t seed = seed_of(config);

    struct Sample {
        double transform = 0.0;
        double steps = 0.0;
        double capped = 0.0;
    };
    const auto samples = run_replicates(n, context.workers, [&](std::size_t r) {
        const WedgeSample w =
            wedge_area(0.0, gap, kNever, h, RandomField(StreamId{seed, kWedgeStream, r}), cap);
        return Sample{std::exp(-lambda * w.area), static_cast<double>(w.steps),
                      w.capped ? 1.0 : 0.0};
    });
    std::vector<double> transform;
    double steps = 0.0;
    double max_steps = 0.0;
    double capped = 0.0;
    for (const Sample& s : samples) {
        transform.push_back(s.transform);
        steps += s.steps;
        max_steps = std::max(max_steps, s.steps);
        capped += s.capped;
    }
    const stats::MeanEstimate e = stats::mean_estimate(transform);
    const double target = special::stationary_avoidance(lambda, gap);
    const double cap_fraction = capped / static_cast<double>(n);
    const bool close = std::abs(e.mean - target) <= tolerance;
    const bool finite = cap_fraction <= max_cap_fraction;
    const bool pass = close && finite;

    Json out;
    out["replicates"] = n;
    out["transform"] = estimate_json(e);
    out["airy_ratio"] = target;
    out["difference"] = e.mean - target;
    out["z_score"] = e.standard_error > 0.0 ? (e.mean - target) / e.standard_error : 0.0;
    out["within_tolerance"] = close;
    out["capped_samples"] = capped;
    out["capped_fraction"] = cap_fraction;
    out["mean_steps"] = steps / static_cast<double>(n);
    out["max_steps"] = max_steps;
    return finish("airy-transform", config, std::move(out), pass,
                  {format("E exp(-lambda M) = %.5f +- %.5f vs Ai ratio %.5f (|diff| %.5f, "
                          "tolerance %.3f) %s",
                          e.mean, e.standard_error, target, std::abs(e.mean - target), tolerance,
                          verdict(close)),
                   format("capped samples: %.0f of %llu; mean steps %.0f, max %.0f %s", capped,
                          static_cast<unsigned long long>(n), steps / static_cast<double>(n),
                          max_steps, verdict(finite))});
}

ExperimentResult run_stationary(const KeyValueConfig& config, const RunContext& context)
{
    const std::uint64_t n = config.count("replicates");
    const double lambda = config.real("lambda");
    const std::vector<double> core = list(config, "core", 2);
    const double h = config.real("step");
    const double start = config.real("t_back_start");
    const double t_max = config.real("t_back_max");
    const double tolerance = config.real("tolerance");
    require(n >= 2, "config: replicates must be at least 2");
    require(lambda >= 0.0, "config: lambda must be nonnegative");
    require(core.size() == 2 && core[0] < core[1], "config: core must be lo,hi with lo < hi");
    require(h > 0.0 && start > 0.0 && t_max >= start, "config: need step > 0, 0 < t_back_start <= t_back_max");
    const std::uint64_t seed = seed_of(config);
    const double length = core[1] - core[0];
    const auto unit_intervals = static_cast<std::size_t>(std::floor(length));

    struct Level {
        double t_back = 0.0;
        stats::MeanEstimate intensity;
        stats::MeanEstimate empty_unit;
        Json counts;
    };
    auto measure = [&](double t_back, double margin, std::uint64_t stream) {
        FlowConfig flow = FlowConfig::around_core(core[0], core[1], t_back, margin);
        flow.lambda = lambda;
        flow.step = h;
        flow.truncation = t_back;
        struct Run {
            double intensity = 0.0;
            double empty = 0.0;
            std::vector<double> unit_counts;
        };
        const auto runs = run_replicates(n, context.workers, [&](std::size_t r) {
            const PointSample s = sample_S_infty(flow, derive_seed(seed, stream, r));
            Run out;
            out.intensity = static_cast<double>(s.count(core[0], core[1])) / length;
            for (std::size_t u = 0; u < unit_intervals; ++u) {
                const double a = core[0] + static_cast<double>(u);
                const std::size_t c = s.count(a, a + 1.0);
                out.unit_counts.push_back(static_cast<double>(c));
                out.empty += c == 0 ? 1.0 : 0.0;
            }
            if (unit_intervals > 0) {
                out.empty /= static_cast<double>(unit_intervals);
            }
            return out;
        });
        std::vector<double> intensity;
        std::vector<double> empty;
        std::vector<double> unit;
        for (const Run& r : runs) {
            intensity.push_back(r.intensity);
            empty.push_back(r.empty);
            unit.insert(unit.end(), r.unit_counts.begin(), r.unit_counts.end());
        }
        return Level{t_back, stats::mean_estimate(intensity), stats::mean_estimate(empty),
                     dispersion_json(unit)};
    };

    std::vector<Level> levels;
    std::uint64_t stream = kStationaryStream;
    levels.push_back(measure(start, -1.0, stream++));
    std::optional<std::size_t> chosen;
    while (!chosen && 2.0 * levels.back().t_back <= t_max) {
        levels.push_back(measure(2.0 * levels.back().t_back, -1.0, stream++));
        const Level& a = levels[levels.size() - 2];
        const Level& b = levels.back();
        const double se = std::hypot(a.intensity.standard_error, b.intensity.standard_error);
        if (std::abs(a.intensity.mean - b.intensity.mean) < se) {
            chosen = levels.size() - 2;
        }
    }

    Json trail = Json::array();
    for (const Level& l : levels) {
        trail.push_back({{"t_back", l.t_back}, {"intensity", estimate_json(l.intensity)}});
    }
    const double target = special::stationary_intensity(lambda);
    const double avoid_target = special::stationary_avoidance(lambda, 1.0);
    Json out;
    out["replicates_per_level"] = n;
    out["truncation_trail"] = std::move(trail);
    out["intensity_target"] = target;
    out["unit_avoidance_target"] = avoid_target;
    if (!chosen) {
        out["converged"] = false;
        return finish("stationary", config, std::move(out), false,
                      {format("truncation did not settle below t_back_max = %g", t_max)});
    }
    const Level& best = levels[*chosen];
    const double base_margin = 4.0 * std::sqrt(best.t_back);
    const Level wide = measure(best.t_back, 2.0 * base_margin, kMarginStream);
    const double margin_se =
        std::hypot(best.intensity.standard_error, wide.intensity.standard_error);
    const bool margin_ok = std::abs(best.intensity.mean - wide.intensity.mean) <= 3.0 * margin_se;
    const double relative = std::abs(best.intensity.mean - target) / target;
    const bool close = relative <= tolerance;
    const bool pass = close && margin_ok;

    out["converged"] = true;
    out["t_back"] = best.t_back;
    out["intensity"] = estimate_json(best.intensity);
    out["relative_error"] = relative;
    out["within_tolerance"] = close;
    out["doubled_margin_intensity"] = estimate_json(wide.intensity);
    out["margin_stable"] = margin_ok;
    out["unit_avoidance"] = estimate_json(best.empty_unit);
    out["unit_counts"] = best.counts;
    return finish("stationary", config, std::move(out), pass,
                  {format("T_back = %g: intensity %.5f +- %.5f vs %.5f (rel. error %.4f, "
                          "tolerance %.2f) %s",
                          best.t_back, best.intensity.mean, best.intensity.standard_error, target,
                          relative, tolerance, verdict(close)),
                   format("doubled margin: %.5f +- %.5f %s", wide.intensity.mean,
                          wide.intensity.standard_error, verdict(margin_ok)),
                   format("unit-interval avoidance %.5f +- %.5f vs Ai ratio %.5f",
                          best.empty_unit.mean, best.empty_unit.standard_error, avoid_target)});
}

} // namespace coalesce::detail
