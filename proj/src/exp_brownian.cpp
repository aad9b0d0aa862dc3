// Experiments on coalescing Brownian motion.

#include <algorithm>
#include <cmath>

#include "coalesce/box_function.hpp"
#include "coalesce/brownian.hpp"
#include "coalesce/parallel.hpp"
#include "experiment_support.hpp"

namespace coalesce::detail {

namespace {

constexpr std::uint64_t kBmStream = 400;
constexpr std::uint64_t kStaggeredStream = 500;
constexpr std::uint64_t kQvStream = 600;

std::vector<double> sorted_list(const KeyValueConfig& config, const std::string& key,
                                std::size_t min_size)
{
    std::vector<double> v = list(config, key, min_size);
    require(is_nondecreasing(v), "config: '" + key + "' must be nondecreasing");
    return v;
}

double positive(const KeyValueConfig& config, const std::string& key)
{
    const double v = config.real(key);
    require(v > 0.0, "config: '" + key + "' must be positive");
    return v;
}

stats::TestReport bm_pair(const std::vector<double>& x, const std::vector<double>& y, double t,
                          double h, std::uint64_t n, std::uint64_t seed, std::uint64_t stream,
                          unsigned workers)
{
    const std::size_t bits = x.size() * (y.size() - 1);
    const auto balls = run_replicates(n, workers, [&](std::size_t r) {
        const RandomField field(StreamId{seed, stream, r});
        return indicator_code(simulate_cbm_final({x, h, t}, field), y);
    });
    const auto boxes = run_replicates(n, workers, [&](std::size_t r) {
        const RandomField field(StreamId{seed, stream + 1, r});
        return indicator_code(x, simulate_cbm_final({y, h, t}, field));
    });
    stats::TestReport report = stats::two_sample_test(sample_of(balls, bits), sample_of(boxes, bits));
    report.seed = seed;
    report.config = {{"t", t}, {"h", h}, {"x", x}, {"y", y}};
    return report;
}

} // namespace

ExperimentResult run_bm_duality(const KeyValueConfig& config, const RunContext& context)
{
    const std::uint64_t n = config.count("replicates");
    const double t = config.real("t");
    const double h = positive(config, "step");
    const std::vector<double> x = sorted_list(config, "x", 1);
    const std::vector<double> y = sorted_list(config, "y", 2);
    require(n >= 1000, "config: replicates must be at least 1000 for the two-sample test");
    require(t >= 0.0, "config: t must be nonnegative");
    require(x.size() * (y.size() - 1) <= 63, "config: indicator array exceeds 63 bits");
    const std::uint64_t seed = seed_of(config);

    const stats::TestReport main = bm_pair(x, y, t, h, n, seed, kBmStream, context.workers);
    const stats::TestReport halved =
        bm_pair(x, y, t, 0.5 * h, n, seed, kBmStream + 2, context.workers);
    const double shift = std::abs(main.tv - halved.tv);
    const bool stable = shift < main.tv_bound;
    const bool pass = main.pass && stable;

    Json out;
    out["replicates_per_side"] = n;
    out["test"] = stats::to_json(main);
    out["halved_step_test"] = stats::to_json(halved);
    out["tv_shift_on_halving"] = shift;
    out["tv_mc_error"] = main.tv_bound;
    out["halving_stable"] = stable;
    return finish("bm-duality", config, std::move(out), pass,
                  {format("h=%g: chi2=%.2f dof=%.0f p-value=%.4f tv=%.5f (bound %.5f) %s", h,
                          main.statistic, main.degrees_of_freedom, main.p_value, main.tv,
                          3.0 * main.tv_bound, verdict(main.pass)),
                   format("h=%g: p-value=%.4f tv=%.5f; |tv shift| = %.5f vs mc error %.5f %s",
                          0.5 * h, halved.p_value, halved.tv, shift, main.tv_bound,
                          verdict(stable))});
}

ExperimentResult run_staggered_duality(const KeyValueConfig& config, const RunContext& context)
{
    const std::uint64_t n = config.count("replicates");
    const double t = config.real("t");
    const double h = positive(config, "step");
    const std::vector<double> births = sorted_list(config, "births", 1);
    const std::vector<double> x = list(config, "x", 1);
    const std::vector<double> y = sorted_list(config, "y", 2);
    require(n >= 1000, "config: replicates must be at least 1000 for the two-sample test");
    require(births.size() == x.size(), "config: births and x must have the same length");
    require(births.front() >= 0.0, "config: births must be nonnegative");
    // The identity is only claimed once every particle has been born.
    require(t >= births.back(), "config: t must be at least the last birth time");
    require(x.size() * (y.size() - 1) <= 63, "config: indicator array exceeds 63 bits");
    const std::uint64_t seed = seed_of(config);

    StaggeredConfig staggered;
    for (std::size_t i = 0; i < x.size(); ++i) {
        staggered.entries.push_back({births[i], x[i]});
    }
    const std::size_t bits = x.size() * (y.size() - 1);
    const std::size_t width = y.size() - 1;
    const std::size_t last = time_grid(h, t).size() - 1;

    const auto forward = run_replicates(n, context.workers, [&](std::size_t r) {
        const RandomField field(StreamId{seed, kStaggeredStream, r});
        return indicator_code(simulate_staggered_final(staggered, h, t, field), y);
    });
    const auto dual = run_replicates(n, context.workers, [&](std::size_t r) {
        const RandomField field(StreamId{seed, kStaggeredStream + 1, r});
        const PathGrid grid = simulate_cbm({y, h, t}, field);
        std::uint64_t code = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            // Box j seen by particle i is [Y_j, Y_{j+1}] at time t - s_i.
            const std::size_t k = grid_index(t - births[i], h, last);
            for (std::size_t j = 0; j < width; ++j) {
                if (grid.paths[j][k] <= x[i] && x[i] <= grid.paths[j + 1][k]) {
                    code |= std::uint64_t{1} << (i * width + j);
                }
            }
        }
        return code;
    });
    stats::TestReport report = stats::two_sample_test(sample_of(forward, bits), sample_of(dual, bits));
    report.seed = seed;
    report.config = {{"t", t}, {"h", h}, {"births", births}, {"x", x}, {"y", y}};

    Json out;
    out["replicates_per_side"] = n;
    out["test"] = stats::to_json(report);
    return finish("staggered-duality", config, std::move(out), report.pass,
                  {format("chi2=%.2f dof=%.0f p-value=%.4f tv=%.5f (bound %.5f) %s",
                          report.statistic, report.degrees_of_freedom, report.p_value, report.tv,
                          3.0 * report.tv_bound, verdict(report.pass))});
}

ExperimentResult run_qv_check(const KeyValueConfig& config, const RunContext& context)
{
    const std::uint64_t n = config.count("replicates");
    const double t = positive(config, "t");
    const double h = positive(config, "step");
    const std::vector<double> starts = sorted_list(config, "starts", 2);
    require(starts.size() == 2, "config: starts must hold exactly two positions");
    require(n >= 2, "config: replicates must be at least 2");
    const std::uint64_t seed = seed_of(config);

    struct Run {
        double covariation = 0.0;
        double target = 0.0;
        double pre_meeting = 0.0;
        double variation = 0.0;
        double mismatch = 0.0;
    };
    const auto runs = run_replicates(n, context.workers, [&](std::size_t r) {
        const PathGrid grid = simulate_cbm({starts, h, t}, RandomField(StreamId{seed, kQvStream, r}));
        const std::vector<double> cross = quadratic_covariation(grid, 0, 1);
        const std::vector<double> meet = meeting_times(grid)[0];
        const double met = std::min(meet[1], t);
        Run out;
        out.covariation = cross.back();
        out.target = t - met;
        out.pre_meeting = cross[grid_index(met, h, grid.points() - 1)];
        out.variation = quadratic_covariation(grid, 0, 0).back();
        out.mismatch = grid.meet[0][1] == meet[1] ? 0.0 : 1.0;
        return out;
    });

    std::vector<double> difference;
    std::vector<double> pre;
    std::vector<double> covariation;
    std::vector<double> target;
    std::vector<double> variation;
    double mismatches = 0.0;
    for (const Run& r : runs) {
        difference.push_back(r.covariation - r.target);
        pre.push_back(r.pre_meeting);
        covariation.push_back(r.covariation);
        target.push_back(r.target);
        variation.push_back(r.variation);
        mismatches += r.mismatch;
    }
    const stats::MeanEstimate d = stats::mean_estimate(difference);
    const stats::MeanEstimate p = stats::mean_estimate(pre);
    const stats::MeanEstimate v = stats::mean_estimate(variation);
    const bool paired_ok = std::abs(d.mean) <= 4.0 * d.standard_error;
    const bool pre_ok = std::abs(p.mean) <= 4.0 * p.standard_error;
    const bool pass = paired_ok && pre_ok && mismatches == 0.0;

    Json out;
    out["replicates"] = n;
    out["covariation_at_t"] = estimate_json(stats::mean_estimate(covariation));
    out["t_minus_meeting"] = estimate_json(stats::mean_estimate(target));
    out["paired_difference"] = estimate_json(d);
    out["paired_within_4se"] = paired_ok;
    out["pre_meeting_covariation"] = estimate_json(p);
    out["pre_meeting_within_4se"] = pre_ok;
    out["self_variation_at_t"] = estimate_json(v);
    out["meeting_time_mismatches"] = mismatches;
    return finish("qv-check", config, std::move(out), pass,
                  {format("<X1,X2>_t - (t - T12 ^ t): %.6f +- %.6f %s", d.mean, d.standard_error,
                          verdict(paired_ok)),
                   format("pre-meeting covariation: %.6f +- %.6f %s", p.mean, p.standard_error,
                          verdict(pre_ok)),
                   format("<X1>_t = %.5f (t = %g); recorded vs scanned meeting times differ in "
                          "%.0f runs",
                          v.mean, t, mismatches)});
}

} // namespace coalesce::detail
