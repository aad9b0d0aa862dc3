// Experiments on coalescing random walks.

#include <algorithm>
#include <cmath>
#include <map>

#include "coalesce/lattice.hpp"
#include "coalesce/parallel.hpp"
#include "experiment_support.hpp"

namespace coalesce::detail {

namespace {

constexpr std::uint64_t kGenStream = 100;
constexpr std::uint64_t kWalkStream = 300;
constexpr std::uint64_t kMarginalStream = 700;

std::vector<double> lattice_list(const KeyValueConfig& config, const std::string& key,
                                 double offset, std::size_t min_size)
{
    std::vector<double> v = list(config, key, min_size);
    require(is_nondecreasing(v), "config: '" + key + "' must be nondecreasing");
    for (double s : v) {
        require(on_lattice(s, offset),
                format("config: '%s' must lie on Z%s", key.c_str(), offset == 0.0 ? "" : " + 1/2"));
    }
    return v;
}

double probability(const KeyValueConfig& config, const std::string& key)
{
    const double p = config.real(key);
    require(p >= 0.0 && p <= 1.0, "config: '" + key + "' must lie in [0, 1]");
    return p;
}

Json vector_json(const std::vector<double>& v)
{
    return Json(v);
}

} // namespace

ExperimentResult run_gen_duality(const KeyValueConfig& config, const RunContext& context)
{
    const std::uint64_t cases = config.count("replicates");
    const std::uint64_t m_max = config.count("m_max");
    const std::uint64_t n_max = config.count("n_max");
    const double tolerance = config.real("tolerance");
    require(cases >= 1, "config: replicates must be positive");
    require(m_max >= 2 && n_max >= 2, "config: m_max and n_max must be at least 2");
    require(m_max * (n_max - 1) <= 63, "config: m_max * (n_max - 1) must not exceed 63 bits");
    require(tolerance >= 0.0, "config: tolerance must be nonnegative");
    const std::uint64_t seed = seed_of(config);

    struct Case {
        std::size_t m = 0;
        std::size_t n = 0;
        double p = 0.0;
        double g_side = 0.0;
        double gap = 0.0;
        std::vector<double> x;
        std::vector<double> y;
    };
    const std::vector<Case> results = run_replicates(cases, context.workers, [&](std::size_t r) {
        CounterRng rng(StreamId{seed, kGenStream, r});
        Case c;
        c.m = 2 + static_cast<std::size_t>(rng.below(m_max - 1));
        c.n = 2 + static_cast<std::size_t>(rng.below(n_max - 1));
        // Small ranges so that ties and adjacency are common.
        for (std::size_t i = 0; i < c.m; ++i) {
            c.x.push_back(-3.0 + static_cast<double>(rng.below(7)));
        }
        for (std::size_t j = 0; j < c.n; ++j) {
            c.y.push_back(-3.5 + static_cast<double>(rng.below(8)));
        }
        std::sort(c.x.begin(), c.x.end());
        std::sort(c.y.begin(), c.y.end());
        c.p = rng.uniform();
        const BoxFunction g = BoxFunction::random_rule(c.m, c.n, rng());
        c.g_side = apply_generator(Side::balls, g, c.x, c.y, c.p);
        c.gap = c.g_side - apply_generator(Side::boxes, g, c.x, c.y, c.p);
        return c;
    });

    std::size_t worst = 0;
    std::uint64_t nontrivial = 0;
    std::map<std::string, std::uint64_t> shapes;
    for (std::size_t r = 0; r < results.size(); ++r) {
        if (std::abs(results[r].gap) > std::abs(results[worst].gap)) {
            worst = r;
        }
        nontrivial += std::abs(results[r].g_side) > 1e-12 ? 1 : 0;
        ++shapes[format("m%zu_n%zu", results[r].m, results[r].n)];
    }
    const Case& w = results[worst];
    const double max_gap = std::abs(w.gap);
    const bool pass = max_gap <= tolerance;

    Json out;
    out["cases"] = cases;
    out["max_abs_gap"] = max_gap;
    out["tolerance"] = tolerance;
    out["cases_with_nonzero_generator"] = nontrivial;
    out["shape_counts"] = shapes;
    out["worst_case"] = {{"index", worst}, {"m", w.m}, {"n", w.n}, {"p", w.p},
                         {"x", vector_json(w.x)}, {"y", vector_json(w.y)}, {"gap", w.gap}};
    return finish("gen-duality", config, std::move(out), pass,
                  {format("%llu cases, max |gap| = %.3e (tolerance %.1e), %llu with nonzero G",
                          static_cast<unsigned long long>(cases), max_gap, tolerance,
                          static_cast<unsigned long long>(nontrivial))});
}

ExperimentResult run_nn_necessity(const KeyValueConfig& config, const RunContext&)
{
    const std::int64_t jump = config.integer("jump");
    const std::vector<double> ps = list(config, "p_values", 1);
    const double threshold = config.real("threshold");
    require(jump >= 2, "config: jump must be at least 2");
    for (double p : ps) {
        require(p >= 0.0 && p <= 1.0, "config: p_values must lie in [0, 1]");
    }

    // Every nondecreasing vector of length k over `sites`.
    auto monotone = [](const std::vector<double>& sites, std::size_t k) {
        std::vector<std::vector<double>> out;
        std::vector<std::size_t> idx(k, 0);
        for (;;) {
            std::vector<double> v;
            for (std::size_t i : idx) {
                v.push_back(sites[i]);
            }
            out.push_back(v);
            std::size_t pos = k;
            while (pos > 0 && idx[pos - 1] + 1 == sites.size()) {
                --pos;
            }
            if (pos == 0) {
                return out;
            }
            ++idx[pos - 1];
            for (std::size_t i = pos; i < k; ++i) {
                idx[i] = idx[pos - 1];
            }
        }
    };
    const std::vector<double> balls_sites = {-2, -1, 0, 1, 2};
    const std::vector<double> box_sites = {-2.5, -1.5, -0.5, 0.5, 1.5, 2.5};

    std::uint64_t searched = 0;
    double best = 0.0;
    double control = 0.0;
    Json witness = Json::object();
    for (std::size_t m = 1; m <= 2; ++m) {
        for (std::size_t n = 2; n <= 3; ++n) {
            for (const auto& x : monotone(balls_sites, m)) {
                for (const auto& y : monotone(box_sites, n)) {
                    for (std::size_t i = 0; i < m; ++i) {
                        for (std::size_t j = 0; j + 1 < n; ++j) {
                            const BoxFunction g = BoxFunction::bit(m, n, i, j);
                            for (double p : ps) {
                                ++searched;
                                const double gap =
                                    duality_gap(g, x, y, p, static_cast<int>(jump));
                                control = std::max(control, std::abs(duality_gap(g, x, y, p)));
                                if (std::abs(gap) > best) {
                                    best = std::abs(gap);
                                    witness = {{"m", m},
                                               {"n", n},
                                               {"x", vector_json(x)},
                                               {"y", vector_json(y)},
                                               {"g", format("bit(ball %zu, box %zu)", i, j)},
                                               {"p", p},
                                               {"gap", gap}};
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    const bool pass = best > threshold && control <= 1e-9;
    Json out;
    out["jump"] = jump;
    out["instances"] = searched;
    out["max_abs_gap"] = best;
    out["threshold"] = threshold;
    out["witness"] = witness;
    out["nearest_neighbour_max_abs_gap"] = control;
    return finish("nn-necessity", config, std::move(out), pass,
                  {format("jump %lld: max |gap| = %.4f over %llu instances (needs > %.2f); "
                          "unit jumps on the same instances: %.1e",
                          static_cast<long long>(jump), best,
                          static_cast<unsigned long long>(searched), threshold, control)});
}

ExperimentResult run_rw_duality(const KeyValueConfig& config, const RunContext& context)
{
    const std::uint64_t n = config.count("replicates");
    const double t = config.real("t");
    const std::vector<double> ps = list(config, "p_values", 1);
    require(n >= 1000, "config: replicates must be at least 1000 for the two-sample test");
    require(t >= 0.0, "config: t must be nonnegative");
    for (double p : ps) {
        require(p >= 0.0 && p <= 1.0, "config: p_values must lie in [0, 1]");
    }
    struct Shape {
        std::string label;
        std::vector<double> x;
        std::vector<double> y;
    };
    std::vector<Shape> shapes = {
        {"small", lattice_list(config, "x_small", 0.0, 1), lattice_list(config, "y_small", 0.5, 2)},
        {"large", lattice_list(config, "x_large", 0.0, 1), lattice_list(config, "y_large", 0.5, 2)},
    };
    for (const Shape& s : shapes) {
        require(s.x.size() * (s.y.size() - 1) <= 63, "config: indicator array exceeds 63 bits");
    }
    const std::uint64_t seed = seed_of(config);

    Json cases = Json::array();
    std::vector<std::string> summary;
    bool pass = true;
    std::uint64_t stream = kWalkStream;
    for (const Shape& s : shapes) {
        const std::size_t bits = s.x.size() * (s.y.size() - 1);
        for (double p : ps) {
            const std::uint64_t balls_stream = stream++;
            const std::uint64_t boxes_stream = stream++;
            const auto balls = run_replicates(n, context.workers, [&](std::size_t r) {
                CounterRng rng(StreamId{seed, balls_stream, r});
                const LatticeEnsemble e = simulate_crw(WalkConfig{p, s.x, 0.0}, t, rng);
                return indicator_code(e.positions, s.y);
            });
            const auto boxes = run_replicates(n, context.workers, [&](std::size_t r) {
                CounterRng rng(StreamId{seed, boxes_stream, r});
                const LatticeEnsemble e = simulate_crw(WalkConfig{1.0 - p, s.y, 0.5}, t, rng);
                return indicator_code(s.x, e.positions);
            });
            stats::TestReport report = stats::two_sample_test(sample_of(balls, bits),
                                                              sample_of(boxes, bits));
            report.seed = seed;
            report.config = {{"m", s.x.size()}, {"n", s.y.size()}, {"p", p}, {"t", t},
                             {"x", vector_json(s.x)}, {"y", vector_json(s.y)}};
            pass = pass && report.pass;
            cases.push_back(stats::to_json(report));
            summary.push_back(format("m=%zu n=%zu p=%.2f: chi2=%.2f dof=%.0f p-value=%.4f "
                                     "tv=%.5f (bound %.5f) %s",
                                     s.x.size(), s.y.size(), p, report.statistic,
                                     report.degrees_of_freedom, report.p_value, report.tv,
                                     3.0 * report.tv_bound, verdict(report.pass)));
        }
    }
    Json out;
    out["replicates_per_side"] = n;
    out["cases"] = std::move(cases);
    return finish("rw-duality", config, std::move(out), pass, std::move(summary));
}

ExperimentResult run_marginal(const KeyValueConfig& config, const RunContext& context)
{
    const std::uint64_t n = config.count("replicates");
    const double p = probability(config, "p");
    const double t = config.real("t");
    require(n >= 1, "config: replicates must be positive");
    require(t >= 0.0, "config: t must be nonnegative");
    const std::uint64_t seed = seed_of(config);

    const std::vector<double> start = {0.0};
    const auto displacement = run_replicates(n, context.workers, [&](std::size_t r) {
        CounterRng rng(StreamId{seed, kMarginalStream, r});
        return static_cast<long>(simulate_crw(WalkConfig{p, start, 0.0}, t, rng).positions[0]);
    });
    std::map<long, std::uint64_t> counts;
    for (long k : displacement) {
        ++counts[k];
    }
    double tv = 0.0;
    double covered = 0.0;
    Json table = Json::array();
    for (const auto& [k, c] : counts) {
        const double exact = skellam_pmf(p, t, k);
        const double empirical = static_cast<double>(c) / static_cast<double>(n);
        tv += std::abs(empirical - exact);
        covered += exact;
        table.push_back({{"k", k}, {"count", c}, {"empirical", empirical}, {"exact", exact}});
    }
    tv = 0.5 * (tv + std::max(0.0, 1.0 - covered));
    const double support = static_cast<double>(counts.size());
    const double bound = 3.0 * std::sqrt(support / static_cast<double>(n));
    std::vector<double> as_real(displacement.begin(), displacement.end());
    const stats::MeanEstimate mean = stats::mean_estimate(as_real);
    const bool pass = tv <= bound;

    Json out;
    out["replicates"] = n;
    out["tv"] = tv;
    out["support"] = counts.size();
    out["tv_bound"] = bound;
    out["mean_displacement"] = estimate_json(mean);
    out["expected_mean"] = (2.0 * p - 1.0) * t;
    out["table"] = std::move(table);
    return finish("marginal", config, std::move(out), pass,
                  {format("tv=%.5f over %zu sites (bound 3*sqrt(K/N) = %.5f); mean %.4f vs %.4f",
                          tv, counts.size(), bound, mean.mean, (2.0 * p - 1.0) * t)});
}

} // namespace coalesce::detail
