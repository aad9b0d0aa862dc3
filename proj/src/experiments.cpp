#include "coalesce/experiments.hpp"

#include <cstdarg>
#include <cstdio>
#include <fstream>

#include "experiment_support.hpp"

namespace coalesce {

namespace detail {

std::string format(const char* pattern, ...)
{
    va_list args;
    va_start(args, pattern);
    va_list copy;
    va_copy(copy, args);
    const int size = std::vsnprintf(nullptr, 0, pattern, copy);
    va_end(copy);
    std::string out(static_cast<std::size_t>(size > 0 ? size : 0), '\0');
    std::vsnprintf(out.data(), out.size() + 1, pattern, args);
    va_end(args);
    return out;
}

Json echo(const KeyValueConfig& config)
{
    Json out = Json::object();
    for (const auto& [key, value] : config.entries()) {
        out[key] = value;
    }
    return out;
}

ExperimentResult finish(const std::string& name, const KeyValueConfig& config, Json results,
                        bool pass, std::vector<std::string> summary)
{
    ExperimentResult out;
    out.name = name;
    out.pass = pass;
    out.summary = std::move(summary);
    const ExperimentSpec& spec = find_experiment(name);
    out.report["command"] = name;
    if (spec.criterion > 0) {
        out.report["criterion"] = spec.criterion;
    }
    out.report["seed"] = seed_of(config);
    out.report["config"] = echo(config);
    out.report["results"] = std::move(results);
    out.report["verdict"] = verdict(pass);
    return out;
}

std::uint64_t seed_of(const KeyValueConfig& config)
{
    return config.count("seed");
}

std::vector<double> list(const KeyValueConfig& config, const std::string& key,
                         std::size_t min_size)
{
    std::vector<double> out = config.reals(key);
    require(out.size() >= min_size,
            format("config: '%s' needs at least %zu values", key.c_str(), min_size));
    return out;
}

stats::CategoricalSample sample_of(const std::vector<std::uint64_t>& codes, std::size_t bits)
{
    stats::CategoricalSample sample(std::uint64_t{1} << bits);
    for (std::uint64_t c : codes) {
        sample.add(c);
    }
    return sample;
}

Json estimate_json(const stats::MeanEstimate& e)
{
    return Json{{"mean", e.mean}, {"standard_error", e.standard_error}, {"n", e.n}};
}

const char* verdict(bool pass)
{
    return pass ? "pass" : "fail";
}

} // namespace detail

namespace {

const std::vector<Param> kSeed = {{"seed", "2718", "master seed"}};

std::vector<Param> with_seed(std::vector<Param> params)
{
    params.insert(params.end(), kSeed.begin(), kSeed.end());
    return params;
}

std::vector<ExperimentSpec> build_catalog()
{
    using namespace detail;
    return {
        {"gen-duality", 1, "exact generator duality over random instances",
         with_seed({{"replicates", "1000", "number of random (g, x, y, p) cases"},
                    {"m_max", "5", "largest ball count"},
                    {"n_max", "5", "largest boundary count"},
                    {"tolerance", "1e-9", "largest accepted |gap|"}}),
         run_gen_duality},
        {"nn-necessity", 2, "duality gap of a walk with jumps of size 2",
         with_seed({{"jump", "2", "jump size of the modified walks"},
                    {"p_values", "0.5,0.7", "right-jump probabilities searched"},
                    {"threshold", "0.1", "|gap| that must be exceeded"}}),
         run_nn_necessity},
        {"rw-duality", 3, "path-level duality of coalescing random walks",
         with_seed({{"replicates", "100000", "runs per side"},
                    {"t", "4", "time horizon"},
                    {"p_values", "0.5,0.7", "right-jump probabilities"},
                    {"x_small", "0,1", "balls for the m = n = 2 case (on Z)"},
                    {"y_small", "-0.5,1.5", "boxes for the m = n = 2 case (on Z + 1/2)"},
                    {"x_large", "-1,0,2", "balls for the m = n = 3 case"},
                    {"y_large", "-1.5,0.5,1.5", "boxes for the m = n = 3 case"}}),
         run_rw_duality},
        {"bm-duality", 4, "duality of coalescing Brownian motions",
         with_seed({{"replicates", "100000", "runs per side"},
                    {"t", "1", "time horizon"},
                    {"step", "1e-3", "time step (the check reruns at h / 2)"},
                    {"x", "-0.4,0.1,0.5", "ball starts"},
                    {"y", "-0.7,0.0,0.6", "box boundary starts"}}),
         run_bm_duality},
        {"staggered-duality", 5, "duality with staggered birth times",
         with_seed({{"replicates", "100000", "runs per side"},
                    {"t", "1", "observation time, at least the last birth"},
                    {"step", "1e-3", "time step"},
                    {"births", "0,0.3,0.6", "birth times, nondecreasing"},
                    {"x", "-0.3,0.2,0.4", "birth positions"},
                    {"y", "-0.7,0.0,0.6", "box boundary starts"}}),
         run_staggered_duality},
        {"qv-check", 6, "quadratic covariation against t - min(T12, t)",
         with_seed({{"replicates", "10000", "two-particle runs"},
                    {"t", "1", "time horizon"},
                    {"step", "1e-4", "time step"},
                    {"starts", "0,0.5", "starting positions"}}),
         run_qv_check},
        {"marginal", 7, "single-walker law against the Skellam distribution",
         with_seed({{"replicates", "100000", "runs"},
                    {"p", "0.7", "right-jump probability"},
                    {"t", "2", "time horizon"}}),
         run_marginal},
        {"avoidance", 8, "avoidance probability: immigration system against its dual",
         with_seed({{"replicates", "100000", "runs per side and interval set"},
                    {"t", "2", "time horizon"},
                    {"lambda", "1", "immigration intensity"},
                    {"step", "2e-3", "time step"},
                    {"intervals_one", "0,1", "first interval set, as lo,hi pairs"},
                    {"intervals_two", "0,1,1.5,2.5", "second interval set"}}),
         run_avoidance},
        {"airy-transform", 9, "Laplace transform of the infinite-time wedge area",
         with_seed({{"replicates", "100000", "wedge samples"},
                    {"lambda", "1", "transform parameter"},
                    {"gap", "1", "initial gap b - a"},
                    {"step", "1e-3", "base time step"},
                    {"tolerance", "0.01", "accepted |mean - Ai ratio|"},
                    {"cap", "1000000", "step cap per sample"},
                    {"max_cap_fraction", "0.001", "accepted fraction of capped samples"}}),
         run_airy_transform},
        {"stationary", 10, "stationary intensity and avoidance from the backward construction",
         with_seed({{"replicates", "2000", "runs per truncation level"},
                    {"lambda", "1", "immigration intensity"},
                    {"core", "0,20", "core window"},
                    {"step", "0.01", "time step"},
                    {"t_back_start", "2", "first truncation tried"},
                    {"t_back_max", "64", "largest truncation tried"},
                    {"tolerance", "0.05", "accepted relative intensity error"}}),
         run_stationary},
        {"airy-table", 11, "Airy kernel table and identity checks",
         with_seed({{"x_max", "10", "table end"}, {"x_step", "0.5", "table spacing"}}),
         run_airy_table},
        {"repro", 12, "byte-identical reports across reruns and worker counts",
         with_seed({{"workers_alt", "3", "second worker count"},
                    {"replicates", "2000", "reduced replicate count for Monte Carlo runs"},
                    {"stationary_replicates", "100", "reduced count for the stationary run"}}),
         run_repro},
        {"simulate", 0, "path and point dumps",
         with_seed({{"model", "cbm", "crw | cbm | unordered | staggered | immigration | stationary"},
                    {"starts", "0,0.5,1", "starting positions"},
                    {"births", "", "birth times (staggered)"},
                    {"p", "0.5", "right-jump probability (crw)"},
                    {"lattice_offset", "0", "0 or 0.5 (crw)"},
                    {"t", "1", "time horizon"},
                    {"step", "1e-3", "time step"},
                    {"lambda", "1", "immigration intensity"},
                    {"window", "-5,5", "space window (immigration, stationary)"},
                    {"t_back", "4", "truncation (stationary)"}}),
         run_simulate},
    };
}

} // namespace

const std::vector<ExperimentSpec>& experiment_catalog()
{
    static const std::vector<ExperimentSpec> catalog = build_catalog();
    return catalog;
}

const ExperimentSpec& find_experiment(const std::string& name)
{
    for (const ExperimentSpec& spec : experiment_catalog()) {
        if (spec.name == name) {
            return spec;
        }
    }
    throw ConfigError("unknown command '" + name + "'");
}

KeyValueConfig resolve(const ExperimentSpec& spec, const KeyValueConfig& given)
{
    KeyValueConfig out;
    for (const Param& p : spec.params) {
        out.set(p.key, given.contains(p.key) ? given.text(p.key) : p.fallback);
    }
    return out;
}

ExperimentResult run_experiment(const std::string& name, const KeyValueConfig& given,
                                const RunContext& context)
{
    const ExperimentSpec& spec = find_experiment(name);
    ExperimentResult result = spec.run(resolve(spec, given), context);
    if (context.out_dir) {
        std::filesystem::create_directories(*context.out_dir);
        std::ofstream out(*context.out_dir / (name + ".json"));
        out << report_text(result);
        if (!out) {
            throw std::runtime_error("cannot write report for " + name);
        }
    }
    return result;
}

std::string report_text(const ExperimentResult& result)
{
    return result.report.dump(2) + "\n";
}

} // namespace coalesce
