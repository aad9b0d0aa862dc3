// Airy table, path dumps and the reproducibility check.

#include <cmath>
#include <fstream>
#include <numbers>

#include <boost/math/special_functions/airy.hpp>

#include "coalesce/flow.hpp"
#include "coalesce/lattice.hpp"
#include "coalesce/special.hpp"
#include "experiment_support.hpp"

namespace coalesce::detail {

namespace {

std::ofstream open_dump(const RunContext& context, const std::string& file)
{
    std::filesystem::create_directories(*context.out_dir);
    std::ofstream out(*context.out_dir / file);
    if (!out) {
        throw std::runtime_error("cannot write " + file);
    }
    return out;
}

} // namespace

ExperimentResult run_airy_table(const KeyValueConfig& config, const RunContext& context)
{
    const double x_max = config.real("x_max");
    const double x_step = config.real("x_step");
    require(x_max >= 0.0 && x_step > 0.0, "config: need x_max >= 0 and x_step > 0");

    Json table = Json::array();
    double max_error = 0.0;
    double max_error_core = 0.0;
    bool monotone = true;
    double previous = special::airy_ai(0.0) * 2.0;
    const auto points = static_cast<std::size_t>(std::floor(x_max / x_step + 1e-9));
    for (std::size_t k = 0; k <= points; ++k) {
        const double x = static_cast<double>(k) * x_step;
        const special::AiryEval e = special::airy_ai_eval(x);
        const double reference = boost::math::airy_ai(x);
        const double error = std::abs(e.value - reference);
        max_error = std::max(max_error, error);
        if (x <= special::kAiryCrossover) {
            max_error_core = std::max(max_error_core, error);
        }
        monotone = monotone && e.value > 0.0 && e.value < previous;
        previous = e.value;
        table.push_back({{"x", x},
                         {"ai", e.value},
                         {"method", e.method == special::AiryMethod::series ? "series" : "asymptotic"},
                         {"reference", reference},
                         {"abs_error", error}});
    }

    const long double reflection =
        special::kGammaOneThird * special::kGammaTwoThirds -
        2.0L * std::numbers::pi_v<long double> / std::sqrt(3.0L);
    double identity = 0.0;
    for (double lambda : {0.1, 1.0, 10.0}) {
        identity = std::max(identity, std::abs(special::stationary_intensity(lambda) -
                                               special::stationary_intensity_from_airy(lambda)));
    }
    const long double at = special::kAiryCrossover;
    const double crossover = static_cast<double>(
        std::abs(special::airy_ai_series(at) - special::airy_ai_asymptotic(at)));
    const double delta = 1e-7;
    const double slope = (special::stationary_avoidance(1.0, delta) - 1.0) / delta;
    const double derivative = std::abs(slope + special::stationary_intensity(1.0));

    const bool pass = max_error <= 1e-10 && std::abs(static_cast<double>(reflection)) <= 1e-12 &&
                      identity <= 1e-10 && crossover <= 1e-10 && derivative <= 1e-6 && monotone;
    if (context.out_dir) {
        std::ofstream csv = open_dump(context, "airy_table.csv");
        csv.precision(17);
        csv << "x,ai,method,reference\n";
        for (const auto& row : table) {
            csv << row["x"].get<double>() << ',' << row["ai"].get<double>() << ','
                << row["method"].get<std::string>() << ',' << row["reference"].get<double>()
                << '\n';
        }
    }

    Json out;
    out["table"] = std::move(table);
    out["max_abs_error_vs_reference"] = max_error;
    out["max_abs_error_vs_reference_0_to_crossover"] = max_error_core;
    out["positive_decreasing"] = monotone;
    out["gamma_reflection_error"] = static_cast<double>(std::abs(reflection));
    out["intensity_identity_error"] = identity;
    out["crossover_mismatch"] = crossover;
    out["avoidance_slope_at_zero"] = slope;
    out["avoidance_slope_error"] = derivative;
    out["ai_0"] = special::airy_ai(0.0);
    out["ai_prime_0"] = special::airy_ai_prime(0.0);
    out["intensity_lambda_1"] = special::stationary_intensity(1.0);
    out["avoidance_lambda_1_length_1"] = special::stationary_avoidance(1.0, 1.0);
    return finish("airy-table", config, std::move(out), pass,
                  {format("max |Ai - reference| on [0, %g]: %.2e", x_max, max_error),
                   format("Gamma reflection %.2e, intensity identity %.2e, crossover %.2e, "
                          "slope at 0 %.2e",
                          static_cast<double>(std::abs(reflection)), identity, crossover,
                          derivative)});
}

ExperimentResult run_simulate(const KeyValueConfig& config, const RunContext& context)
{
    const std::string model = config.text("model");
    const double t = config.real("t");
    const double h = config.real("step");
    const std::uint64_t seed = seed_of(config);
    require(t >= 0.0, "config: t must be nonnegative");
    require(h > 0.0, "config: step must be positive");
    const RandomField field(StreamId{seed, 0, 0});
    Json out;
    out["model"] = model;
    std::vector<std::string> summary;

    auto dump_grid = [&](const PathGrid& grid) {
        if (context.out_dir) {
            std::ofstream csv = open_dump(context, "paths.csv");
            write_path_csv(csv, grid);
            std::ofstream meet = open_dump(context, "meeting_times.json");
            meet << meeting_times_json(grid.meet).dump(2) << '\n';
        }
        std::vector<Json> final;
        for (std::size_t i = 0; i < grid.particles(); ++i) {
            const auto v = grid.at(i, grid.points() - 1);
            final.push_back(v ? Json(*v) : Json());
        }
        out["final_positions"] = final;
        out["meeting_times"] = meeting_times_json(grid.meet);
        summary.push_back(format("%zu particles, %zu grid points", grid.particles(), grid.points()));
    };
    auto dump_points = [&](const PointSample& s) {
        if (context.out_dir) {
            std::ofstream csv = open_dump(context, "points.csv");
            write_point_csv(csv, s);
        }
        out["points"] = s.size();
        out["locations"] = s.locations;
        out["multiplicities"] = s.multiplicities;
        summary.push_back(format("%zu points", s.size()));
    };

    try {
        if (model == "crw") {
            WalkConfig walk{config.real("p"), config.reals("starts"), config.real("lattice_offset")};
            walk.validate();
            CounterRng rng(StreamId{seed, 0, 0});
            std::vector<WalkEvent> events;
            const LatticeEnsemble e = simulate_crw(walk, t, rng, &events);
            if (context.out_dir) {
                std::ofstream csv = open_dump(context, "events.csv");
                write_event_csv(csv, events);
            }
            out["final_positions"] = e.positions;
            out["blocks"] = e.partition.length();
            out["events"] = events.size();
            summary.push_back(format("%zu events, %zu blocks at t", events.size(),
                                     e.partition.length()));
        } else if (model == "cbm") {
            BMEnsembleConfig cbm{config.reals("starts"), h, t};
            cbm.validate();
            dump_grid(simulate_cbm(cbm, field));
        } else if (model == "unordered") {
            dump_grid(simulate_unordered(config.reals("starts"), h, t, field));
        } else if (model == "staggered") {
            const std::vector<double> births = config.reals("births");
            const std::vector<double> starts = config.reals("starts");
            require(births.size() == starts.size(), "config: births and starts differ in length");
            StaggeredConfig staggered;
            for (std::size_t i = 0; i < births.size(); ++i) {
                staggered.entries.push_back({births[i], starts[i]});
            }
            dump_grid(simulate_staggered(staggered, h, t, field));
        } else if (model == "immigration" || model == "stationary") {
            const std::vector<double> window = list(config, "window", 2);
            FlowConfig flow;
            flow.lambda = config.real("lambda");
            flow.x_lo = window[0];
            flow.x_hi = window[1];
            flow.horizon = t > 0.0 ? t : h;
            flow.step = h;
            flow.truncation = config.real("t_back");
            flow.margin = 0.0;
            flow.validate();
            if (model == "immigration") {
                require(t > 0.0, "config: t must be positive for the immigration model");
                const ImmigrationRun run = simulate_immigration_system(flow, seed, true);
                out["atoms"] = run.atoms.size();
                dump_points(run.points);
            } else {
                dump_points(sample_S_infty(flow, seed));
            }
        } else {
            throw ConfigError("config: unknown model '" + model + "'");
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return finish("simulate", config, std::move(out), true, std::move(summary));
}

ExperimentResult run_repro(const KeyValueConfig& config, const RunContext&)
{
    const std::uint64_t alt = config.count("workers_alt");
    const std::string reduced = config.text("replicates");
    const std::string stationary = config.text("stationary_replicates");
    require(alt >= 1, "config: workers_alt must be positive");

    Json cases = Json::array();
    std::vector<std::string> summary;
    bool pass = true;
    for (const ExperimentSpec& spec : experiment_catalog()) {
        if (spec.criterion == 0 || spec.name == "repro") {
            continue;
        }
        KeyValueConfig given;
        given.set("seed", config.text("seed"));
        given.set("replicates", spec.name == "stationary" ? stationary : reduced);
        const KeyValueConfig resolved = resolve(spec, given);
        RunContext serial;
        RunContext parallel;
        parallel.workers = static_cast<unsigned>(alt);
        const std::string first = report_text(spec.run(resolved, serial));
        const std::string second = report_text(spec.run(resolved, parallel));
        const std::string third = report_text(spec.run(resolved, serial));
        const bool same_workers = first == third;
        const bool across_workers = first == second;
        pass = pass && same_workers && across_workers;
        cases.push_back({{"command", spec.name},
                         {"replicates", resolved.contains("replicates") ? resolved.text("replicates") : "n/a"},
                         {"bytes", first.size()},
                         {"rerun_identical", same_workers},
                         {"worker_count_identical", across_workers}});
        summary.push_back(format("%-18s %zu bytes, rerun %s, workers 1 vs %llu %s",
                                 spec.name.c_str(), first.size(),
                                 same_workers ? "identical" : "DIFFERENT",
                                 static_cast<unsigned long long>(alt),
                                 across_workers ? "identical" : "DIFFERENT"));
    }
    Json out;
    out["cases"] = std::move(cases);
    return finish("repro", config, std::move(out), pass, std::move(summary));
}

} // namespace coalesce::detail
