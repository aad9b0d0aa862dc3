// Command-line front end: one subcommand per verification experiment.
//
//   coalesce_cli <command> [--config FILE] [--seed N] [--replicates N]
//                [--out-dir DIR] [--workers N] [--<key> VALUE ...]
//   coalesce_cli all [--config FILE] [--seed N] [--out-dir DIR] [--workers N]
//
// Exit status: 0 when every verdict passes, 1 when one fails or a run
// aborts, 2 on invalid configuration.

#include <cstdio>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "coalesce/experiments.hpp"
#include "coalesce/parallel.hpp"

namespace {

using coalesce::ExperimentResult;
using coalesce::ExperimentSpec;
using coalesce::KeyValueConfig;

struct Common {
    std::string config_file;
    std::string out_dir;
    unsigned workers = coalesce::default_workers();
    std::map<std::string, std::string> flags;  // key -> value as given
};

void add_common(CLI::App& sub, Common& common)
{
    sub.add_option("--config", common.config_file, "flat key = value configuration file");
    sub.add_option("--out-dir", common.out_dir, "directory for JSON reports and CSV dumps");
    sub.add_option("--workers", common.workers, "worker threads (reports do not depend on it)")
        ->check(CLI::PositiveNumber);
}

KeyValueConfig layered(const Common& common)
{
    KeyValueConfig config;
    if (!common.config_file.empty()) {
        config = KeyValueConfig::load(common.config_file);
    }
    for (const auto& [key, value] : common.flags) {
        config.set(key, value);
    }
    return config;
}

void print(const ExperimentResult& result, int criterion)
{
    std::printf("[%s] %s", result.pass ? "PASS" : "FAIL", result.name.c_str());
    if (criterion > 0) {
        std::printf(" (criterion %d)", criterion);
    }
    std::printf("\n");
    for (const std::string& line : result.summary) {
        std::printf("    %s\n", line.c_str());
    }
    std::fflush(stdout);
}

coalesce::RunContext context_of(const Common& common)
{
    coalesce::RunContext context;
    context.workers = common.workers;
    if (!common.out_dir.empty()) {
        context.out_dir = common.out_dir;
    }
    return context;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Coalescing random walk and Brownian motion verification suite"};
    app.require_subcommand(1);

    Common common;
    std::string chosen;
    for (const ExperimentSpec& spec : coalesce::experiment_catalog()) {
        CLI::App* sub = app.add_subcommand(spec.name, spec.title);
        add_common(*sub, common);
        bool has_replicates = false;
        for (const coalesce::Param& p : spec.params) {
            has_replicates = has_replicates || p.key == "replicates";
            sub->add_option_function<std::string>(
                   "--" + p.key, [&common, key = p.key](const std::string& v) { common.flags[key] = v; },
                   p.help)
                ->default_str(p.fallback);
        }
        if (!has_replicates) {
            sub->add_option_function<std::string>(
                "--replicates", [&common](const std::string& v) { common.flags["replicates"] = v; },
                "ignored: this command has no Monte Carlo replicates");
        }
        sub->callback([&chosen, name = spec.name] { chosen = name; });
    }
    CLI::App* all = app.add_subcommand("all", "run every criterion in order");
    add_common(*all, common);
    all->add_option_function<std::string>(
        "--seed", [&common](const std::string& v) { common.flags["seed"] = v; }, "master seed");
    all->add_option_function<std::string>(
        "--replicates", [&common](const std::string& v) { common.flags["replicates"] = v; },
        "replicate count applied to every command");
    all->callback([&chosen] { chosen = "all"; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        const KeyValueConfig config = layered(common);
        const coalesce::RunContext context = context_of(common);
        if (chosen != "all") {
            const ExperimentResult result = coalesce::run_experiment(chosen, config, context);
            print(result, coalesce::find_experiment(chosen).criterion);
            return result.pass ? 0 : 1;
        }
        bool pass = true;
        for (const ExperimentSpec& spec : coalesce::experiment_catalog()) {
            if (spec.criterion == 0) {
                continue;
            }
            const ExperimentResult result = coalesce::run_experiment(spec.name, config, context);
            print(result, spec.criterion);
            pass = pass && result.pass;
        }
        std::printf("%s\n", pass ? "all criteria passed" : "some criteria failed");
        return pass ? 0 : 1;
    } catch (const coalesce::ConfigError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
