#pragma once

// One runner per verification experiment. Each takes a resolved flat
// configuration, runs to completion and returns a JSON report whose bytes
// depend only on the configuration (never on timing or worker count).

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "coalesce/config.hpp"

namespace coalesce {

struct RunContext {
    unsigned workers = 1;
    std::optional<std::filesystem::path> out_dir;  // reports and dumps go here when set
};

struct Param {
    std::string key;
    std::string fallback;
    std::string help;
};

struct ExperimentResult {
    std::string name;
    bool pass = false;
    std::vector<std::string> summary;  // human-readable lines
    nlohmann::ordered_json report;
};

using ExperimentFn = ExperimentResult (*)(const KeyValueConfig&, const RunContext&);

struct ExperimentSpec {
    std::string name;
    int criterion = 0;  // 0 for utilities without a verdict of their own
    std::string title;
    std::vector<Param> params;
    ExperimentFn run = nullptr;
};

const std::vector<ExperimentSpec>& experiment_catalog();

// Throws ConfigError for an unknown name.
const ExperimentSpec& find_experiment(const std::string& name);

// Defaults for every parameter of `spec`, overridden by `given`. Keys that
// the experiment does not use are ignored.
KeyValueConfig resolve(const ExperimentSpec& spec, const KeyValueConfig& given);

// Resolves, runs, and writes <out_dir>/<name>.json when an output
// directory is set.
ExperimentResult run_experiment(const std::string& name, const KeyValueConfig& given,
                                const RunContext& context);

// The report as written to disk.
std::string report_text(const ExperimentResult& result);

} // namespace coalesce
