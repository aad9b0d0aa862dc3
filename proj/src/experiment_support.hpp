#pragma once

// Shared plumbing for the experiment runners. Not installed.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "coalesce/config.hpp"
#include "coalesce/experiments.hpp"
#include "coalesce/stats.hpp"

namespace coalesce::detail {

using Json = nlohmann::ordered_json;

// printf-style formatting into a std::string.
std::string format(const char* pattern, ...) __attribute__((format(printf, 1, 2)));

// Resolved parameters echoed into the report.
Json echo(const KeyValueConfig& config);

ExperimentResult finish(const std::string& name, const KeyValueConfig& config, Json results,
                        bool pass, std::vector<std::string> summary);

std::uint64_t seed_of(const KeyValueConfig& config);

// List under `key` with at least `min_size` entries.
std::vector<double> list(const KeyValueConfig& config, const std::string& key,
                         std::size_t min_size);

stats::CategoricalSample sample_of(const std::vector<std::uint64_t>& codes, std::size_t bits);

Json estimate_json(const stats::MeanEstimate& e);

const char* verdict(bool pass);

ExperimentResult run_gen_duality(const KeyValueConfig&, const RunContext&);
ExperimentResult run_nn_necessity(const KeyValueConfig&, const RunContext&);
ExperimentResult run_rw_duality(const KeyValueConfig&, const RunContext&);
ExperimentResult run_marginal(const KeyValueConfig&, const RunContext&);
ExperimentResult run_bm_duality(const KeyValueConfig&, const RunContext&);
ExperimentResult run_staggered_duality(const KeyValueConfig&, const RunContext&);
ExperimentResult run_qv_check(const KeyValueConfig&, const RunContext&);
ExperimentResult run_avoidance(const KeyValueConfig&, const RunContext&);
ExperimentResult run_airy_transform(const KeyValueConfig&, const RunContext&);
ExperimentResult run_stationary(const KeyValueConfig&, const RunContext&);
ExperimentResult run_airy_table(const KeyValueConfig&, const RunContext&);
ExperimentResult run_simulate(const KeyValueConfig&, const RunContext&);
ExperimentResult run_repro(const KeyValueConfig&, const RunContext&);

} // namespace coalesce::detail
