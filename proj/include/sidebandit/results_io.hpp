#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sidebandit/harness.hpp"

namespace sidebandit {

// Doubles are written in shortest round-trip form (std::to_chars in CSV,
// nlohmann's equivalent in JSON), so equal inputs produce identical bytes.
// An undefined ratio (t = 1) is "nan" in CSV and null in JSON.

struct ResultsTable {
    nlohmann::json config;              // echo of the run configuration
    std::vector<std::uint64_t> seeds;   // per-replication stream seeds
    std::vector<AggregateRow> rows;
};

std::string format_double(double x);

nlohmann::json run_config_to_json(const RunConfig& config);

/// Columns: t,mean_regret,stderr,regret_over_logt. Throws on empty rows or IO failure.
void write_csv(const std::vector<AggregateRow>& rows, const std::filesystem::path& path);
void write_json(const ResultsTable& results, const std::filesystem::path& path);
ResultsTable read_results_json(const std::filesystem::path& path);

nlohmann::json trace_to_json(const RegretTrace& trace);

/// out_dir/{config.json, results.csv, results.json, traces/rep_NNNN.json}
void write_results_dir(const RunConfig& config, const std::vector<RegretTrace>& traces,
                       const std::vector<AggregateRow>& rows, const std::filesystem::path& out_dir);

}  // namespace sidebandit
