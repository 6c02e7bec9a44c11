#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "auctiondyn/distribution.hpp"
#include "auctiondyn/metrics.hpp"
#include "auctiondyn/sim.hpp"

namespace auctiondyn::io {

using nlohmann::json;

/// Thrown on malformed JSON or documents that fail structural checks; the
/// message carries line/column diagnostics where available.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

json load_json_file(const std::filesystem::path& path);

/// Mechanism spec: {"kind": "spa"|"staircase"|"softmax"|"mix"|"table", ...}.
Mechanism parse_mechanism(const json& doc);

/// {"kind": "uniform"} or {"kind": "pmf", "weights": [...]} (normalized).
DiscreteDistribution parse_distribution(const json& doc, const BidGrid& grid);

SimConfig parse_sim_config(const json& doc);

json ic_report_to_json(const ICReport& report, const Mechanism& mechanism,
                       std::size_t budget = kDefaultTableBudget);

json summary_from_aggregate(const SimConfig& config, const AggregateResult& aggregate,
                            int benchmark_reserve = 0);

/// Shortest round-trip decimal rendering (consistent across runs).
std::string format_double(double x);

void write_revenue_csv(const std::filesystem::path& path, std::span<const double> mean,
                       std::span<const double> std_dev);
void write_snapshots_csv(const std::filesystem::path& path,
                         std::span<const std::int64_t> rounds,
                         const std::vector<std::vector<std::vector<double>>>& snapshots);
void write_trace_csv(const std::filesystem::path& path, const BidGrid& grid,
                     const std::vector<TraceRow>& trace);
void write_json_file(const std::filesystem::path& path, const json& doc);

/// Writes revenue.csv, snapshots.csv, summary.json (and per-bidder trace CSVs
/// when collected) into dir; returns the summary document.
json write_simulation_outputs(const SimConfig& config, const AggregateResult& aggregate,
                              const std::filesystem::path& dir, int benchmark_reserve = 0);

}  // namespace auctiondyn::io
