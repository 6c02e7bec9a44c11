#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "auctiondyn/learner.hpp"
#include "auctiondyn/schedule.hpp"

namespace auctiondyn {

struct BidderSpec {
  int value = 0;
  std::optional<int> reported_value;  // defaults to value; caps the bid support
  LearnerKind kind = LearnerKind::kMwu;
  std::optional<double> eta;
  EpsilonSchedule epsilon;

  int report_or_value() const { return reported_value.value_or(value); }
};

struct SimConfig {
  BidGrid grid{1};
  std::int64_t horizon = 0;
  std::vector<BidderSpec> bidders;
  std::shared_ptr<const Schedule> schedule;
  std::vector<std::int64_t> snapshot_rounds;  // empty selects powers of two plus T
  std::uint64_t master_seed = 0;
  std::optional<double> mean_based_delta;  // enables the per-round monitor
  bool collect_traces = false;
  std::size_t table_budget = kDefaultTableBudget;
};

std::vector<std::int64_t> default_snapshot_rounds(std::int64_t horizon);

struct TraceRow {
  int action = 0;
  double prob_truthful = 0.0;
  double expected_bid = 0.0;
  double realized_utility = 0.0;
};

struct MeanBasedReport {
  bool enabled = false;
  bool pass = true;
  std::int64_t violations = 0;
  std::optional<MeanBasedViolation> first;
};

struct SimResult {
  std::vector<double> revenue;  // expected payment at the realized profile, per round
  double total_revenue = 0.0;
  std::vector<std::int64_t> snapshot_rounds;
  std::vector<std::vector<std::vector<double>>> snapshots;  // [snapshot][bidder][bid]
  std::vector<std::vector<double>> final_distribution;      // distribution played in round T
  std::vector<std::vector<double>> final_cumulative;        // counterfactual totals after round T
  std::vector<double> realized_total;                       // per bidder
  std::vector<MeanBasedReport> mean_based;                  // per bidder
  std::vector<std::vector<TraceRow>> traces;                // [bidder][round] when collected
  std::vector<std::string> warnings;
};

SimResult run_trial(const SimConfig& config, std::uint64_t trial);

/// Trial 0 of the master seed.
SimResult run(const SimConfig& config);

struct TrialSummary {
  double total_revenue = 0.0;
  std::vector<std::vector<double>> final_distribution;
  std::vector<double> realized_total;
  std::vector<double> regret_vs_best_fixed;
  std::vector<bool> mean_based_pass;
  std::vector<std::int64_t> mean_based_violations;
};

struct AggregateResult {
  int n_trials = 0;
  std::int64_t horizon = 0;
  std::vector<double> mean_revenue;  // per round
  std::vector<double> std_revenue;   // sample std over trials, per round
  double mean_total_revenue = 0.0;
  double std_total_revenue = 0.0;
  std::vector<std::int64_t> snapshot_rounds;
  std::vector<std::vector<std::vector<double>>> mean_snapshots;
  std::vector<std::vector<double>> mean_final_distribution;
  std::vector<TrialSummary> trials;
  std::vector<std::vector<TraceRow>> traces_trial0;  // when collect_traces was set
  std::vector<std::string> warnings;
};

/// Trial k runs with seeds derived from (master_seed, k, bidder); results are
/// folded in trial order so the aggregate is independent of thread timing.
AggregateResult run_trials(const SimConfig& config, int n_trials, int jobs = 1);

}  // namespace auctiondyn
