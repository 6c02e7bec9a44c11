#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "auctiondyn/metrics.hpp"
#include "auctiondyn/sim.hpp"

namespace auctiondyn {

struct PresetAssertion {
  std::string name;
  bool hard = true;
  bool pass = false;
  std::string detail;
};

struct PresetReport {
  std::string id;
  std::vector<PresetAssertion> assertions;
  nlohmann::json artifacts;

  bool hard_pass() const {
    for (const auto& a : assertions)
      if (a.hard && !a.pass) return false;
    return true;
  }
};

const std::vector<std::string>& preset_ids();

/// One sweep measurement: a schedule family evaluated at one horizon.
struct SweepRow {
  std::string schedule;
  std::int64_t horizon = 0;
  double mean_regret = 0.0;
  double std_regret = 0.0;
  double delta_t = 0.0;
  double p_mix = -1.0;
  std::int64_t t_switch = -1;
  bool clamped = false;
  bool mean_based_all_pass = true;
};

struct SweepOutcome {
  std::vector<SweepRow> rows;
  // One fit per schedule family, in first-appearance order.
  std::vector<std::pair<std::string, ExponentFit>> fits;
};

/// Constant-mixture and two-phase staircase schedules against MWU bidders
/// with values (0.3, 0.4) on the delta=10 grid, delta_T = sqrt(log 11 / T).
SweepOutcome sweep_regret_schedules(std::span<const std::int64_t> t_list, int trials, int jobs,
                                    std::uint64_t master_seed);

/// Runs one of the named experiment presets. Every preset pins its own
/// parameters and seeds; jobs bounds trial-level parallelism.
PresetReport run_preset(const std::string& id, int jobs);

// Individual presets; rate-phase-transition accepts the equal-rate baseline
// probability so callers that already ran det-nonconvergence can share it.
PresetReport run_strict_ic_convergence(int jobs);
PresetReport run_det_nonconvergence(int jobs);
PresetReport run_rate_phase_transition(int jobs, std::optional<double> baseline_prob = {});
PresetReport run_regret_separation(int jobs);
PresetReport run_spa_reserve_gap(int jobs);
PresetReport run_metagame(int jobs);

}  // namespace auctiondyn
