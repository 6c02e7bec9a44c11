#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

#include <CLI11.hpp>

#include "auctiondyn/io.hpp"
#include "auctiondyn/presets.hpp"

namespace {

using namespace auctiondyn;

constexpr int kExitOk = 0;
constexpr int kExitAssertion = 1;
constexpr int kExitUsage = 2;
constexpr int kExitResource = 3;

int default_jobs() {
  if (const char* env = std::getenv("AUCTION_DYNAMICS_JOBS")) {
    int jobs = std::atoi(env);
    if (jobs >= 1) return jobs;
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

int cmd_verify(const std::string& mechanism_file, std::size_t budget) {
  Mechanism mechanism = io::parse_mechanism(io::load_json_file(mechanism_file));
  ICReport report = verify_ic(mechanism, budget);
  std::cout << io::ic_report_to_json(report, mechanism, budget).dump(2) << "\n";
  return (report.ic_ok() && report.ir_ok) ? kExitOk : kExitAssertion;
}

int cmd_simulate(const std::string& config_file, const std::string& out_dir,
                 std::optional<std::uint64_t> seed, int trials, int jobs,
                 int benchmark_reserve) {
  SimConfig cfg = io::parse_sim_config(io::load_json_file(config_file));
  if (seed) cfg.master_seed = *seed;
  AggregateResult agg = run_trials(cfg, trials, jobs);
  io::write_simulation_outputs(cfg, agg, out_dir, benchmark_reserve);
  std::cout << "wrote " << out_dir << "/revenue.csv, snapshots.csv, summary.json\n";
  return kExitOk;
}

int cmd_sweep(const std::optional<std::string>& preset, const std::optional<std::string>& config_file,
              std::vector<std::int64_t> t_list, int trials, int jobs,
              std::optional<std::uint64_t> seed, const std::string& out_dir,
              int benchmark_reserve) {
  if (t_list.size() < 2) {
    std::cerr << "error: need >= 2 horizons in --T-list\n";
    return kExitUsage;
  }
  std::sort(t_list.begin(), t_list.end());

  std::vector<SweepRow> rows;
  std::vector<std::pair<std::string, ExponentFit>> fits;

  if (preset) {
    if (*preset != "regret-constant-vs-twophase") {
      std::cerr << "error: only the regret-constant-vs-twophase preset sweeps over T\n";
      return kExitUsage;
    }
    SweepOutcome outcome = sweep_regret_schedules(t_list, trials, jobs, seed.value_or(2004));
    rows = std::move(outcome.rows);
    fits = std::move(outcome.fits);
  } else if (config_file) {
    io::json base = io::load_json_file(*config_file);
    std::vector<std::pair<double, double>> points;
    std::string name;
    for (std::int64_t horizon : t_list) {
      io::json doc = base;
      doc["horizon"] = horizon;
      SimConfig cfg = io::parse_sim_config(doc);
      if (seed) cfg.master_seed = *seed;
      name = cfg.schedule->segments().front().mechanism.name();
      AggregateResult agg = run_trials(cfg, trials, jobs);
      std::vector<int> values;
      for (const auto& b : cfg.bidders) values.push_back(b.value);
      double benchmark = truthful_spa_revenue(cfg.grid, values, benchmark_reserve) *
                         static_cast<double>(horizon);
      SweepRow row;
      row.schedule = name;
      row.horizon = horizon;
      row.mean_regret = benchmark - agg.mean_total_revenue;
      row.std_regret = agg.std_total_revenue;
      row.delta_t = cfg.schedule->metadata().delta_t;
      row.p_mix = cfg.schedule->metadata().p_mix;
      row.t_switch = cfg.schedule->metadata().t_switch;
      row.clamped = cfg.schedule->metadata().clamped;
      for (const auto& trial : agg.trials)
        for (bool ok : trial.mean_based_pass)
          if (!ok) row.mean_based_all_pass = false;
      points.emplace_back(static_cast<double>(horizon), row.mean_regret);
      rows.push_back(std::move(row));
    }
    fits.emplace_back(name, fit_scaling_exponent(points));
  } else {
    std::cerr << "error: sweep needs --preset or --config\n";
    return kExitUsage;
  }

  std::filesystem::create_directories(out_dir);
  {
    std::ofstream out(std::filesystem::path(out_dir) / "sweep.csv", std::ios::binary);
    out << "schedule,T,mean_regret,std_regret\r\n";
    for (const auto& row : rows)
      out << row.schedule << ',' << row.horizon << ',' << io::format_double(row.mean_regret)
          << ',' << io::format_double(row.std_regret) << "\r\n";
  }
  io::json summary;
  summary["t_list"] = t_list;
  summary["trials"] = trials;
  summary["schedules"] = io::json::array();
  for (const auto& [name, fit] : fits) {
    io::json entry;
    entry["name"] = name;
    entry["exponent"] = fit.exponent;
    entry["exponent_valid"] = fit.valid;
    entry["used_points"] = fit.used_points;
    entry["excluded_points"] = fit.excluded;
    if (!fit.excluded.empty())
      std::cerr << "warning: " << fit.excluded.size()
                << " non-positive regret points excluded from the " << name << " fit\n";
    entry["points"] = io::json::array();
    for (const auto& row : rows) {
      if (row.schedule != name) continue;
      io::json point;
      point["T"] = row.horizon;
      point["mean_regret"] = row.mean_regret;
      point["std_regret"] = row.std_regret;
      point["mean_based_all_pass"] = row.mean_based_all_pass;
      entry["points"].push_back(point);
    }
    summary["schedules"].push_back(entry);
  }
  io::write_json_file(std::filesystem::path(out_dir) / "summary.json", summary);
  std::cout << "wrote " << out_dir << "/sweep.csv, summary.json\n";
  return kExitOk;
}

int cmd_reproduce(const std::string& preset_id, int jobs, const std::optional<std::string>& out_dir) {
  bool known = false;
  for (const auto& id : preset_ids()) known |= (id == preset_id);
  if (!known) {
    std::cerr << "error: unknown preset '" << preset_id << "'; known presets:";
    for (const auto& id : preset_ids()) std::cerr << ' ' << id;
    std::cerr << "\n";
    return kExitUsage;
  }

  PresetReport report = run_preset(preset_id, jobs);
  std::cout << "preset " << report.id << "\n";
  for (const auto& a : report.assertions) {
    std::cout << (a.pass ? "PASS" : "FAIL") << " [" << (a.hard ? "hard" : "soft") << "] "
              << a.name << ": " << a.detail << "\n";
  }
  if (out_dir) {
    io::json doc;
    doc["id"] = report.id;
    doc["assertions"] = io::json::array();
    for (const auto& a : report.assertions) {
      io::json entry;
      entry["name"] = a.name;
      entry["hard"] = a.hard;
      entry["pass"] = a.pass;
      entry["detail"] = a.detail;
      doc["assertions"].push_back(entry);
    }
    doc["artifacts"] = report.artifacts;
    io::write_json_file(std::filesystem::path(*out_dir) / (report.id + ".json"), doc);
  }
  return report.hard_pass() ? kExitOk : kExitAssertion;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"repeated truthful auctions against mean-based learning bidders"};
  app.require_subcommand(1);
  int jobs = default_jobs();

  auto* verify = app.add_subcommand("verify", "exhaustively check a mechanism's incentives");
  std::string mechanism_file;
  std::size_t budget = kDefaultVerifyBudget;
  verify->add_option("mechanism", mechanism_file, "mechanism JSON file")->required();
  verify->add_option("--budget", budget, "max gap evaluations for the scan");

  auto* simulate = app.add_subcommand("simulate", "run a repeated-auction simulation");
  std::string config_file, out_dir = "out";
  std::optional<std::uint64_t> seed;
  int trials = 1;
  int benchmark_reserve = 0;
  simulate->add_option("--config", config_file, "simulation config JSON")->required();
  simulate->add_option("--out", out_dir, "output directory");
  simulate->add_option("--seed", seed, "override master seed");
  simulate->add_option("--trials", trials, "number of trials");
  simulate->add_option("--jobs", jobs, "parallel trials");
  simulate->add_option("--benchmark-reserve", benchmark_reserve,
                       "reserve index for the regret benchmark");

  auto* sweep = app.add_subcommand("sweep", "regret across a list of horizons");
  std::optional<std::string> sweep_preset, sweep_config;
  std::vector<std::int64_t> t_list;
  int sweep_trials = 20;
  std::string sweep_out = "out";
  std::optional<std::uint64_t> sweep_seed;
  int sweep_reserve = 0;
  sweep->add_option("--preset", sweep_preset, "preset id (regret-constant-vs-twophase)");
  sweep->add_option("--config", sweep_config, "simulation config JSON template");
  sweep->add_option("--T-list", t_list, "horizons")->delimiter(',');
  sweep->add_option("--trials", sweep_trials, "trials per horizon");
  sweep->add_option("--jobs", jobs, "parallel trials");
  sweep->add_option("--seed", sweep_seed, "override master seed");
  sweep->add_option("--out", sweep_out, "output directory");
  sweep->add_option("--benchmark-reserve", sweep_reserve,
                    "reserve index for the regret benchmark");

  auto* reproduce = app.add_subcommand("reproduce", "run a named experiment preset");
  std::string preset_id;
  std::optional<std::string> reproduce_out;
  reproduce->add_option("preset", preset_id, "preset id")->required();
  reproduce->add_option("--jobs", jobs, "parallel trials");
  reproduce->add_option("--out", reproduce_out, "directory for the JSON report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (verify->parsed()) return cmd_verify(mechanism_file, budget);
    if (simulate->parsed())
      return cmd_simulate(config_file, out_dir, seed, trials, jobs, benchmark_reserve);
    if (sweep->parsed())
      return cmd_sweep(sweep_preset, sweep_config, t_list, sweep_trials, jobs, sweep_seed,
                       sweep_out, sweep_reserve);
    if (reproduce->parsed()) return cmd_reproduce(preset_id, jobs, reproduce_out);
  } catch (const ResourceError& e) {
    std::cerr << "resource error: " << e.what() << "\n";
    return kExitResource;
  } catch (const io::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
