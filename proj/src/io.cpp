#include "auctiondyn/io.hpp"

#include <charconv>
#include <fstream>
#include <numeric>
#include <sstream>

namespace auctiondyn::io {

namespace {

[[noreturn]] void fail(const std::string& context, const std::string& message) {
  throw ParseError(context + ": " + message);
}

int require_int(const json& doc, const std::string& key, const std::string& context) {
  if (!doc.contains(key)) fail(context, "missing key '" + key + "'");
  if (!doc[key].is_number_integer() && !doc[key].is_number_unsigned())
    fail(context, "'" + key + "' must be an integer");
  return doc[key].get<int>();
}

double require_number(const json& doc, const std::string& key, const std::string& context) {
  if (!doc.contains(key)) fail(context, "missing key '" + key + "'");
  if (!doc[key].is_number()) fail(context, "'" + key + "' must be a number");
  return doc[key].get<double>();
}

std::string require_string(const json& doc, const std::string& key, const std::string& context) {
  if (!doc.contains(key)) fail(context, "missing key '" + key + "'");
  if (!doc[key].is_string()) fail(context, "'" + key + "' must be a string");
  return doc[key].get<std::string>();
}

TieBreakRule parse_tie(const std::string& name, const std::string& context) {
  if (name == "uniform_split") return TieBreakRule::kUniformSplit;
  if (name == "favor_lower_index") return TieBreakRule::kFavorLowerIndex;
  if (name == "favor_higher_index") return TieBreakRule::kFavorHigherIndex;
  fail(context, "unknown tie rule '" + name + "'");
}

// Flattens an n-deep nested array indexed [b_1][b_2]...[b_n]; bidder 1 is the
// most significant digit of the flat index.
void flatten_table(const json& node, int depth, int n, int actions,
                   std::vector<double>& out, const std::string& context) {
  if (depth == n) {
    if (!node.is_number()) fail(context, "table leaf must be a number");
    out.push_back(node.get<double>());
    return;
  }
  if (!node.is_array() || node.size() != static_cast<std::size_t>(actions))
    fail(context, "table nesting must have delta+1 entries per level");
  for (const auto& child : node) flatten_table(child, depth + 1, n, actions, out, context);
}

}  // namespace

json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // Convert the byte offset into a line/column pair.
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ParseError(path.string() + ":" + std::to_string(line) + ":" + std::to_string(column) +
                     ": " + e.what());
  }
}

Mechanism parse_mechanism(const json& doc) {
  if (!doc.is_object()) fail("mechanism", "must be a JSON object");
  std::string kind = require_string(doc, "kind", "mechanism");

  if (kind == "mix") {
    double q = require_number(doc, "q", "mechanism.mix");
    if (!doc.contains("first") || !doc.contains("second"))
      fail("mechanism.mix", "needs 'first' and 'second' mechanisms");
    Mechanism first = parse_mechanism(doc["first"]);
    Mechanism second = parse_mechanism(doc["second"]);
    try {
      return mix(q, first, second);
    } catch (const ConfigError& e) {
      fail("mechanism.mix", e.what());
    }
  }

  BidGrid grid(require_int(doc, "delta", "mechanism"));
  try {
    if (kind == "spa") {
      int n = require_int(doc, "n", "mechanism.spa");
      int reserve = require_int(doc, "reserve", "mechanism.spa");
      TieBreakRule tie = TieBreakRule::kUniformSplit;
      if (doc.contains("tie"))
        tie = parse_tie(require_string(doc, "tie", "mechanism.spa"), "mechanism.spa");
      return make_spa(grid, n, reserve, tie);
    }
    if (kind == "staircase") {
      return make_staircase(grid, require_int(doc, "n", "mechanism.staircase"));
    }
    if (kind == "softmax") {
      return make_softmax(grid, require_number(doc, "lambda", "mechanism.softmax"));
    }
    if (kind == "table") {
      int n = require_int(doc, "n", "mechanism.table");
      if (n < 2) fail("mechanism.table", "n must be >= 2");
      int actions = grid.size();
      std::size_t cells = 1;
      for (int j = 0; j < n; ++j) cells *= static_cast<std::size_t>(actions);
      if (!doc.contains("alloc") || !doc.contains("pay"))
        fail("mechanism.table", "needs 'alloc' and 'pay' arrays");
      if (doc["alloc"].size() != static_cast<std::size_t>(n) ||
          doc["pay"].size() != static_cast<std::size_t>(n))
        fail("mechanism.table", "'alloc' and 'pay' need one entry per bidder");
      auto tables = std::make_shared<std::vector<std::vector<double>>>();
      auto pays = std::make_shared<std::vector<std::vector<double>>>();
      for (int i = 0; i < n; ++i) {
        std::vector<double> flat_alloc, flat_pay;
        flat_alloc.reserve(cells);
        flat_pay.reserve(cells);
        flatten_table(doc["alloc"][static_cast<std::size_t>(i)], 0, n, actions, flat_alloc,
                      "mechanism.table.alloc");
        flatten_table(doc["pay"][static_cast<std::size_t>(i)], 0, n, actions, flat_pay,
                      "mechanism.table.pay");
        tables->push_back(std::move(flat_alloc));
        pays->push_back(std::move(flat_pay));
      }
      auto index_of = [n, actions](std::span<const int> profile) {
        std::size_t idx = 0;
        for (int j = 0; j < n; ++j)
          idx = idx * static_cast<std::size_t>(actions) +
                static_cast<std::size_t>(profile[static_cast<std::size_t>(j)]);
        return idx;
      };
      auto alloc = [tables, index_of](int bidder, std::span<const int> profile) {
        return (*tables)[static_cast<std::size_t>(bidder)][index_of(profile)];
      };
      auto pay = [pays, index_of](int bidder, std::span<const int> profile) {
        return (*pays)[static_cast<std::size_t>(bidder)][index_of(profile)];
      };
      return Mechanism(grid, n, alloc, pay, "table(delta=" + std::to_string(grid.delta()) +
                                                ",n=" + std::to_string(n) + ")");
    }
  } catch (const ConfigError& e) {
    fail("mechanism." + kind, e.what());
  }
  fail("mechanism", "unknown kind '" + kind + "'");
}

DiscreteDistribution parse_distribution(const json& doc, const BidGrid& grid) {
  if (!doc.is_object()) fail("distribution", "must be a JSON object");
  std::string kind = require_string(doc, "kind", "distribution");
  if (kind == "uniform") return DiscreteDistribution::uniform(grid);
  if (kind == "pmf") {
    if (!doc.contains("weights") || !doc["weights"].is_array())
      fail("distribution.pmf", "needs a 'weights' array");
    std::vector<double> weights = doc["weights"].get<std::vector<double>>();
    if (weights.size() != static_cast<std::size_t>(grid.size()))
      fail("distribution.pmf", "needs delta+1 weights");
    double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (!(total > 0.0)) fail("distribution.pmf", "weights must have positive total");
    for (double& w : weights) w /= total;
    double partial = std::accumulate(weights.begin(), weights.end() - 1, 0.0);
    weights.back() = 1.0 - partial;
    try {
      return DiscreteDistribution(grid, std::move(weights));
    } catch (const ConfigError& e) {
      fail("distribution.pmf", e.what());
    }
  }
  fail("distribution", "unknown kind '" + kind + "'");
}

SimConfig parse_sim_config(const json& doc) {
  if (!doc.is_object()) fail("config", "must be a JSON object");
  SimConfig cfg;
  cfg.grid = BidGrid(require_int(doc, "delta", "config"));
  if (!doc.contains("horizon")) fail("config", "missing key 'horizon'");
  cfg.horizon = doc["horizon"].get<std::int64_t>();
  if (doc.contains("master_seed")) cfg.master_seed = doc["master_seed"].get<std::uint64_t>();

  if (!doc.contains("bidders") || !doc["bidders"].is_array() || doc["bidders"].size() < 2)
    fail("config", "'bidders' must list at least two bidders");
  for (const auto& b : doc["bidders"]) {
    BidderSpec spec;
    spec.value = require_int(b, "value", "config.bidders");
    if (b.contains("reported_value"))
      spec.reported_value = require_int(b, "reported_value", "config.bidders");
    if (b.contains("learner")) {
      const json& l = b["learner"];
      std::string kind = l.contains("kind") ? require_string(l, "kind", "config.learner") : "mwu";
      if (kind == "mwu") {
        spec.kind = LearnerKind::kMwu;
      } else if (kind == "eps_greedy") {
        spec.kind = LearnerKind::kEpsGreedy;
      } else if (kind == "fixed") {
        spec.kind = LearnerKind::kFixed;
      } else {
        fail("config.learner", "unknown kind '" + kind + "'");
      }
      if (l.contains("eta") && !l["eta"].is_null())
        spec.eta = require_number(l, "eta", "config.learner");
      if (l.contains("epsilon_coefficient"))
        spec.epsilon.coefficient = require_number(l, "epsilon_coefficient", "config.learner");
      if (l.contains("epsilon_exponent"))
        spec.epsilon.exponent = require_number(l, "epsilon_exponent", "config.learner");
    }
    cfg.bidders.push_back(std::move(spec));
  }

  if (!doc.contains("schedule")) fail("config", "missing key 'schedule'");
  const json& sched = doc["schedule"];
  std::string kind = require_string(sched, "kind", "config.schedule");
  const int n = static_cast<int>(cfg.bidders.size());

  auto parse_delta_t = [&](const json& node) {
    if (node.is_string()) {
      if (node.get<std::string>() != "default")
        fail("config.schedule", "delta_t must be a number or \"default\"");
      return default_mean_based_delta(cfg.grid.delta(), cfg.horizon);
    }
    if (!node.is_number()) fail("config.schedule", "delta_t must be a number or \"default\"");
    return node.get<double>();
  };

  try {
    if (kind == "constant") {
      if (!sched.contains("mechanism")) fail("config.schedule", "missing 'mechanism'");
      cfg.schedule = std::make_shared<Schedule>(
          constant_schedule(parse_mechanism(sched["mechanism"]), cfg.horizon));
    } else if (kind == "segments") {
      if (!sched.contains("segments") || !sched["segments"].is_array())
        fail("config.schedule", "missing 'segments' array");
      std::vector<ScheduleSegment> segments;
      for (const auto& s : sched["segments"]) {
        ScheduleSegment seg{s.at("start_round").get<std::int64_t>(),
                            parse_mechanism(s.at("mechanism"))};
        segments.push_back(std::move(seg));
      }
      cfg.schedule = std::make_shared<Schedule>(std::move(segments), cfg.horizon);
    } else if (kind == "constant_mixture" || kind == "two_phase") {
      if (!sched.contains("strict")) fail("config.schedule", "missing 'strict' mechanism");
      Mechanism strict = parse_mechanism(sched["strict"]);
      double delta_t = sched.contains("delta_t")
                           ? parse_delta_t(sched["delta_t"])
                           : default_mean_based_delta(cfg.grid.delta(), cfg.horizon);
      Schedule built = (kind == "constant_mixture")
                           ? build_constant_mixture_schedule(strict, cfg.grid, cfg.horizon, delta_t)
                           : build_two_phase_schedule(strict, cfg.grid, cfg.horizon, delta_t);
      cfg.schedule = std::make_shared<Schedule>(std::move(built));
    } else {
      fail("config.schedule", "unknown kind '" + kind + "'");
    }
  } catch (const ConfigError& e) {
    fail("config.schedule", e.what());
  }

  if (doc.contains("snapshot_rounds")) {
    for (const auto& r : doc["snapshot_rounds"])
      cfg.snapshot_rounds.push_back(r.get<std::int64_t>());
  }
  if (doc.contains("mean_based_delta") && !doc["mean_based_delta"].is_null())
    cfg.mean_based_delta = doc["mean_based_delta"].get<double>();
  if (doc.contains("collect_traces")) cfg.collect_traces = doc["collect_traces"].get<bool>();

  if (cfg.schedule->segments().front().mechanism.bidders() != n)
    fail("config", "schedule mechanisms expect " +
                       std::to_string(cfg.schedule->segments().front().mechanism.bidders()) +
                       " bidders, config lists " + std::to_string(n));
  if (!(cfg.schedule->segments().front().mechanism.grid() == cfg.grid))
    fail("config", "schedule mechanism delta differs from config delta");
  return cfg;
}

json ic_report_to_json(const ICReport& report, const Mechanism& mechanism, std::size_t budget) {
  json doc;
  doc["mechanism"] = mechanism.name();
  doc["status"] = to_string(report.status);
  doc["gamma"] = report.gamma;
  doc["min_gap"] = report.min_gap;
  doc["ir_ok"] = report.ir_ok;
  if (report.witness) {
    json w;
    w["bidder"] = report.witness->bidder;
    w["value"] = report.witness->value;
    w["bid"] = report.witness->bid;
    w["opponent"] = report.witness->opponent;
    w["gap"] = report.witness->gap;
    w["ir_violation"] = report.witness->ir_violation;
    doc["witness"] = w;
  } else {
    doc["witness"] = nullptr;
  }
  bool deterministic = mechanism.deterministic(budget);
  doc["deterministic"] = deterministic;
  if (deterministic) {
    auto characterization = characterize_deterministic(mechanism, budget);
    json c;
    c["pass"] = characterization.pass;
    if (characterization.violation) {
      json v;
      v["kind"] = characterization.violation->kind;
      v["bidder"] = characterization.violation->bidder;
      v["bid"] = characterization.violation->bid;
      v["opponent"] = characterization.violation->opponent;
      v["expected"] = characterization.violation->expected;
      v["actual"] = characterization.violation->actual;
      c["violation"] = v;
    } else {
      c["violation"] = nullptr;
    }
    doc["characterization"] = c;
  } else {
    doc["characterization"] = nullptr;
  }
  return doc;
}

json summary_from_aggregate(const SimConfig& cfg, const AggregateResult& agg,
                            int benchmark_reserve) {
  std::vector<int> values, reports, targets;
  for (const auto& b : cfg.bidders) {
    values.push_back(b.value);
    reports.push_back(b.report_or_value());
  }

  RegretReport regret = auctioneer_regret(agg.mean_revenue, *cfg.schedule, cfg.grid, values,
                                          benchmark_reserve);
  ConvergenceReport conv = convergence_of(agg.mean_final_distribution, reports, cfg.grid);

  json doc;
  doc["delta"] = cfg.grid.delta();
  doc["horizon"] = cfg.horizon;
  doc["n_trials"] = agg.n_trials;
  doc["master_seed"] = cfg.master_seed;
  doc["values"] = values;
  doc["reported_values"] = reports;
  doc["benchmark_reserve"] = benchmark_reserve;

  json reg;
  reg["benchmark_total"] = regret.benchmark_total;
  reg["achieved_total"] = regret.achieved_total;
  reg["regret"] = regret.regret;
  reg["negative"] = regret.negative;
  reg["per_segment"] = json::array();
  for (const auto& seg : regret.per_segment) {
    json s;
    s["start"] = seg.start;
    s["end"] = seg.end;
    s["mechanism"] = seg.mechanism;
    s["benchmark"] = seg.benchmark;
    s["achieved"] = seg.achieved;
    s["regret"] = seg.regret;
    reg["per_segment"].push_back(s);
  }
  doc["regret"] = reg;

  doc["mean_total_revenue"] = agg.mean_total_revenue;
  doc["std_total_revenue"] = agg.std_total_revenue;
  doc["final_tv"] = conv.tv;
  doc["expected_final_bid"] = conv.expected_bid;
  doc["monotone_mass"] = conv.monotone_mass;

  json prob_truthful = json::array();
  for (std::size_t i = 0; i < agg.mean_final_distribution.size(); ++i)
    prob_truthful.push_back(
        agg.mean_final_distribution[i][static_cast<std::size_t>(reports[i])]);
  doc["prob_truthful_final"] = prob_truthful;

  json realized = json::array();
  for (std::size_t i = 0; i < cfg.bidders.size(); ++i) {
    double mean = 0.0;
    for (const auto& trial : agg.trials) mean += trial.regret_vs_best_fixed[i];
    realized.push_back(mean / static_cast<double>(agg.n_trials));
  }
  doc["realized_regret_mean"] = realized;

  json mb;
  mb["delta"] = cfg.mean_based_delta ? json(*cfg.mean_based_delta) : json(nullptr);
  json pass = json::array(), violations = json::array();
  for (std::size_t i = 0; i < cfg.bidders.size(); ++i) {
    bool all_pass = true;
    std::int64_t total = 0;
    for (const auto& trial : agg.trials) {
      if (!trial.mean_based_pass.empty() && !trial.mean_based_pass[i]) all_pass = false;
      if (!trial.mean_based_violations.empty()) total += trial.mean_based_violations[i];
    }
    pass.push_back(all_pass);
    violations.push_back(total);
  }
  mb["pass"] = pass;
  mb["total_violations"] = violations;
  doc["mean_based"] = mb;

  json sched;
  sched["segments"] = json::array();
  for (std::size_t s = 0; s < cfg.schedule->segments().size(); ++s) {
    json seg;
    seg["start_round"] = cfg.schedule->segments()[s].start_round;
    seg["end_round"] = cfg.schedule->segment_end(s);
    seg["mechanism"] = cfg.schedule->segments()[s].mechanism.name();
    sched["segments"].push_back(seg);
  }
  const auto& meta = cfg.schedule->metadata();
  sched["p_mix"] = meta.p_mix >= 0.0 ? json(meta.p_mix) : json(nullptr);
  sched["t_switch"] = meta.t_switch >= 0 ? json(meta.t_switch) : json(nullptr);
  sched["gamma"] = meta.gamma >= 0.0 ? json(meta.gamma) : json(nullptr);
  sched["delta_t"] = meta.delta_t >= 0.0 ? json(meta.delta_t) : json(nullptr);
  sched["clamped"] = meta.clamped;
  sched["warnings"] = meta.warnings;
  doc["schedule"] = sched;

  doc["snapshot_rounds"] = agg.snapshot_rounds;
  doc["warnings"] = agg.warnings;
  return doc;
}

std::string format_double(double x) {
  char buffer[64];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), x);
  if (ec != std::errc()) return "nan";
  return std::string(buffer, ptr);
}

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write " + path.string());
  return out;
}

}  // namespace

void write_revenue_csv(const std::filesystem::path& path, std::span<const double> mean,
                       std::span<const double> std_dev) {
  auto out = open_output(path);
  out << "round,mean_revenue,std\r\n";
  for (std::size_t t = 0; t < mean.size(); ++t) {
    out << (t + 1) << ',' << format_double(mean[t]) << ','
        << format_double(t < std_dev.size() ? std_dev[t] : 0.0) << "\r\n";
  }
}

void write_snapshots_csv(const std::filesystem::path& path,
                         std::span<const std::int64_t> rounds,
                         const std::vector<std::vector<std::vector<double>>>& snapshots) {
  auto out = open_output(path);
  out << "round,bidder,action_index,probability\r\n";
  for (std::size_t s = 0; s < snapshots.size(); ++s) {
    for (std::size_t i = 0; i < snapshots[s].size(); ++i) {
      for (std::size_t b = 0; b < snapshots[s][i].size(); ++b) {
        out << rounds[s] << ',' << i << ',' << b << ',' << format_double(snapshots[s][i][b])
            << "\r\n";
      }
    }
  }
}

void write_trace_csv(const std::filesystem::path& path, const BidGrid& grid,
                     const std::vector<TraceRow>& trace) {
  auto out = open_output(path);
  out << "round,action_index,prob_truthful,expected_bid,realized_utility\r\n";
  for (std::size_t t = 0; t < trace.size(); ++t) {
    const TraceRow& row = trace[t];
    out << (t + 1) << ',' << row.action << ',' << format_double(row.prob_truthful) << ','
        << format_double(row.expected_bid) << ',' << format_double(row.realized_utility)
        << "\r\n";
  }
}

void write_json_file(const std::filesystem::path& path, const json& doc) {
  auto out = open_output(path);
  out << doc.dump(2) << "\n";
}

json write_simulation_outputs(const SimConfig& config, const AggregateResult& aggregate,
                              const std::filesystem::path& dir, int benchmark_reserve) {
  std::filesystem::create_directories(dir);
  write_revenue_csv(dir / "revenue.csv", aggregate.mean_revenue, aggregate.std_revenue);
  write_snapshots_csv(dir / "snapshots.csv", aggregate.snapshot_rounds,
                      aggregate.mean_snapshots);
  json summary = summary_from_aggregate(config, aggregate, benchmark_reserve);
  write_json_file(dir / "summary.json", summary);
  for (std::size_t i = 0; i < aggregate.traces_trial0.size(); ++i)
    write_trace_csv(dir / ("traces_bidder" + std::to_string(i) + ".csv"), config.grid,
                    aggregate.traces_trial0[i]);
  return summary;
}

}  // namespace auctiondyn::io
