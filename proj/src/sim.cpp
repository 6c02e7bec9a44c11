#include "auctiondyn/sim.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <thread>

namespace auctiondyn {

std::vector<std::int64_t> default_snapshot_rounds(std::int64_t horizon) {
  std::vector<std::int64_t> rounds;
  for (std::int64_t r = 1; r < horizon; r *= 2) rounds.push_back(r);
  rounds.push_back(horizon);
  return rounds;
}

namespace {

void validate(const SimConfig& cfg) {
  if (cfg.horizon < 1) throw ConfigError("sim horizon must be >= 1");
  if (!cfg.schedule) throw ConfigError("sim config has no schedule");
  if (cfg.schedule->horizon() != cfg.horizon)
    throw ConfigError("schedule horizon does not match sim horizon");
  if (cfg.bidders.size() < 2) throw ConfigError("simulation needs at least 2 bidders");
  const Mechanism& first = cfg.schedule->segments().front().mechanism;
  if (!(first.grid() == cfg.grid)) throw ConfigError("schedule grid does not match sim grid");
  if (first.bidders() != static_cast<int>(cfg.bidders.size()))
    throw ConfigError("schedule bidder count does not match sim bidders");
  for (const auto& b : cfg.bidders) {
    if (!cfg.grid.contains(b.value)) throw ConfigError("bidder value outside grid");
    if (!cfg.grid.contains(b.report_or_value()))
      throw ConfigError("reported value outside grid");
  }
  for (std::int64_t r : cfg.snapshot_rounds)
    if (r < 1 || r > cfg.horizon) throw ConfigError("snapshot round outside horizon");
  if (cfg.mean_based_delta && !(*cfg.mean_based_delta > 0.0))
    throw ConfigError("mean_based_delta must be positive");
}

}  // namespace

SimResult run_trial(const SimConfig& cfg, std::uint64_t trial) {
  validate(cfg);
  const int n = static_cast<int>(cfg.bidders.size());
  const std::int64_t horizon = cfg.horizon;

  std::vector<Learner> learners;
  std::vector<std::mt19937_64> rngs;
  learners.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const BidderSpec& spec = cfg.bidders[static_cast<std::size_t>(i)];
    LearnerConfig lc;
    lc.kind = spec.kind;
    lc.eta = spec.eta;
    lc.epsilon = spec.epsilon;
    lc.value_cap = spec.report_or_value();
    learners.emplace_back(lc, cfg.grid, horizon);
    rngs.emplace_back(derive_seed(cfg.master_seed, trial, static_cast<std::uint64_t>(i)));
  }

  SimResult result;
  for (int i = 0; i < n; ++i) {
    const Learner& l = learners[static_cast<std::size_t>(i)];
    if (l.kind() == LearnerKind::kMwu)
      if (auto w = learning_rate_warning(l.eta(), horizon))
        result.warnings.push_back("bidder " + std::to_string(i) + ": " + *w);
  }

  std::vector<std::shared_ptr<const MechanismTable>> tables;
  tables.reserve(cfg.schedule->segments().size());
  for (const auto& seg : cfg.schedule->segments())
    tables.push_back(seg.mechanism.table(cfg.table_budget));

  std::vector<std::int64_t> snaps =
      cfg.snapshot_rounds.empty() ? default_snapshot_rounds(horizon) : cfg.snapshot_rounds;
  std::sort(snaps.begin(), snaps.end());
  snaps.erase(std::unique(snaps.begin(), snaps.end()), snaps.end());

  result.revenue.assign(static_cast<std::size_t>(horizon), 0.0);
  result.snapshot_rounds = snaps;
  result.snapshots.reserve(snaps.size());
  result.realized_total.assign(static_cast<std::size_t>(n), 0.0);
  result.mean_based.assign(static_cast<std::size_t>(n), MeanBasedReport{});
  if (cfg.mean_based_delta)
    for (auto& mb : result.mean_based) mb.enabled = true;
  if (cfg.collect_traces) {
    result.traces.assign(static_cast<std::size_t>(n), {});
    for (auto& t : result.traces) t.reserve(static_cast<std::size_t>(horizon));
  }

  std::vector<std::vector<double>> probs(static_cast<std::size_t>(n));
  std::vector<std::vector<double>> utilities(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    probs[static_cast<std::size_t>(i)].assign(
        static_cast<std::size_t>(learners[static_cast<std::size_t>(i)].actions()), 0.0);
    utilities[static_cast<std::size_t>(i)].assign(probs[static_cast<std::size_t>(i)].size(), 0.0);
  }

  std::vector<int> profile(static_cast<std::size_t>(n), 0);
  const auto& segments = cfg.schedule->segments();
  std::size_t seg = 0;
  std::size_t snap_cursor = 0;
  const double mb_delta = cfg.mean_based_delta.value_or(0.0);
  const double mb_threshold = mb_delta * static_cast<double>(horizon);

  for (std::int64_t t = 1; t <= horizon; ++t) {
    while (seg + 1 < segments.size() && segments[seg + 1].start_round <= t) ++seg;
    const MechanismTable& table = *tables[seg];

    for (int i = 0; i < n; ++i) {
      auto& p = probs[static_cast<std::size_t>(i)];
      const Learner& learner = learners[static_cast<std::size_t>(i)];
      learner.distribution(p);
      int bid = sample_weighted(p, 1.0, rngs[static_cast<std::size_t>(i)]);
      if (bid > learner.value_cap()) throw ContractError("sampled bid exceeds value cap");
      profile[static_cast<std::size_t>(i)] = bid;
    }

    if (cfg.mean_based_delta) {
      for (int i = 0; i < n; ++i) {
        const auto cums = learners[static_cast<std::size_t>(i)].cumulative_utilities();
        const auto& p = probs[static_cast<std::size_t>(i)];
        double best = cums[0];
        std::size_t best_idx = 0;
        for (std::size_t b = 1; b < cums.size(); ++b)
          if (cums[b] > best) { best = cums[b]; best_idx = b; }
        for (std::size_t b = 0; b < cums.size(); ++b) {
          double gap = best - cums[b];
          if (gap > mb_threshold && p[b] > mb_delta) {
            auto& mb = result.mean_based[static_cast<std::size_t>(i)];
            mb.pass = false;
            ++mb.violations;
            if (!mb.first)
              mb.first = MeanBasedViolation{t, static_cast<int>(best_idx), static_cast<int>(b),
                                            p[b], gap};
          }
        }
      }
    }

    if (snap_cursor < snaps.size() && snaps[snap_cursor] == t) {
      result.snapshots.push_back(probs);
      ++snap_cursor;
    }
    if (t == horizon) result.final_distribution = probs;

    double round_revenue = 0.0;
    for (int i = 0; i < n; ++i) {
      std::size_t opp = table.opponent_index(i, profile);
      round_revenue +=
          table.pay_row(i, opp)[static_cast<std::size_t>(profile[static_cast<std::size_t>(i)])];
    }
    result.revenue[static_cast<std::size_t>(t - 1)] = round_revenue;
    result.total_revenue += round_revenue;

    for (int i = 0; i < n; ++i) {
      Learner& learner = learners[static_cast<std::size_t>(i)];
      auto& u = utilities[static_cast<std::size_t>(i)];
      std::size_t opp = table.opponent_index(i, profile);
      auto alloc_row = table.alloc_row(i, opp);
      auto pay_row = table.pay_row(i, opp);
      const double value = cfg.grid.value_of(cfg.bidders[static_cast<std::size_t>(i)].value);
      for (std::size_t b = 0; b < u.size(); ++b)
        u[b] = value * alloc_row[b] - pay_row[b];

      int played = profile[static_cast<std::size_t>(i)];
      double realized = u[static_cast<std::size_t>(played)];
      result.realized_total[static_cast<std::size_t>(i)] += realized;

      if (cfg.collect_traces) {
        TraceRow row;
        row.action = played;
        const auto& p = probs[static_cast<std::size_t>(i)];
        row.prob_truthful = p[p.size() - 1];
        double expected_bid = 0.0;
        for (std::size_t b = 0; b < p.size(); ++b)
          expected_bid += p[b] * cfg.grid.value_of(static_cast<int>(b));
        row.expected_bid = expected_bid;
        row.realized_utility = realized;
        result.traces[static_cast<std::size_t>(i)].push_back(row);
      }

      learner.update(u);
    }
  }

  result.final_cumulative.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    auto cums = learners[static_cast<std::size_t>(i)].cumulative_utilities();
    result.final_cumulative.emplace_back(cums.begin(), cums.end());
  }
  return result;
}

SimResult run(const SimConfig& cfg) { return run_trial(cfg, 0); }

namespace {

TrialSummary summarize(const SimResult& r) {
  TrialSummary s;
  s.total_revenue = r.total_revenue;
  s.final_distribution = r.final_distribution;
  s.realized_total = r.realized_total;
  for (std::size_t i = 0; i < r.final_cumulative.size(); ++i)
    s.regret_vs_best_fixed.push_back(
        realized_regret(r.final_cumulative[i], r.realized_total[i]));
  for (const auto& mb : r.mean_based) {
    s.mean_based_pass.push_back(mb.pass);
    s.mean_based_violations.push_back(mb.violations);
  }
  return s;
}

}  // namespace

AggregateResult run_trials(const SimConfig& cfg, int n_trials, int jobs) {
  if (n_trials < 1) throw ConfigError("run_trials needs n_trials >= 1");
  validate(cfg);
  if (jobs < 1) jobs = 1;
  jobs = std::min(jobs, n_trials);

  // Build shared tables up front so worker threads only read.
  for (const auto& seg : cfg.schedule->segments()) seg.mechanism.table(cfg.table_budget);

  AggregateResult agg;
  agg.n_trials = n_trials;
  agg.horizon = cfg.horizon;
  agg.mean_revenue.assign(static_cast<std::size_t>(cfg.horizon), 0.0);
  std::vector<double> m2(static_cast<std::size_t>(cfg.horizon), 0.0);
  double total_mean = 0.0, total_m2 = 0.0;
  int count = 0;

  for (int chunk = 0; chunk < n_trials; chunk += jobs) {
    int batch = std::min(jobs, n_trials - chunk);
    std::vector<SimResult> slots(static_cast<std::size_t>(batch));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(batch));

    if (batch == 1) {
      slots[0] = run_trial(cfg, static_cast<std::uint64_t>(chunk));
    } else {
      std::vector<std::thread> workers;
      workers.reserve(static_cast<std::size_t>(batch));
      for (int k = 0; k < batch; ++k) {
        workers.emplace_back([&, k] {
          try {
            slots[static_cast<std::size_t>(k)] =
                run_trial(cfg, static_cast<std::uint64_t>(chunk + k));
          } catch (...) {
            errors[static_cast<std::size_t>(k)] = std::current_exception();
          }
        });
      }
      for (auto& w : workers) w.join();
      for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    }

    for (int k = 0; k < batch; ++k) {
      SimResult& r = slots[static_cast<std::size_t>(k)];
      ++count;
      if (count == 1 && cfg.collect_traces) agg.traces_trial0 = std::move(r.traces);
      for (std::size_t t = 0; t < r.revenue.size(); ++t) {
        double delta = r.revenue[t] - agg.mean_revenue[t];
        agg.mean_revenue[t] += delta / static_cast<double>(count);
        m2[t] += delta * (r.revenue[t] - agg.mean_revenue[t]);
      }
      {
        double delta = r.total_revenue - total_mean;
        total_mean += delta / static_cast<double>(count);
        total_m2 += delta * (r.total_revenue - total_mean);
      }
      if (count == 1) {
        agg.snapshot_rounds = r.snapshot_rounds;
        agg.mean_snapshots = r.snapshots;
        agg.mean_final_distribution = r.final_distribution;
        agg.warnings = r.warnings;
      } else {
        for (std::size_t s = 0; s < r.snapshots.size(); ++s)
          for (std::size_t i = 0; i < r.snapshots[s].size(); ++i)
            for (std::size_t b = 0; b < r.snapshots[s][i].size(); ++b)
              agg.mean_snapshots[s][i][b] += r.snapshots[s][i][b];
        for (std::size_t i = 0; i < r.final_distribution.size(); ++i)
          for (std::size_t b = 0; b < r.final_distribution[i].size(); ++b)
            agg.mean_final_distribution[i][b] += r.final_distribution[i][b];
      }
      agg.trials.push_back(summarize(r));
    }
  }

  double inv = 1.0 / static_cast<double>(n_trials);
  for (auto& snap : agg.mean_snapshots)
    for (auto& dist : snap)
      for (auto& p : dist) p *= inv;
  for (auto& dist : agg.mean_final_distribution)
    for (auto& p : dist) p *= inv;

  agg.std_revenue.assign(static_cast<std::size_t>(cfg.horizon), 0.0);
  if (n_trials >= 2) {
    for (std::size_t t = 0; t < m2.size(); ++t)
      agg.std_revenue[t] = std::sqrt(m2[t] / static_cast<double>(n_trials - 1));
    agg.std_total_revenue = std::sqrt(total_m2 / static_cast<double>(n_trials - 1));
  }
  agg.mean_total_revenue = total_mean;
  return agg;
}

}  // namespace auctiondyn
