#include "auctiondyn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <thread>

namespace auctiondyn {

double truthful_spa_revenue(const BidGrid& grid, std::span<const int> values, int reserve) {
  if (values.size() < 2) throw ContractError("need at least two values");
  int top = values[0], second = values[1];
  if (second > top) std::swap(top, second);
  for (std::size_t i = 2; i < values.size(); ++i) {
    int v = values[i];
    if (v > top) {
      second = top;
      top = v;
    } else if (v > second) {
      second = v;
    }
  }
  if (top < reserve) return 0.0;
  return grid.value_of(std::max(second, reserve));
}

RegretReport auctioneer_regret(std::span<const double> revenue, const Schedule& schedule,
                               const BidGrid& grid, std::span<const int> values,
                               int benchmark_reserve) {
  if (static_cast<std::int64_t>(revenue.size()) != schedule.horizon())
    throw ContractError("revenue series does not cover the schedule horizon");
  const double per_round = truthful_spa_revenue(grid, values, benchmark_reserve);

  RegretReport report;
  const auto& segments = schedule.segments();
  for (std::size_t s = 0; s < segments.size(); ++s) {
    SegmentRegret seg;
    seg.start = segments[s].start_round;
    seg.end = schedule.segment_end(s);
    seg.mechanism = segments[s].mechanism.name();
    seg.benchmark = per_round * static_cast<double>(seg.end - seg.start + 1);
    for (std::int64_t t = seg.start; t <= seg.end; ++t)
      seg.achieved += revenue[static_cast<std::size_t>(t - 1)];
    seg.regret = seg.benchmark - seg.achieved;
    report.benchmark_total += seg.benchmark;
    report.achieved_total += seg.achieved;
    report.per_segment.push_back(std::move(seg));
  }
  report.regret = report.benchmark_total - report.achieved_total;
  report.negative = report.regret < -1e-9 * std::max(1.0, std::abs(report.benchmark_total));
  return report;
}

double tv_distance(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw ContractError("tv_distance: support sizes differ");
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) total += std::abs(p[i] - q[i]);
  return 0.5 * total;
}

double tv_to_point_mass(std::span<const double> p, int target) {
  if (target < 0 || static_cast<std::size_t>(target) >= p.size())
    throw ContractError("tv_to_point_mass: target outside support");
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    double q = (static_cast<std::size_t>(target) == i) ? 1.0 : 0.0;
    total += std::abs(p[i] - q);
  }
  return 0.5 * total;
}

ConvergenceReport convergence_of(const std::vector<std::vector<double>>& final_distribution,
                                 std::span<const int> targets, const BidGrid& grid) {
  if (final_distribution.size() != targets.size())
    throw ContractError("convergence: one target per bidder required");
  ConvergenceReport report;
  for (std::size_t i = 0; i < final_distribution.size(); ++i) {
    const auto& dist = final_distribution[i];
    int target = targets[i];
    report.tv.push_back(tv_to_point_mass(dist, target));
    double expected = 0.0;
    for (std::size_t b = 0; b < dist.size(); ++b)
      expected += dist[b] * grid.value_of(static_cast<int>(b));
    report.expected_bid.push_back(expected);
    bool monotone = true;
    for (int b = 0; b + 1 <= target && monotone; ++b)
      if (dist[static_cast<std::size_t>(b) + 1] < dist[static_cast<std::size_t>(b)] - 1e-15)
        monotone = false;
    report.monotone_mass.push_back(monotone);
  }
  return report;
}

ConvergenceReport convergence(const SimResult& result, std::span<const int> targets,
                              const BidGrid& grid) {
  if (result.final_distribution.empty())
    throw ContractError("convergence: result has no final snapshot");
  return convergence_of(result.final_distribution, targets, grid);
}

std::vector<double> metagame_gain(const SimConfig& base, int bidder, int jobs) {
  if (bidder < 0 || static_cast<std::size_t>(bidder) >= base.bidders.size())
    throw ContractError("metagame_gain: bidder index out of range");
  const int actions = base.grid.size();
  const int truthful_report = base.bidders[static_cast<std::size_t>(bidder)].report_or_value();
  const double true_value =
      base.grid.value_of(base.bidders[static_cast<std::size_t>(bidder)].value);
  const Mechanism& last = base.schedule->at(base.horizon);
  auto table = last.table(base.table_budget);

  // Expected true utility in round T under the product of final distributions.
  auto utility_of = [&](const SimResult& r) {
    const int n = static_cast<int>(base.bidders.size());
    std::vector<int> profile(static_cast<std::size_t>(n), 0);
    double total = 0.0;
    // Recursive enumeration over opponents' supports, weighting by their
    // final probabilities.
    std::function<void(int, double)> walk = [&](int j, double weight) {
      if (weight == 0.0) return;
      if (j == n) {
        std::size_t opp = table->opponent_index(bidder, profile);
        auto alloc_row = table->alloc_row(bidder, opp);
        auto pay_row = table->pay_row(bidder, opp);
        const auto& own = r.final_distribution[static_cast<std::size_t>(bidder)];
        for (std::size_t b = 0; b < own.size(); ++b) {
          if (own[b] == 0.0) continue;
          total += weight * own[b] * (true_value * alloc_row[b] - pay_row[b]);
        }
        return;
      }
      if (j == bidder) {
        walk(j + 1, weight);
        return;
      }
      const auto& dist = r.final_distribution[static_cast<std::size_t>(j)];
      for (std::size_t b = 0; b < dist.size(); ++b) {
        profile[static_cast<std::size_t>(j)] = static_cast<int>(b);
        walk(j + 1, weight * dist[b]);
      }
    };
    walk(0, 1.0);
    return total;
  };

  std::vector<double> utility(static_cast<std::size_t>(actions), 0.0);
  std::vector<SimConfig> configs;
  configs.reserve(static_cast<std::size_t>(actions));
  for (int r = 0; r < actions; ++r) {
    SimConfig cfg = base;
    cfg.collect_traces = false;
    cfg.bidders[static_cast<std::size_t>(bidder)].reported_value = r;
    configs.push_back(std::move(cfg));
  }

  if (jobs < 1) jobs = 1;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(actions));
  for (int start = 0; start < actions; start += jobs) {
    int batch = std::min(jobs, actions - start);
    std::vector<std::thread> workers;
    for (int k = 0; k < batch; ++k) {
      workers.emplace_back([&, start, k] {
        try {
          SimResult r = run(configs[static_cast<std::size_t>(start + k)]);
          utility[static_cast<std::size_t>(start + k)] = utility_of(r);
        } catch (...) {
          errors[static_cast<std::size_t>(start + k)] = std::current_exception();
        }
      });
    }
    for (auto& w : workers) w.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<double> gain(static_cast<std::size_t>(actions), 0.0);
  for (int r = 0; r < actions; ++r)
    gain[static_cast<std::size_t>(r)] =
        utility[static_cast<std::size_t>(r)] - utility[static_cast<std::size_t>(truthful_report)];
  return gain;
}

ExponentFit fit_scaling_exponent(std::span<const std::pair<double, double>> points) {
  ExponentFit fit;
  std::vector<std::pair<double, double>> logs;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!(points[i].second > 0.0) || !(points[i].first > 0.0)) {
      fit.excluded.push_back(i);
      continue;
    }
    logs.emplace_back(std::log10(points[i].first), std::log10(points[i].second));
  }
  fit.used_points = static_cast<int>(logs.size());
  if (logs.size() < 2) return fit;

  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : logs) {
    mx += x;
    my += y;
  }
  mx /= static_cast<double>(logs.size());
  my /= static_cast<double>(logs.size());
  double sxy = 0.0, sxx = 0.0;
  for (const auto& [x, y] : logs) {
    sxy += (x - mx) * (y - my);
    sxx += (x - mx) * (x - mx);
  }
  if (sxx == 0.0) return fit;
  fit.exponent = sxy / sxx;
  fit.log10_intercept = my - fit.exponent * mx;
  fit.valid = true;
  return fit;
}

}  // namespace auctiondyn
