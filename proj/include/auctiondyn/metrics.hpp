#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "auctiondyn/sim.hpp"

namespace auctiondyn {

struct SegmentRegret {
  std::int64_t start = 0;
  std::int64_t end = 0;  // inclusive
  std::string mechanism;
  double benchmark = 0.0;
  double achieved = 0.0;
  double regret = 0.0;
};

struct RegretReport {
  double benchmark_total = 0.0;  // T times the truthful second-price revenue
  double achieved_total = 0.0;
  double regret = 0.0;
  bool negative = false;  // flagged, not an error
  std::vector<SegmentRegret> per_segment;
};

/// Truthful second-price revenue per round for the given values: the
/// second-highest value, or max(second-highest, reserve) behind the reserve
/// flag (zero when every value is below the reserve).
double truthful_spa_revenue(const BidGrid& grid, std::span<const int> values, int reserve = 0);

RegretReport auctioneer_regret(std::span<const double> revenue, const Schedule& schedule,
                               const BidGrid& grid, std::span<const int> values,
                               int benchmark_reserve = 0);

inline RegretReport auctioneer_regret(const SimResult& result, const Schedule& schedule,
                                      const BidGrid& grid, std::span<const int> values,
                                      int benchmark_reserve = 0) {
  return auctioneer_regret(result.revenue, schedule, grid, values, benchmark_reserve);
}

/// Half the L1 distance between two distributions over the same support.
double tv_distance(std::span<const double> p, std::span<const double> q);

/// TV distance from a distribution over 0..cap to the point mass at target.
double tv_to_point_mass(std::span<const double> p, int target);

struct ConvergenceReport {
  std::vector<double> tv;             // per bidder, vs point mass at target
  std::vector<double> expected_bid;   // per bidder, under the final distribution
  std::vector<bool> monotone_mass;    // non-decreasing probabilities over 0..target
};

ConvergenceReport convergence(const SimResult& result, std::span<const int> targets,
                              const BidGrid& grid);
ConvergenceReport convergence_of(const std::vector<std::vector<double>>& final_distribution,
                                 std::span<const int> targets, const BidGrid& grid);

/// Expected true utility of `bidder` in round T when it reports r instead of
/// its value, minus the same quantity under the truthful report; reruns the
/// simulation once per candidate report. Index k of the result is report k.
std::vector<double> metagame_gain(const SimConfig& base, int bidder, int jobs = 1);

struct ExponentFit {
  double exponent = 0.0;
  double log10_intercept = 0.0;
  int used_points = 0;
  std::vector<std::size_t> excluded;  // indices of non-positive regret points
  bool valid = false;
};

/// Least-squares slope of log(regret) against log(T). Non-positive regret
/// points are dropped with a warning mark; the fit is invalid with fewer
/// than two surviving points.
ExponentFit fit_scaling_exponent(std::span<const std::pair<double, double>> points);

}  // namespace auctiondyn
