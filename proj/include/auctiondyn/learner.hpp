#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "auctiondyn/grid.hpp"
#include "auctiondyn/rng.hpp"

namespace auctiondyn {

enum class LearnerKind { kMwu, kEpsGreedy, kFixed };

/// epsilon_t = min(1, coefficient * t^{-exponent}), t counted from 1.
struct EpsilonSchedule {
  double coefficient = 1.0;
  double exponent = 1.0 / 3.0;
  double at(std::int64_t round) const;
};

struct LearnerConfig {
  LearnerKind kind = LearnerKind::kMwu;
  std::optional<double> eta;  // empty selects sqrt(log(delta)/T)
  EpsilonSchedule epsilon;    // eps-greedy only
  int value_cap = 0;          // highest playable index (the reported value)
};

double default_eta(int delta, std::int64_t horizon);

/// Emits a note when eta falls outside the sane band eta*T >= 10,
/// eta*log(T) <= 1 for a learning-rate family.
std::optional<std::string> learning_rate_warning(double eta, std::int64_t horizon);

/// Full-feedback bidding algorithm restricted to bids 0..value_cap.
/// MWU keeps weights in log domain: the weight of bid b after t updates is
/// exp(eta * U_t(b)) with U the cumulative counterfactual utility, so
/// probabilities stay finite for any horizon.
class Learner {
 public:
  Learner(const LearnerConfig& config, const BidGrid& grid, std::int64_t horizon);

  LearnerKind kind() const noexcept { return kind_; }
  int actions() const noexcept { return static_cast<int>(cum_utility_.size()); }
  int value_cap() const noexcept { return actions() - 1; }
  double eta() const noexcept { return eta_; }
  std::int64_t round() const noexcept { return round_; }
  std::span<const double> cumulative_utilities() const noexcept { return cum_utility_; }

  /// Distribution the learner plays in the upcoming round; sums to 1.
  void distribution(std::span<double> out) const;

  /// Samples the upcoming bid, consuming exactly one engine draw.
  int act(std::mt19937_64& rng) const;

  /// Full-feedback step: utilities[b] for every playable bid b.
  void update(std::span<const double> utilities);

 private:
  LearnerKind kind_;
  double eta_;
  EpsilonSchedule epsilon_;
  std::vector<double> cum_utility_;
  std::vector<double> compensation_;  // Kahan carry; keeps U_t(b) at a few ulps
  std::int64_t round_ = 0;
};

/// Per-round record of the distributions played and the cumulative
/// counterfactual utilities entering each round.
struct LearnerTrace {
  std::int64_t horizon = 0;
  std::vector<std::vector<double>> probabilities;      // [round][bid]
  std::vector<std::vector<double>> cumulative_before;  // [round][bid]
};

struct MeanBasedViolation {
  std::int64_t round = 0;  // 1-based
  int better_bid = 0;
  int worse_bid = 0;
  double probability = 0.0;
  double gap = 0.0;
};

/// Checks the delta-mean-based property: whenever one bid trails another by
/// more than delta*T in cumulative utility, it must be played with
/// probability at most delta. Returns the first violation, if any.
std::optional<MeanBasedViolation> check_mean_based(const LearnerTrace& trace, double delta);

/// Best fixed bid in hindsight minus the realized cumulative utility.
double realized_regret(std::span<const double> final_cumulative, double realized_total);

}  // namespace auctiondyn
