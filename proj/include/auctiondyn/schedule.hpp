#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "auctiondyn/mechanisms.hpp"

namespace auctiondyn {

struct ScheduleSegment {
  std::int64_t start_round = 1;
  Mechanism mechanism;
};

/// Oblivious, piecewise-constant sequence of mechanisms over rounds 1..T.
/// Fixed at construction; the engine only ever reads it.
class Schedule {
 public:
  Schedule(std::vector<ScheduleSegment> segments, std::int64_t horizon);

  std::int64_t horizon() const noexcept { return horizon_; }
  const std::vector<ScheduleSegment>& segments() const noexcept { return segments_; }
  const Mechanism& at(std::int64_t round) const;

  /// End round (inclusive) of segment index i.
  std::int64_t segment_end(std::size_t i) const;

  // Builder provenance: mixture weight / switch round / clamp notes.
  struct Metadata {
    double p_mix = -1.0;       // constant-mixture weight, if applicable
    std::int64_t t_switch = -1;  // first-phase length, if applicable
    double gamma = -1.0;       // strict mechanism's incentive margin
    double delta_t = -1.0;
    bool clamped = false;
    std::vector<std::string> warnings;
  };
  const Metadata& metadata() const noexcept { return metadata_; }
  Metadata& metadata() noexcept { return metadata_; }

 private:
  std::vector<ScheduleSegment> segments_;
  std::int64_t horizon_;
  Metadata metadata_;
};

Schedule constant_schedule(Mechanism mechanism, std::int64_t horizon);

/// Single-segment schedule running mix(p, strict, SPA) every round with
/// p = min(1 - 1e-9, sqrt(2 * delta * delta_t / gamma)). Degenerate inputs
/// clamp and are flagged in the metadata.
Schedule build_constant_mixture_schedule(const Mechanism& a_strict, const BidGrid& grid,
                                         std::int64_t horizon, double delta_t,
                                         std::size_t verify_budget = kDefaultVerifyBudget);

/// Strict mechanism for rounds 1..T0 with T0 = ceil(delta_t * T / gamma)
/// (clamped to T), then the reserve-free SPA.
Schedule build_two_phase_schedule(const Mechanism& a_strict, const BidGrid& grid,
                                  std::int64_t horizon, double delta_t,
                                  std::size_t verify_budget = kDefaultVerifyBudget);

/// Mean-based parameter assumed for horizon T when none is supplied:
/// sqrt(log(delta + 1) / T).
double default_mean_based_delta(int delta, std::int64_t horizon);

}  // namespace auctiondyn
