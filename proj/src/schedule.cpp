#include "auctiondyn/schedule.hpp"

#include <cmath>

namespace auctiondyn {

Schedule::Schedule(std::vector<ScheduleSegment> segments, std::int64_t horizon)
    : segments_(std::move(segments)), horizon_(horizon) {
  if (horizon_ < 1) throw ConfigError("schedule horizon must be >= 1");
  if (segments_.empty()) throw ConfigError("schedule needs at least one segment");
  if (segments_.front().start_round != 1) throw ConfigError("first segment must start at round 1");
  for (std::size_t i = 0; i + 1 < segments_.size(); ++i) {
    if (segments_[i + 1].start_round <= segments_[i].start_round)
      throw ConfigError("segment start rounds must be strictly increasing");
  }
  if (segments_.back().start_round > horizon_)
    throw ConfigError("segment starts past the horizon");
  for (std::size_t i = 1; i < segments_.size(); ++i) {
    if (!(segments_[i].mechanism.grid() == segments_[0].mechanism.grid()) ||
        segments_[i].mechanism.bidders() != segments_[0].mechanism.bidders())
      throw ConfigError("all schedule mechanisms must share grid and bidder count");
  }
}

const Mechanism& Schedule::at(std::int64_t round) const {
  if (round < 1 || round > horizon_) throw ContractError("round outside schedule horizon");
  std::size_t i = segments_.size() - 1;
  while (segments_[i].start_round > round) --i;
  return segments_[i].mechanism;
}

std::int64_t Schedule::segment_end(std::size_t i) const {
  return i + 1 < segments_.size() ? segments_[i + 1].start_round - 1 : horizon_;
}

Schedule constant_schedule(Mechanism mechanism, std::int64_t horizon) {
  std::vector<ScheduleSegment> segments;
  segments.push_back({1, std::move(mechanism)});
  return Schedule(std::move(segments), horizon);
}

double default_mean_based_delta(int delta, std::int64_t horizon) {
  if (horizon < 1) throw ConfigError("horizon must be positive");
  return std::sqrt(std::log(static_cast<double>(delta) + 1.0) / static_cast<double>(horizon));
}

namespace {

double required_gamma(const Mechanism& a_strict, std::size_t verify_budget) {
  ICReport report = verify_ic(a_strict, verify_budget);
  if (report.status != ICStatus::kStrict)
    throw ConfigError("schedule builder needs a strictly IC mechanism; " + a_strict.name() +
                      " reported " + to_string(report.status));
  return report.gamma;
}

}  // namespace

Schedule build_constant_mixture_schedule(const Mechanism& a_strict, const BidGrid& grid,
                                         std::int64_t horizon, double delta_t,
                                         std::size_t verify_budget) {
  if (delta_t < 0.0 || !std::isfinite(delta_t))
    throw ConfigError("delta_t must be finite and non-negative");
  double gamma = required_gamma(a_strict, verify_budget);

  double p = std::sqrt(2.0 * static_cast<double>(grid.delta()) * delta_t / gamma);
  Schedule::Metadata meta;
  meta.gamma = gamma;
  meta.delta_t = delta_t;

  Mechanism spa = make_spa(grid, a_strict.bidders(), 0, TieBreakRule::kUniformSplit);
  Schedule schedule = [&] {
    if (p <= 0.0) {
      meta.clamped = true;
      meta.p_mix = 0.0;
      meta.warnings.push_back("mixture weight is 0 (delta_t = 0); schedule degenerates to SPA");
      return constant_schedule(std::move(spa), horizon);
    }
    constexpr double kMax = 1.0 - 1e-9;
    if (p > kMax) {
      meta.clamped = true;
      meta.warnings.push_back("mixture weight " + std::to_string(p) + " clamped to 1-1e-9");
      p = kMax;
    }
    meta.p_mix = p;
    return constant_schedule(mix(p, a_strict, spa), horizon);
  }();
  schedule.metadata() = std::move(meta);
  return schedule;
}

Schedule build_two_phase_schedule(const Mechanism& a_strict, const BidGrid& grid,
                                  std::int64_t horizon, double delta_t,
                                  std::size_t verify_budget) {
  if (delta_t < 0.0 || !std::isfinite(delta_t))
    throw ConfigError("delta_t must be finite and non-negative");
  double gamma = required_gamma(a_strict, verify_budget);

  double raw = delta_t * static_cast<double>(horizon) / gamma;
  std::int64_t t0 = static_cast<std::int64_t>(std::ceil(raw));
  Schedule::Metadata meta;
  meta.gamma = gamma;
  meta.delta_t = delta_t;

  Mechanism spa = make_spa(grid, a_strict.bidders(), 0, TieBreakRule::kUniformSplit);
  Schedule schedule = [&] {
    if (t0 >= horizon) {
      meta.clamped = true;
      meta.t_switch = horizon;
      meta.warnings.push_back("first phase " + std::to_string(t0) +
                              " covers the whole horizon; SPA phase dropped");
      return constant_schedule(a_strict, horizon);
    }
    if (t0 < 1) t0 = 1;
    meta.t_switch = t0;
    std::vector<ScheduleSegment> segments;
    segments.push_back({1, a_strict});
    segments.push_back({t0 + 1, std::move(spa)});
    return Schedule(std::move(segments), horizon);
  }();
  schedule.metadata() = std::move(meta);
  return schedule;
}

}  // namespace auctiondyn
