#include "auctiondyn/learner.hpp"

#include <algorithm>
#include <cmath>

namespace auctiondyn {

double EpsilonSchedule::at(std::int64_t round) const {
  if (round < 1) round = 1;
  double eps = coefficient * std::pow(static_cast<double>(round), -exponent);
  return std::clamp(eps, 0.0, 1.0);
}

double default_eta(int delta, std::int64_t horizon) {
  if (horizon < 1) throw ConfigError("default_eta: horizon must be positive");
  double k = std::max(2.0, static_cast<double>(delta));
  return std::sqrt(std::log(k) / static_cast<double>(horizon));
}

std::optional<std::string> learning_rate_warning(double eta, std::int64_t horizon) {
  double t = static_cast<double>(horizon);
  if (eta * t < 10.0)
    return "eta*T = " + std::to_string(eta * t) + " < 10: learning may be too slow to move";
  if (eta * std::log(t) > 1.0)
    return "eta*log(T) = " + std::to_string(eta * std::log(t)) + " > 1: learning rate is aggressive";
  return std::nullopt;
}

Learner::Learner(const LearnerConfig& config, const BidGrid& grid, std::int64_t horizon)
    : kind_(config.kind), epsilon_(config.epsilon) {
  if (!grid.contains(config.value_cap))
    throw ConfigError("learner value_cap outside grid");
  if (config.eta) {
    if (!(*config.eta > 0.0) || !std::isfinite(*config.eta))
      throw ConfigError("learner eta must be finite and positive");
    eta_ = *config.eta;
  } else {
    eta_ = default_eta(grid.delta(), horizon);
  }
  cum_utility_.assign(static_cast<std::size_t>(config.value_cap) + 1, 0.0);
  compensation_.assign(cum_utility_.size(), 0.0);
}

void Learner::distribution(std::span<double> out) const {
  const std::size_t k = cum_utility_.size();
  if (out.size() != k) throw ContractError("distribution buffer size mismatch");

  switch (kind_) {
    case LearnerKind::kFixed: {
      std::fill(out.begin(), out.end(), 0.0);
      out[k - 1] = 1.0;
      return;
    }
    case LearnerKind::kEpsGreedy: {
      double eps = epsilon_.at(round_ + 1);
      std::size_t best = 0;
      for (std::size_t b = 1; b < k; ++b)
        if (cum_utility_[b] > cum_utility_[best]) best = b;
      double base = eps / static_cast<double>(k);
      std::fill(out.begin(), out.end(), base);
      out[best] += 1.0 - eps;
      return;
    }
    case LearnerKind::kMwu: {
      double top = cum_utility_[0];
      for (std::size_t b = 1; b < k; ++b) top = std::max(top, cum_utility_[b]);
      double total = 0.0;
      for (std::size_t b = 0; b < k; ++b) {
        out[b] = std::exp(eta_ * (cum_utility_[b] - top));
        total += out[b];
      }
      for (std::size_t b = 0; b < k; ++b) out[b] /= total;
      return;
    }
  }
}

int Learner::act(std::mt19937_64& rng) const {
  std::vector<double> probs(cum_utility_.size());
  distribution(probs);
  return sample_weighted(probs, 1.0, rng);
}

void Learner::update(std::span<const double> utilities) {
  if (utilities.size() != cum_utility_.size())
    throw ContractError("utility vector length must be value_cap+1");
  for (double u : utilities)
    if (!(u >= -1.0 - 1e-9 && u <= 1.0 + 1e-9))
      throw ContractError("utilities must lie in [-1, 1]");
  for (std::size_t b = 0; b < cum_utility_.size(); ++b) {
    double y = utilities[b] - compensation_[b];
    double t = cum_utility_[b] + y;
    compensation_[b] = (t - cum_utility_[b]) - y;
    cum_utility_[b] = t;
  }
  ++round_;
}

std::optional<MeanBasedViolation> check_mean_based(const LearnerTrace& trace, double delta) {
  const double threshold = delta * static_cast<double>(trace.horizon);
  for (std::size_t t = 0; t < trace.probabilities.size(); ++t) {
    const auto& probs = trace.probabilities[t];
    const auto& cums = trace.cumulative_before[t];
    std::size_t best = 0;
    for (std::size_t b = 1; b < cums.size(); ++b)
      if (cums[b] > cums[best]) best = b;
    for (std::size_t b = 0; b < cums.size(); ++b) {
      double gap = cums[best] - cums[b];
      if (gap > threshold && probs[b] > delta) {
        return MeanBasedViolation{static_cast<std::int64_t>(t) + 1, static_cast<int>(best),
                                  static_cast<int>(b), probs[b], gap};
      }
    }
  }
  return std::nullopt;
}

double realized_regret(std::span<const double> final_cumulative, double realized_total) {
  double best = final_cumulative.empty() ? 0.0 : final_cumulative[0];
  for (double u : final_cumulative) best = std::max(best, u);
  return best - realized_total;
}

}  // namespace auctiondyn
