#include "auctiondyn/mechanisms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace auctiondyn {

namespace {

double logaddexp(double a, double b) {
  double hi = std::max(a, b);
  double lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

struct SpaOutcome {
  double alloc = 0.0;
  double pay = 0.0;
};

SpaOutcome spa_outcome(const BidGrid& grid, int reserve, TieBreakRule tie, int bidder,
                       std::span<const int> profile) {
  int top = *std::max_element(profile.begin(), profile.end());
  if (top < reserve) return {};

  int tied = 0;
  for (int b : profile) tied += (b == top);
  int second = reserve;
  for (std::size_t j = 0; j < profile.size(); ++j) {
    if (static_cast<int>(j) == bidder) continue;
    second = std::max(second, profile[j]);
  }
  // With a unique top bidder `second` is max(reserve, best losing bid); when
  // several bidders tie at the top the price for any of them is the top bid.
  if (profile[static_cast<std::size_t>(bidder)] != top) return {};
  double price = grid.value_of(tied > 1 ? top : second);

  switch (tie) {
    case TieBreakRule::kUniformSplit: {
      double share = 1.0 / static_cast<double>(tied);
      return {share, price * share};
    }
    case TieBreakRule::kFavorLowerIndex: {
      for (std::size_t j = 0; j < profile.size(); ++j)
        if (profile[j] == top) {
          if (static_cast<int>(j) == bidder) return {1.0, price};
          return {};
        }
      return {};
    }
    case TieBreakRule::kFavorHigherIndex: {
      for (std::size_t j = profile.size(); j-- > 0;)
        if (profile[j] == top) {
          if (static_cast<int>(j) == bidder) return {1.0, price};
          return {};
        }
      return {};
    }
  }
  return {};
}

}  // namespace

Mechanism make_spa(const BidGrid& grid, int n, int reserve, TieBreakRule tie) {
  if (n < 2) throw ConfigError("make_spa: need at least 2 bidders");
  if (!grid.contains(reserve)) throw ConfigError("make_spa: reserve outside grid");

  std::ostringstream name;
  name << "spa(delta=" << grid.delta() << ",n=" << n << ",reserve=" << reserve << ")";
  auto alloc = [grid, reserve, tie](int bidder, std::span<const int> profile) {
    return spa_outcome(grid, reserve, tie, bidder, profile).alloc;
  };
  auto pay = [grid, reserve, tie](int bidder, std::span<const int> profile) {
    return spa_outcome(grid, reserve, tie, bidder, profile).pay;
  };
  return Mechanism(grid, n, alloc, pay, name.str());
}

Mechanism make_staircase(const BidGrid& grid, int n) {
  if (n < 2) throw ConfigError("make_staircase: need at least 2 bidders");
  std::ostringstream name;
  name << "staircase(delta=" << grid.delta() << ",n=" << n << ")";
  double inv_n = 1.0 / static_cast<double>(n);
  auto alloc = [grid, inv_n](int bidder, std::span<const int> profile) {
    return grid.value_of(profile[static_cast<std::size_t>(bidder)]) * inv_n;
  };
  auto pay = [grid, inv_n](int bidder, std::span<const int> profile) {
    double v = grid.value_of(profile[static_cast<std::size_t>(bidder)]);
    return v * v * inv_n * 0.5;
  };
  return Mechanism(grid, n, alloc, pay, name.str());
}

Mechanism make_softmax(const BidGrid& grid, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw ConfigError("make_softmax: lambda must be finite and positive");

  std::ostringstream name;
  name << "softmax(delta=" << grid.delta() << ",lambda=" << lambda << ")";
  auto win_prob = [lambda](double own, double other) {
    return 1.0 / (1.0 + std::exp(lambda * (other - own)));
  };
  auto alloc = [grid, win_prob](int bidder, std::span<const int> profile) {
    double own = grid.value_of(profile[static_cast<std::size_t>(bidder)]);
    double other = grid.value_of(profile[static_cast<std::size_t>(1 - bidder)]);
    return win_prob(own, other);
  };
  auto pay = [grid, lambda, win_prob](int bidder, std::span<const int> profile) {
    double own = grid.value_of(profile[static_cast<std::size_t>(bidder)]);
    double other = grid.value_of(profile[static_cast<std::size_t>(1 - bidder)]);
    // own*win - integral of the win probability from 0 to own.
    double integral =
        (logaddexp(lambda * own, lambda * other) - logaddexp(0.0, lambda * other)) / lambda;
    return own * win_prob(own, other) - integral;
  };
  return Mechanism(grid, 2, alloc, pay, name.str());
}

Mechanism mix(double q, const Mechanism& a, const Mechanism& a_prime) {
  if (!(q > 0.0 && q < 1.0)) throw ConfigError("mix: q must lie in (0,1)");
  if (a.bidders() != a_prime.bidders()) throw ConfigError("mix: bidder counts differ");
  if (!(a.grid() == a_prime.grid())) throw ConfigError("mix: grids differ");

  std::ostringstream name;
  name << "mix(q=" << q << ";" << a.name() << "," << a_prime.name() << ")";
  auto alloc = [q, a, a_prime](int bidder, std::span<const int> profile) {
    return q * a.alloc(bidder, profile) + (1.0 - q) * a_prime.alloc(bidder, profile);
  };
  auto pay = [q, a, a_prime](int bidder, std::span<const int> profile) {
    return q * a.pay(bidder, profile) + (1.0 - q) * a_prime.pay(bidder, profile);
  };
  return Mechanism(a.grid(), a.bidders(), alloc, pay, name.str());
}

std::vector<double> payment_from_allocation(const BidGrid& grid,
                                            std::span<const double> alloc_by_own_bid,
                                            PaymentInterpolation interpolation) {
  const int actions = grid.size();
  if (alloc_by_own_bid.size() != static_cast<std::size_t>(actions))
    throw ContractError("payment_from_allocation: allocation row length != delta+1");
  for (int k = 0; k + 1 < actions; ++k) {
    if (alloc_by_own_bid[static_cast<std::size_t>(k + 1)] <
        alloc_by_own_bid[static_cast<std::size_t>(k)] - kIcTolerance) {
      throw MonotonicityError("allocation decreases between own bids " + std::to_string(k) +
                                  " and " + std::to_string(k + 1),
                              k, k + 1);
    }
  }

  std::vector<double> payment(static_cast<std::size_t>(actions), 0.0);
  if (interpolation == PaymentInterpolation::kStep) {
    double acc = 0.0;
    double prev = 0.0;
    for (int k = 0; k < actions; ++k) {
      acc += grid.value_of(k) * (alloc_by_own_bid[static_cast<std::size_t>(k)] - prev);
      prev = alloc_by_own_bid[static_cast<std::size_t>(k)];
      payment[static_cast<std::size_t>(k)] = acc;
    }
  } else {
    double cell = 1.0 / static_cast<double>(grid.delta());
    double integral = 0.0;
    for (int k = 0; k < actions; ++k) {
      if (k > 0) {
        integral += 0.5 * cell *
                    (alloc_by_own_bid[static_cast<std::size_t>(k - 1)] +
                     alloc_by_own_bid[static_cast<std::size_t>(k)]);
      }
      payment[static_cast<std::size_t>(k)] =
          grid.value_of(k) * alloc_by_own_bid[static_cast<std::size_t>(k)] - integral;
    }
  }
  return payment;
}

Mechanism mechanism_from_allocation(const BidGrid& grid, int n, Mechanism::Rule alloc_rule,
                                    PaymentInterpolation interpolation, std::string name) {
  if (n < 2) throw ConfigError("mechanism_from_allocation: need at least 2 bidders");
  auto shared_alloc = std::make_shared<Mechanism::Rule>(std::move(alloc_rule));
  auto pay = [grid, n, shared_alloc, interpolation](int bidder, std::span<const int> profile) {
    std::vector<int> scratch(profile.begin(), profile.end());
    std::vector<double> row(static_cast<std::size_t>(grid.size()), 0.0);
    for (int b = 0; b < grid.size(); ++b) {
      scratch[static_cast<std::size_t>(bidder)] = b;
      row[static_cast<std::size_t>(b)] = (*shared_alloc)(bidder, scratch);
    }
    auto payments = payment_from_allocation(grid, row, interpolation);
    return payments[static_cast<std::size_t>(profile[static_cast<std::size_t>(bidder)])];
  };
  auto alloc = [shared_alloc](int bidder, std::span<const int> profile) {
    return (*shared_alloc)(bidder, profile);
  };
  return Mechanism(grid, n, alloc, pay, std::move(name));
}

std::string to_string(ICStatus status) {
  switch (status) {
    case ICStatus::kNotIC: return "NOT_IC";
    case ICStatus::kWeak: return "IC_WEAK";
    case ICStatus::kStrict: return "IC_STRICT";
  }
  return "?";
}

ICReport verify_ic(const Mechanism& m, std::size_t budget, double tolerance) {
  const int n = m.bidders();
  const int actions = m.grid().size();

  double scan_cost = static_cast<double>(n);
  for (int j = 0; j <= n; ++j) scan_cost *= static_cast<double>(actions);
  if (scan_cost > static_cast<double>(budget))
    throw ResourceError("verify_ic scan of " + m.name() + " needs ~" +
                        std::to_string(static_cast<std::size_t>(scan_cost)) +
                        " gap evaluations, budget " + std::to_string(budget));

  auto tab = m.table(budget);
  ICReport report;
  report.min_gap = std::numeric_limits<double>::infinity();
  std::optional<ICWitness> first_violation;

  std::vector<int> opponent_bids(static_cast<std::size_t>(n - 1), 0);
  for (int i = 0; i < n && !first_violation; ++i) {
    for (int v = 0; v < actions && !first_violation; ++v) {
      double value = m.grid().value_of(v);
      bool stop = false;
      for_each_opponent_profile(n, actions, i, [&](std::span<int> profile, std::size_t opp) {
        if (stop) return;
        auto alloc_row = tab->alloc_row(i, opp);
        auto pay_row = tab->pay_row(i, opp);
        double truthful = value * alloc_row[static_cast<std::size_t>(v)] -
                          pay_row[static_cast<std::size_t>(v)];
        {
          std::size_t k = 0;
          for (int j = 0; j < n; ++j)
            if (j != i) opponent_bids[k++] = profile[static_cast<std::size_t>(j)];
        }
        if (truthful < -tolerance && report.ir_ok) {
          report.ir_ok = false;
          ICWitness w;
          w.bidder = i;
          w.value = v;
          w.bid = v;
          w.opponent = opponent_bids;
          w.gap = truthful;
          w.ir_violation = true;
          if (!report.witness) report.witness = w;
        }
        for (int b = 0; b < actions; ++b) {
          if (b == v) continue;
          double gap = truthful - (value * alloc_row[static_cast<std::size_t>(b)] -
                                   pay_row[static_cast<std::size_t>(b)]);
          if (gap < report.min_gap) report.min_gap = gap;
          if (gap < -tolerance) {
            ICWitness w;
            w.bidder = i;
            w.value = v;
            w.bid = b;
            w.opponent = opponent_bids;
            w.gap = gap;
            w.ir_violation = false;
            first_violation = w;
            stop = true;
            return;
          }
        }
      });
    }
  }

  if (first_violation) {
    report.status = ICStatus::kNotIC;
    report.gamma = 0.0;
    report.witness = first_violation;  // IC violation wins over an IR witness
  } else if (report.min_gap > tolerance) {
    report.status = ICStatus::kStrict;
    report.gamma = report.min_gap;
  } else {
    report.status = ICStatus::kWeak;
    report.gamma = 0.0;
  }
  return report;
}

CharacterizationReport characterize_deterministic(const Mechanism& m, std::size_t budget) {
  if (!m.deterministic(budget))
    throw ConfigError("characterize_deterministic: mechanism is randomized");

  auto tab = m.table(budget);
  const int n = m.bidders();
  const int actions = m.grid().size();
  CharacterizationReport report;

  std::vector<int> opponent_bids(static_cast<std::size_t>(n - 1), 0);
  for (int i = 0; i < n && report.pass; ++i) {
    for_each_opponent_profile(n, actions, i, [&](std::span<int> profile, std::size_t opp) {
      if (!report.pass) return;
      auto alloc_row = tab->alloc_row(i, opp);
      auto pay_row = tab->pay_row(i, opp);
      {
        std::size_t k = 0;
        for (int j = 0; j < n; ++j)
          if (j != i) opponent_bids[k++] = profile[static_cast<std::size_t>(j)];
      }
      auto fail = [&](std::string kind, int bid, double expected, double actual) {
        CharacterizationViolation v;
        v.kind = std::move(kind);
        v.bidder = i;
        v.bid = bid;
        v.opponent = opponent_bids;
        v.expected = expected;
        v.actual = actual;
        report.pass = false;
        report.violation = std::move(v);
      };

      // A deterministic monotone row wins from some threshold onward. On the
      // grid the truthful winner price is a single constant no more than the
      // threshold value and no more than one grid step below it (tie-breaking
      // can put second-price payments one step under the minimum winning bid).
      int threshold = -1;
      double winner_price = 0.0;
      for (int b = 0; b < actions; ++b) {
        double x = alloc_row[static_cast<std::size_t>(b)];
        bool wins = x > 0.5;
        if (std::abs(x - (wins ? 1.0 : 0.0)) > kIcTolerance) {
          fail("non_binary_alloc", b, wins ? 1.0 : 0.0, x);
          return;
        }
        if (!wins && threshold >= 0) {
          fail("non_monotone", b, 1.0, 0.0);
          return;
        }
        double p = pay_row[static_cast<std::size_t>(b)];
        if (!wins && std::abs(p) > kIcTolerance) {
          fail("loser_pays", b, 0.0, p);
          return;
        }
        if (wins && threshold < 0) {
          threshold = b;
          winner_price = p;
          double hi = m.grid().value_of(threshold);
          double lo = std::max(0.0, hi - 1.0 / static_cast<double>(m.grid().delta()));
          if (p > hi + kIcTolerance) {
            fail("winner_overcharged", b, hi, p);
            return;
          }
          if (p < lo - kIcTolerance) {
            fail("winner_undercharged", b, lo, p);
            return;
          }
        } else if (wins && std::abs(p - winner_price) > kIcTolerance) {
          fail("winner_price_varies", b, winner_price, p);
          return;
        }
      }
    });
  }
  return report;
}

Mechanism strictify(const Mechanism& a, const Mechanism& a_strict, double q,
                    std::size_t verify_budget) {
  if (!(q > 0.0 && q < 1.0)) throw ConfigError("strictify: q must lie in (0,1)");
  ICReport base = verify_ic(a, verify_budget);
  if (base.status == ICStatus::kNotIC)
    throw ConfigError("strictify: base mechanism is not IC (witness bidder " +
                      std::to_string(base.witness ? base.witness->bidder : -1) + ")");
  ICReport strict = verify_ic(a_strict, verify_budget);
  if (strict.status != ICStatus::kStrict)
    throw ConfigError("strictify: second mechanism is not strictly IC");
  return mix(1.0 - q, a, a_strict);
}

}  // namespace auctiondyn
