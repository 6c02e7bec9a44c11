#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "auctiondyn/mechanism.hpp"

namespace auctiondyn {

inline constexpr std::size_t kDefaultVerifyBudget = 50'000'000;
inline constexpr double kIcTolerance = 1e-12;

enum class TieBreakRule { kFavorLowerIndex, kFavorHigherIndex, kUniformSplit };

/// Second-price auction with reserve. The highest bid at or above the reserve
/// wins and pays max(second-highest bid, reserve); losers pay nothing; no
/// winner if every bid is below the reserve. Under kUniformSplit tied top
/// bidders share the expected allocation and payment equally.
Mechanism make_spa(const BidGrid& grid, int n, int reserve,
                   TieBreakRule tie = TieBreakRule::kUniformSplit);

/// Randomized auction allocating to bidder i with probability value(b_i)/n,
/// independent of the other bids, with the integral-form payment
/// value(b_i)^2/(2n) that prices the linear allocation.
Mechanism make_staircase(const BidGrid& grid, int n);

/// Two-bidder randomized auction with the logistic win probability
/// 1/(1 + e^{lambda (b' - b)}) and its closed-form integral payment.
Mechanism make_softmax(const BidGrid& grid, double lambda);

/// Pointwise convex combination q*a + (1-q)*a_prime of allocations and
/// payments. Requires q in the open interval (0,1) and matching grid/n.
Mechanism mix(double q, const Mechanism& a, const Mechanism& a_prime);

enum class PaymentInterpolation { kStep, kLinear };

/// Payment row for one bidder against a fixed opponent profile, derived from
/// the allocation row x(b_0..b_delta) over own bids (monotone, checked).
/// kStep charges the threshold payment sum_{j<=k} value(j) (x_j - x_{j-1});
/// kLinear charges value(k) x_k minus the integral of the piecewise-linear
/// interpolant of x, which keeps strictly increasing rules strictly IC.
std::vector<double> payment_from_allocation(const BidGrid& grid,
                                            std::span<const double> alloc_by_own_bid,
                                            PaymentInterpolation interpolation);

/// Full mechanism with payments derived row-by-row from an allocation rule.
Mechanism mechanism_from_allocation(const BidGrid& grid, int n, Mechanism::Rule alloc,
                                    PaymentInterpolation interpolation, std::string name);

enum class ICStatus { kNotIC, kWeak, kStrict };

std::string to_string(ICStatus status);

struct ICWitness {
  int bidder = 0;
  int value = 0;
  int bid = 0;               // deviation bid (equals value for IR witnesses)
  std::vector<int> opponent; // opponents' bids in ascending bidder order
  double gap = 0.0;          // utility(truth) - utility(bid), or IR utility
  bool ir_violation = false;
};

struct ICReport {
  ICStatus status = ICStatus::kWeak;
  double gamma = 0.0;   // minimum truthful gain; 0 unless strictly IC
  double min_gap = 0.0; // raw minimum gap, may be negative when not IC
  bool ir_ok = true;
  std::optional<ICWitness> witness;  // present iff not IC or IR fails

  bool ic_ok() const { return status != ICStatus::kNotIC; }
};

/// Exhaustive incentive scan over all (bidder, value, deviation, opponents).
/// Cost n*(delta+1)^(n+1) utility gaps; refuses to start past the budget.
ICReport verify_ic(const Mechanism& m, std::size_t budget = kDefaultVerifyBudget,
                   double tolerance = kIcTolerance);

struct CharacterizationViolation {
  std::string kind;  // "non_binary_alloc" | "non_monotone" | "loser_pays" | "wrong_threshold"
  int bidder = 0;
  int bid = 0;
  std::vector<int> opponent;
  double expected = 0.0;
  double actual = 0.0;
};

struct CharacterizationReport {
  bool pass = true;
  std::optional<CharacterizationViolation> violation;
};

/// Structural check for deterministic truthful auctions with non-negative
/// payments: per-opponent monotone allocation, losers pay zero, winners pay
/// their minimum winning bid. Requires a deterministic mechanism.
CharacterizationReport characterize_deterministic(const Mechanism& m,
                                                  std::size_t budget = kDefaultTableBudget);

/// Mixes weight q of a strictly IC mechanism into a (weakly) IC mechanism.
/// The result stays within q of `a` in sup norm on both rules and inherits
/// at least q * gamma(a_strict) of strict incentive margin.
Mechanism strictify(const Mechanism& a, const Mechanism& a_strict, double q,
                    std::size_t verify_budget = kDefaultVerifyBudget);

}  // namespace auctiondyn
