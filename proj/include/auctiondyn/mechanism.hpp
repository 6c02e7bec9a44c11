#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "auctiondyn/errors.hpp"
#include "auctiondyn/grid.hpp"

namespace auctiondyn {

inline constexpr std::size_t kDefaultTableBudget = 64u << 20;  // table doubles

/// Exhaustive cache of a mechanism over all grid profiles. Per bidder the
/// entries are laid out as rows indexed by the opponents' bids (mixed radix,
/// ascending bidder order) with the own bid contiguous, so the counterfactual
/// scan over own bids in the simulation hot loop is a linear walk.
class MechanismTable {
 public:
  MechanismTable(int n, int actions) : n_(n), actions_(actions) {
    rows_ = 1;
    for (int j = 0; j + 1 < n; ++j) rows_ *= static_cast<std::size_t>(actions);
    alloc_.assign(static_cast<std::size_t>(n) * rows_ * actions, 0.0);
    pay_.assign(static_cast<std::size_t>(n) * rows_ * actions, 0.0);
  }

  int bidders() const noexcept { return n_; }
  int actions() const noexcept { return actions_; }
  std::size_t opponent_rows() const noexcept { return rows_; }

  std::size_t opponent_index(int bidder, std::span<const int> profile) const {
    std::size_t idx = 0;
    for (int j = n_ - 1; j >= 0; --j) {
      if (j == bidder) continue;
      idx = idx * static_cast<std::size_t>(actions_) + static_cast<std::size_t>(profile[j]);
    }
    return idx;
  }

  std::span<const double> alloc_row(int bidder, std::size_t opp) const {
    return {alloc_.data() + offset(bidder, opp), static_cast<std::size_t>(actions_)};
  }
  std::span<const double> pay_row(int bidder, std::size_t opp) const {
    return {pay_.data() + offset(bidder, opp), static_cast<std::size_t>(actions_)};
  }
  std::span<double> mutable_alloc_row(int bidder, std::size_t opp) {
    return {alloc_.data() + offset(bidder, opp), static_cast<std::size_t>(actions_)};
  }
  std::span<double> mutable_pay_row(int bidder, std::size_t opp) {
    return {pay_.data() + offset(bidder, opp), static_cast<std::size_t>(actions_)};
  }

  std::size_t entries() const noexcept { return alloc_.size() + pay_.size(); }

 private:
  std::size_t offset(int bidder, std::size_t opp) const {
    return (static_cast<std::size_t>(bidder) * rows_ + opp) * static_cast<std::size_t>(actions_);
  }
  int n_;
  int actions_;
  std::size_t rows_;
  std::vector<double> alloc_;
  std::vector<double> pay_;
};

/// A truthful single-item auction over the grid: expected allocation and
/// expected payment per bidder at every bid profile. Immutable after
/// construction; evaluation is pure and thread-safe.
class Mechanism {
 public:
  using Rule = std::function<double(int bidder, std::span<const int> profile)>;

  Mechanism(BidGrid grid, int n, Rule alloc, Rule pay, std::string name);

  const BidGrid& grid() const noexcept { return impl_->grid; }
  int bidders() const noexcept { return impl_->n; }
  const std::string& name() const noexcept { return impl_->name; }

  double alloc(int bidder, std::span<const int> profile) const {
    check_args(bidder, profile);
    return impl_->alloc(bidder, profile);
  }
  double pay(int bidder, std::span<const int> profile) const {
    check_args(bidder, profile);
    return impl_->pay(bidder, profile);
  }

  /// True iff every allocation value over the full grid is 0 or 1.
  /// Established by exhaustive scan the first time it is asked for.
  bool deterministic(std::size_t budget = kDefaultTableBudget) const;

  /// Exhaustive cache; built on first use, shared afterwards.
  std::shared_ptr<const MechanismTable> table(std::size_t budget = kDefaultTableBudget) const;

 private:
  void check_args(int bidder, std::span<const int> profile) const {
    if (bidder < 0 || bidder >= impl_->n) throw ContractError("bidder index out of range");
    if (profile.size() != static_cast<std::size_t>(impl_->n))
      throw ContractError("profile length does not match bidder count");
    for (int b : profile)
      if (!impl_->grid.contains(b)) throw std::out_of_range("bid index out of grid range");
  }

  struct Impl {
    BidGrid grid;
    int n;
    Rule alloc;
    Rule pay;
    std::string name;
    mutable std::mutex cache_mutex;
    mutable std::shared_ptr<const MechanismTable> cached_table;
    mutable int deterministic_flag = -1;  // -1 unknown, else 0/1
    Impl(BidGrid g, int n_, Rule a, Rule p, std::string nm)
        : grid(g), n(n_), alloc(std::move(a)), pay(std::move(p)), name(std::move(nm)) {}
  };

  std::shared_ptr<Impl> impl_;
};

/// Enumerates all opponent profiles (mixed radix) and invokes fn with a full
/// profile whose own-bid slot is varied by the caller.
void for_each_opponent_profile(int n, int actions, int bidder,
                               const std::function<void(std::span<int> profile, std::size_t opp_index)>& fn);

}  // namespace auctiondyn
