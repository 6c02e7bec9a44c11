#include "auctiondyn/mechanism.hpp"

#include <cmath>

namespace auctiondyn {

Mechanism::Mechanism(BidGrid grid, int n, Rule alloc, Rule pay, std::string name) {
  if (n < 2) throw ConfigError("mechanism needs at least 2 bidders");
  if (!alloc || !pay) throw ConfigError("mechanism rules must be callable");
  impl_ = std::make_shared<Impl>(grid, n, std::move(alloc), std::move(pay), std::move(name));
}

void for_each_opponent_profile(
    int n, int actions, int bidder,
    const std::function<void(std::span<int> profile, std::size_t opp_index)>& fn) {
  std::vector<int> profile(static_cast<std::size_t>(n), 0);
  std::vector<int> slots;  // opponent bidder indices, ascending
  for (int j = 0; j < n; ++j)
    if (j != bidder) slots.push_back(j);

  std::size_t rows = 1;
  for (std::size_t k = 0; k < slots.size(); ++k) rows *= static_cast<std::size_t>(actions);

  for (std::size_t opp = 0; opp < rows; ++opp) {
    std::size_t rem = opp;
    for (int slot : slots) {
      profile[static_cast<std::size_t>(slot)] = static_cast<int>(rem % static_cast<std::size_t>(actions));
      rem /= static_cast<std::size_t>(actions);
    }
    fn(profile, opp);
  }
}

std::shared_ptr<const MechanismTable> Mechanism::table(std::size_t budget) const {
  std::lock_guard<std::mutex> lock(impl_->cache_mutex);
  if (impl_->cached_table) return impl_->cached_table;

  const int n = impl_->n;
  const int actions = impl_->grid.size();
  std::size_t entries = 2u * static_cast<std::size_t>(n);
  for (int j = 0; j < n; ++j) entries *= static_cast<std::size_t>(actions);
  if (entries > budget)
    throw ResourceError("mechanism table for '" + impl_->name + "' needs " +
                        std::to_string(entries) + " entries, budget " + std::to_string(budget));

  auto tab = std::make_shared<MechanismTable>(n, actions);
  bool binary = true;
  for (int i = 0; i < n; ++i) {
    for_each_opponent_profile(n, actions, i, [&](std::span<int> profile, std::size_t opp) {
      auto alloc_row = tab->mutable_alloc_row(i, opp);
      auto pay_row = tab->mutable_pay_row(i, opp);
      for (int b = 0; b < actions; ++b) {
        profile[static_cast<std::size_t>(i)] = b;
        double x = impl_->alloc(i, profile);
        alloc_row[static_cast<std::size_t>(b)] = x;
        pay_row[static_cast<std::size_t>(b)] = impl_->pay(i, profile);
        if (std::abs(x) > 1e-12 && std::abs(x - 1.0) > 1e-12) binary = false;
      }
    });
  }
  impl_->deterministic_flag = binary ? 1 : 0;
  impl_->cached_table = std::move(tab);
  return impl_->cached_table;
}

bool Mechanism::deterministic(std::size_t budget) const {
  {
    std::lock_guard<std::mutex> lock(impl_->cache_mutex);
    if (impl_->deterministic_flag >= 0) return impl_->deterministic_flag == 1;
  }
  table(budget);  // scan populates the flag
  std::lock_guard<std::mutex> lock(impl_->cache_mutex);
  return impl_->deterministic_flag == 1;
}

}  // namespace auctiondyn
