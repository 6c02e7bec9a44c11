#include "auctiondyn/distribution.hpp"

#include <cmath>
#include <numeric>

namespace auctiondyn {

DiscreteDistribution::DiscreteDistribution(const BidGrid& grid, std::vector<double> pmf)
    : grid_(grid), pmf_(std::move(pmf)) {
  if (pmf_.size() != static_cast<std::size_t>(grid.size()))
    throw ConfigError("distribution pmf length must be delta+1");
  double total = 0.0;
  for (double p : pmf_) {
    if (p < 0.0 || !std::isfinite(p)) throw ConfigError("pmf entries must be non-negative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) throw ConfigError("pmf must sum to 1");
}

DiscreteDistribution DiscreteDistribution::uniform(const BidGrid& grid) {
  std::vector<double> pmf(static_cast<std::size_t>(grid.size()),
                          1.0 / static_cast<double>(grid.size()));
  // Renormalize the last entry so the sum is exactly 1 in doubles.
  double partial = std::accumulate(pmf.begin(), pmf.end() - 1, 0.0);
  pmf.back() = 1.0 - partial;
  return DiscreteDistribution(grid, std::move(pmf));
}

DiscreteDistribution DiscreteDistribution::point_mass(const BidGrid& grid, int index) {
  if (!grid.contains(index)) throw ConfigError("point mass index outside grid");
  std::vector<double> pmf(static_cast<std::size_t>(grid.size()), 0.0);
  pmf[static_cast<std::size_t>(index)] = 1.0;
  return DiscreteDistribution(grid, std::move(pmf));
}

VirtualValueTable virtual_values(const DiscreteDistribution& f) {
  const auto pmf = f.pmf();
  const int actions = f.grid().size();
  VirtualValueTable table;
  table.phi.assign(static_cast<std::size_t>(actions), 0.0);
  table.defined.assign(static_cast<std::size_t>(actions), false);

  double tail = 0.0;  // probability of values strictly above the current index
  for (int k = actions - 1; k >= 0; --k) {
    double p = pmf[static_cast<std::size_t>(k)];
    if (p > 0.0) {
      table.defined[static_cast<std::size_t>(k)] = true;
      table.phi[static_cast<std::size_t>(k)] =
          f.grid().value_of(k) - tail / (p * static_cast<double>(f.grid().delta()));
    }
    tail += p;
  }
  return table;
}

bool is_regular(const DiscreteDistribution& f) {
  auto table = virtual_values(f);
  bool have_prev = false;
  double prev = 0.0;
  for (std::size_t k = 0; k < table.phi.size(); ++k) {
    if (!table.defined[k]) continue;
    if (have_prev && table.phi[k] < prev - 1e-12) return false;
    prev = table.phi[k];
    have_prev = true;
  }
  return true;
}

int myerson_reserve(const DiscreteDistribution& f) {
  if (!is_regular(f)) throw ConfigError("myerson_reserve requires a regular distribution");
  auto table = virtual_values(f);
  // Boundary indices whose exact virtual value is 0 can land a few ulps
  // negative after the tail summation; treat them as zero.
  for (std::size_t k = 0; k < table.phi.size(); ++k)
    if (table.defined[k] && table.phi[k] >= -1e-12) return static_cast<int>(k);
  return f.grid().delta();
}

}  // namespace auctiondyn
