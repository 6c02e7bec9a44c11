#pragma once

#include <random>
#include <span>
#include <vector>

#include "auctiondyn/grid.hpp"
#include "auctiondyn/rng.hpp"

namespace auctiondyn {

/// Probability mass function over the grid indices 0..delta.
class DiscreteDistribution {
 public:
  DiscreteDistribution(const BidGrid& grid, std::vector<double> pmf);

  static DiscreteDistribution uniform(const BidGrid& grid);
  static DiscreteDistribution point_mass(const BidGrid& grid, int index);

  const BidGrid& grid() const noexcept { return grid_; }
  std::span<const double> pmf() const noexcept { return pmf_; }

  int sample(std::mt19937_64& gen) const {
    return sample_weighted(pmf_, 1.0, gen);
  }

 private:
  BidGrid grid_;
  std::vector<double> pmf_;
};

/// Discrete virtual values phi(v) = v - (1/delta) * upper_tail(v) / pmf(v).
/// Indices carrying no mass have no defined virtual value and are skipped by
/// the regularity and reserve scans.
struct VirtualValueTable {
  std::vector<double> phi;
  std::vector<bool> defined;
};

VirtualValueTable virtual_values(const DiscreteDistribution& f);

/// True iff phi is non-decreasing across the defined indices.
bool is_regular(const DiscreteDistribution& f);

/// Smallest index with non-negative virtual value; delta if none. Requires a
/// regular distribution.
int myerson_reserve(const DiscreteDistribution& f);

}  // namespace auctiondyn
