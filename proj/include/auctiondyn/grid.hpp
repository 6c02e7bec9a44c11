#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "auctiondyn/errors.hpp"

namespace auctiondyn {

/// Discrete bid/value space {0, 1/delta, ..., 1}. Bids, values and reserves
/// are passed around as integer indices into this grid; real values appear
/// only inside utility and payment arithmetic.
class BidGrid {
 public:
  explicit BidGrid(int delta) : delta_(delta) {
    if (delta < 1) throw ConfigError("BidGrid: delta must be >= 1");
  }

  int delta() const noexcept { return delta_; }
  /// Number of grid points, delta + 1.
  int size() const noexcept { return delta_ + 1; }

  bool contains(int index) const noexcept { return index >= 0 && index <= delta_; }

  double value_of(int index) const {
    if (!contains(index))
      throw std::out_of_range("BidGrid::value_of: index out of range");
    return static_cast<double>(index) / static_cast<double>(delta_);
  }

  /// Index of the grid point closest to value (clamped to the grid).
  int nearest_index(double value) const {
    long k = std::lround(value * static_cast<double>(delta_));
    if (k < 0) k = 0;
    if (k > delta_) k = delta_;
    return static_cast<int>(k);
  }

  friend bool operator==(const BidGrid& a, const BidGrid& b) noexcept {
    return a.delta_ == b.delta_;
  }

 private:
  int delta_;
};

/// One bid per bidder, as grid indices.
using BidProfile = std::vector<int>;

inline void validate_profile(const BidGrid& grid, std::span<const int> profile) {
  if (profile.size() < 2) throw ContractError("bid profile needs at least 2 bidders");
  for (int b : profile)
    if (!grid.contains(b)) throw std::out_of_range("bid index out of grid range");
}

}  // namespace auctiondyn
