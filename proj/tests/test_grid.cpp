#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "auctiondyn/grid.hpp"

using namespace auctiondyn;

TEST_CASE("grid values at named points") {
  BidGrid ten(10);
  CHECK(ten.value_of(0) == 0.0);
  CHECK(ten.value_of(10) == 1.0);
  CHECK(BidGrid(4).value_of(3) == 0.75);
  CHECK_THROWS_AS(ten.value_of(11), std::out_of_range);
  CHECK_THROWS_AS(ten.value_of(-1), std::out_of_range);
  CHECK_THROWS_AS(BidGrid(0), ConfigError);
}

TEST_CASE("grid spacing is one cell and strictly increasing") {
  for (int delta = 1; delta <= 60; ++delta) {
    BidGrid grid(delta);
    double cell = 1.0 / static_cast<double>(delta);
    for (int k = 0; k < delta; ++k) {
      double hi = grid.value_of(k + 1);
      double step = hi - grid.value_of(k);
      CHECK(grid.value_of(k) < hi);
      // Each endpoint is correctly rounded, so the step sits within one ulp
      // of the endpoints' magnitude around the exact cell width.
      CHECK(std::abs(step - cell) <= std::nextafter(hi, 2.0) - hi);
    }
  }
}

TEST_CASE("nearest index round-trips every grid point") {
  for (int delta : {1, 2, 7, 10, 100, 997}) {
    BidGrid grid(delta);
    for (int k = 0; k <= delta; ++k) CHECK(grid.nearest_index(grid.value_of(k)) == k);
    CHECK(grid.nearest_index(-0.5) == 0);
    CHECK(grid.nearest_index(1.5) == delta);
  }
}
