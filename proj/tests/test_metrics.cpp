#include <doctest.h>

#include <cmath>
#include <random>

#include "auctiondyn/metrics.hpp"

using namespace auctiondyn;

namespace {

BidderSpec fixed_bidder(int value, std::optional<int> report = {}) {
  BidderSpec spec;
  spec.value = value;
  spec.reported_value = report;
  spec.kind = LearnerKind::kFixed;
  return spec;
}

}  // namespace

TEST_CASE("auctioneer regret against the truthful second-price benchmark") {
  BidGrid grid(10);
  const std::int64_t horizon = 1000;
  std::vector<int> values = {3, 6};

  SUBCASE("truthful fixed bidders under SPA attain the benchmark") {
    SimConfig cfg;
    cfg.grid = grid;
    cfg.horizon = horizon;
    cfg.bidders = {fixed_bidder(3), fixed_bidder(6)};
    cfg.schedule = std::make_shared<Schedule>(constant_schedule(make_spa(grid, 2, 0), horizon));
    SimResult r = run(cfg);
    RegretReport report = auctioneer_regret(r, *cfg.schedule, grid, values);
    CHECK(std::abs(report.regret) <= 1e-9 * static_cast<double>(horizon));
    CHECK_FALSE(report.negative);
  }

  SUBCASE("shading the runner-up by one step costs T/delta") {
    SimConfig cfg;
    cfg.grid = grid;
    cfg.horizon = horizon;
    cfg.bidders = {fixed_bidder(3, 2), fixed_bidder(6)};
    cfg.schedule = std::make_shared<Schedule>(constant_schedule(make_spa(grid, 2, 0), horizon));
    SimResult r = run(cfg);
    RegretReport report = auctioneer_regret(r, *cfg.schedule, grid, values);
    CHECK(report.regret ==
          doctest::Approx(static_cast<double>(horizon) / 10.0).epsilon(1e-12));
  }

  SUBCASE("staircase with truthful bids loses v_L - (v_L^2+v_H^2)/4 per round") {
    SimConfig cfg;
    cfg.grid = grid;
    cfg.horizon = horizon;
    cfg.bidders = {fixed_bidder(3), fixed_bidder(6)};
    cfg.schedule =
        std::make_shared<Schedule>(constant_schedule(make_staircase(grid, 2), horizon));
    SimResult r = run(cfg);
    RegretReport report = auctioneer_regret(r, *cfg.schedule, grid, values);
    double per_round = 0.3 - (0.09 + 0.36) / 4.0;
    CHECK(report.regret ==
          doctest::Approx(per_round * static_cast<double>(horizon)).epsilon(1e-12));
  }

  SUBCASE("revenue above the benchmark is flagged, not an error") {
    SimConfig cfg;
    cfg.grid = grid;
    cfg.horizon = horizon;
    cfg.bidders = {fixed_bidder(3, 6), fixed_bidder(6)};
    cfg.schedule = std::make_shared<Schedule>(constant_schedule(make_spa(grid, 2, 0), horizon));
    SimResult r = run(cfg);
    RegretReport report = auctioneer_regret(r, *cfg.schedule, grid, values);
    CHECK(report.negative);
    CHECK(report.regret < 0.0);
  }

  SUBCASE("segment regrets add up to the total") {
    Mechanism stair = make_staircase(grid, 2);
    Schedule two_phase = build_two_phase_schedule(stair, grid, horizon, 1e-6);
    REQUIRE(two_phase.segments().size() == 2);
    SimConfig cfg;
    cfg.grid = grid;
    cfg.horizon = horizon;
    cfg.bidders = {fixed_bidder(3), fixed_bidder(6)};
    cfg.schedule = std::make_shared<Schedule>(two_phase);
    SimResult r = run(cfg);
    RegretReport report = auctioneer_regret(r, *cfg.schedule, grid, values);
    double sum = 0.0;
    for (const auto& seg : report.per_segment) sum += seg.regret;
    CHECK(std::abs(sum - report.regret) <= 1e-9 * static_cast<double>(horizon));
  }

  SUBCASE("the benchmark reserve flag") {
    std::vector<int> low = {1, 2};
    CHECK(truthful_spa_revenue(grid, low, 5) == 0.0);
    std::vector<int> split = {3, 7};
    CHECK(truthful_spa_revenue(grid, split, 5) == doctest::Approx(0.5));
    CHECK(truthful_spa_revenue(grid, split, 0) == doctest::Approx(0.3));
  }
}

TEST_CASE("total variation distances") {
  CHECK(tv_to_point_mass(std::vector<double>{0.0, 0.0, 1.0}, 2) == 0.0);
  // Uniform over k+1 actions against a point mass: k/(k+1).
  for (int k : {1, 3, 9}) {
    std::vector<double> uniform(static_cast<std::size_t>(k) + 1,
                                1.0 / static_cast<double>(k + 1));
    CHECK(tv_to_point_mass(uniform, k) ==
          doctest::Approx(static_cast<double>(k) / (k + 1)).epsilon(1e-12));
  }

  std::mt19937_64 gen(8);
  for (int rep = 0; rep < 50; ++rep) {
    auto random_dist = [&gen] {
      std::vector<double> d(6);
      double total = 0.0;
      for (auto& x : d) {
        x = -std::log(1.0 - uniform_double(gen));
        total += x;
      }
      for (auto& x : d) x /= total;
      return d;
    };
    auto p = random_dist(), q = random_dist(), r = random_dist();
    CHECK(tv_distance(p, q) == doctest::Approx(tv_distance(q, p)).epsilon(1e-12));
    CHECK(tv_distance(p, r) <= tv_distance(p, q) + tv_distance(q, r) + 1e-12);
    CHECK(tv_distance(p, q) >= 0.0);
    CHECK(tv_distance(p, q) <= 1.0);
  }
}

TEST_CASE("convergence report on a staircase run matches the exact trajectory") {
  BidGrid grid(10);
  const std::int64_t horizon = 100'000;
  SimConfig cfg;
  cfg.grid = grid;
  cfg.horizon = horizon;
  cfg.bidders.resize(2);
  cfg.bidders[0].value = 6;
  cfg.bidders[1].value = 3;
  cfg.schedule = std::make_shared<Schedule>(constant_schedule(make_staircase(grid, 2), horizon));
  cfg.master_seed = 13;
  SimResult r = run(cfg);

  std::vector<int> targets = {6, 3};
  ConvergenceReport conv = convergence(r, targets, grid);

  double eta = default_eta(10, horizon);
  for (int i = 0; i < 2; ++i) {
    int cap = targets[static_cast<std::size_t>(i)];
    double value = grid.value_of(cap);
    std::vector<double> expected(static_cast<std::size_t>(cap) + 1);
    double top = -1e300;
    for (int b = 0; b <= cap; ++b) {
      double bid = grid.value_of(b);
      expected[static_cast<std::size_t>(b)] =
          eta * static_cast<double>(horizon - 1) * (value * bid / 2.0 - bid * bid / 4.0);
      top = std::max(top, expected[static_cast<std::size_t>(b)]);
    }
    double total = 0.0;
    for (auto& x : expected) {
      x = std::exp(x - top);
      total += x;
    }
    for (auto& x : expected) x /= total;
    double oracle_tv = tv_to_point_mass(expected, cap);
    CHECK(std::abs(conv.tv[static_cast<std::size_t>(i)] - oracle_tv) <= 1e-9);
    CHECK(conv.monotone_mass[static_cast<std::size_t>(i)]);
  }
}

TEST_CASE("monotone mass flag") {
  BidGrid grid(10);
  std::vector<std::vector<double>> dists = {{0.1, 0.2, 0.3, 0.4}, {0.4, 0.3, 0.2, 0.1}};
  std::vector<int> targets = {3, 3};
  ConvergenceReport conv = convergence_of(dists, targets, grid);
  CHECK(conv.monotone_mass[0]);
  CHECK_FALSE(conv.monotone_mass[1]);
  CHECK(conv.expected_bid[0] == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("misreport gain is exactly zero at the truthful report") {
  BidGrid grid(4);
  SimConfig cfg;
  cfg.grid = grid;
  cfg.horizon = 64;
  cfg.bidders.resize(2);
  cfg.bidders[0].value = 2;
  cfg.bidders[1].value = 3;
  cfg.schedule = std::make_shared<Schedule>(constant_schedule(make_staircase(grid, 2), 64));
  cfg.master_seed = 77;
  std::vector<double> gains = metagame_gain(cfg, 0, 2);
  REQUIRE(gains.size() == 5);
  CHECK(gains[2] == 0.0);
}

TEST_CASE("scaling exponent fits") {
  SUBCASE("exact power laws") {
    std::vector<std::pair<double, double>> p34, sqrt3;
    for (double t : {1e3, 1e4, 1e5, 1e6}) {
      p34.emplace_back(t, std::pow(t, 0.75));
      sqrt3.emplace_back(t, 3.0 * std::sqrt(t));
    }
    CHECK(std::abs(fit_scaling_exponent(p34).exponent - 0.75) <= 1e-9);
    CHECK(std::abs(fit_scaling_exponent(sqrt3).exponent - 0.5) <= 1e-9);
  }

  SUBCASE("sqrt(T) log T fits between 0.5 and 0.62") {
    std::vector<std::pair<double, double>> points;
    for (double t : {1e3, 1e4, 1e5, 1e6}) points.emplace_back(t, std::sqrt(t) * std::log(t));
    double slope = fit_scaling_exponent(points).exponent;
    CHECK(slope >= 0.5);
    CHECK(slope <= 0.62);
  }

  SUBCASE("non-positive points are excluded with a mark") {
    std::vector<std::pair<double, double>> points = {
        {1e3, 0.0}, {1e4, std::pow(1e4, 0.75)}, {1e5, std::pow(1e5, 0.75)},
        {1e6, std::pow(1e6, 0.75)}};
    ExponentFit fit = fit_scaling_exponent(points);
    CHECK(fit.valid);
    CHECK(fit.excluded == std::vector<std::size_t>{0});
    CHECK(std::abs(fit.exponent - 0.75) <= 1e-9);

    std::vector<std::pair<double, double>> dead = {{1e3, 0.0}, {1e4, -1.0}};
    CHECK_FALSE(fit_scaling_exponent(dead).valid);
  }
}
