#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "auctiondyn/io.hpp"
#include "auctiondyn/jsonschema.hpp"

using namespace auctiondyn;
using nlohmann::json;

namespace {

std::filesystem::path temp_dir(const std::string& leaf) {
  auto dir = std::filesystem::temp_directory_path() / "auctiondyn_tests" / leaf;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

json load_schema(const std::string& name) {
  return io::load_json_file(std::filesystem::path(AUCTIONDYN_SCHEMA_DIR) / name);
}

SimConfig tiny_config() {
  json doc = {
      {"delta", 4},
      {"horizon", 100},
      {"master_seed", 9},
      {"bidders",
       json::array({{{"value", 2}, {"learner", {{"kind", "mwu"}}}},
                    {{"value", 3}, {"learner", {{"kind", "mwu"}}}}})},
      {"schedule",
       {{"kind", "constant"},
        {"mechanism", {{"kind", "spa"}, {"delta", 4}, {"n", 2}, {"reserve", 0}}}}},
      {"mean_based_delta", 0.05},
      {"collect_traces", true},
  };
  return io::parse_sim_config(doc);
}

}  // namespace

TEST_CASE("mechanism specs parse into working mechanisms") {
  json spa = {{"kind", "spa"}, {"delta", 10}, {"n", 2}, {"reserve", 5},
              {"tie", "favor_lower_index"}};
  Mechanism m = io::parse_mechanism(spa);
  BidProfile bids = {4, 7};
  CHECK(m.pay(1, bids) == doctest::Approx(0.5));
  CHECK(m.deterministic());

  json stair = {{"kind", "staircase"}, {"delta", 10}, {"n", 2}};
  CHECK(io::parse_mechanism(stair).alloc(0, bids) == doctest::Approx(0.2));

  json soft = {{"kind", "softmax"}, {"delta", 10}, {"lambda", 5.0}};
  CHECK(io::parse_mechanism(soft).bidders() == 2);

  json blend = {{"kind", "mix"}, {"q", 0.25}, {"first", spa}, {"second", stair}};
  Mechanism mixed = io::parse_mechanism(blend);
  CHECK(mixed.alloc(1, bids) ==
        doctest::Approx(0.25 * 1.0 + 0.75 * 0.35).epsilon(1e-12));

  json table = {
      {"kind", "table"}, {"delta", 1}, {"n", 2},
      {"alloc", json::array({json::array({json::array({0.0, 0.0}), json::array({1.0, 0.5})}),
                             json::array({json::array({0.0, 1.0}), json::array({0.0, 0.5})})})},
      {"pay", json::array({json::array({json::array({0.0, 0.0}), json::array({0.0, 0.25})}),
                           json::array({json::array({0.0, 0.0}), json::array({0.0, 0.25})})})}};
  Mechanism tab = io::parse_mechanism(table);
  BidProfile profile = {1, 0};
  CHECK(tab.alloc(0, profile) == 1.0);
  profile = {1, 1};
  CHECK(tab.alloc(0, profile) == 0.5);
  CHECK(tab.pay(1, profile) == 0.25);
}

TEST_CASE("mechanism parse failures carry context") {
  CHECK_THROWS_AS(io::parse_mechanism(json{{"kind", "nope"}}), io::ParseError);
  CHECK_THROWS_AS(io::parse_mechanism(json{{"kind", "spa"}, {"delta", 10}}), io::ParseError);
  CHECK_THROWS_AS(io::parse_mechanism(json{{"kind", "mix"}, {"q", 2.0}}), io::ParseError);
  json bad_table = {{"kind", "table"}, {"delta", 1}, {"n", 2},
                    {"alloc", json::array({1.0})}, {"pay", json::array({1.0})}};
  CHECK_THROWS_AS(io::parse_mechanism(bad_table), io::ParseError);
}

TEST_CASE("json files report line and column on parse errors") {
  auto dir = temp_dir("parse");
  {
    std::ofstream out(dir / "broken.json");
    out << "{\n  \"kind\": \"spa\",\n  oops\n}\n";
  }
  try {
    io::load_json_file(dir / "broken.json");
    FAIL("expected ParseError");
  } catch (const io::ParseError& e) {
    std::string message = e.what();
    CHECK(message.find(":3:") != std::string::npos);
  }
}

TEST_CASE("distribution specs") {
  BidGrid grid(4);
  CHECK(io::parse_distribution(json{{"kind", "uniform"}}, grid).pmf()[0] ==
        doctest::Approx(0.2));
  json pmf = {{"kind", "pmf"}, {"weights", {1.0, 1.0, 2.0, 0.0, 0.0}}};
  DiscreteDistribution d = io::parse_distribution(pmf, grid);
  CHECK(d.pmf()[2] == doctest::Approx(0.5));
  CHECK_THROWS_AS(io::parse_distribution(json{{"kind", "pmf"}, {"weights", {1.0}}}, grid),
                  io::ParseError);
}

TEST_CASE("sim config parsing") {
  SimConfig cfg = tiny_config();
  CHECK(cfg.grid.delta() == 4);
  CHECK(cfg.horizon == 100);
  CHECK(cfg.bidders.size() == 2);
  CHECK(cfg.mean_based_delta == 0.05);
  CHECK(cfg.collect_traces);

  json two_phase = {
      {"delta", 10},
      {"horizon", 10'000},
      {"bidders", json::array({{{"value", 3}}, {{"value", 4}}})},
      {"schedule",
       {{"kind", "two_phase"},
        {"strict", {{"kind", "staircase"}, {"delta", 10}, {"n", 2}}},
        {"delta_t", "default"}}},
  };
  SimConfig tp = io::parse_sim_config(two_phase);
  CHECK(tp.schedule->metadata().t_switch > 0);
  CHECK(tp.schedule->metadata().delta_t ==
        doctest::Approx(default_mean_based_delta(10, 10'000)));

  json bad = two_phase;
  bad["bidders"] = json::array({{{"value", 3}}});
  CHECK_THROWS_AS(io::parse_sim_config(bad), io::ParseError);

  json mismatched = two_phase;
  mismatched["schedule"]["strict"]["n"] = 3;
  CHECK_THROWS_AS(io::parse_sim_config(mismatched), io::ParseError);
}

TEST_CASE("simulation outputs are schema-valid, RFC 4180 shaped, and reproducible") {
  SimConfig cfg = tiny_config();
  AggregateResult agg = run_trials(cfg, 3, 2);

  auto dir1 = temp_dir("out1");
  auto dir2 = temp_dir("out2");
  json summary = io::write_simulation_outputs(cfg, agg, dir1);
  AggregateResult again = run_trials(cfg, 3, 1);
  io::write_simulation_outputs(cfg, again, dir2);

  for (const char* name : {"revenue.csv", "snapshots.csv", "summary.json",
                           "traces_bidder0.csv", "traces_bidder1.csv"}) {
    CHECK(slurp(dir1 / name) == slurp(dir2 / name));
  }

  auto errors = validate_schema(summary, load_schema("summary.schema.json"));
  for (const auto& err : errors) MESSAGE(err);
  CHECK(errors.empty());

  std::string revenue = slurp(dir1 / "revenue.csv");
  CHECK(revenue.rfind("round,mean_revenue,std\r\n", 0) == 0);
  std::size_t rows = 0;
  for (std::size_t pos = 0; (pos = revenue.find("\r\n", pos)) != std::string::npos; pos += 2)
    ++rows;
  CHECK(rows == 101);  // header plus one row per round

  std::string traces = slurp(dir1 / "traces_bidder0.csv");
  CHECK(traces.rfind("round,action_index,prob_truthful,expected_bid,realized_utility\r\n", 0) ==
        0);
}

TEST_CASE("schema validator flags missing and mistyped fields") {
  json schema = load_schema("summary.schema.json");
  SimConfig cfg = tiny_config();
  cfg.collect_traces = false;
  AggregateResult agg = run_trials(cfg, 2, 1);
  json good = io::summary_from_aggregate(cfg, agg);
  CHECK(validate_schema(good, schema).empty());

  json missing = good;
  missing.erase("regret");
  CHECK_FALSE(validate_schema(missing, schema).empty());

  json mistyped = good;
  mistyped["horizon"] = "100";
  CHECK_FALSE(validate_schema(mistyped, schema).empty());

  json negative = good;
  negative["final_tv"][0] = -0.5;
  CHECK_FALSE(validate_schema(negative, schema).empty());
}

TEST_CASE("shortest round-trip double formatting") {
  for (double x : {0.1, 1.0 / 3.0, 0.0025, 1e-12, 123456.789, 0.0}) {
    CHECK(std::stod(io::format_double(x)) == x);
  }
}

TEST_CASE("ic reports serialize with characterization for deterministic mechanisms") {
  BidGrid grid(6);
  Mechanism lower = make_spa(grid, 2, 0, TieBreakRule::kFavorLowerIndex);
  json report = io::ic_report_to_json(verify_ic(lower), lower);
  auto errors = validate_schema(report, load_schema("icreport.schema.json"));
  for (const auto& err : errors) MESSAGE(err);
  CHECK(errors.empty());
  CHECK(report["status"] == "IC_WEAK");
  CHECK(report["deterministic"] == true);
  CHECK(report["characterization"]["pass"] == true);

  Mechanism stair = make_staircase(grid, 2);
  json strict = io::ic_report_to_json(verify_ic(stair), stair);
  CHECK(strict["status"] == "IC_STRICT");
  CHECK(strict["characterization"].is_null());
}
