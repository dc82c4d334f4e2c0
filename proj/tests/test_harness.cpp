#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "doctest.h"
#include "rnoma/harness.hpp"

using namespace rnoma;

namespace {

std::string to_csv(const ResultTable& t) {
  std::ostringstream out;
  write_csv(out, t);
  return out.str();
}

std::size_t line_count(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("experiment kinds round trip") {
  for (const char* k : {"single-run", "demand-sweep", "per-user-profile", "power-sweep", "polarization-compare",
                        "single-beam-compare", "objective-compare", "ipsic-sweep", "per-satellite-satisfaction",
                        "ee-sweep"})
    CHECK(experiment_kind_name(parse_experiment_kind(k)) == k);
  CHECK_THROWS(parse_experiment_kind("nope"));
}

TEST_CASE("desk scale and settings") {
  const auto d = desk_scale(ScenarioConfig{});
  CHECK(d.num_cells == 16);
  CHECK(d.num_satellites == 3);
  ScenarioConfig c;
  apply_setting(c, "demand_mean_bps", 900e6, 0.1);
  CHECK(c.demand_range_bps[0] == doctest::Approx(810e6));
  CHECK(c.demand_range_bps[1] == doctest::Approx(990e6));
  apply_setting(c, "sat_power_dbw", 19.0);
  CHECK(c.sat_power_dbw == 19.0);
  CHECK_THROWS_AS(apply_setting(c, "bogus", 1.0), ConfigError);
}

TEST_CASE("default axes") {
  const auto demand = Experiment::make(ExperimentKind::demand_sweep, ScenarioConfig{});
  CHECK(demand.points.size() == 11);
  CHECK(demand.points.front().value == doctest::Approx(300e6));
  CHECK(demand.points.back().value == doctest::Approx(1300e6));
  CHECK(demand.trials == 20);
  CHECK(demand.base.num_cells == 16);
  const auto power = Experiment::make(ExperimentKind::power_sweep, ScenarioConfig{});
  CHECK(power.points.size() == 5);
  const auto ipsic = Experiment::make(ExperimentKind::ipsic_sweep, ScenarioConfig{});
  CHECK(ipsic.points.size() == 15);
  const auto full = Experiment::make(ExperimentKind::demand_sweep, ScenarioConfig{}, true);
  CHECK(full.base.num_cells == 64);
}

TEST_CASE("experiment section overrides defaults") {
  const auto e = experiment_from_json(R"({"experiment": {"kind": "power-sweep", "trials": 3,
      "strategies": ["D-mNOMA-BF"], "sweep": {"param": "sat_power_dbw", "values": [20, 30]}}})",
                                      ScenarioConfig{});
  CHECK(e.kind == ExperimentKind::power_sweep);
  CHECK(e.trials == 3);
  CHECK(e.strategies == std::vector<std::string>{"D-mNOMA-BF"});
  REQUIRE(e.points.size() == 2);
  CHECK(e.points[1].value == 30.0);
  CHECK_THROWS(experiment_from_json(R"({"experiment": {"kind": "power-sweep", "trials": 0}})", ScenarioConfig{}));
  CHECK_THROWS(experiment_from_json(R"({"experiment": {"strategies": ["Z-BF"]}})", ScenarioConfig{}));
}

TEST_CASE("demand sweep emits every strategy, point and trial") {
  auto e = Experiment::make(ExperimentKind::demand_sweep, ScenarioConfig{});
  e.strategies = {"D-eNOMA-BF", "OMA-BF"};
  e.trials = 5;
  e.threads = 1;
  const auto t = run_experiment(e);
  std::map<std::string, int> per_strategy;
  std::map<std::tuple<std::string, int, int>, int> seen;
  for (const auto& r : t.rows) {
    ++per_strategy[r.strategy];
    ++seen[{r.strategy, r.point_index, r.trial}];
    CHECK(r.status.find(',') == std::string::npos);
  }
  CHECK(per_strategy["D-eNOMA-BF"] == 55);
  CHECK(per_strategy["OMA-BF"] == 55);
  for (const auto& [k, n] : seen) CHECK(n == 1);

  const auto csv = to_csv(t);
  CHECK(line_count(csv) == 111);
  CHECK(csv == to_csv(t));
  std::istringstream in(csv);
  const auto back = read_csv(in);
  REQUIRE(back.rows.size() == t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    CHECK(back.rows[i].status == t.rows[i].status);
    if (!t.rows[i].has_metrics()) continue;
    CHECK(std::isfinite(row_metric(back.rows[i], "total_gap_bps")));
  }
  for (int p = 0; p < 11; ++p) {
    const double mem = mean_metric(t, "OMA-BF", p, "objective_gap_db");
    const double csv_mean = mean_metric(back, "OMA-BF", p, "objective_gap_db");
    CHECK(csv_mean == doctest::Approx(mem).epsilon(1e-9));
  }
}

TEST_CASE("single point single trial equals a direct run") {
  auto e = Experiment::make(ExperimentKind::single_run, ScenarioConfig{});
  e.seed = 17;
  const auto t = run_experiment(e);
  REQUIRE(t.rows.size() == 1);

  auto cfg = e.base;
  cfg.seed = 17;
  Rng rng(17, 0);
  const auto sc = Scenario::build(cfg, rng);
  Rng srng(17, 0);
  const auto r = run(sc, Strategy::parse("D-mNOMA-BF"), srng);
  CHECK(t.rows[0].metrics.objective_gap == doctest::Approx(r.metrics.objective_gap).epsilon(1e-12));
  CHECK(t.rows[0].metrics.total_capacity_bps == doctest::Approx(r.metrics.total_capacity_bps).epsilon(1e-12));

  const std::string path = "harness_one_row.csv";
  emit(t, path);
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  CHECK(line_count(ss.str()) == 2);
  CHECK(ss.str().rfind("experiment,strategy,sweep_param,sweep_value,trial,objective_gap_db,satisfaction_ratio,"
                       "min_sat_rate_worst,total_capacity_bps,total_gap_bps,energy_eff,status\n",
                       0) == 0);
  std::remove(path.c_str());

  CHECK_THROWS_WITH(emit(t, "/nonexistent-dir/x.csv"), doctest::Contains("/nonexistent-dir/x.csv"));
  CHECK_THROWS(emit(ResultTable{}, "empty.csv"));
}

TEST_CASE("imperfect SIC sweep skips the convex strategies") {
  auto e = Experiment::make(ExperimentKind::ipsic_sweep, ScenarioConfig{});
  e.strategies = {"D-eNOMA-BF"};
  e.trials = 1;
  const auto t = run_experiment(e);
  REQUIRE(t.rows.size() == 15);
  for (const auto& r : t.rows) {
    const bool perfect = r.sweep_value == 0.0;
    CHECK((r.status == "unsupported") != perfect);
  }
}

}  // TEST_SUITE
