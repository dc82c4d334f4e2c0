#include <cmath>
#include <sstream>

#include "doctest.h"
#include "rnoma/engine.hpp"

using namespace rnoma;

namespace {

ScenarioConfig desk() {
  ScenarioConfig c;
  c.num_cells = 16;
  c.num_satellites = 3;
  return c;
}

std::string solution_csv(const RunResult& r) {
  std::ostringstream out;
  write_solution_csv(out, r.solution);
  return out.str();
}

}  // namespace

TEST_SUITE("engine") {

TEST_CASE("strategy names round trip") {
  for (const char* n : {"D-mNOMA-BF", "A-eNOMA-BF", "A-mNOMA-BF", "D-eNOMA-BF", "OMA-BF", "D-mNOMA-2c",
                        "A-eNOMA-4c", "D-mNOMA-S", "P-mNOMA-BF", "D-qNOMA-BF", "A-mNOMA-BF-S2"})
    CHECK(Strategy::parse(n).name() == n);
  CHECK(Strategy::parse("D-mNOMA").name() == "D-mNOMA-BF");
  CHECK(Strategy::parse("D-mNOMA-BF-2c").beam == BeamKind::color2);
  CHECK(Strategy::parse("OMA-BF").power == PowerMode::oma);
  CHECK_THROWS_AS(Strategy::parse("X-mNOMA-BF"), std::invalid_argument);
  CHECK_THROWS_AS(Strategy::parse("OMA-2c"), std::invalid_argument);
  CHECK_THROWS_AS(Strategy::parse("D-mNOMA-BF-S2-2c"), std::invalid_argument);
}

TEST_CASE("scenario build places users per cell") {
  const auto cfg = desk();
  Rng rng(5, 0);
  const auto sc = Scenario::build(cfg, rng);
  CHECK(sc.num_cells() == 16);
  CHECK(sc.num_sats() == 3);
  CHECK(sc.users.size() == 64);
  for (int k = 0; k < 16; ++k)
    for (int u : sc.users_of(k)) CHECK(sc.users[u].cell_id == k);
  const auto ch = sc.channels(2, 0, 5);
  CHECK(ch.columns.size() == 4);
  CHECK(ch.cell_id == 5);
}

TEST_CASE("single user reaches its demand or exhausts the budget") {
  auto cfg = desk();
  cfg.users_per_cell = 1;
  cfg.demand_range_bps = {400e6, 400e6};
  Rng rng(2, 0);
  const auto sc = Scenario::build(cfg, rng);
  const auto r = run(sc, Strategy::parse("D-mNOMA-BF"), rng);
  int checked = 0;
  for (const auto& c : r.solution.cells) {
    if (c.infeasible) continue;
    const bool capped = c.p[0] >= 1.05 * cfg.sat_power_w() * (1 - 1e-3);
    if (!capped) {
      CHECK(c.rates[0] == doctest::Approx(400e6).epsilon(1e-3));
      ++checked;
    }
  }
  CHECK(checked > 0);
}

TEST_CASE("orthogonal baseline closes the gap on strong channels") {
  auto cfg = desk();
  cfg.aperture_radius_m = 0.5;
  cfg.demand_range_bps = {300e6, 300e6};
  Rng rng(3, 0);
  const auto sc = Scenario::build(cfg, rng);
  const auto r = run(sc, Strategy::parse("OMA-BF"), rng);
  CHECK(r.metrics.infeasible_cells == 0);
  CHECK(r.metrics.total_gap_bps <= 1e-3 * 64 * 300e6);
  CHECK(r.metrics.satisfaction_ratio == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("metrics identities and rate recomputation") {
  const auto cfg = desk();
  for (const char* name : {"D-mNOMA-BF", "A-eNOMA-BF", "D-mNOMA-2c", "D-eNOMA-4c", "D-mNOMA-S", "OMA-BF"}) {
    CAPTURE(name);
    Rng rng(11, 0);
    const auto sc = Scenario::build(cfg, rng);
    Rng srng(11, 0);
    const auto r = run(sc, Strategy::parse(name), srng);
    const auto& m = r.metrics;
    double demand = 0.0, demand_sq = 0.0;
    for (double d : r.solution.user_demands) {
      demand += d;
      demand_sq += d * d;
    }
    CHECK(m.total_capacity_bps + m.total_gap_bps == doctest::Approx(demand));
    CHECK(m.satisfaction_ratio >= 0.0);
    CHECK(m.satisfaction_ratio <= 1.0);
    CHECK(m.scheme2_ratio == doctest::Approx(m.satisfaction_ratio * 64));
    CHECK(m.objective_gap_db == doctest::Approx(10 * std::log10(m.objective_gap / demand_sq)));
    CHECK(m.min_sat_rate_worst <= 1.0);
    CHECK(m.energy_efficiency >= 0.0);
    r.solution.plan.validate();
    for (const auto& c : r.solution.cells) {
      const auto again = evaluate_rates(c, sc);
      for (std::size_t i = 0; i < again.size(); ++i) CHECK(again[i] == doctest::Approx(c.rates[i]).epsilon(1e-9));
      double sum = 0.0;
      for (double p : c.p) sum += p;
      CHECK(sum <= 1.05 * cfg.sat_power_w() + 1e-9);
    }
    const auto& h = r.solution.objective_history;
    for (std::size_t i = 1; i < h.size(); ++i) CHECK(h[i] <= h[i - 1] * (1 + 1e-9));
  }
}

TEST_CASE("single-user cells: orthogonal equals NOMA and both solvers agree") {
  auto cfg = desk();
  cfg.users_per_cell = 1;
  cfg.power_headroom_factor = 1.0;
  Rng rng(6, 0);
  const auto sc = Scenario::build(cfg, rng);
  Rng r1(6, 0), r2(6, 0), r3(6, 0);
  const auto oma = run(sc, Strategy::parse("OMA-BF"), r1);
  const auto cone = run(sc, Strategy::parse("D-eNOMA-BF"), r2);
  RunOptions opt;
  opt.plan = cone.solution.plan;
  const auto mono = run(sc, Strategy::parse("P-mNOMA-BF"), r3, opt);
  CHECK(oma.solution.plan.cell_of == cone.solution.plan.cell_of);
  for (std::size_t u = 0; u < oma.solution.user_rates.size(); ++u)
    CHECK(oma.solution.user_rates[u] == doctest::Approx(cone.solution.user_rates[u]).epsilon(1e-6));
  CHECK(mono.metrics.objective_gap == doctest::Approx(cone.metrics.objective_gap).epsilon(0.02));
}

TEST_CASE("metrics by hand") {
  ScenarioConfig cfg = desk();
  cfg.num_satellites = 1;
  cfg.num_cells = 1;
  cfg.users_per_cell = 1;
  Rng rng(1, 0);
  const auto sc = Scenario::build(cfg, rng);
  SolutionReport sol;
  CellSolution c;
  c.user_ids = {0};
  c.demands_bps = {400e6};
  c.rates = {400e6};
  c.p = {10.0};
  c.group = {0};
  c.group_bandwidth = {500e6};
  sol.cells = {c};
  sol.user_rates = {400e6};
  sol.user_demands = {400e6};
  auto m = compute_metrics(sol, sc);
  CHECK(m.objective_gap == 0.0);
  CHECK(m.satisfaction_ratio == 1.0);
  CHECK(m.min_sat_rate_worst == 1.0);
  CHECK(m.energy_efficiency == doctest::Approx(0.8 / 10.0));

  sol.cells[0].rates = {0.0};
  sol.cells[0].infeasible = true;
  sol.user_rates = {0.0};
  m = compute_metrics(sol, sc);
  CHECK(m.objective_gap == doctest::Approx(400e6 * 400e6));
  CHECK(m.total_capacity_bps == 0.0);
  CHECK(m.total_gap_bps == doctest::Approx(400e6));
  CHECK(m.infeasible_cells == 1);
}

TEST_CASE("runs are deterministic for a seed") {
  const auto cfg = desk();
  auto once = [&](const char* name) {
    Rng rng(9, 1);
    const auto sc = Scenario::build(cfg, rng);
    Rng srng(9, 1);
    return solution_csv(run(sc, Strategy::parse(name), srng));
  };
  CHECK(once("A-mNOMA-BF") == once("A-mNOMA-BF"));
  CHECK(once("D-eNOMA-BF") == once("D-eNOMA-BF"));
}

TEST_CASE("fixed plans are honoured and required") {
  const auto cfg = desk();
  Rng rng(4, 0);
  const auto sc = Scenario::build(cfg, rng);
  const auto d = run(sc, Strategy::parse("D-mNOMA-BF"), rng);
  RunOptions opt;
  opt.plan = d.solution.plan;
  Rng again(4, 0);
  const auto p = run(sc, Strategy::parse("P-mNOMA-BF"), again, opt);
  CHECK(p.solution.plan.cell_of == d.solution.plan.cell_of);
  CHECK(p.metrics.objective_gap == doctest::Approx(d.metrics.objective_gap));
  CHECK_THROWS(run(sc, Strategy::parse("P-mNOMA-BF"), again));
}

TEST_CASE("convex model refuses imperfect SIC") {
  auto cfg = desk();
  cfg.ipSIC_factor = 1e-3;
  Rng rng(1, 0);
  const auto sc = Scenario::build(cfg, rng);
  CHECK_THROWS_AS(run(sc, Strategy::parse("D-eNOMA-BF"), rng), UnsupportedError);
  CHECK_NOTHROW(run(sc, Strategy::parse("D-mNOMA-BF"), rng));
}

TEST_CASE("csv dumps have their headers") {
  const auto cfg = desk();
  Rng rng(1, 0);
  const auto sc = Scenario::build(cfg, rng);
  const auto r = run(sc, Strategy::parse("D-mNOMA-BF"), rng);
  CHECK(solution_csv(r).rfind("slot,cell,sat,user,demand_bps,rate_bps,power_w,beam_norm_sq,infeasible\n", 0) == 0);
  std::ostringstream ch, eph;
  write_channels_csv(ch, sc, r.solution.plan);
  CHECK(ch.str().rfind("slot,sat_id,cell_id,user_id,distance_m,off_axis_deg,elevation_deg,visible,gain\n", 0) == 0);
  write_ephemeris_csv(eph, sc);
  CHECK(eph.str().size() > 100);
}

}  // TEST_SUITE
