#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

#include "doctest.h"
#include "rnoma/assignment.hpp"

using namespace rnoma;

namespace {

PlanningInput make_input(int slots, int sats, int cells, std::mt19937_64& g) {
  PlanningInput in;
  in.num_slots = slots;
  in.num_sats = sats;
  in.num_cells = cells;
  in.doppler_threshold_hz = 250e3;
  std::uniform_real_distribution<double> dop(-320e3, 320e3), dist(1.2e6, 2.5e6), cost(0.0, 1.0);
  in.doppler_hz.assign(slots, std::vector<double>(sats));
  in.distance_m.assign(slots, std::vector<std::vector<double>>(sats, std::vector<double>(cells)));
  in.cost = in.distance_m;
  for (int t = 0; t < slots; ++t)
    for (int m = 0; m < sats; ++m) {
      in.doppler_hz[t][m] = dop(g);
      for (int k = 0; k < cells; ++k) {
        in.distance_m[t][m][k] = dist(g);
        in.cost[t][m][k] = cost(g);
      }
    }
  return in;
}

// Every plan that covers each cell once with distinct cells per slot.
void enumerate(const PlanningInput& in, AssignmentPlan& plan, std::vector<char>& used, int pos,
               std::vector<AssignmentPlan>& out) {
  const int total = in.num_slots * in.num_sats;
  if (pos == total) {
    if (std::all_of(used.begin(), used.end(), [](char c) { return c; })) out.push_back(plan);
    return;
  }
  const int t = pos / in.num_sats, m = pos % in.num_sats;
  for (int k = 0; k < in.num_cells; ++k) {
    if (used[k]) continue;
    used[k] = 1;
    plan.cell_of[t][m] = k;
    enumerate(in, plan, used, pos + 1, out);
    used[k] = 0;
  }
  plan.cell_of[t][m] = -1;
}

}  // namespace

TEST_SUITE("assignment") {

TEST_CASE("plan validation") {
  AssignmentPlan p(2, 2, 4);
  p.cell_of = {{0, 1}, {2, 3}};
  CHECK_NOTHROW(p.validate());
  CHECK(p.server_of(2) == std::pair<int, int>{1, 0});
  CHECK(p.entries().size() == 4);
  p.cell_of = {{0, 0}, {2, 3}};
  CHECK_THROWS_AS(p.validate(), std::logic_error);
  p.cell_of = {{0, 1}, {2, -1}};
  CHECK_THROWS_AS(p.validate(), std::logic_error);
  CHECK(p.server_of(3) == std::pair<int, int>{-1, -1});
}

TEST_CASE("doppler match resolves conflicts by smaller shift") {
  PlanningInput in;
  in.num_slots = 1;
  in.num_sats = 2;
  in.num_cells = 6;
  in.doppler_threshold_hz = 300e3;
  in.doppler_hz = {{200e3, 100e3}};
  in.distance_m = {{{6, 5, 4, 3, 2, 1}, {6, 5, 4, 3, 2, 1.5}}};
  in.cost.assign(1, std::vector<std::vector<double>>(2, std::vector<double>(6, 0.0)));
  auto plan = doppler_match(in);
  CHECK(plan.cell_of[0][1] == 5);
  CHECK(plan.cell_of[0][0] == 4);

  in.distance_m = {{{1, 5, 4, 3, 2, 6}, {6, 5, 4, 3, 2, 1}}};
  plan = doppler_match(in);
  CHECK(plan.cell_of[0][0] == 0);
  CHECK(plan.cell_of[0][1] == 5);

  in.doppler_hz = {{400e3, -500e3}};
  in.distance_m = {{{6, 5, 4, 3, 2, 1}, {6, 5, 4, 3, 2, 1.5}}};
  plan = doppler_match(in);
  CHECK(plan.cell_of[0][0] == 5);
  CHECK(plan.cell_of[0][1] == 4);

  std::mt19937_64 g(4);
  for (int r = 0; r < 50; ++r) {
    const auto rin = make_input(6, 3, 16, g);
    CHECK_NOTHROW(doppler_match(rin).validate());
  }
}

TEST_CASE("transition probability") {
  const std::vector<double> w{2.0, 1.0, 5.0}, l{1.0, 1.0, 1.0};
  const std::vector<char> allowed{1, 1, 0};
  const auto p = transition_probability(w, l, allowed, 1.0, 1.0);
  CHECK(p[0] == doctest::Approx(2.0 / 3.0));
  CHECK(p[1] == doctest::Approx(1.0 / 3.0));
  CHECK(p[2] == 0.0);
  const auto eq = transition_probability(std::vector<double>{1, 1}, std::vector<double>{3, 3},
                                         std::vector<char>{1, 1}, 2.0, 1.0);
  CHECK(eq[0] == doctest::Approx(0.5));
  const auto zero = transition_probability(std::vector<double>{0, 0}, std::vector<double>{1, 1},
                                           std::vector<char>{1, 1}, 1.0, 1.0);
  CHECK(zero[1] == doctest::Approx(0.5));
  CHECK(std::accumulate(p.begin(), p.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("pheromone update evaporates, deposits and clamps") {
  PheromoneTable table(1, 1, 1.0);
  AntPath path;
  path.plan = AssignmentPlan(1, 1, 1);
  path.plan.cell_of = {{0}};
  path.utility = 0.2;
  update_pheromone(table, path, 0.5, 10.0);
  CHECK(table.get(0, table.start_node(), 0) == doctest::Approx(0.7));
  CHECK(table.get(0, 0, 0) == doctest::Approx(0.5));

  path.utility = 0.0;
  for (int i = 0; i < 5; ++i) update_pheromone(table, path, 0.5, 10.0);
  CHECK(table.get(0, 0, 0) == doctest::Approx(0.5 / 32));

  path.utility = 1e6;
  update_pheromone(table, path, 0.5, 10.0);
  CHECK(table.get(0, table.start_node(), 0) == 10.0);
}

TEST_CASE("ant colony finds the enumerated optimum on a small instance") {
  std::mt19937_64 g(12);
  AntParams params;
  for (int r = 0; r < 5; ++r) {
    const auto in = make_input(2, 2, 4, g);
    AssignmentPlan scratch(2, 2, 4);
    std::vector<char> used(4, 0);
    std::vector<AssignmentPlan> all;
    enumerate(in, scratch, used, 0, all);
    REQUIRE(all.size() == 24);
    double best = 1e300;
    for (const auto& p : all) best = std::min(best, plan_cost(in, p));

    Rng rng(99, r);
    const auto res = ant_colony_plan(in, params, rng);
    CHECK_NOTHROW(res.best.plan.validate());
    const bool listed = std::any_of(all.begin(), all.end(), [&](const AssignmentPlan& p) {
      return p.cell_of == res.best.plan.cell_of;
    });
    CHECK(listed);
    CHECK(res.best.total_cost == doctest::Approx(best));
    for (std::size_t i = 1; i < res.best_utility.size(); ++i) CHECK(res.best_utility[i] >= res.best_utility[i - 1]);
  }
}

TEST_CASE("single satellite learns the favoured order") {
  PlanningInput in;
  in.num_slots = 2;
  in.num_sats = 1;
  in.num_cells = 2;
  in.doppler_threshold_hz = 250e3;
  in.doppler_hz = {{0.0}, {0.0}};
  in.distance_m = {{{1.0, 1.0}}, {{1.0, 1.0}}};
  in.cost = {{{0.0, 5.0}}, {{5.0, 0.0}}};
  AntParams params;
  params.max_iters = 200;
  Rng rng(3, 0);
  const auto res = ant_colony_plan(in, params, rng);
  CHECK(res.best.plan.cell_of == std::vector<std::vector<int>>{{0}, {1}});

  params.colony_size = 1;
  params.max_iters = 1;
  Rng one(5, 0);
  const auto single = ant_colony_plan(in, params, one);
  CHECK_NOTHROW(single.best.plan.validate());
  CHECK(single.iterations == 1);
}

TEST_CASE("randomized plans keep their invariants") {
  std::mt19937_64 g(8);
  AntParams params;
  params.max_iters = 10;
  params.colony_size = 4;
  for (int r = 0; r < 40; ++r) {
    const auto in = make_input(6, 3, 16, g);
    Rng rng(1, r);
    const auto res = ant_colony_plan(in, params, rng);
    CHECK_NOTHROW(res.best.plan.validate());
    for (std::size_t i = 1; i < res.best_utility.size(); ++i) CHECK(res.best_utility[i] >= res.best_utility[i - 1]);
  }
}

TEST_CASE("plan csv round trip") {
  std::mt19937_64 g(1);
  const auto in = make_input(6, 3, 16, g);
  auto plan = doppler_match(in);
  plan.doppler_hz = in.doppler_hz;
  std::ostringstream out;
  write_plan_csv(out, plan);
  CHECK(out.str().rfind("slot,sat_id,cell_id,doppler_khz\n", 0) == 0);
  std::istringstream back(out.str());
  const auto read = read_plan_csv(back, 3, 16);
  CHECK(read.cell_of == plan.cell_of);
  std::ostringstream again;
  write_plan_csv(again, read);
  CHECK(again.str() == out.str());

  std::istringstream bad("slot,sat,cell\n");
  CHECK_THROWS(read_plan_csv(bad));
}

}  // TEST_SUITE
