#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "rnoma/power.hpp"

using namespace rnoma;
using namespace rnoma::testing;

namespace {

CellInstance two_user(double g0, double g1, double d0, double d1) {
  CellInstance c;
  c.n = 2;
  c.coupling = {g0, 0.0, 0.0, g1};
  c.bandwidth_hz = 500e6;
  c.noise_w = 2.512e-14;
  c.p_budget_w = 316.0;
  c.r_min_bps = 5e6;
  c.demands_bps = {d0, d1};
  return c;
}

CellInstance one_user(double g, double d, double budget) {
  CellInstance c;
  c.n = 1;
  c.coupling = {g};
  c.bandwidth_hz = 500e6;
  c.noise_w = 2.512e-14;
  c.p_budget_w = budget;
  c.r_min_bps = 5e6;
  c.demands_bps = {d};
  return c;
}

}  // namespace

TEST_SUITE("power") {

TEST_CASE("sinr follows the printed interference order") {
  CellInstance c;
  c.n = 2;
  c.coupling = {4.0, 1.0, 0.5, 2.0};
  c.noise_w = 0.5;
  const std::vector<double> p{1.0, 3.0};
  auto g = sinr(c, p);
  CHECK(g[0] == doctest::Approx(4.0 / 0.5));
  CHECK(g[1] == doctest::Approx(6.0 / (0.5 * 1.0 + 0.5)));

  c.kappa = 1.0;
  g = sinr(c, p);
  CHECK(g[0] == doctest::Approx(4.0 / (1.0 * 3.0 + 0.5)));

  double prev = 1e300;
  for (double k : {0.0, 1e-4, 1e-2, 0.5, 1.0}) {
    c.kappa = k;
    const double g0 = sinr(c, p)[0];
    CHECK(g0 <= prev);
    prev = g0;
  }

  c.kappa = 0.0;
  c.sic_order = SicOrder::conventional;
  g = sinr(c, p);
  CHECK(g[0] == doctest::Approx(4.0 / (3.0 + 0.5)));
  CHECK(g[1] == doctest::Approx(6.0 / 0.5));
}

TEST_CASE("achievable rate") {
  const std::vector<double> g{1.0, 3.0, 0.0};
  const auto r = achievable_rate(g, 500e6);
  CHECK(r[0] == doctest::Approx(500e6));
  CHECK(r[1] == doctest::Approx(1000e6));
  CHECK(r[2] == 0.0);
  for (double x : achievable_rate(g, 500e6, 0)) CHECK(x == 0.0);
}

TEST_CASE("xi decomposition reproduces the rate") {
  std::mt19937_64 gen(21);
  for (int t = 0; t < 200; ++t) {
    const auto c = random_instance(gen, 1 + t % 6, 0.1, 1e4, true);
    std::vector<double> p(c.n);
    for (auto& x : p) x = uniform(gen, 0.0, c.p_budget_w / c.n);
    const auto xi = xi_decompose(c, p);
    const auto r = achievable_rate(c, p);
    for (std::size_t i = 0; i < c.n; ++i) CHECK(rel_diff(xi.plus[i] - xi.minus[i], r[i]) <= 1e-9 + 1e-6 / std::max(r[i], 1.0));
    CHECK(xi.minus[0] == doctest::Approx(c.bandwidth_hz * std::log2(c.noise_w)));
  }
  const auto c = two_user(1e-8, 1e-9, 1e8, 1e8);
  const auto xi = xi_decompose(c, std::vector<double>{0.0, 0.0});
  CHECK(xi.plus[1] == xi.minus[1]);
}

TEST_CASE("cascade powers worked example") {
  const std::vector<double> r{500e6, 500e6}, g{1.0, 1.0};
  const auto p = cascade_powers(r, g, 2.512e-14, 500e6);
  CHECK(p[0] == doctest::Approx(2.512e-14).epsilon(1e-12));
  CHECK(p[1] == doctest::Approx(5.024e-14).epsilon(1e-12));
  for (double x : cascade_powers(std::vector<double>{0, 0, 0}, std::vector<double>{3, 2, 1}, 1.0, 1.0))
    CHECK(x == 0.0);
  CHECK_THROWS_AS(cascade_powers(r, std::vector<double>{1.0, 2.0}, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(cascade_powers(r, std::vector<double>{1.0, 0.0}, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("cascade total and rate round trip on random instances") {
  std::mt19937_64 gen(1);
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = 1 + t % 6;
    const auto gains = random_gains(gen, n, 1e-10, 1e-6);
    const double noise = log_uniform(gen, 1e-15, 1e-12);
    const double bw = log_uniform(gen, 1e6, 1e9);
    std::vector<double> r(n);
    for (auto& x : r) x = uniform(gen, 0.0, 3.0) * bw;
    const auto p = cascade_powers(r, gains, noise, bw);
    double sum = 0.0;
    for (double x : p) sum += x;
    CHECK(rel_diff(cascade_total_power(r, gains, noise, bw), sum) <= 1e-9);

    CellInstance c;
    c.n = n;
    c.coupling.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) c.coupling[i * n + j] = j < i ? gains[i] : 0.0;
    for (std::size_t i = 0; i < n; ++i) c.coupling[i * n + i] = gains[i];
    c.noise_w = noise;
    c.bandwidth_hz = bw;
    const auto back = achievable_rate(c, p);
    for (std::size_t i = 0; i < n; ++i) CHECK(rel_diff(back[i], r[i]) <= 1e-9);

    std::vector<double> exact;
    REQUIRE(powers_for_rates(c, r, exact));
    for (std::size_t i = 0; i < n; ++i) CHECK(rel_diff(exact[i], p[i]) <= 1e-9);
  }
}

TEST_CASE("single-user closed forms") {
  const double g = 1e-12, budget = 316.0;
  const double full = 500e6 * std::log2(1 + g * budget / 2.512e-14);
  SUBCASE("cap binds") {
    const auto c = one_user(g, full * 1.5, budget);
    const auto mono = monotonic_power_solve(c, SolverParams{});
    CHECK(mono.p[0] == doctest::Approx(budget).epsilon(1e-4));
    const auto cone = expcone_power_solve(c, SolverParams{});
    CHECK(cone.target_rates[0] == doctest::Approx(full).epsilon(1e-6));
    CHECK(cone.p[0] <= budget + 1e-9);
  }
  SUBCASE("demand reachable") {
    const double p_hat = 40.0;
    const double d = 500e6 * std::log2(1 + g * p_hat / 2.512e-14);
    const auto c = one_user(g, d, budget);
    const auto mono = monotonic_power_solve(c, SolverParams{});
    CHECK(mono.p[0] == doctest::Approx(p_hat).epsilon(5e-3));
    const auto cone = expcone_power_solve(c, SolverParams{});
    CHECK(cone.target_rates[0] == doctest::Approx(d).epsilon(1e-6));
    CHECK(cone.p[0] == doctest::Approx(p_hat).epsilon(1e-5));
  }
}

TEST_CASE("identical users get identical rates") {
  const auto c = two_user(1e-16, 1e-16, 900e6, 900e6);
  const auto a = expcone_power_solve(c, SolverParams{});
  CHECK(a.target_rates[0] == doctest::Approx(a.target_rates[1]).epsilon(1e-5));
  CHECK(a.target_rates[0] < 900e6);
}

TEST_CASE("solvers match grid oracles on two-user cells") {
  std::mt19937_64 gen(77);
  int checked = 0;
  for (int t = 0; t < 30; ++t) {
    const auto c = random_instance(gen, 2, 0.5, 20.0, t % 2 == 1);
    if (t % 2 == 0) {
      const std::vector<double> gains{c.gain(0), c.gain(1)};
      if (cascade_total_power(c.demands_bps, gains, c.noise_w, c.bandwidth_hz) <= c.p_budget_w) continue;
      const auto grid = rate_grid_optimum(c);
      if (!std::isfinite(grid.objective)) continue;
      const auto sol = expcone_power_solve(c, SolverParams{});
      CHECK(gap_objective(c, sol.target_rates) <= 1.01 * grid.objective);
      double sum = 0.0;
      for (double x : sol.p) sum += x;
      CHECK(sum <= c.p_budget_w + 1e-9);
      for (std::size_t i = 0; i < 2; ++i) CHECK(sol.target_rates[i] <= c.demands_bps[i] * (1 + 1e-12));
    } else {
      const auto grid = power_grid_optimum(c);
      if (!std::isfinite(grid.objective)) continue;
      const auto sol = monotonic_power_solve(c, SolverParams{});
      CHECK(gap_objective(c, achievable_rate(c, sol.p)) <= 1.01 * grid.objective);
      CHECK(sol.p[0] + sol.p[1] <= c.p_budget_w + 1e-9);
    }
    ++checked;
  }
  CHECK(checked >= 20);
}

TEST_CASE("orthogonal shares split the budget") {
  const auto c = two_user(1e-12, 5e-13, 400e6, 400e6);
  const std::vector<double> share{0.5, 0.5};
  const auto a = orthogonal_power_solve(c, share, SolverParams{});
  CHECK(a.p[0] + a.p[1] <= c.p_budget_w + 1e-9);
  for (std::size_t i = 0; i < 2; ++i) {
    const double bw = 0.5 * c.bandwidth_hz;
    const double expect = bw * std::log2(1 + c.gain(i) * a.p[i] / (0.5 * c.noise_w));
    CHECK(a.rates[i] == doctest::Approx(expect).epsilon(1e-9));
  }
}

TEST_CASE("infeasible and unsupported instances are reported") {
  auto c = two_user(1e-12, 1e-22, 400e6, 400e6);
  try {
    monotonic_power_solve(c, SolverParams{});
    FAIL("expected InfeasibleError");
  } catch (const InfeasibleError& e) {
    CHECK(e.user() == 1);
  }
  CHECK_THROWS_AS(expcone_power_solve(c, SolverParams{}), InfeasibleError);

  auto k = two_user(1e-12, 5e-13, 400e6, 400e6);
  k.kappa = 1e-3;
  CHECK_THROWS_AS(expcone_power_solve(k, SolverParams{}), UnsupportedError);
}

TEST_CASE("unserved cell allocates nothing") {
  auto c = two_user(1e-12, 5e-13, 400e6, 400e6);
  c.mu = 0;
  const auto m = monotonic_power_solve(c, SolverParams{});
  for (double x : m.p) CHECK(x == 0.0);
  for (double x : m.rates) CHECK(x == 0.0);
}

}  // TEST_SUITE
