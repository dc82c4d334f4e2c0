#include "rnoma/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <sstream>

#include "rnoma/units.hpp"

namespace rnoma {

namespace {

constexpr int kMaxOuter = 50;
constexpr double kRateTol = 1e-4;

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  return out;
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

Strategy Strategy::parse(const std::string& name) {
  auto fail = [&]() -> Strategy { throw std::invalid_argument("unknown strategy '" + name + "'"); };
  auto tok = split(name, '-');
  if (tok.empty()) return fail();
  Strategy s;
  std::size_t i = 0;
  if (tok[0] == "D" || tok[0] == "A" || tok[0] == "P") {
    s.assign = tok[0] == "D" ? AssignMode::doppler : tok[0] == "A" ? AssignMode::ant : AssignMode::fixed_plan;
    ++i;
  }
  if (i >= tok.size()) return fail();
  const std::string& core = tok[i++];
  if (core == "mNOMA") s.power = PowerMode::monotonic;
  else if (core == "eNOMA") s.power = PowerMode::expcone;
  else if (core == "qNOMA") s.power = PowerMode::equal;
  else if (core == "OMA") s.power = PowerMode::oma;
  else return fail();

  bool beam_set = false, bf_seen = false;
  for (; i < tok.size(); ++i) {
    const std::string& t = tok[i];
    if (t == "BF" && !bf_seen && !beam_set) {
      bf_seen = true;
    } else if ((t == "2c" || t == "4c" || t == "S") && !beam_set) {
      s.beam = t == "2c" ? BeamKind::color2 : t == "4c" ? BeamKind::color4 : BeamKind::spot;
      beam_set = true;
    } else if (t == "S2" && i + 1 == tok.size()) {
      s.objective = Objective::scheme2_ratio;
    } else {
      return fail();
    }
  }
  if (s.power == PowerMode::oma && beam_set) return fail();
  return s;
}

std::string Strategy::name() const {
  std::string out;
  if (!(power == PowerMode::oma && assign == AssignMode::doppler))
    out += assign == AssignMode::doppler ? "D-" : assign == AssignMode::ant ? "A-" : "P-";
  switch (power) {
    case PowerMode::monotonic: out += "mNOMA"; break;
    case PowerMode::expcone: out += "eNOMA"; break;
    case PowerMode::equal: out += "qNOMA"; break;
    case PowerMode::oma: out += "OMA"; break;
  }
  switch (beam) {
    case BeamKind::per_user_bf: out += "-BF"; break;
    case BeamKind::spot: out += "-S"; break;
    case BeamKind::color2: out += "-2c"; break;
    case BeamKind::color4: out += "-4c"; break;
  }
  if (objective == Objective::scheme2_ratio) out += "-S2";
  return out;
}

Scenario Scenario::build(const ScenarioConfig& config, Rng& rng) {
  validate(config);
  Scenario s;
  s.config = config;
  s.cells = build_cells(config);
  Rng placement = rng.fork(1);
  s.users = spawn_users(s.cells, config, placement);
  s.orbits = default_constellation(config);
  s.relay = relay_position(config);
  s.radio = RadioParams::from_config(config);
  return s;
}

SatelliteState Scenario::sat_state(int slot, int sat) const {
  return propagate(orbits.at(sat), slot, config.slot_duration_s, sat);
}

DopplerMeasurement Scenario::doppler(int slot, int sat) const {
  return doppler_shift(sat_state(slot, sat), relay, config.carrier_frequency_hz);
}

std::vector<int> Scenario::users_of(int cell) const {
  std::vector<int> ids;
  for (const auto& u : users)
    if (u.cell_id == cell) ids.push_back(u.user_id);
  return ids;
}

ChannelMatrix Scenario::channels(int slot, int sat, int cell) const {
  const auto state = sat_state(slot, sat);
  std::vector<ChannelVector> cols;
  for (int id : users_of(cell)) {
    const auto& u = users[id];
    cols.push_back(user_channel(slant_geometry(state, u.lat_deg, u.lon_deg), radio, slot, id));
  }
  return make_channel_matrix(cell, slot, std::move(cols));
}

namespace {

struct Group {
  std::vector<std::size_t> cols;
  double bandwidth = 0.0;
  double noise = 0.0;
  double budget = 0.0;
};

BeamMatrix beams_for(const Strategy& st, const ChannelMatrix& ch, const std::vector<double>& p) {
  switch (st.beam) {
    case BeamKind::spot: return spot_beam(ch, p);
    case BeamKind::color2:
    case BeamKind::color4: return unsteered_beams(ch, p);
    case BeamKind::per_user_bf: break;
  }
  return per_user_beams(ch, p);
}

double budget_for(const Strategy& st, const ScenarioConfig& cfg) {
  const double p = cfg.sat_power_w();
  return st.power == PowerMode::monotonic ? p * cfg.power_headroom_factor : p;
}

std::vector<Group> groups_for(const Strategy& st, const ChannelMatrix& ch, const ScenarioConfig& cfg) {
  const std::size_t n = ch.columns.size();
  const double B = cfg.bandwidth_hz, noise = cfg.noise_w(), budget = budget_for(st, cfg);
  std::vector<Group> groups;
  if (st.power == PowerMode::oma) {
    for (std::size_t i = 0; i < n; ++i)
      groups.push_back({{i}, B / static_cast<double>(n), noise / static_cast<double>(n), budget});
    return groups;
  }
  if (st.beam == BeamKind::color2 || st.beam == BeamKind::color4) {
    const auto part = color_partition(ch, st.beam == BeamKind::color2 ? 2 : 4);
    for (int c = 0; c < part.num_colors; ++c) {
      Group g{{}, B * part.bandwidth_factor, noise * part.bandwidth_factor, budget / part.num_colors};
      for (std::size_t i = 0; i < n; ++i)
        if (part.color[i] == c) g.cols.push_back(i);
      if (!g.cols.empty()) groups.push_back(std::move(g));
    }
    return groups;
  }
  Group g{{}, B, noise, budget};
  g.cols.resize(n);
  std::iota(g.cols.begin(), g.cols.end(), 0);
  groups.push_back(std::move(g));
  return groups;
}

std::vector<double> group_rates(const ChannelMatrix& ch, const BeamMatrix& beams, const std::vector<double>& p,
                                const std::vector<Group>& groups, const ScenarioConfig& cfg) {
  std::vector<double> rates(ch.columns.size(), 0.0);
  for (const auto& g : groups) {
    std::vector<double> zero(g.cols.size(), 0.0);
    std::vector<std::size_t> perm;
    auto inst = make_instance(ch, beams, g.cols, zero, cfg, g.bandwidth, g.noise, g.budget, perm);
    std::vector<double> pp(perm.size());
    for (std::size_t a = 0; a < perm.size(); ++a) pp[a] = p[perm[a]];
    const auto r = achievable_rate(inst, pp);
    for (std::size_t a = 0; a < perm.size(); ++a) rates[perm[a]] = r[a];
  }
  return rates;
}

std::vector<double> objective_weights(const Strategy& st, std::span<const double> demands) {
  std::vector<double> w(demands.size(), 1.0);
  if (st.objective == Objective::scheme2_ratio)
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = 1.0 / (demands[i] * demands[i]);
  return w;
}

double weighted_gap(std::span<const double> rates, std::span<const double> demands, std::span<const double> w) {
  double s = 0.0;
  for (std::size_t i = 0; i < rates.size(); ++i) s += w[i] * (rates[i] - demands[i]) * (rates[i] - demands[i]);
  return s;
}

SolverParams solver_params(const ScenarioConfig& cfg) { return cfg.solver_params; }

std::vector<double> solve_groups(const Strategy& st, const ChannelMatrix& ch, const BeamMatrix& beams,
                                 const std::vector<Group>& groups, const std::vector<double>& demands,
                                 const std::vector<double>& current, const ScenarioConfig& cfg) {
  const std::size_t n = ch.columns.size();
  std::vector<double> p(n, 0.0);
  const auto w = objective_weights(st, demands);
  if (st.power == PowerMode::oma) {
    std::vector<std::size_t> all(n), perm;
    std::iota(all.begin(), all.end(), 0);
    auto inst = make_instance(ch, beams, all, demands, cfg, cfg.bandwidth_hz, cfg.noise_w(), groups[0].budget, perm);
    inst.kappa = 0.0;
    inst.weights.resize(n);
    for (std::size_t a = 0; a < n; ++a) inst.weights[a] = w[perm[a]];
    const std::vector<double> share(n, 1.0 / static_cast<double>(n));
    const auto alloc = orthogonal_power_solve(inst, share, solver_params(cfg));
    for (std::size_t a = 0; a < n; ++a) p[perm[a]] = alloc.p[a];
    return p;
  }
  for (const auto& g : groups) {
    std::vector<double> dem(g.cols.size());
    for (std::size_t a = 0; a < g.cols.size(); ++a) dem[a] = demands[g.cols[a]];
    std::vector<std::size_t> perm;
    auto inst = make_instance(ch, beams, g.cols, dem, cfg, g.bandwidth, g.noise, g.budget, perm);
    inst.weights.resize(perm.size());
    std::vector<double> init(perm.size());
    for (std::size_t a = 0; a < perm.size(); ++a) {
      inst.weights[a] = w[perm[a]];
      init[a] = current[perm[a]];
    }
    PowerAllocation alloc;
    switch (st.power) {
      case PowerMode::monotonic: alloc = monotonic_power_solve(inst, solver_params(cfg), init); break;
      case PowerMode::expcone: alloc = expcone_power_solve(inst, solver_params(cfg)); break;
      case PowerMode::equal: alloc.p.assign(perm.size(), g.budget / static_cast<double>(perm.size())); break;
      case PowerMode::oma: break;
    }
    for (std::size_t a = 0; a < perm.size(); ++a) p[perm[a]] = alloc.p[a];
  }
  return p;
}

void mark_unserved(CellSolution& cs, std::size_t antennas, const std::string& why) {
  const std::size_t n = cs.user_ids.size();
  cs.infeasible = true;
  cs.note = why;
  cs.p.assign(n, 0.0);
  cs.rates.assign(n, 0.0);
  cs.w.assign(n, std::vector<cplx>(antennas, cplx{}));
  cs.direction = cs.w;
}

CellSolution solve_cell(const Scenario& sc, const Strategy& st, int t, int m, int k) {
  const auto& cfg = sc.config;
  CellSolution cs;
  cs.slot = t;
  cs.sat_id = m;
  cs.cell_id = k;
  cs.user_ids = sc.users_of(k);
  for (int id : cs.user_ids) cs.demands_bps.push_back(sc.users[id].demand_bps);
  const std::size_t n = cs.user_ids.size();
  cs.group.assign(n, 0);

  ChannelMatrix ch;
  try {
    ch = sc.channels(t, m, k);
  } catch (const std::domain_error&) {
    mark_unserved(cs, static_cast<std::size_t>(cfg.num_antennas), "not visible");
    return cs;
  }
  const auto groups = groups_for(st, ch, cfg);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    cs.group_bandwidth.push_back(groups[g].bandwidth);
    for (auto c : groups[g].cols) cs.group[c] = static_cast<int>(g);
  }
  const auto w = objective_weights(st, cs.demands_bps);

  // Starting point: equal split inside each group, beams at those powers.
  std::vector<double> p(n, 0.0);
  for (const auto& g : groups)
    for (auto c : g.cols)
      p[c] = (st.power == PowerMode::monotonic ? g.budget / cfg.power_headroom_factor : g.budget) /
             static_cast<double>(g.cols.size());
  BeamMatrix beams = beams_for(st, ch, p);
  std::vector<double> rates = group_rates(ch, beams, p, groups, cfg);
  double best = weighted_gap(rates, cs.demands_bps, w);
  cs.objective_history.push_back(best);
  cs.iterations = 0;
  cs.converged = true;

  if (st.power != PowerMode::equal) {
    cs.converged = false;
    try {
      for (int it = 0; it < kMaxOuter; ++it) {
        cs.iterations = it + 1;
        const BeamMatrix trial_beams = beams_for(st, ch, p);
        const auto trial_p = solve_groups(st, ch, trial_beams, groups, cs.demands_bps, p, cfg);
        // Spot directions move with the powers; score both pairings and keep the better.
        BeamMatrix trial_pair = trial_beams;
        auto trial_rates = group_rates(ch, trial_beams, trial_p, groups, cfg);
        double obj = weighted_gap(trial_rates, cs.demands_bps, w);
        if (st.beam == BeamKind::spot) {
          BeamMatrix moved = beams_for(st, ch, trial_p);
          auto alt = group_rates(ch, moved, trial_p, groups, cfg);
          const double alt_obj = weighted_gap(alt, cs.demands_bps, w);
          if (alt_obj < obj) {
            obj = alt_obj;
            trial_rates = std::move(alt);
            trial_pair = std::move(moved);
          }
        }
        if (obj > best) {
          cs.converged = true;
          break;
        }
        beams = std::move(trial_pair);
        double change = 0.0;
        for (std::size_t i = 0; i < n; ++i)
          change = std::max(change, std::abs(trial_rates[i] - rates[i]) / std::max(std::abs(rates[i]), 1.0));
        p = trial_p;
        rates = std::move(trial_rates);
        best = obj;
        cs.objective_history.push_back(best);
        if (change < kRateTol) {
          cs.converged = true;
          break;
        }
      }
    } catch (const InfeasibleError& e) {
      mark_unserved(cs, static_cast<std::size_t>(cfg.num_antennas), e.what());
      return cs;
    }
  }
  cs.p = p;
  cs.direction = beams.direction;
  cs.w.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    cs.w[i] = beams.direction[i];
    for (auto& x : cs.w[i]) x *= std::sqrt(p[i]);
  }
  cs.rates = group_rates(ch, beams, p, groups, cfg);
  return cs;
}

double cell_cost(const Scenario& sc, const Strategy& st, int t, int m, int k) {
  const auto& cfg = sc.config;
  ChannelMatrix ch;
  try {
    ch = sc.channels(t, m, k);
  } catch (const std::domain_error&) {
    return 1.0;
  }
  const std::size_t n = ch.columns.size();
  std::vector<double> demands;
  for (int id : sc.users_of(k)) demands.push_back(sc.users[id].demand_bps);
  const auto w = objective_weights(st, demands);
  double norm = 0.0;
  for (std::size_t i = 0; i < n; ++i) norm += w[i] * demands[i] * demands[i];
  const std::vector<double> equal(n, cfg.sat_power_w() / static_cast<double>(n));
  const auto beams = per_user_beams(ch, equal);
  std::vector<std::size_t> all(n), perm;
  std::iota(all.begin(), all.end(), 0);
  auto inst = make_instance(ch, beams, all, demands, cfg, cfg.bandwidth_hz, cfg.noise_w(), cfg.sat_power_w(), perm);
  inst.kappa = 0.0;
  inst.sic_order = SicOrder::printed;
  inst.weights.resize(n);
  for (std::size_t a = 0; a < n; ++a) inst.weights[a] = w[perm[a]];
  try {
    const auto alloc = expcone_power_solve(inst, cfg.solver_params);
    return gap_objective(inst, alloc.target_rates) / norm;
  } catch (const InfeasibleError&) {
    std::vector<double> pp(n, cfg.sat_power_w() / static_cast<double>(n));
    return gap_objective(inst, achievable_rate(inst, pp)) / norm;
  }
}

}  // namespace

PlanningInput planning_input(const Scenario& scenario, const Strategy& strategy) {
  PlanningInput in;
  in.num_slots = scenario.num_slots();
  in.num_sats = scenario.num_sats();
  in.num_cells = scenario.num_cells();
  in.doppler_threshold_hz = scenario.config.doppler_threshold_hz;
  in.doppler_hz.assign(in.num_slots, std::vector<double>(in.num_sats));
  in.distance_m.assign(in.num_slots, std::vector<std::vector<double>>(in.num_sats, std::vector<double>(in.num_cells)));
  in.cost = in.distance_m;
  for (int t = 0; t < in.num_slots; ++t)
    for (int m = 0; m < in.num_sats; ++m) {
      const auto state = scenario.sat_state(t, m);
      in.doppler_hz[t][m] = doppler_shift(state, scenario.relay, scenario.config.carrier_frequency_hz).shift_hz;
      for (int k = 0; k < in.num_cells; ++k) {
        const auto& c = scenario.cells[k];
        in.distance_m[t][m][k] = slant_geometry(state, c.center_lat_deg, c.center_lon_deg).distance_m;
        in.cost[t][m][k] = strategy.assign == AssignMode::ant ? cell_cost(scenario, strategy, t, m, k) : 0.0;
      }
    }
  return in;
}

RunResult run(const Scenario& scenario, const Strategy& strategy, Rng& rng, const RunOptions& options) {
  const auto& cfg = scenario.config;
  if (strategy.power == PowerMode::expcone && cfg.ipSIC_factor > 0.0)
    throw UnsupportedError("expcone power model cannot handle imperfect SIC (ipSIC_factor > 0)");
  RunResult result;
  auto& sol = result.solution;
  sol.strategy = strategy.name();

  if (strategy.assign == AssignMode::fixed_plan) {
    if (!options.plan) throw std::invalid_argument("fixed-plan strategy needs a plan");
    sol.plan = *options.plan;
    if (sol.plan.num_sats != scenario.num_sats() || sol.plan.num_cells != scenario.num_cells())
      throw std::invalid_argument("fixed plan does not match the scenario size");
    if (sol.plan.doppler_hz.size() != sol.plan.cell_of.size())
      sol.plan.doppler_hz.assign(sol.plan.num_slots, std::vector<double>(sol.plan.num_sats, 0.0));
    for (int t = 0; t < sol.plan.num_slots; ++t)
      for (int m = 0; m < sol.plan.num_sats; ++m) sol.plan.doppler_hz[t][m] = scenario.doppler(t, m).shift_hz;
  } else {
    const auto input = planning_input(scenario, strategy);
    if (strategy.assign == AssignMode::ant) {
      Rng colony = rng.fork(2);
      auto aco = ant_colony_plan(input, cfg.ant_params, colony);
      sol.plan = std::move(aco.best.plan);
      sol.ant_best_utility = std::move(aco.best_utility);
    } else {
      sol.plan = doppler_match(input);
    }
  }
  sol.plan.validate();

  for (const auto& e : sol.plan.entries()) sol.cells.push_back(solve_cell(scenario, strategy, e.slot, e.sat_id, e.cell_id));

  sol.user_rates.assign(scenario.users.size(), 0.0);
  sol.user_demands.resize(scenario.users.size());
  for (const auto& u : scenario.users) sol.user_demands[u.user_id] = u.demand_bps;
  std::size_t longest = 0;
  for (const auto& c : sol.cells) {
    for (std::size_t i = 0; i < c.user_ids.size(); ++i) sol.user_rates[c.user_ids[i]] = c.rates[i];
    sol.iterations = std::max(sol.iterations, c.iterations);
    sol.converged = sol.converged && c.converged;
    if (c.infeasible) ++sol.infeasible_cells;
    longest = std::max(longest, c.objective_history.size());
  }
  sol.objective_history.assign(longest, 0.0);
  for (const auto& c : sol.cells) {
    if (c.objective_history.empty()) continue;
    for (std::size_t k = 0; k < longest; ++k)
      sol.objective_history[k] += c.objective_history[std::min(k, c.objective_history.size() - 1)];
  }
  result.metrics = compute_metrics(sol, scenario);
  return result;
}

RunResult run_oma_baseline(const Scenario& scenario, Rng& rng) {
  return run(scenario, Strategy::parse("OMA-BF"), rng);
}

MetricsReport compute_metrics(const SolutionReport& solution, const Scenario& scenario) {
  MetricsReport mr;
  const auto& R = solution.user_rates;
  const auto& D = solution.user_demands;
  double demand_sq = 0.0, sat_sum = 0.0;
  for (std::size_t i = 0; i < D.size(); ++i) {
    mr.objective_gap += (R[i] - D[i]) * (R[i] - D[i]);
    demand_sq += D[i] * D[i];
    sat_sum += std::min(R[i] / D[i], 1.0);
    mr.total_capacity_bps += std::min(R[i], D[i]);
    mr.total_gap_bps += std::max(D[i] - R[i], 0.0);
    mr.scheme2_ratio += std::min(R[i], D[i]) / D[i];
  }
  mr.objective_gap_db = 10.0 * std::log10(std::max(mr.objective_gap / std::max(demand_sq, 1e-300), 1e-30));
  mr.satisfaction_ratio = D.empty() ? 1.0 : sat_sum / static_cast<double>(D.size());

  const int M = scenario.num_sats();
  mr.min_traffic_satisfaction.assign(M, -1.0);
  std::vector<double> info(M, 0.0), power(M, 0.0);
  for (const auto& c : solution.cells) {
    double worst = 1.0;
    for (std::size_t i = 0; i < c.user_ids.size(); ++i) {
      worst = std::min(worst, std::min(c.rates[i] / c.demands_bps[i], 1.0));
      if (!c.infeasible && !c.group_bandwidth.empty()) info[c.sat_id] += c.rates[i] / c.group_bandwidth[c.group[i]];
      power[c.sat_id] += c.p[i];
    }
    mr.min_traffic_satisfaction[c.sat_id] = std::max(mr.min_traffic_satisfaction[c.sat_id], worst);
    if (c.infeasible) ++mr.infeasible_cells;
  }
  mr.min_sat_rate_worst = 1.0;
  bool any = false;
  for (int m = 0; m < M; ++m) {
    if (mr.min_traffic_satisfaction[m] < 0.0) continue;
    mr.min_sat_rate_worst = std::min(mr.min_sat_rate_worst, mr.min_traffic_satisfaction[m]);
    any = true;
    if (power[m] > 0.0) mr.energy_efficiency += info[m] / power[m];
  }
  if (!any) mr.min_sat_rate_worst = 0.0;
  return mr;
}

std::vector<double> evaluate_rates(const CellSolution& cell, const Scenario& scenario) {
  const std::size_t n = cell.user_ids.size();
  if (cell.infeasible) return std::vector<double>(n, 0.0);
  const auto& cfg = scenario.config;
  const auto ch = scenario.channels(cell.slot, cell.sat_id, cell.cell_id);
  BeamMatrix beams;
  beams.cell_id = cell.cell_id;
  beams.direction = cell.direction;
  beams.w = cell.w;
  std::vector<Group> groups(cell.group_bandwidth.size());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    groups[g].bandwidth = cell.group_bandwidth[g];
    groups[g].noise = cfg.noise_w() * cell.group_bandwidth[g] / cfg.bandwidth_hz;
  }
  for (std::size_t i = 0; i < n; ++i) groups[cell.group[i]].cols.push_back(i);
  return group_rates(ch, beams, cell.p, groups, cfg);
}

void write_solution_csv(std::ostream& out, const SolutionReport& solution) {
  out << "slot,cell,sat,user,demand_bps,rate_bps,power_w,beam_norm_sq,infeasible\n";
  for (const auto& c : solution.cells)
    for (std::size_t i = 0; i < c.user_ids.size(); ++i) {
      double norm_sq = 0.0;
      for (const auto& x : c.w[i]) norm_sq += std::norm(x);
      out << c.slot << ',' << c.cell_id << ',' << c.sat_id << ',' << c.user_ids[i] << ',' << num(c.demands_bps[i])
          << ',' << num(c.rates[i]) << ',' << num(c.p[i]) << ',' << num(norm_sq) << ',' << (c.infeasible ? 1 : 0)
          << '\n';
    }
}

void write_ephemeris_csv(std::ostream& out, const Scenario& scenario) {
  out << "slot,sat_id,x_m,y_m,z_m,vx_mps,vy_mps,vz_mps,doppler_hz\n";
  for (int t = 0; t < scenario.num_slots(); ++t)
    for (int m = 0; m < scenario.num_sats(); ++m) {
      const auto s = scenario.sat_state(t, m);
      const auto d = doppler_shift(s, scenario.relay, scenario.config.carrier_frequency_hz);
      out << t << ',' << m;
      for (double v : s.position) out << ',' << num(v);
      for (double v : s.velocity) out << ',' << num(v);
      out << ',' << num(d.shift_hz) << '\n';
    }
}

void write_channels_csv(std::ostream& out, const Scenario& scenario, const AssignmentPlan& plan) {
  out << "slot,sat_id,cell_id,user_id,distance_m,off_axis_deg,elevation_deg,visible,gain\n";
  for (const auto& e : plan.entries()) {
    const auto state = scenario.sat_state(e.slot, e.sat_id);
    for (int id : scenario.users_of(e.cell_id)) {
      const auto& u = scenario.users[id];
      const auto g = slant_geometry(state, u.lat_deg, u.lon_deg);
      double gain = 0.0;
      if (g.visible) gain = user_channel(g, scenario.radio, e.slot, id).gain;
      out << e.slot << ',' << e.sat_id << ',' << e.cell_id << ',' << id << ',' << num(g.distance_m) << ','
          << num(rad_to_deg(g.off_axis_rad)) << ',' << num(rad_to_deg(g.elevation_rad)) << ',' << (g.visible ? 1 : 0)
          << ',' << num(gain) << '\n';
    }
  }
}

}  // namespace rnoma
