#include "rnoma/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

namespace rnoma {

AssignmentPlan::AssignmentPlan(int slots, int sats, int cells)
    : num_slots(slots),
      num_sats(sats),
      num_cells(cells),
      cell_of(static_cast<std::size_t>(slots), std::vector<int>(static_cast<std::size_t>(sats), -1)),
      doppler_hz(static_cast<std::size_t>(slots), std::vector<double>(static_cast<std::size_t>(sats), 0.0)) {}

void AssignmentPlan::validate() const {
  if (static_cast<int>(cell_of.size()) != num_slots) throw std::logic_error("plan: slot count mismatch");
  std::vector<int> times(static_cast<std::size_t>(num_cells), 0);
  for (int t = 0; t < num_slots; ++t) {
    if (static_cast<int>(cell_of[t].size()) != num_sats) throw std::logic_error("plan: satellite count mismatch");
    for (int m = 0; m < num_sats; ++m) {
      const int k = cell_of[t][m];
      if (k < 0) continue;
      if (k >= num_cells) throw std::logic_error("plan: cell id out of range");
      ++times[k];
    }
  }
  for (int k = 0; k < num_cells; ++k) {
    if (times[k] != 1)
      throw std::logic_error("plan: cell " + std::to_string(k) + " served " + std::to_string(times[k]) + " times");
  }
}

std::vector<PlanEntry> AssignmentPlan::entries() const {
  std::vector<PlanEntry> out;
  for (int t = 0; t < num_slots; ++t)
    for (int m = 0; m < num_sats; ++m)
      if (cell_of[t][m] >= 0) out.push_back({t, m, cell_of[t][m], doppler_hz.empty() ? 0.0 : doppler_hz[t][m]});
  return out;
}

std::pair<int, int> AssignmentPlan::server_of(int cell_id) const {
  for (int t = 0; t < num_slots; ++t)
    for (int m = 0; m < num_sats; ++m)
      if (cell_of[t][m] == cell_id) return {t, m};
  return {-1, -1};
}

namespace {

AssignmentPlan empty_plan(const PlanningInput& input) {
  AssignmentPlan plan(input.num_slots, input.num_sats, input.num_cells);
  for (int t = 0; t < input.num_slots; ++t)
    for (int m = 0; m < input.num_sats; ++m) plan.doppler_hz[t][m] = input.doppler_hz[t][m];
  return plan;
}

int nearest_free(const PlanningInput& input, int t, int m, const std::vector<char>& served) {
  int best = -1;
  for (int k = 0; k < input.num_cells; ++k) {
    if (served[k]) continue;
    if (best < 0 || input.distance_m[t][m][k] < input.distance_m[t][m][best]) best = k;
  }
  return best;
}

}  // namespace

AssignmentPlan doppler_match(const PlanningInput& input) {
  AssignmentPlan plan = empty_plan(input);
  std::vector<char> served(static_cast<std::size_t>(input.num_cells), 0);
  int left = input.num_cells;
  for (int t = 0; t < input.num_slots && left > 0; ++t) {
    std::vector<int> pass, fail;
    for (int m = 0; m < input.num_sats; ++m)
      (std::abs(input.doppler_hz[t][m]) <= input.doppler_threshold_hz ? pass : fail).push_back(m);
    std::stable_sort(pass.begin(), pass.end(), [&](int a, int b) {
      return std::abs(input.doppler_hz[t][a]) < std::abs(input.doppler_hz[t][b]);
    });
    pass.insert(pass.end(), fail.begin(), fail.end());
    for (int m : pass) {
      if (left == 0) break;
      const int k = nearest_free(input, t, m, served);
      plan.cell_of[t][m] = k;
      served[k] = 1;
      --left;
    }
  }
  return plan;
}

PheromoneTable::PheromoneTable(int num_sats, int num_cells, double initial)
    : sats_(num_sats),
      cells_(num_cells),
      values_(static_cast<std::size_t>(num_sats) * (num_cells + 1) * num_cells, initial) {}

double PheromoneTable::get(int sat, int from, int to) const {
  return values_[(static_cast<std::size_t>(sat) * (cells_ + 1) + from) * cells_ + to];
}

void PheromoneTable::set(int sat, int from, int to, double value) {
  values_[(static_cast<std::size_t>(sat) * (cells_ + 1) + from) * cells_ + to] = value;
}

void PheromoneTable::scale(double factor) {
  for (double& v : values_) v *= factor;
}

void PheromoneTable::clamp(double lo, double hi) {
  for (double& v : values_) v = std::clamp(v, lo, hi);
}

std::vector<double> transition_probability(std::span<const double> route_weight, std::span<const double> pheromone,
                                           std::span<const char> allowed, double s1, double s2) {
  const std::size_t n = allowed.size();
  std::vector<double> prob(n, 0.0);
  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (!allowed[k]) continue;
    ++count;
    prob[k] = std::pow(route_weight[k], s1) * std::pow(pheromone[k], s2);
    total += prob[k];
  }
  if (count == 0) return prob;
  for (std::size_t k = 0; k < n; ++k) {
    if (!allowed[k]) continue;
    prob[k] = total > 0.0 ? prob[k] / total : 1.0 / static_cast<double>(count);
  }
  return prob;
}

void update_pheromone(PheromoneTable& table, const AntPath& best, double tau, double max_pheromone) {
  table.scale(1.0 - tau);
  const auto& plan = best.plan;
  for (int m = 0; m < plan.num_sats; ++m) {
    int from = table.start_node();
    for (int t = 0; t < plan.num_slots; ++t) {
      const int k = plan.cell_of[t][m];
      if (k < 0) continue;
      table.set(m, from, k, table.get(m, from, k) + best.utility);
      from = k;
    }
  }
  table.clamp(0.0, max_pheromone);
}

std::vector<std::vector<std::vector<double>>> route_weights(const PlanningInput& input) {
  std::vector<std::vector<std::vector<double>>> w(
      input.num_slots, std::vector<std::vector<double>>(input.num_sats, std::vector<double>(input.num_cells)));
  for (int t = 0; t < input.num_slots; ++t)
    for (int m = 0; m < input.num_sats; ++m) {
      double top = 0.0;
      for (int k = 0; k < input.num_cells; ++k) top = std::max(top, 1.0 / input.distance_m[t][m][k]);
      for (int k = 0; k < input.num_cells; ++k)
        w[t][m][k] = (1.0 / input.distance_m[t][m][k]) / top / (1.0 + input.cost[t][m][k]);
    }
  return w;
}

double plan_cost(const PlanningInput& input, const AssignmentPlan& plan) {
  double total = 0.0;
  for (int t = 0; t < plan.num_slots; ++t)
    for (int m = 0; m < plan.num_sats; ++m)
      if (plan.cell_of[t][m] >= 0) total += input.cost[t][m][plan.cell_of[t][m]];
  return total;
}

AcoResult ant_colony_plan(const PlanningInput& input, const AntParams& params, Rng& rng) {
  if (input.num_slots * input.num_sats < input.num_cells)
    throw std::invalid_argument("ant_colony_plan: horizon too short to serve every cell");
  const auto weight = route_weights(input);
  PheromoneTable table(input.num_sats, input.num_cells);
  AcoResult result;
  bool have = false;
  const int K = input.num_cells;

  std::vector<double> trail(static_cast<std::size_t>(K));
  for (int it = 0; it < params.max_iters; ++it) {
    AntPath iter_best;
    bool iter_have = false;
    for (int ant = 0; ant < params.colony_size; ++ant) {
      AntPath path{empty_plan(input), 0.0, 0.0};
      std::vector<char> allowed(static_cast<std::size_t>(K), 1);
      std::vector<int> last(static_cast<std::size_t>(input.num_sats), table.start_node());
      int left = K;
      std::vector<int> order(static_cast<std::size_t>(input.num_sats));
      for (int t = 0; t < input.num_slots && left > 0; ++t) {
        std::iota(order.begin(), order.end(), 0);
        for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.index(i)]);
        for (int m : order) {
          if (left == 0) break;
          for (int k = 0; k < K; ++k) trail[k] = table.get(m, last[m], k);
          const auto prob = transition_probability(weight[t][m], trail, allowed, params.s1, params.s2);
          const double u = rng.uniform(0.0, 1.0);
          double acc = 0.0;
          int pick = -1;
          for (int k = 0; k < K; ++k) {
            if (!allowed[k]) continue;
            pick = k;
            acc += prob[k];
            if (u < acc) break;
          }
          path.plan.cell_of[t][m] = pick;
          allowed[pick] = 0;
          last[m] = pick;
          --left;
        }
      }
      path.total_cost = plan_cost(input, path.plan);
      path.utility = 1.0 / (1.0 + path.total_cost / K);
      if (!iter_have || path.utility > iter_best.utility) {
        iter_best = std::move(path);
        iter_have = true;
      }
    }
    if (iter_have) {
      if (!have || iter_best.utility > result.best.utility) {
        result.best = iter_best;
        have = true;
      }
      update_pheromone(table, iter_best, params.tau, params.max_pheromone);
    }
    result.best_utility.push_back(result.best.utility);
    result.iterations = it + 1;
  }
  if (!have) {
    result.best.plan = doppler_match(input);
    result.best.total_cost = plan_cost(input, result.best.plan);
    result.best.utility = 1.0 / (1.0 + result.best.total_cost / K);
  }
  return result;
}

void write_plan_csv(std::ostream& out, const AssignmentPlan& plan) {
  out << "slot,sat_id,cell_id,doppler_khz\n";
  out << std::setprecision(10);
  for (const auto& e : plan.entries()) out << e.slot << ',' << e.sat_id << ',' << e.cell_id << ',' << e.doppler_hz / 1e3 << '\n';
}

AssignmentPlan read_plan_csv(std::istream& in, int num_sats, int num_cells) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("plan csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "slot,sat_id,cell_id,doppler_khz") throw std::runtime_error("plan csv: unexpected header '" + line + "'");
  std::vector<PlanEntry> rows;
  int max_slot = -1, max_sat = -1, max_cell = -1;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    PlanEntry e;
    double khz = 0.0;
    if (!(fields >> e.slot >> e.sat_id >> e.cell_id >> khz) || e.slot < 0 || e.sat_id < 0 || e.cell_id < 0)
      throw std::runtime_error("plan csv: bad row at line " + std::to_string(lineno));
    e.doppler_hz = khz * 1e3;
    max_slot = std::max(max_slot, e.slot);
    max_sat = std::max(max_sat, e.sat_id);
    max_cell = std::max(max_cell, e.cell_id);
    rows.push_back(e);
  }
  const int sats = num_sats > 0 ? num_sats : max_sat + 1;
  const int cells = num_cells > 0 ? num_cells : max_cell + 1;
  if (max_sat >= sats || max_cell >= cells) throw std::runtime_error("plan csv: id out of range");
  AssignmentPlan plan(max_slot + 1, sats, cells);
  for (const auto& e : rows) {
    if (plan.cell_of[e.slot][e.sat_id] >= 0)
      throw std::runtime_error("plan csv: satellite " + std::to_string(e.sat_id) + " listed twice in slot " +
                               std::to_string(e.slot));
    plan.cell_of[e.slot][e.sat_id] = e.cell_id;
    plan.doppler_hz[e.slot][e.sat_id] = e.doppler_hz;
  }
  return plan;
}

}  // namespace rnoma
