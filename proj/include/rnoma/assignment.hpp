#pragma once

#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

#include "rnoma/scenario.hpp"

namespace rnoma {

struct PlanEntry {
  int slot = 0;
  int sat_id = 0;
  int cell_id = 0;
  double doppler_hz = 0.0;
};

// cell_of[t][m] is the cell satellite m serves in slot t, or -1 when idle.
struct AssignmentPlan {
  int num_slots = 0;
  int num_sats = 0;
  int num_cells = 0;
  std::vector<std::vector<int>> cell_of;
  std::vector<std::vector<double>> doppler_hz;

  AssignmentPlan() = default;
  AssignmentPlan(int slots, int sats, int cells);

  // Throws std::logic_error unless every cell is served exactly once over the
  // horizon and no satellite serves two cells in one slot.
  void validate() const;
  std::vector<PlanEntry> entries() const;
  // (slot, sat) serving the cell, or {-1, -1}.
  std::pair<int, int> server_of(int cell_id) const;
};

// Everything the planners look at, indexed [slot][sat][cell].
struct PlanningInput {
  int num_slots = 0;
  int num_sats = 0;
  int num_cells = 0;
  std::vector<std::vector<double>> doppler_hz;               // [slot][sat]
  std::vector<std::vector<std::vector<double>>> distance_m;  // slant range to the cell centre
  std::vector<std::vector<std::vector<double>>> cost;        // normalized per-cell objective, >= 0
  double doppler_threshold_hz = 0.0;
};

// Doppler-gated greedy matching. Each slot, satellites within the threshold
// pick first (smallest |shift| first), each taking its nearest unserved cell;
// the rest then pick in sat_id order.
AssignmentPlan doppler_match(const PlanningInput& input);

// l[m][from][to]; `from` == num_cells is the start node.
class PheromoneTable {
 public:
  PheromoneTable(int num_sats, int num_cells, double initial = 1.0);
  double get(int sat, int from, int to) const;
  void set(int sat, int from, int to, double value);
  int num_sats() const { return sats_; }
  int num_cells() const { return cells_; }
  int start_node() const { return cells_; }
  void scale(double factor);
  void clamp(double lo, double hi);

 private:
  int sats_;
  int cells_;
  std::vector<double> values_;
};

struct AntPath {
  AssignmentPlan plan;
  double total_cost = 0.0;
  double utility = 0.0;
};

// P(k) proportional to weight_k^s1 * pheromone_k^s2 over allowed cells;
// uniform over the allowed set when every product is zero.
std::vector<double> transition_probability(std::span<const double> route_weight, std::span<const double> pheromone,
                                           std::span<const char> allowed, double s1, double s2);

// Evaporation by (1 - tau), then each sat's leg of `best` deposits its utility.
void update_pheromone(PheromoneTable& table, const AntPath& best, double tau, double max_pheromone);

// Route weights: normalized inverse slant range times 1 / (1 + cost).
std::vector<std::vector<std::vector<double>>> route_weights(const PlanningInput& input);

double plan_cost(const PlanningInput& input, const AssignmentPlan& plan);

struct AcoResult {
  AntPath best;
  std::vector<double> best_utility;  // global best after each iteration, non-decreasing
  int iterations = 0;
};

AcoResult ant_colony_plan(const PlanningInput& input, const AntParams& params, Rng& rng);

void write_plan_csv(std::ostream& out, const AssignmentPlan& plan);
// Sizes are inferred from the rows unless given (> 0).
AssignmentPlan read_plan_csv(std::istream& in, int num_sats = 0, int num_cells = 0);

}  // namespace rnoma
