#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rnoma/assignment.hpp"
#include "rnoma/beamform.hpp"
#include "rnoma/channel.hpp"
#include "rnoma/constellation.hpp"
#include "rnoma/power.hpp"
#include "rnoma/scenario.hpp"

namespace rnoma {

enum class AssignMode { doppler, ant, fixed_plan };
enum class PowerMode { monotonic, expcone, oma, equal };
enum class BeamKind { per_user_bf, spot, color2, color4 };
enum class Objective { scheme1_gap, scheme2_ratio };

struct Strategy {
  AssignMode assign = AssignMode::doppler;
  PowerMode power = PowerMode::monotonic;
  BeamKind beam = BeamKind::per_user_bf;
  Objective objective = Objective::scheme1_gap;

  // Accepts D-mNOMA-BF, A-eNOMA-BF, A-mNOMA-BF, D-eNOMA-BF, OMA-BF, the -2c,
  // -4c and -S (single beam) variants of the NOMA names (with or without the
  // -BF part), and an optional trailing -S2 for the ratio objective.
  static Strategy parse(const std::string& name);
  std::string name() const;
  bool operator==(const Strategy&) const = default;
};

// A built problem: cells, users and orbits for one (config, trial).
struct Scenario {
  ScenarioConfig config;
  std::vector<Cell> cells;
  std::vector<User> users;  // users of cell k occupy [k N, (k + 1) N)
  std::vector<OrbitElement> orbits;
  Vec3 relay{};
  RadioParams radio;

  static Scenario build(const ScenarioConfig& config, Rng& rng);

  int num_slots() const { return config.horizon(); }
  int num_sats() const { return static_cast<int>(orbits.size()); }
  int num_cells() const { return static_cast<int>(cells.size()); }
  SatelliteState sat_state(int slot, int sat) const;
  DopplerMeasurement doppler(int slot, int sat) const;
  std::vector<int> users_of(int cell) const;
  // Throws std::domain_error when a user of the cell is below the horizon.
  ChannelMatrix channels(int slot, int sat, int cell) const;
};

struct CellSolution {
  int slot = 0;
  int sat_id = 0;
  int cell_id = 0;
  std::vector<int> user_ids;  // column order of the channel matrix
  std::vector<double> demands_bps;
  std::vector<double> p;
  std::vector<std::vector<cplx>> w;
  std::vector<std::vector<cplx>> direction;
  std::vector<double> rates;
  std::vector<int> group;              // colour / orthogonal share per user
  std::vector<double> group_bandwidth;  // Hz, indexed by group
  bool infeasible = false;
  std::string note;
  int iterations = 0;
  bool converged = true;
  std::vector<double> objective_history;
};

struct SolutionReport {
  std::string strategy;
  AssignmentPlan plan;
  std::vector<CellSolution> cells;  // one per served cell, plan order
  std::vector<double> user_rates;   // by user_id
  std::vector<double> user_demands;
  std::vector<double> objective_history;  // sum over cells per outer iteration
  std::vector<double> ant_best_utility;
  int iterations = 0;
  bool converged = true;
  int infeasible_cells = 0;
};

struct MetricsReport {
  double objective_gap = 0.0;
  double objective_gap_db = 0.0;
  double satisfaction_ratio = 0.0;
  std::vector<double> min_traffic_satisfaction;  // per satellite; -1 when it served nothing
  double min_sat_rate_worst = 0.0;
  double total_capacity_bps = 0.0;
  double total_gap_bps = 0.0;
  double energy_efficiency = 0.0;
  double scheme2_ratio = 0.0;
  int infeasible_cells = 0;
};

struct RunOptions {
  std::optional<AssignmentPlan> plan;  // required for fixed_plan
};

struct RunResult {
  SolutionReport solution;
  MetricsReport metrics;
};

RunResult run(const Scenario& scenario, const Strategy& strategy, Rng& rng, const RunOptions& options = {});
RunResult run_oma_baseline(const Scenario& scenario, Rng& rng);
MetricsReport compute_metrics(const SolutionReport& solution, const Scenario& scenario);

// Recomputes one cell's rates from its powers, beams and the channels.
std::vector<double> evaluate_rates(const CellSolution& cell, const Scenario& scenario);

// Planning inputs (Doppler, ranges, per-cell cost) for the horizon.
PlanningInput planning_input(const Scenario& scenario, const Strategy& strategy);

void write_solution_csv(std::ostream& out, const SolutionReport& solution);
void write_ephemeris_csv(std::ostream& out, const Scenario& scenario);
void write_channels_csv(std::ostream& out, const Scenario& scenario, const AssignmentPlan& plan);

}  // namespace rnoma
