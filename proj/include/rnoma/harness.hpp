#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "rnoma/engine.hpp"
#include "rnoma/scenario.hpp"

namespace rnoma {

enum class ExperimentKind {
  single_run,
  demand_sweep,
  per_user_profile,
  power_sweep,
  polarization_compare,
  single_beam_compare,
  objective_compare,
  ipsic_sweep,
  per_satellite_satisfaction,
  ee_sweep,
};

ExperimentKind parse_experiment_kind(const std::string& name);
std::string experiment_kind_name(ExperimentKind kind);

// One grid point. `settings` are applied to the base config in order.
struct SweepPoint {
  std::string param;
  double value = 0.0;
  std::vector<std::pair<std::string, double>> settings;
};

// Known keys: demand_mean_bps (spread by demand_jitter), sat_power_dbw,
// ipSIC_factor, num_antennas, users_per_cell, num_satellites, num_cells.
void apply_setting(ScenarioConfig& config, const std::string& key, double value, double demand_jitter = 0.1);

struct Experiment {
  std::string name;
  ExperimentKind kind = ExperimentKind::single_run;
  std::vector<std::string> strategies;
  std::vector<SweepPoint> points;
  int trials = 20;
  std::uint64_t seed = 1;
  double demand_jitter = 0.1;
  ScenarioConfig base;
  int threads = 0;  // 0: hardware concurrency (RNOMA_THREADS overrides)

  // Default axes for the kind at desk scale (K = 16, M = 3) unless
  // full_scale.
  static Experiment make(ExperimentKind kind, const ScenarioConfig& base, bool full_scale = false);
  void validate() const;
};

// Reads the optional "experiment" object of a config file on top of the
// defaults for its kind.
Experiment experiment_from_json(const std::string& text, const ScenarioConfig& base, bool full_scale = false);

// Replaces the full-size defaults (64 cells, 6 satellites) with 16 and 3.
ScenarioConfig desk_scale(ScenarioConfig config);

struct ResultRow {
  std::string experiment;
  std::string strategy;
  std::string sweep_param;
  double sweep_value = 0.0;
  int trial = 0;
  MetricsReport metrics;
  std::string status;  // ok, infeasible:<cells>, unsupported, error:<message>
  int point_index = 0;
  int strategy_index = 0;

  bool has_metrics() const { return status == "ok" || status.rfind("infeasible", 0) == 0; }
};

struct ResultTable {
  std::vector<ResultRow> rows;
};

ResultTable run_experiment(const Experiment& exp);

void write_csv(std::ostream& out, const ResultTable& table);
// Throws std::runtime_error naming the path on I/O failure.
void emit(const ResultTable& table, const std::string& path);
ResultTable read_csv(std::istream& in);

// Column value by header name (objective_gap_db, satisfaction_ratio, ...).
double row_metric(const ResultRow& row, const std::string& field);

// Mean over trials with metrics for one (strategy, point); NaN when none.
double mean_metric(const ResultTable& table, const std::string& strategy, int point_index, const std::string& field);

}  // namespace rnoma
