#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rnoma/assignment.hpp"
#include "rnoma/engine.hpp"
#include "rnoma/harness.hpp"
#include "rnoma/power.hpp"
#include "rnoma/scenario.hpp"

using namespace rnoma;

namespace {

struct Common {
  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int trials = 0;
  std::string out;
  bool full_scale = false;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ScenarioConfig load(const Common& c, bool desk) {
  ScenarioConfig cfg = c.config_path.empty() ? parse_config("{}") : load_config(c.config_path);
  if (c.seed_set) cfg.seed = c.seed;
  if (desk && !c.full_scale) cfg = desk_scale(cfg);
  validate(cfg);
  return cfg;
}

// Writes to --out or stdout.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!*file_) throw std::runtime_error("cannot open '" + path + "' for writing");
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }
  void finish(const std::string& path) {
    stream().flush();
    if (!stream()) throw std::runtime_error("write to '" + (path.empty() ? std::string("stdout") : path) + "' failed");
  }

 private:
  std::unique_ptr<std::ofstream> file_;
};

void add_common(CLI::App* cmd, Common& c, bool with_trials) {
  cmd->add_option("--config", c.config_path, "Scenario config (JSON with comments)");
  cmd->add_option_function<std::uint64_t>(
      "--seed", [&c](const std::uint64_t& v) { c.seed = v; c.seed_set = true; }, "Base seed");
  if (with_trials) cmd->add_option("--trials", c.trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
  cmd->add_option("--out", c.out, "Output CSV path (stdout when omitted)");
  cmd->add_flag("--full-scale", c.full_scale, "Keep the full cell and satellite counts");
}

Strategy strategy_with(const std::string& name, const std::string& objective, bool has_plan) {
  Strategy s = Strategy::parse(name);
  if (objective == "scheme2") s.objective = Objective::scheme2_ratio;
  else if (objective == "scheme1") s.objective = Objective::scheme1_gap;
  else if (!objective.empty()) throw std::invalid_argument("--objective must be scheme1 or scheme2");
  if (has_plan) s.assign = AssignMode::fixed_plan;
  return s;
}

int solve_cell(const std::string& instance_path, const std::string& out_path) {
  const auto doc = nlohmann::json::parse(slurp(instance_path), nullptr, true, true);
  CellInstance cell;
  if (doc.contains("coupling")) {
    const auto rows = doc.at("coupling").get<std::vector<std::vector<double>>>();
    cell.n = rows.size();
    for (const auto& r : rows) {
      if (r.size() != cell.n) throw std::runtime_error("coupling must be square");
      cell.coupling.insert(cell.coupling.end(), r.begin(), r.end());
    }
  } else {
    // Single-beam form: user i sees every beam through its own gain.
    const auto gains = doc.at("gains").get<std::vector<double>>();
    cell.n = gains.size();
    for (std::size_t i = 0; i < cell.n; ++i) cell.coupling.insert(cell.coupling.end(), cell.n, gains[i]);
  }
  cell.bandwidth_hz = doc.at("bandwidth_hz").get<double>();
  cell.noise_w = doc.at("noise_w").get<double>();
  cell.p_budget_w = doc.at("p_budget_w").get<double>();
  cell.r_min_bps = doc.value("r_min_bps", 0.0);
  cell.demands_bps = doc.at("demands_bps").get<std::vector<double>>();
  cell.weights = doc.value("weights", std::vector<double>{});
  cell.kappa = doc.value("kappa", 0.0);
  cell.mu = doc.value("mu", 1);
  const std::string solver = doc.value("solver", std::string("monotonic"));
  PowerAllocation alloc;
  if (solver == "monotonic") alloc = monotonic_power_solve(cell, SolverParams{});
  else if (solver == "expcone") alloc = expcone_power_solve(cell, SolverParams{});
  else throw std::runtime_error("solver must be monotonic or expcone");
  Sink sink(out_path);
  auto& os = sink.stream();
  os << "user_id,p_w,rate_bps\n";
  char buf[96];
  for (std::size_t i = 0; i < cell.n; ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.10g,%.10g\n", i, alloc.p[i], alloc.rates[i]);
    os << buf;
  }
  sink.finish(out_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Relay-assisted LEO NOMA simulator"};
  app.require_subcommand(1);

  Common run_c, sweep_c, cmp_c, plan_c, chan_c, eph_c;
  std::string run_strategy = "D-mNOMA-BF", run_plan, run_objective;
  int run_trial = 0;
  auto* run_cmd = app.add_subcommand("run", "One strategy on one scenario; writes the per-user solution CSV");
  add_common(run_cmd, run_c, false);
  run_cmd->add_option("--strategy", run_strategy, "Strategy name, e.g. A-eNOMA-BF");
  run_cmd->add_option("--plan", run_plan, "Fixed assignment plan CSV");
  run_cmd->add_option("--objective", run_objective, "scheme1 (gap) or scheme2 (ratio)");
  run_cmd->add_option("--trial", run_trial, "Trial index")->check(CLI::NonNegativeNumber);

  std::string sweep_kind;
  int threads = 0;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run the config's experiment (or --kind) and emit results CSV");
  add_common(sweep_cmd, sweep_c, true);
  sweep_cmd->add_option("--kind", sweep_kind, "Experiment kind, e.g. demand-sweep");
  sweep_cmd->add_option("--threads", threads, "Worker threads (0: all cores)");

  std::vector<std::string> cmp_strategies;
  double cmp_demand_mbps = 0.0;
  auto* cmp_cmd = app.add_subcommand("compare", "Strategies on shared seeds at one scenario");
  add_common(cmp_cmd, cmp_c, true);
  cmp_cmd->add_option("--strategy", cmp_strategies, "Strategy (repeatable)")->required();
  cmp_cmd->add_option("--demand-mbps", cmp_demand_mbps, "Mean demand; jittered by 10%");
  cmp_cmd->add_option("--threads", threads, "Worker threads (0: all cores)");

  std::string plan_strategy = "D-mNOMA-BF";
  int plan_trial = 0;
  auto* plan_cmd = app.add_subcommand("dump-plan", "Assignment plan CSV");
  add_common(plan_cmd, plan_c, false);
  plan_cmd->add_option("--strategy", plan_strategy, "Strategy whose planner is used");
  plan_cmd->add_option("--trial", plan_trial, "Trial index")->check(CLI::NonNegativeNumber);

  std::string chan_strategy = "D-mNOMA-BF", chan_plan;
  int chan_trial = 0;
  auto* chan_cmd = app.add_subcommand("dump-channels", "Per-user geometry and channel gain for a plan");
  add_common(chan_cmd, chan_c, false);
  chan_cmd->add_option("--strategy", chan_strategy, "Strategy whose planner is used");
  chan_cmd->add_option("--plan", chan_plan, "Plan CSV instead of planning");
  chan_cmd->add_option("--trial", chan_trial, "Trial index")->check(CLI::NonNegativeNumber);

  auto* eph_cmd = app.add_subcommand("dump-ephemeris", "Satellite positions, velocities and Doppler per slot");
  add_common(eph_cmd, eph_c, false);

  std::string instance_path, cell_out;
  auto* cell_cmd = app.add_subcommand("solve-cell", "Solve one cell instance given as JSON");
  cell_cmd->add_option("--instance", instance_path, "Instance JSON")->required();
  cell_cmd->add_option("--out", cell_out, "Output CSV path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      const auto cfg = load(run_c, true);
      const auto st = strategy_with(run_strategy, run_objective, !run_plan.empty());
      Rng rng(cfg.seed, static_cast<std::uint64_t>(run_trial));
      const auto scenario = Scenario::build(cfg, rng);
      RunOptions opts;
      if (!run_plan.empty()) {
        std::ifstream in(run_plan);
        if (!in) throw std::runtime_error("cannot read '" + run_plan + "'");
        opts.plan = read_plan_csv(in, scenario.num_sats(), scenario.num_cells());
      }
      const auto result = run(scenario, st, rng, opts);
      Sink sink(run_c.out);
      write_solution_csv(sink.stream(), result.solution);
      sink.finish(run_c.out);
      const auto& m = result.metrics;
      std::fprintf(stderr, "%s objective_gap_db=%.4f satisfaction=%.4f capacity_bps=%.6g gap_bps=%.6g infeasible=%d\n",
                   result.solution.strategy.c_str(), m.objective_gap_db, m.satisfaction_ratio, m.total_capacity_bps,
                   m.total_gap_bps, m.infeasible_cells);
    } else if (*sweep_cmd || *cmp_cmd) {
      Common& c = *sweep_cmd ? sweep_c : cmp_c;
      const auto cfg = load(c, true);
      Experiment exp;
      if (*sweep_cmd) {
        if (!sweep_kind.empty()) exp = Experiment::make(parse_experiment_kind(sweep_kind), cfg, c.full_scale);
        else if (!c.config_path.empty()) exp = experiment_from_json(slurp(c.config_path), cfg, c.full_scale);
        else exp = Experiment::make(ExperimentKind::demand_sweep, cfg, c.full_scale);
      } else {
        exp = Experiment::make(ExperimentKind::single_run, cfg, c.full_scale);
        exp.name = "compare";
        exp.strategies = cmp_strategies;
        exp.trials = 20;
        if (cmp_demand_mbps > 0.0)
          exp.points = {{"demand_mean_bps", cmp_demand_mbps * 1e6, {{"demand_mean_bps", cmp_demand_mbps * 1e6}}}};
      }
      exp.seed = cfg.seed;
      if (c.trials > 0) exp.trials = c.trials;
      if (threads > 0) exp.threads = threads;
      const auto table = run_experiment(exp);
      if (c.out.empty()) write_csv(std::cout, table);
      else emit(table, c.out);
    } else if (*plan_cmd) {
      const auto cfg = load(plan_c, true);
      const auto st = Strategy::parse(plan_strategy);
      Rng rng(cfg.seed, static_cast<std::uint64_t>(plan_trial));
      const auto scenario = Scenario::build(cfg, rng);
      const auto input = planning_input(scenario, st);
      AssignmentPlan plan;
      if (st.assign == AssignMode::ant) {
        Rng colony = rng.fork(2);
        plan = ant_colony_plan(input, cfg.ant_params, colony).best.plan;
      } else {
        plan = doppler_match(input);
      }
      Sink sink(plan_c.out);
      write_plan_csv(sink.stream(), plan);
      sink.finish(plan_c.out);
    } else if (*chan_cmd) {
      const auto cfg = load(chan_c, true);
      Rng rng(cfg.seed, static_cast<std::uint64_t>(chan_trial));
      const auto scenario = Scenario::build(cfg, rng);
      AssignmentPlan plan;
      if (!chan_plan.empty()) {
        std::ifstream in(chan_plan);
        if (!in) throw std::runtime_error("cannot read '" + chan_plan + "'");
        plan = read_plan_csv(in, scenario.num_sats(), scenario.num_cells());
      } else {
        const auto st = Strategy::parse(chan_strategy);
        const auto input = planning_input(scenario, st);
        if (st.assign == AssignMode::ant) {
          Rng colony = rng.fork(2);
          plan = ant_colony_plan(input, cfg.ant_params, colony).best.plan;
        } else {
          plan = doppler_match(input);
        }
      }
      Sink sink(chan_c.out);
      write_channels_csv(sink.stream(), scenario, plan);
      sink.finish(chan_c.out);
    } else if (*eph_cmd) {
      const auto cfg = load(eph_c, true);
      Rng rng(cfg.seed, 0);
      const auto scenario = Scenario::build(cfg, rng);
      Sink sink(eph_c.out);
      write_ephemeris_csv(sink.stream(), scenario);
      sink.finish(eph_c.out);
    } else if (*cell_cmd) {
      return solve_cell(instance_path, cell_out);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
