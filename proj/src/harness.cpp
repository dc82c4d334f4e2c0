#include "rnoma/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <limits>
#include <mutex>
#include <optional>
#include <tuple>
#include <ostream>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace rnoma {

namespace {

const char* const kKindNames[] = {
    "single-run",          "demand-sweep",      "per-user-profile", "power-sweep",
    "polarization-compare", "single-beam-compare", "objective-compare", "ipsic-sweep",
    "per-satellite-satisfaction", "ee-sweep",
};

const char* const kHeader =
    "experiment,strategy,sweep_param,sweep_value,trial,objective_gap_db,satisfaction_ratio,min_sat_rate_worst,"
    "total_capacity_bps,total_gap_bps,energy_eff,status";

const std::vector<std::string> kNomaBf = {"D-mNOMA-BF", "A-eNOMA-BF", "A-mNOMA-BF", "D-eNOMA-BF"};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::vector<SweepPoint> single_key(const std::string& key, std::initializer_list<double> values) {
  std::vector<SweepPoint> pts;
  for (double v : values) pts.push_back({key, v, {{key, v}}});
  return pts;
}

std::vector<SweepPoint> demand_axis() {
  std::vector<SweepPoint> pts;
  for (int mbps = 300; mbps <= 1300; mbps += 100) {
    const double v = mbps * 1e6;
    pts.push_back({"demand_mean_bps", v, {{"demand_mean_bps", v}}});
  }
  return pts;
}

std::string clean_status(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r' || c == '"') c = ' ';
  return s;
}

int worker_count(int requested, std::size_t tasks) {
  int n = requested;
  if (const char* env = std::getenv("RNOMA_THREADS")) n = std::atoi(env);
  if (n <= 0) n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  return static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(n), std::max<std::size_t>(tasks, 1)));
}

}  // namespace

ExperimentKind parse_experiment_kind(const std::string& name) {
  for (std::size_t i = 0; i < std::size(kKindNames); ++i)
    if (name == kKindNames[i]) return static_cast<ExperimentKind>(i);
  throw ConfigError("invalid experiment.kind: unknown experiment '" + name + "'");
}

std::string experiment_kind_name(ExperimentKind kind) { return kKindNames[static_cast<int>(kind)]; }

void apply_setting(ScenarioConfig& c, const std::string& key, double value, double demand_jitter) {
  if (key == "demand_mean_bps") {
    c.demand_range_bps = {value * (1.0 - demand_jitter), value * (1.0 + demand_jitter)};
  } else if (key == "sat_power_dbw") {
    c.sat_power_dbw = value;
  } else if (key == "ipSIC_factor") {
    c.ipSIC_factor = value;
  } else if (key == "num_antennas") {
    c.num_antennas = static_cast<int>(value);
  } else if (key == "users_per_cell") {
    c.users_per_cell = static_cast<int>(value);
  } else if (key == "num_satellites") {
    c.num_satellites = static_cast<int>(value);
  } else if (key == "num_cells") {
    c.num_cells = static_cast<int>(value);
    c.grid_rows = c.grid_cols = 0;
  } else if (key != "none") {
    throw ConfigError("invalid experiment.sweep.param: unknown sweep key '" + key + "'");
  }
}

ScenarioConfig desk_scale(ScenarioConfig config) {
  const ScenarioConfig table;
  if (config.num_cells == table.num_cells) {
    config.num_cells = 16;
    config.grid_rows = config.grid_cols = 0;
  }
  if (config.num_satellites == table.num_satellites) config.num_satellites = 3;
  return config;
}

Experiment Experiment::make(ExperimentKind kind, const ScenarioConfig& base, bool full_scale) {
  Experiment e;
  e.kind = kind;
  e.name = experiment_kind_name(kind);
  e.base = full_scale ? base : desk_scale(base);
  e.seed = base.seed;
  const auto at_demand = [](double mbps) { return single_key("demand_mean_bps", {mbps * 1e6}); };
  switch (kind) {
    case ExperimentKind::single_run:
      e.strategies = {"D-mNOMA-BF"};
      e.points = {{"none", 0.0, {}}};
      e.trials = 1;
      break;
    case ExperimentKind::demand_sweep:
      e.strategies = kNomaBf;
      e.strategies.push_back("OMA-BF");
      e.points = demand_axis();
      break;
    case ExperimentKind::per_user_profile:
      e.strategies = kNomaBf;
      e.strategies.push_back("OMA-BF");
      e.points = at_demand(900);
      break;
    case ExperimentKind::power_sweep:
      e.strategies = kNomaBf;
      e.points = single_key("sat_power_dbw", {19, 22, 25, 28, 31});
      break;
    case ExperimentKind::polarization_compare:
      e.strategies = {"D-mNOMA-BF", "D-mNOMA-2c", "D-mNOMA-4c", "A-eNOMA-BF", "A-eNOMA-2c", "A-eNOMA-4c"};
      e.points = at_demand(700);
      break;
    case ExperimentKind::single_beam_compare:
      e.strategies = {"D-mNOMA-BF", "D-mNOMA-S", "A-eNOMA-BF", "A-eNOMA-S"};
      e.points = demand_axis();
      break;
    case ExperimentKind::objective_compare:
      e.strategies = {"A-eNOMA-BF", "A-eNOMA-BF-S2", "D-mNOMA-BF", "D-mNOMA-BF-S2"};
      e.points = demand_axis();
      break;
    case ExperimentKind::ipsic_sweep:
      e.strategies = {"D-mNOMA-BF", "A-mNOMA-BF", "A-eNOMA-BF"};
      for (int L : {4, 8, 16})
        for (double k : {0.0, 1e-4, 1e-3, 1e-2, 1e-1})
          e.points.push_back({"ipSIC_factor@num_antennas=" + std::to_string(L), k,
                              {{"demand_mean_bps", 900e6}, {"num_antennas", L}, {"ipSIC_factor", k}}});
      break;
    case ExperimentKind::per_satellite_satisfaction:
      e.strategies = kNomaBf;
      e.points = demand_axis();
      break;
    case ExperimentKind::ee_sweep:
      e.strategies = kNomaBf;
      e.strategies.push_back("OMA-BF");
      e.points = single_key("sat_power_dbw", {19, 22, 25, 28, 31});
      break;
  }
  return e;
}

void Experiment::validate() const {
  if (trials < 1) throw ConfigError("invalid experiment.trials: must be >= 1");
  if (points.empty()) throw ConfigError("invalid experiment.sweep: grid must be nonempty");
  if (strategies.empty()) throw ConfigError("invalid experiment.strategies: list must be nonempty");
  for (const auto& s : strategies) {
    try {
      Strategy::parse(s);
    } catch (const std::invalid_argument& err) {
      throw ConfigError(std::string("invalid experiment.strategies: ") + err.what());
    }
    if (Strategy::parse(s).assign == AssignMode::fixed_plan)
      throw ConfigError("invalid experiment.strategies: fixed-plan strategies need the run command");
  }
  for (const auto& p : points) {
    ScenarioConfig c = base;
    for (const auto& [k, v] : p.settings) apply_setting(c, k, v, demand_jitter);
    try {
      rnoma::validate(c);
    } catch (const ConfigError& err) {
      throw ConfigError(std::string(err.what()) + " (at " + p.param + " = " + num(p.value) + ")");
    }
  }
}

Experiment experiment_from_json(const std::string& text, const ScenarioConfig& base, bool full_scale) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text, nullptr, true, true);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  if (!doc.contains("experiment")) return Experiment::make(ExperimentKind::single_run, base, full_scale);
  const auto& ex = doc["experiment"];
  try {
    Experiment e = Experiment::make(parse_experiment_kind(ex.value("kind", std::string("single-run"))), base,
                                    full_scale);
    for (auto it = ex.begin(); it != ex.end(); ++it) {
      const std::string& key = it.key();
      if (key == "kind") continue;
      if (key == "name") e.name = it->get<std::string>();
      else if (key == "trials") e.trials = it->get<int>();
      else if (key == "demand_jitter") e.demand_jitter = it->get<double>();
      else if (key == "threads") e.threads = it->get<int>();
      else if (key == "strategies") e.strategies = it->get<std::vector<std::string>>();
      else if (key == "sweep") {
        const std::string param = it->at("param").get<std::string>();
        e.points.clear();
        for (double v : it->at("values").get<std::vector<double>>()) e.points.push_back({param, v, {{param, v}}});
      } else {
        throw ConfigError("invalid experiment." + key + ": unknown key");
      }
    }
    e.validate();
    return e;
  } catch (const nlohmann::json::exception& err) {
    throw ConfigError(std::string("invalid experiment: ") + err.what());
  }
}

ResultTable run_experiment(const Experiment& exp) {
  exp.validate();
  struct Task {
    int point;
    int trial;
  };
  std::vector<Task> tasks;
  for (int p = 0; p < static_cast<int>(exp.points.size()); ++p)
    for (int t = 0; t < exp.trials; ++t) tasks.push_back({p, t});

  std::vector<Strategy> strategies;
  for (const auto& s : exp.strategies) strategies.push_back(Strategy::parse(s));

  ResultTable table;
  std::mutex lock;
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      const auto& task = tasks[i];
      const auto& point = exp.points[task.point];
      ScenarioConfig cfg = exp.base;
      cfg.seed = exp.seed;
      for (const auto& [k, v] : point.settings) apply_setting(cfg, k, v, exp.demand_jitter);

      std::vector<ResultRow> rows;
      std::optional<Scenario> scenario;
      std::string build_error;
      try {
        Rng rng(cfg.seed, static_cast<std::uint64_t>(task.trial));
        scenario = Scenario::build(cfg, rng);
      } catch (const std::exception& e) {
        build_error = e.what();
      }
      for (std::size_t s = 0; s < strategies.size(); ++s) {
        ResultRow row;
        row.experiment = exp.name;
        row.strategy = exp.strategies[s];
        row.sweep_param = point.param;
        row.sweep_value = point.value;
        row.trial = task.trial;
        row.point_index = task.point;
        row.strategy_index = static_cast<int>(s);
        if (!scenario) {
          row.status = clean_status("error: " + build_error);
        } else if (strategies[s].power == PowerMode::expcone && cfg.ipSIC_factor > 0.0) {
          row.status = "unsupported";
        } else {
          try {
            Rng rng(cfg.seed, static_cast<std::uint64_t>(task.trial));
            const auto result = run(*scenario, strategies[s], rng);
            row.metrics = result.metrics;
            row.status = result.metrics.infeasible_cells > 0
                             ? "infeasible:" + std::to_string(result.metrics.infeasible_cells)
                             : "ok";
          } catch (const UnsupportedError&) {
            row.status = "unsupported";
          } catch (const std::exception& e) {
            row.status = clean_status(std::string("error: ") + e.what());
          }
        }
        rows.push_back(std::move(row));
      }
      std::lock_guard<std::mutex> guard(lock);
      for (auto& r : rows) table.rows.push_back(std::move(r));
    }
  };
  const int n = worker_count(exp.threads, tasks.size());
  std::vector<std::thread> pool;
  for (int i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::sort(table.rows.begin(), table.rows.end(), [](const ResultRow& a, const ResultRow& b) {
    return std::tie(a.point_index, a.strategy_index, a.trial) < std::tie(b.point_index, b.strategy_index, b.trial);
  });
  return table;
}

void write_csv(std::ostream& out, const ResultTable& table) {
  out << kHeader << '\n';
  for (const auto& r : table.rows) {
    out << r.experiment << ',' << r.strategy << ',' << r.sweep_param << ',' << num(r.sweep_value) << ',' << r.trial;
    if (r.has_metrics()) {
      const auto& m = r.metrics;
      out << ',' << num(m.objective_gap_db) << ',' << num(m.satisfaction_ratio) << ',' << num(m.min_sat_rate_worst)
          << ',' << num(m.total_capacity_bps) << ',' << num(m.total_gap_bps) << ',' << num(m.energy_efficiency);
    } else {
      out << ",,,,,,";
    }
    out << ',' << r.status << '\n';
  }
}

void emit(const ResultTable& table, const std::string& path) {
  if (table.rows.empty()) throw std::invalid_argument("emit: result table is empty");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_csv(out, table);
  out.flush();
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

ResultTable read_csv(std::istream& in) {
  ResultTable table;
  std::string line;
  if (!std::getline(in, line) || line != kHeader) throw std::runtime_error("results csv: unexpected header");
  std::vector<std::pair<std::string, double>> seen_points;
  std::vector<std::string> seen_strategies;
  auto field = [](const std::string& s) {
    return s.empty() ? std::numeric_limits<double>::quiet_NaN() : std::stod(s);
  };
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::string cur;
    std::istringstream ss(line);
    while (std::getline(ss, cur, ',')) f.push_back(cur);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    if (f.size() != 12) throw std::runtime_error("results csv: expected 12 fields in '" + line + "'");
    ResultRow r;
    r.experiment = f[0];
    r.strategy = f[1];
    r.sweep_param = f[2];
    r.sweep_value = std::stod(f[3]);
    r.trial = std::stoi(f[4]);
    r.metrics.objective_gap_db = field(f[5]);
    r.metrics.satisfaction_ratio = field(f[6]);
    r.metrics.min_sat_rate_worst = field(f[7]);
    r.metrics.total_capacity_bps = field(f[8]);
    r.metrics.total_gap_bps = field(f[9]);
    r.metrics.energy_efficiency = field(f[10]);
    r.status = f[11];
    const std::pair<std::string, double> key{r.sweep_param, r.sweep_value};
    auto pit = std::find(seen_points.begin(), seen_points.end(), key);
    if (pit == seen_points.end()) pit = seen_points.insert(seen_points.end(), key);
    r.point_index = static_cast<int>(pit - seen_points.begin());
    auto sit = std::find(seen_strategies.begin(), seen_strategies.end(), r.strategy);
    if (sit == seen_strategies.end()) sit = seen_strategies.insert(seen_strategies.end(), r.strategy);
    r.strategy_index = static_cast<int>(sit - seen_strategies.begin());
    table.rows.push_back(std::move(r));
  }
  return table;
}

double row_metric(const ResultRow& row, const std::string& field) {
  const auto& m = row.metrics;
  if (field == "objective_gap") return m.objective_gap;
  if (field == "objective_gap_db") return m.objective_gap_db;
  if (field == "satisfaction_ratio") return m.satisfaction_ratio;
  if (field == "min_sat_rate_worst") return m.min_sat_rate_worst;
  if (field == "total_capacity_bps") return m.total_capacity_bps;
  if (field == "total_gap_bps") return m.total_gap_bps;
  if (field == "energy_eff") return m.energy_efficiency;
  throw std::invalid_argument("unknown metric '" + field + "'");
}

double mean_metric(const ResultTable& table, const std::string& strategy, int point_index, const std::string& field) {
  double sum = 0.0;
  int count = 0;
  for (const auto& r : table.rows) {
    if (r.strategy != strategy || r.point_index != point_index || !r.has_metrics()) continue;
    sum += row_metric(r, field);
    ++count;
  }
  return count ? sum / count : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace rnoma
