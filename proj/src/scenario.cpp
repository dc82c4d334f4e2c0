#include "rnoma/scenario.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "rnoma/units.hpp"

namespace rnoma {

namespace {

using nlohmann::json;

class Reader {
 public:
  Reader(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ConfigError(where() + ": expected an object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    auto it = node_.find(key);
    if (it == node_.end()) return;
    try {
      out = it->template get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(child(key) + ": " + e.what());
    }
  }

  void range(const char* key, std::array<double, 2>& out) {
    seen_.insert(key);
    auto it = node_.find(key);
    if (it == node_.end()) return;
    if (!it->is_array() || it->size() != 2)
      throw ConfigError(child(key) + ": expected [min, max]");
    try {
      out = {(*it)[0].get<double>(), (*it)[1].get<double>()};
    } catch (const json::exception& e) {
      throw ConfigError(child(key) + ": " + e.what());
    }
  }

  Reader sub(const char* key) {
    seen_.insert(key);
    auto it = node_.find(key);
    static const json empty = json::object();
    return Reader(it == node_.end() ? empty : *it, child(key));
  }

  void reject_unknown() const {
    for (const auto& item : node_.items())
      if (!seen_.count(item.key())) throw ConfigError(child(item.key().c_str()) + ": unknown key");
  }

  std::string child(const char* key) const { return path_.empty() ? key : path_ + "." + key; }
  std::string where() const { return path_.empty() ? "<root>" : path_; }

 private:
  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

template <typename E>
E parse_enum(const std::string& value, const std::string& key,
             std::initializer_list<std::pair<const char*, E>> options) {
  for (const auto& [name, e] : options)
    if (value == name) return e;
  throw ConfigError(key + ": unrecognized value '" + value + "'");
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError("invalid " + what);
}

}  // namespace

int ScenarioConfig::rows() const {
  if (grid_rows > 0) return grid_rows;
  int best = 1;
  for (int r = 1; r * r <= num_cells; ++r)
    if (num_cells % r == 0) best = r;
  return best;
}

int ScenarioConfig::cols() const {
  if (grid_cols > 0) return grid_cols;
  return num_cells / rows();
}

int ScenarioConfig::horizon() const {
  if (horizon_slots > 0) return horizon_slots;
  return (num_cells + num_satellites - 1) / num_satellites;
}

double ScenarioConfig::noise_w() const { return dbw_to_watts(noise_power_dbw); }
double ScenarioConfig::sat_power_w() const { return dbw_to_watts(sat_power_dbw); }

void validate(const ScenarioConfig& c) {
  require(c.carrier_frequency_hz > 0, "carrier_frequency_hz: must be > 0");
  require(c.bandwidth_hz > 0, "bandwidth_hz: must be > 0");
  require(c.region_lon_deg[0] < c.region_lon_deg[1], "region_lon_deg: min must be < max");
  require(c.region_lat_deg[0] < c.region_lat_deg[1], "region_lat_deg: min must be < max");
  require(c.region_lat_deg[0] >= -90 && c.region_lat_deg[1] <= 90, "region_lat_deg: outside [-90, 90]");
  require(c.num_satellites > 0, "num_satellites: must be > 0");
  require(c.num_cells > 0, "num_cells: must be > 0");
  require(c.grid_rows >= 0 && c.grid_cols >= 0, "grid_rows/grid_cols: must be >= 0");
  if (c.grid_rows > 0 || c.grid_cols > 0)
    require(c.rows() * c.cols() == c.num_cells,
            "num_cells: " + std::to_string(c.num_cells) + " does not match grid " +
                std::to_string(c.rows()) + "x" + std::to_string(c.cols()));
  require(c.users_per_cell > 0, "users_per_cell: must be > 0");
  require(c.num_antennas > 0, "num_antennas: must be > 0");
  require(c.antenna_spacing_m > 0, "antenna_spacing_m: must be > 0");
  require(c.aperture_radius_m > 0, "aperture_radius_m: must be > 0");
  require(c.power_headroom_factor >= 1.0, "power_headroom_factor: must be >= 1");
  require(c.min_rate_bps > 0, "min_rate_bps: must be > 0");
  require(c.demand_range_bps[0] > 0 && c.demand_range_bps[0] <= c.demand_range_bps[1],
          "demand_range_bps: must be positive and ordered");
  require(c.demand_range_bps[0] >= c.min_rate_bps, "demand_range_bps: lower bound below min_rate_bps");
  require(c.leo_altitude_m > 0, "leo_altitude_m: must be > 0");
  require(c.leo_speed_mps > 0, "leo_speed_mps: must be > 0");
  require(c.relay_altitude_m > 0, "relay_altitude_m: must be > 0");
  require(c.ipSIC_factor >= 0 && c.ipSIC_factor <= 1, "ipSIC_factor (κ): must satisfy 0 <= κ <= 1");
  require(c.ant_params.tau > 0 && c.ant_params.tau < 1, "ant_params.tau (τ): must satisfy 0 < τ < 1");
  require(c.ant_params.s1 >= 0 && c.ant_params.s2 >= 0, "ant_params.s1/s2: must be >= 0");
  require(c.ant_params.colony_size > 0, "ant_params.colony_size: must be > 0");
  require(c.ant_params.max_pheromone > 0, "ant_params.max_pheromone: must be > 0");
  require(c.ant_params.max_iters > 0, "ant_params.max_iters: must be > 0");
  require(c.solver_params.tol > 0, "solver_params.tol: must be > 0");
  require(c.solver_params.max_iters > 0, "solver_params.max_iters: must be > 0");
  require(c.num_planes > 0, "num_planes: must be > 0");
  require(c.slot_duration_s > 0, "slot_duration_s: must be > 0");
  require(c.horizon_slots >= 0, "horizon_slots: must be >= 0");
  require(c.horizon() * c.num_satellites >= c.num_cells,
          "horizon_slots: " + std::to_string(c.horizon()) + " slots cannot cover every cell once");
  require(c.doppler_threshold_hz > 0, "doppler_threshold_hz: must be > 0");
  require(c.rain_atten_db_per_km >= 0 && c.rain_atten_ref_db >= 0, "rain_atten_*: must be >= 0");
}

ScenarioConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  if (doc.is_null()) doc = json::object();

  ScenarioConfig c;
  Reader r(doc, "");
  r.get("carrier_frequency_hz", c.carrier_frequency_hz);
  r.get("bandwidth_hz", c.bandwidth_hz);
  r.range("region_lon_deg", c.region_lon_deg);
  r.range("region_lat_deg", c.region_lat_deg);
  r.get("num_satellites", c.num_satellites);
  r.get("num_cells", c.num_cells);
  r.get("grid_rows", c.grid_rows);
  r.get("grid_cols", c.grid_cols);
  r.get("users_per_cell", c.users_per_cell);
  r.get("num_antennas", c.num_antennas);
  r.get("antenna_spacing_m", c.antenna_spacing_m);
  r.get("aperture_radius_m", c.aperture_radius_m);
  r.get("rx_gain_dbi", c.rx_gain_dbi);
  r.get("max_tx_gain_dbi", c.max_tx_gain_dbi);
  r.get("noise_power_dbw", c.noise_power_dbw);
  r.get("sat_power_dbw", c.sat_power_dbw);
  r.get("power_headroom_factor", c.power_headroom_factor);
  r.get("min_rate_bps", c.min_rate_bps);
  r.range("demand_range_bps", c.demand_range_bps);
  r.get("leo_altitude_m", c.leo_altitude_m);
  r.get("leo_speed_mps", c.leo_speed_mps);
  r.get("relay_lon_deg", c.relay_lon_deg);
  r.get("relay_altitude_m", c.relay_altitude_m);
  r.get("ipSIC_factor", c.ipSIC_factor);
  r.get("seed", c.seed);
  r.get("num_planes", c.num_planes);
  r.get("inclination_deg", c.inclination_deg);
  r.get("slot_duration_s", c.slot_duration_s);
  r.get("horizon_slots", c.horizon_slots);
  r.get("doppler_threshold_hz", c.doppler_threshold_hz);
  r.get("rain_atten_db_per_km", c.rain_atten_db_per_km);
  r.get("rain_atten_ref_db", c.rain_atten_ref_db);

  std::string pattern = "normalized";
  r.get("gain_pattern", pattern);
  c.gain_pattern = parse_enum<GainPattern>(pattern, "gain_pattern",
                                           {{"normalized", GainPattern::normalized},
                                            {"literal", GainPattern::literal}});
  std::string sic = "printed";
  r.get("sic_order", sic);
  c.sic_order = parse_enum<SicOrder>(sic, "sic_order",
                                     {{"printed", SicOrder::printed},
                                      {"conventional", SicOrder::conventional}});

  Reader ant = r.sub("ant_params");
  ant.get("s1", c.ant_params.s1);
  ant.get("s2", c.ant_params.s2);
  ant.get("tau", c.ant_params.tau);
  ant.get("colony_size", c.ant_params.colony_size);
  ant.get("max_pheromone", c.ant_params.max_pheromone);
  ant.get("max_iters", c.ant_params.max_iters);
  ant.reject_unknown();

  Reader solver = r.sub("solver_params");
  solver.get("tol", c.solver_params.tol);
  solver.get("max_iters", c.solver_params.max_iters);
  solver.reject_unknown();

  // The harness reads its own "experiment" section from the same file.
  r.sub("experiment");
  r.reject_unknown();

  if (const char* env = std::getenv("RNOMA_SEED"); env && *env) {
    try {
      c.seed = std::stoull(env);
    } catch (const std::exception&) {
      throw ConfigError(std::string("RNOMA_SEED: not an unsigned integer: ") + env);
    }
  }
  validate(c);
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

Rng::Rng(std::uint64_t seed, std::uint64_t trial) : Rng(seed, trial, 0) {}

Rng::Rng(std::uint64_t seed, std::uint64_t trial, std::uint64_t tag)
    : seed_(seed), trial_(trial), tag_(tag) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32),
                    static_cast<std::uint32_t>(tag), static_cast<std::uint32_t>(tag >> 32)};
  engine_.seed(seq);
}

Rng Rng::fork(std::uint64_t tag) const { return Rng(seed_, trial_, tag_ * 1000003ULL + tag + 1); }

double Rng::uniform(double lo, double hi) {
  if (lo == hi) return lo;
  // Built from raw 53-bit draws so results do not depend on the standard
  // library's distribution implementation.
  const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

std::size_t Rng::index(std::size_t n) {
  return static_cast<std::size_t>(uniform(0.0, 1.0) * static_cast<double>(n)) % n;
}

std::vector<Cell> build_cells(const ScenarioConfig& config) {
  const int rows = config.rows();
  const int cols = config.cols();
  if (rows * cols != config.num_cells)
    throw ConfigError("num_cells: " + std::to_string(config.num_cells) + " not factorable into grid " +
                      std::to_string(rows) + "x" + std::to_string(cols));
  const double lat_top = config.region_lat_deg[1];
  const double lon_left = config.region_lon_deg[0];
  const double dlat = (config.region_lat_deg[1] - config.region_lat_deg[0]) / rows;
  const double dlon = (config.region_lon_deg[1] - config.region_lon_deg[0]) / cols;

  std::vector<Cell> cells;
  cells.reserve(config.num_cells);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      Cell cell;
      cell.cell_id = r * cols + c;
      cell.lat_bounds = {lat_top - (r + 1) * dlat, lat_top - r * dlat};
      cell.lon_bounds = {lon_left + c * dlon, lon_left + (c + 1) * dlon};
      // Pin the outer edges to the region so the tiling is exact.
      if (r == rows - 1) cell.lat_bounds[0] = config.region_lat_deg[0];
      if (c == cols - 1) cell.lon_bounds[1] = config.region_lon_deg[1];
      cell.center_lat_deg = 0.5 * (cell.lat_bounds[0] + cell.lat_bounds[1]);
      cell.center_lon_deg = 0.5 * (cell.lon_bounds[0] + cell.lon_bounds[1]);
      cells.push_back(cell);
    }
  }
  return cells;
}

std::vector<User> spawn_users(const std::vector<Cell>& cells, const ScenarioConfig& config, Rng& rng) {
  std::vector<User> users;
  users.reserve(cells.size() * config.users_per_cell);
  for (const Cell& cell : cells) {
    for (int n = 0; n < config.users_per_cell; ++n) {
      User u;
      u.user_id = static_cast<int>(users.size());
      u.cell_id = cell.cell_id;
      u.lat_deg = rng.uniform(cell.lat_bounds[0], cell.lat_bounds[1]);
      u.lon_deg = rng.uniform(cell.lon_bounds[0], cell.lon_bounds[1]);
      u.demand_bps = rng.uniform(config.demand_range_bps[0], config.demand_range_bps[1]);
      users.push_back(u);
    }
  }
  return users;
}

}  // namespace rnoma
