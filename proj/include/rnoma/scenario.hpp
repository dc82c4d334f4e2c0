#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace rnoma {

// Config parse / validation failure. The message names the offending key path.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Transmit pattern variant. `normalized` uses |2 J1(u)/u|^2 (continuous at
// boresight); `literal` keeps the printed factor 4 for comparison runs.
enum class GainPattern { normalized, literal };

// Which users a decoder still sees after SIC. `printed`: user i is interfered
// by every j < i in descending-gain order (residual kappa from j > i).
// `conventional`: the textbook direction, interfered by j > i.
enum class SicOrder { printed, conventional };

struct AntParams {
  double s1 = 2.0;             // route-weight exponent
  double s2 = 1.0;             // pheromone exponent
  double tau = 0.1;            // evaporation ratio, 0 < tau < 1
  int colony_size = 8;
  double max_pheromone = 10.0;
  int max_iters = 60;
};

struct SolverParams {
  double tol = 1e-6;
  int max_iters = 500;
};

struct ScenarioConfig {
  double carrier_frequency_hz = 11.7e9;
  double bandwidth_hz = 500e6;
  std::array<double, 2> region_lon_deg{100.0, 105.0};
  std::array<double, 2> region_lat_deg{-1.5, 1.5};
  int num_satellites = 6;
  int num_cells = 64;
  int grid_rows = 0;  // 0: choose the most square factorization of num_cells
  int grid_cols = 0;
  int users_per_cell = 4;
  int num_antennas = 8;
  double antenna_spacing_m = 0.5;
  double aperture_radius_m = 7.17;
  double rx_gain_dbi = 35.7;
  double max_tx_gain_dbi = 64.9;
  double noise_power_dbw = -136.0;
  double sat_power_dbw = 25.0;
  double power_headroom_factor = 1.05;
  double min_rate_bps = 5e6;
  std::array<double, 2> demand_range_bps{300e6, 1300e6};
  double leo_altitude_m = 1200e3;
  double leo_speed_mps = 7900.0;
  double relay_lon_deg = 103.0;
  double relay_altitude_m = 36000e3;
  double ipSIC_factor = 0.0;
  AntParams ant_params;
  SolverParams solver_params;
  std::uint64_t seed = 1;

  // Geometry and model knobs with no published value.
  int num_planes = 3;
  double inclination_deg = 87.0;
  double slot_duration_s = 10.0;
  int horizon_slots = 0;  // 0: ceil(K / M)
  double doppler_threshold_hz = 250e3;
  double rain_atten_db_per_km = 0.01;
  double rain_atten_ref_db = 0.0;
  GainPattern gain_pattern = GainPattern::normalized;
  SicOrder sic_order = SicOrder::printed;

  int rows() const;
  int cols() const;
  int horizon() const;
  double noise_w() const;
  double sat_power_w() const;
};

// Throws ConfigError naming the first violated field.
void validate(const ScenarioConfig& config);

// Parses the commented JSON config format. Absent keys keep their defaults.
// RNOMA_SEED in the environment overrides `seed`.
ScenarioConfig load_config(const std::string& path);
ScenarioConfig parse_config(const std::string& text);

struct Cell {
  int cell_id = 0;
  double center_lat_deg = 0.0;
  double center_lon_deg = 0.0;
  std::array<double, 2> lat_bounds{};  // [south, north]
  std::array<double, 2> lon_bounds{};  // [west, east]
};

struct User {
  int user_id = 0;
  int cell_id = 0;
  double lat_deg = 0.0;
  double lon_deg = 0.0;
  double demand_bps = 0.0;
};

// Deterministic stream keyed by (seed, trial). fork() derives independent
// sub-streams so that, e.g., user placement does not shift when the planner
// consumes a different number of draws.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t trial);

  Rng fork(std::uint64_t tag) const;
  double uniform(double lo, double hi);
  std::size_t index(std::size_t n);  // uniform in [0, n)
  std::mt19937_64& engine() { return engine_; }

 private:
  Rng(std::uint64_t seed, std::uint64_t trial, std::uint64_t tag);
  std::uint64_t seed_;
  std::uint64_t trial_;
  std::uint64_t tag_;
  std::mt19937_64 engine_;
};

// Row-major r x c tiling; row 0 is the northern edge, column 0 the western.
std::vector<Cell> build_cells(const ScenarioConfig& config);

std::vector<User> spawn_users(const std::vector<Cell>& cells, const ScenarioConfig& config, Rng& rng);

}  // namespace rnoma
