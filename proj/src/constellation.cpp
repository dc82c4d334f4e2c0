#include "rnoma/constellation.hpp"

#include <algorithm>

#include "rnoma/units.hpp"

namespace rnoma {

Vec3 geodetic_to_ecef(double lat_deg, double lon_deg, double altitude_m) {
  const double lat = deg_to_rad(lat_deg);
  const double lon = deg_to_rad(lon_deg);
  const double r = kEarthRadius + altitude_m;
  return {r * std::cos(lat) * std::cos(lon), r * std::cos(lat) * std::sin(lon), r * std::sin(lat)};
}

SatelliteState propagate(const OrbitElement& element, int slot, double slot_duration_s, int sat_id) {
  const double radius = kEarthRadius + element.altitude_m;
  const double inc = deg_to_rad(element.inclination_deg);
  const double raan = deg_to_rad(element.raan_deg);
  const double t = slot * slot_duration_s;
  const double u = deg_to_rad(element.phase_deg) + element.ground_speed_mps * t / radius;

  // Orbital-plane basis: p points at the ascending node, q is 90 deg ahead.
  const Vec3 p{std::cos(raan), std::sin(raan), 0.0};
  const Vec3 q{-std::sin(raan) * std::cos(inc), std::cos(raan) * std::cos(inc), std::sin(inc)};

  SatelliteState s;
  s.sat_id = sat_id;
  s.slot_index = slot;
  s.position = radius * (std::cos(u) * p + std::sin(u) * q);
  s.velocity = element.ground_speed_mps * (-std::sin(u) * p + std::cos(u) * q);
  return s;
}

DopplerMeasurement doppler_shift(const SatelliteState& state, const Vec3& relay, double carrier_frequency_hz) {
  const Vec3 los = relay - state.position;
  const double speed = norm(state.velocity);
  DopplerMeasurement m;
  m.sat_id = state.sat_id;
  m.slot_index = state.slot_index;
  m.cos_alpha = std::clamp(dot(state.velocity, los) / (speed * norm(los)), -1.0, 1.0);
  m.shift_hz = carrier_frequency_hz * speed * m.cos_alpha / kSpeedOfLight;
  return m;
}

SlantGeometry slant_geometry(const SatelliteState& state, double lat_deg, double lon_deg) {
  const Vec3 ground = geodetic_to_ecef(lat_deg, lon_deg);
  const Vec3 to_ground = ground - state.position;
  SlantGeometry g;
  g.distance_m = norm(to_ground);
  const Vec3 dir = (1.0 / g.distance_m) * to_ground;
  const Vec3 nadir = -1.0 * normalized(state.position);
  g.off_axis_rad = std::acos(std::clamp(dot(nadir, dir), -1.0, 1.0));
  const Vec3 along = normalized(state.velocity);
  g.aod_rad = std::asin(std::clamp(dot(dir, along), -1.0, 1.0));
  const Vec3 up = normalized(ground);
  g.elevation_rad = std::asin(std::clamp(dot(-1.0 * dir, up), -1.0, 1.0));
  g.visible = g.elevation_rad > 1e-9;
  return g;
}

std::vector<OrbitElement> default_constellation(const ScenarioConfig& config) {
  const int planes = std::min(config.num_planes, config.num_satellites);
  const double radius = kEarthRadius + config.leo_altitude_m;
  const double lon_span = config.region_lon_deg[1] - config.region_lon_deg[0];
  const double lat_span = config.region_lat_deg[1] - config.region_lat_deg[0];
  const double lat_mid = 0.5 * (config.region_lat_deg[0] + config.region_lat_deg[1]);
  const double mid_time = 0.5 * (config.horizon() - 1) * config.slot_duration_s;
  const double mid_advance_deg = rad_to_deg(config.leo_speed_mps * mid_time / radius);

  std::vector<OrbitElement> elements;
  elements.reserve(config.num_satellites);
  for (int m = 0; m < config.num_satellites; ++m) {
    const int plane = m % planes;
    const int slot_in_plane = m / planes;
    const int in_plane = (config.num_satellites - plane + planes - 1) / planes;
    OrbitElement e;
    e.plane_index = plane;
    e.inclination_deg = config.inclination_deg;
    e.raan_deg = config.region_lon_deg[0] + (plane + 0.5) * lon_span / planes;
    const double spacing = lat_span / in_plane;
    const double offset = (slot_in_plane - 0.5 * (in_plane - 1)) * spacing;
    // Argument of latitude that puts the satellite at latitude lat_mid + offset
    // when the horizon is half elapsed.
    const double target_lat = deg_to_rad(lat_mid + offset);
    const double u_mid = std::asin(std::clamp(std::sin(target_lat) / std::sin(deg_to_rad(e.inclination_deg)), -1.0, 1.0));
    e.phase_deg = rad_to_deg(u_mid) - mid_advance_deg;
    e.altitude_m = config.leo_altitude_m;
    e.ground_speed_mps = config.leo_speed_mps;
    elements.push_back(e);
  }
  return elements;
}

Vec3 relay_position(const ScenarioConfig& config) {
  return geodetic_to_ecef(0.0, config.relay_lon_deg, config.relay_altitude_m);
}

}  // namespace rnoma
