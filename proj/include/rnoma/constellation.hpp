#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "rnoma/scenario.hpp"

namespace rnoma {

using Vec3 = std::array<double, 3>;

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline Vec3 normalized(const Vec3& a) { return (1.0 / norm(a)) * a; }

// ECEF position of a point at `altitude_m` above the spherical Earth.
Vec3 geodetic_to_ecef(double lat_deg, double lon_deg, double altitude_m = 0.0);

struct OrbitElement {
  int plane_index = 0;
  double inclination_deg = 0.0;
  double raan_deg = 0.0;
  double phase_deg = 0.0;  // argument of latitude at slot 0
  double altitude_m = 0.0;
  double ground_speed_mps = 0.0;
};

struct SatelliteState {
  int sat_id = 0;
  Vec3 position{};  // m
  Vec3 velocity{};  // m/s
  int slot_index = 0;
};

struct DopplerMeasurement {
  int sat_id = 0;
  int slot_index = 0;
  double shift_hz = 0.0;
  double cos_alpha = 0.0;
};

struct SlantGeometry {
  double distance_m = 0.0;
  double off_axis_rad = 0.0;  // from nadir
  double aod_rad = 0.0;       // signed, along-track
  double elevation_rad = 0.0;
  bool visible = false;
};

// Circular Keplerian orbit over a non-rotating spherical Earth.
SatelliteState propagate(const OrbitElement& element, int slot, double slot_duration_s, int sat_id = 0);

DopplerMeasurement doppler_shift(const SatelliteState& state, const Vec3& relay_position,
                                 double carrier_frequency_hz);

SlantGeometry slant_geometry(const SatelliteState& state, double lat_deg, double lon_deg);

// Planes cross the region at evenly spaced longitudes; satellites sharing a
// plane trail each other along-track, and every group is centred over the
// region at the middle of the planning horizon.
std::vector<OrbitElement> default_constellation(const ScenarioConfig& config);

Vec3 relay_position(const ScenarioConfig& config);

}  // namespace rnoma
