#pragma once

// Physical constants and dB <-> linear conversions. Everything past the
// config boundary is SI linear (W, Hz, m, bps).

namespace rnoma {

inline constexpr double kSpeedOfLight = 299792458.0;    // m/s
inline constexpr double kEarthRadius = 6371.0e3;         // m, spherical model
inline constexpr double kPi = 3.14159265358979323846;

double dbw_to_watts(double dbw);
double watts_to_dbw(double watts);
double dbi_to_linear(double dbi);
double linear_to_dbi(double gain);
// Amplitude factor for an attenuation of `db` decibels (10^(-db/20)).
double attenuation_db_to_amplitude(double db);

inline constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

}  // namespace rnoma
