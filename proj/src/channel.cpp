#include "rnoma/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rnoma/units.hpp"

namespace rnoma {

RadioParams RadioParams::from_config(const ScenarioConfig& config) {
  RadioParams p;
  p.wavelength_m = kSpeedOfLight / config.carrier_frequency_hz;
  p.rx_gain_linear = dbi_to_linear(config.rx_gain_dbi);
  p.max_tx_gain_linear = dbi_to_linear(config.max_tx_gain_dbi);
  p.aperture_radius_m = config.aperture_radius_m;
  p.antenna_spacing_m = config.antenna_spacing_m;
  p.num_antennas = config.num_antennas;
  p.rain_atten_db_per_km = config.rain_atten_db_per_km;
  p.rain_atten_ref_db = config.rain_atten_ref_db;
  p.rain_ref_distance_m = config.leo_altitude_m;
  p.pattern = config.gain_pattern;
  return p;
}

std::vector<cplx> array_response(double theta_rad, int num_antennas, double spacing_m, double wavelength_m) {
  const double step = 2.0 * kPi * spacing_m / wavelength_m * std::sin(theta_rad);
  const double scale = 1.0 / std::sqrt(static_cast<double>(num_antennas));
  std::vector<cplx> a(num_antennas);
  for (int l = 0; l < num_antennas; ++l) a[l] = std::polar(scale, -l * step);
  return a;
}

double transmit_gain(double phi_rad, const RadioParams& params) {
  const double u = 2.0 * kPi * params.aperture_radius_m * std::sin(std::abs(phi_rad)) / params.wavelength_m;
  const double factor = params.pattern == GainPattern::literal ? 4.0 : 2.0;
  if (u < 1e-6) {
    // 2 J1(u)/u = 1 - u^2/8 + O(u^4)
    const double lead = 0.5 * factor * (1.0 - u * u / 8.0);
    return phi_rad == 0.0 ? params.max_tx_gain_linear : params.max_tx_gain_linear * lead * lead;
  }
  const double ratio = factor * std::cyl_bessel_j(1.0, u) / u;
  return params.max_tx_gain_linear * ratio * ratio;
}

double free_space_amplitude(double distance_m, double wavelength_m) {
  return wavelength_m / (4.0 * kPi * distance_m);
}

double rain_amplitude(double distance_m, const RadioParams& params) {
  const double excess_km = std::max(0.0, distance_m - params.rain_ref_distance_m) / 1000.0;
  return attenuation_db_to_amplitude(params.rain_atten_ref_db + params.rain_atten_db_per_km * excess_km);
}

ChannelVector user_channel(const SlantGeometry& geometry, const RadioParams& params, int slot, int user_id) {
  if (!geometry.visible) throw std::domain_error("user_channel: ground point is below the horizon");
  const double amplitude = rain_amplitude(geometry.distance_m, params) * std::sqrt(params.rx_gain_linear) *
                           free_space_amplitude(geometry.distance_m, params.wavelength_m) *
                           std::sqrt(transmit_gain(geometry.off_axis_rad, params));
  ChannelVector c;
  c.user_id = user_id;
  c.slot_index = slot;
  c.geometry = geometry;
  c.h = array_response(geometry.aod_rad, params.num_antennas, params.antenna_spacing_m, params.wavelength_m);
  for (auto& x : c.h) x *= amplitude;
  c.gain = kernels::norm2(c.h);
  return c;
}

std::vector<std::size_t> order_users(const std::vector<ChannelVector>& channels) {
  std::vector<std::size_t> order(channels.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return channels[a].gain > channels[b].gain; });
  return order;
}

ChannelMatrix make_channel_matrix(int cell_id, int slot, std::vector<ChannelVector> columns) {
  ChannelMatrix m;
  m.cell_id = cell_id;
  m.slot_index = slot;
  m.columns = std::move(columns);
  m.order = order_users(m.columns);
  return m;
}

}  // namespace rnoma
