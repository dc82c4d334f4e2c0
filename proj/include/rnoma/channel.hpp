#pragma once

#include <stdexcept>
#include <vector>

#include "rnoma/constellation.hpp"
#include "rnoma/kernels.hpp"
#include "rnoma/scenario.hpp"

namespace rnoma {

struct RadioParams {
  double wavelength_m = 0.0;
  double rx_gain_linear = 0.0;
  double max_tx_gain_linear = 0.0;
  double aperture_radius_m = 0.0;
  double antenna_spacing_m = 0.0;
  int num_antennas = 1;
  double rain_atten_db_per_km = 0.0;
  double rain_atten_ref_db = 0.0;
  double rain_ref_distance_m = 0.0;
  GainPattern pattern = GainPattern::normalized;

  static RadioParams from_config(const ScenarioConfig& config);
};

struct ChannelVector {
  int user_id = 0;
  std::vector<cplx> h;
  double gain = 0.0;  // ||h||^2
  int slot_index = 0;
  SlantGeometry geometry;
};

struct ChannelMatrix {
  int cell_id = 0;
  int slot_index = 0;
  std::vector<ChannelVector> columns;
  std::vector<std::size_t> order;  // indices into columns, descending gain
};

// Entry l = exp(-j l (2 pi s / lambda) sin(theta)) / sqrt(L).
std::vector<cplx> array_response(double theta_rad, int num_antennas, double spacing_m, double wavelength_m);

double transmit_gain(double phi_rad, const RadioParams& params);

// Free-space amplitude lambda / (4 pi d).
double free_space_amplitude(double distance_m, double wavelength_m);

// Rain-fade amplitude: baseline at the reference distance plus the slope on
// the excess slant range.
double rain_amplitude(double distance_m, const RadioParams& params);

// Throws std::domain_error for a ground point below the horizon.
ChannelVector user_channel(const SlantGeometry& geometry, const RadioParams& params, int slot, int user_id = 0);

// Stable descending-gain permutation; ties keep ascending position.
std::vector<std::size_t> order_users(const std::vector<ChannelVector>& channels);

ChannelMatrix make_channel_matrix(int cell_id, int slot, std::vector<ChannelVector> columns);

}  // namespace rnoma
