#pragma once

#include <vector>

#include "rnoma/channel.hpp"

namespace rnoma {

enum class BeamMode { per_user, spot, color };

// Beam w_i = sqrt(p_i) * direction_i, indexed like ChannelMatrix::columns.
struct BeamMatrix {
  int cell_id = 0;
  BeamMode mode = BeamMode::per_user;
  std::vector<std::vector<cplx>> w;
  std::vector<std::vector<cplx>> direction;  // unit norm
};

struct Beam {
  std::vector<cplx> w;
  std::vector<cplx> direction;
  bool degenerate = false;  // zero channel: zero beam returned
};

// Principal singular direction of the rank-one h h^H, i.e. h / ||h||, scaled by
// sqrt(p). Achieves |h^H w|^2 = p ||h||^2, the maximum over ||w||^2 <= p.
Beam svd_beamformer(std::span<const cplx> h, double power_w);

BeamMatrix per_user_beams(const ChannelMatrix& channels, std::span<const double> powers);

// One shared direction maximizing sum_i p_i |h_i^H v|^2 (power iteration on
// sum_i p_i h_i h_i^H; unweighted when every power is zero).
BeamMatrix spot_beam(const ChannelMatrix& channels, std::span<const double> powers);

// Colour modes radiate from a single element with no steering.
BeamMatrix unsteered_beams(const ChannelMatrix& channels, std::span<const double> powers);

struct ColorPartition {
  std::vector<int> color;  // per column
  int num_colors = 1;
  double bandwidth_factor = 1.0;
};

// Round-robin colours in descending-gain order. 2 colours keep the full band;
// 4 colours add frequency reuse and halve it.
ColorPartition color_partition(const ChannelMatrix& channels, int num_colors);

}  // namespace rnoma
