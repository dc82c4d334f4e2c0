#include "rnoma/beamform.hpp"

#include <cmath>
#include <stdexcept>

namespace rnoma {

namespace {

std::vector<cplx> scaled(const std::vector<cplx>& v, double s) {
  std::vector<cplx> out(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) out[k] = s * v[k];
  return out;
}

void normalize(std::vector<cplx>& v) {
  const double n = std::sqrt(kernels::norm2(v));
  if (n > 0) for (auto& x : v) x /= n;
}

BeamMatrix shared_direction(const ChannelMatrix& channels, std::span<const double> powers,
                            const std::vector<cplx>& dir, BeamMode mode) {
  BeamMatrix b;
  b.cell_id = channels.cell_id;
  b.mode = mode;
  for (std::size_t i = 0; i < channels.columns.size(); ++i) {
    b.direction.push_back(dir);
    b.w.push_back(scaled(dir, std::sqrt(std::max(0.0, powers[i]))));
  }
  return b;
}

}  // namespace

Beam svd_beamformer(std::span<const cplx> h, double power_w) {
  if (power_w < 0) throw std::invalid_argument("svd_beamformer: negative power");
  Beam beam;
  const double n2 = kernels::norm2(h);
  beam.w.assign(h.size(), cplx{});
  beam.direction.assign(h.size(), cplx{});
  if (n2 == 0.0) {
    beam.degenerate = true;
    return beam;
  }
  const double inv = 1.0 / std::sqrt(n2);
  const double amp = std::sqrt(power_w);
  for (std::size_t k = 0; k < h.size(); ++k) {
    beam.direction[k] = h[k] * inv;
    beam.w[k] = beam.direction[k] * amp;
  }
  return beam;
}

BeamMatrix per_user_beams(const ChannelMatrix& channels, std::span<const double> powers) {
  BeamMatrix b;
  b.cell_id = channels.cell_id;
  b.mode = BeamMode::per_user;
  for (std::size_t i = 0; i < channels.columns.size(); ++i) {
    Beam beam = svd_beamformer(channels.columns[i].h, std::max(0.0, powers[i]));
    b.w.push_back(std::move(beam.w));
    b.direction.push_back(std::move(beam.direction));
  }
  return b;
}

BeamMatrix spot_beam(const ChannelMatrix& channels, std::span<const double> powers) {
  if (channels.columns.empty()) throw std::invalid_argument("spot_beam: empty cell");
  const std::size_t len = channels.columns.front().h.size();
  std::vector<double> weight(channels.columns.size());
  double total = 0.0;
  for (std::size_t i = 0; i < weight.size(); ++i) total += weight[i] = std::max(0.0, powers[i]);
  if (total == 0.0) std::fill(weight.begin(), weight.end(), 1.0);

  // Start from the strongest user's matched direction.
  std::vector<cplx> v = channels.columns[channels.order.front()].h;
  normalize(v);
  if (kernels::norm2(v) == 0.0) v[0] = 1.0;

  std::vector<cplx> next(len);
  for (int iter = 0; iter < 500; ++iter) {
    std::fill(next.begin(), next.end(), cplx{});
    for (std::size_t i = 0; i < weight.size(); ++i) {
      const auto& h = channels.columns[i].h;
      const cplx proj = weight[i] * kernels::inner(h, v);  // p_i h_i^H v
      for (std::size_t k = 0; k < len; ++k) next[k] += h[k] * proj;
    }
    normalize(next);
    double change = 0.0;
    // Compare up to a global phase.
    const cplx phase = kernels::inner(v, next);
    const cplx align = std::abs(phase) > 0 ? std::conj(phase) / std::abs(phase) : cplx{1.0};
    for (std::size_t k = 0; k < len; ++k) change += std::norm(next[k] * align - v[k]);
    for (std::size_t k = 0; k < len; ++k) v[k] = next[k] * align;
    if (std::sqrt(change) < 1e-10) break;
  }
  return shared_direction(channels, powers, v, BeamMode::spot);
}

BeamMatrix unsteered_beams(const ChannelMatrix& channels, std::span<const double> powers) {
  const std::size_t len = channels.columns.empty() ? 0 : channels.columns.front().h.size();
  std::vector<cplx> e0(len);
  if (len) e0[0] = 1.0;
  return shared_direction(channels, powers, e0, BeamMode::color);
}

ColorPartition color_partition(const ChannelMatrix& channels, int num_colors) {
  if (num_colors != 2 && num_colors != 4) throw std::invalid_argument("color_partition: mode must be 2 or 4 colours");
  ColorPartition part;
  part.num_colors = num_colors;
  part.bandwidth_factor = num_colors == 4 ? 0.5 : 1.0;
  part.color.assign(channels.columns.size(), 0);
  for (std::size_t rank = 0; rank < channels.order.size(); ++rank)
    part.color[channels.order[rank]] = static_cast<int>(rank % num_colors);
  return part;
}

}  // namespace rnoma
