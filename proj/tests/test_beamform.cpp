#include <random>

#include "doctest.h"
#include "rnoma/beamform.hpp"

using namespace rnoma;

namespace {

std::vector<cplx> random_vec(std::mt19937_64& g, std::size_t n) {
  std::normal_distribution<double> d(0.0, 1.0);
  std::vector<cplx> v(n);
  for (auto& x : v) x = {d(g), d(g)};
  return v;
}

ChannelMatrix random_cell(std::mt19937_64& g, std::size_t users, std::size_t len) {
  std::vector<ChannelVector> cols(users);
  for (std::size_t i = 0; i < users; ++i) {
    cols[i].user_id = static_cast<int>(i);
    cols[i].h = random_vec(g, len);
    for (auto& x : cols[i].h) x *= 1e-4 * (1.0 + static_cast<double>(i));
    cols[i].gain = kernels::norm2(cols[i].h);
  }
  return make_channel_matrix(0, 0, std::move(cols));
}

}  // namespace

TEST_SUITE("beamform") {

TEST_CASE("matched filter beats random beams of equal power") {
  std::mt19937_64 g(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto h = random_vec(g, 8);
    const double p = 2.5;
    const auto beam = svd_beamformer(h, p);
    CHECK(kernels::norm2(beam.w) == doctest::Approx(p));
    CHECK(kernels::norm2(beam.direction) == doctest::Approx(1.0));
    const double best = kernels::inner_abs2(h, beam.w);
    CHECK(best == doctest::Approx(p * kernels::norm2(h)));
    for (int k = 0; k < 200; ++k) {
      auto w = random_vec(g, 8);
      const double s = std::sqrt(p / kernels::norm2(w));
      for (auto& x : w) x *= s;
      CHECK(kernels::inner_abs2(h, w) <= best * (1 + 1e-12));
    }
  }
}

TEST_CASE("zero channel yields a degenerate zero beam") {
  std::vector<cplx> h(4);
  const auto beam = svd_beamformer(h, 1.0);
  CHECK(beam.degenerate);
  CHECK(kernels::norm2(beam.w) == 0.0);
}

TEST_CASE("per-user beams carry the requested powers") {
  std::mt19937_64 g(4);
  const auto cell = random_cell(g, 4, 8);
  const std::vector<double> p{0.5, 1.0, 2.0, 4.0};
  const auto bm = per_user_beams(cell, p);
  REQUIRE(bm.w.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(kernels::norm2(bm.w[i]) == doctest::Approx(p[i]));
    CHECK(kernels::inner_abs2(cell.columns[i].h, bm.direction[i]) == doctest::Approx(cell.columns[i].gain));
  }
}

TEST_CASE("spot beam maximizes the weighted received power") {
  std::mt19937_64 g(8);
  const auto cell = random_cell(g, 4, 8);
  const std::vector<double> p{1.0, 2.0, 0.5, 1.5};
  const auto bm = spot_beam(cell, p);
  auto score = [&](std::span<const cplx> v) {
    double s = 0.0;
    for (std::size_t i = 0; i < 4; ++i) s += p[i] * kernels::inner_abs2(cell.columns[i].h, v);
    return s;
  };
  const auto& v = bm.direction.front();
  CHECK(kernels::norm2(v) == doctest::Approx(1.0));
  for (const auto& d : bm.direction) CHECK(kernels::inner_abs2(d, v) == doctest::Approx(1.0));
  const double best = score(v);
  for (int k = 0; k < 500; ++k) {
    auto w = random_vec(g, 8);
    const double s = 1.0 / std::sqrt(kernels::norm2(w));
    for (auto& x : w) x *= s;
    CHECK(score(w) <= best * (1 + 1e-9));
  }
}

TEST_CASE("colour partition alternates in gain order") {
  std::mt19937_64 g(2);
  const auto cell = random_cell(g, 4, 8);
  const auto two = color_partition(cell, 2);
  CHECK(two.bandwidth_factor == 1.0);
  const auto four = color_partition(cell, 4);
  CHECK(four.bandwidth_factor == 0.5);
  for (std::size_t rank = 0; rank < 4; ++rank) {
    CHECK(two.color[cell.order[rank]] == static_cast<int>(rank % 2));
    CHECK(four.color[cell.order[rank]] == static_cast<int>(rank));
  }
  CHECK_THROWS_AS(color_partition(cell, 3), std::invalid_argument);

  const auto flat = unsteered_beams(cell, std::vector<double>{1, 1, 1, 1});
  CHECK(flat.direction[0][0] == cplx{1.0});
  CHECK(kernels::norm2(flat.direction[2]) == doctest::Approx(1.0));
}

}  // TEST_SUITE
