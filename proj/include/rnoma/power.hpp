#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rnoma/beamform.hpp"
#include "rnoma/channel.hpp"
#include "rnoma/scenario.hpp"

namespace rnoma {

// No allocation meets the rate floor. `user` is the index inside the cell
// instance (or -1 when no single user is to blame).
class InfeasibleError : public std::runtime_error {
 public:
  InfeasibleError(const std::string& what, int user) : std::runtime_error(what), user_(user) {}
  int user() const { return user_; }

 private:
  int user_;
};

class UnsupportedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One cell's power problem with beams fixed. Users are indexed in decoding
// order (descending effective gain); coupling[i * n + j] = |h_i^H v_j|^2 with
// unit-norm beam directions v_j, so user i receives c_ij * p_j from beam j.
struct CellInstance {
  std::size_t n = 0;
  std::vector<double> coupling;
  double bandwidth_hz = 0.0;
  double noise_w = 0.0;
  double p_budget_w = 0.0;
  double r_min_bps = 0.0;
  std::vector<double> demands_bps;
  std::vector<double> weights;  // empty: all ones
  double kappa = 0.0;
  int mu = 1;
  SicOrder sic_order = SicOrder::printed;

  double c(std::size_t i, std::size_t j) const { return coupling[i * n + j]; }
  double gain(std::size_t i) const { return coupling[i * n + i]; }
  double weight(std::size_t i) const { return weights.empty() ? 1.0 : weights[i]; }
  // Fraction of beam j's power left as interference at user i.
  double leakage(std::size_t i, std::size_t j) const;
};

// Builds an instance for the listed columns of `channels`, re-sorted by
// descending effective gain |h_i^H v_i|^2. `perm` receives the column index of
// each instance user.
CellInstance make_instance(const ChannelMatrix& channels, const BeamMatrix& beams,
                           std::span<const std::size_t> columns, std::span<const double> demands_bps,
                           const ScenarioConfig& config, double bandwidth_hz, double noise_w, double p_budget_w,
                           std::vector<std::size_t>& perm);

struct PowerAllocation {
  std::vector<double> p;
  std::vector<double> aux;  // xi_minus(full budget) - xi_minus(p), per user, bps
  std::vector<double> rates;
  std::vector<double> target_rates;  // convex model only
  int iterations = 0;
  bool converged = false;
  double objective = 0.0;  // sum_i w_i (R_i - D_i)^2
};

std::vector<double> sinr(const CellInstance& cell, std::span<const double> p);

// B log2(1 + gamma), zero when mu == 0.
std::vector<double> achievable_rate(std::span<const double> gamma, double bandwidth_hz, int mu = 1);
std::vector<double> achievable_rate(const CellInstance& cell, std::span<const double> p);

// R_i = xi_plus_i - xi_minus_i with
// xi_plus_i = B log2(sigma^2 + signal_i + interference_i) and
// xi_minus_i = B log2(sigma^2 + interference_i).
struct XiDecomposition {
  std::vector<double> plus;
  std::vector<double> minus;
};
XiDecomposition xi_decompose(const CellInstance& cell, std::span<const double> p);

double gap_objective(const CellInstance& cell, std::span<const double> rates);

// Closed-form minimum powers delivering `rates` without leakage. `gains` must
// be non-increasing; throws std::invalid_argument otherwise.
std::vector<double> cascade_powers(std::span<const double> rates_bps, std::span<const double> gains, double noise_w,
                                   double bandwidth_hz);

// Sum of cascade_powers written as a sum of exponentials of partial rate sums.
double cascade_total_power(std::span<const double> rates_bps, std::span<const double> gains, double noise_w,
                           double bandwidth_hz);

// Exact inverse of the SINR map for the instance coupling (including leakage
// and kappa). Returns false when the targets are not reachable with
// non-negative powers.
bool powers_for_rates(const CellInstance& cell, std::span<const double> rates_bps, std::vector<double>& p);

// Convex rate-space formulation: minimize sum w (R - D)^2 over
// r_min <= R <= D with the cascade power sum within budget. Requires kappa == 0
// (UnsupportedError) and ordered gains.
PowerAllocation expcone_power_solve(const CellInstance& cell, const SolverParams& params);

// Each user on its own orthogonal share `share_i` of the band; noise scales
// with the share. Same objective and box as the convex model.
PowerAllocation orthogonal_power_solve(const CellInstance& cell, std::span<const double> share,
                                       const SolverParams& params);

// Non-convex power-space solver. Iteratively linearizes xi_minus at the
// current point and solves the resulting convex subproblem; steps are kept
// only when the true objective improves. `initial` may be empty.
PowerAllocation monotonic_power_solve(const CellInstance& cell, const SolverParams& params,
                                      std::span<const double> initial = {});

}  // namespace rnoma
