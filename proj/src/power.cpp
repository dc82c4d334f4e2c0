#include "rnoma/power.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "box_newton.hpp"
#include "rnoma/kernels.hpp"

namespace rnoma {

namespace {

constexpr double kLn2 = 0.69314718055994530942;
constexpr std::initializer_list<double> kBetas = {1e-2, 1e-4, 1e-6, 1e-8, 1e-10, 1e-12, 1e-14};

double max_weight(const CellInstance& cell) {
  double w = 0.0;
  for (std::size_t i = 0; i < cell.n; ++i) w = std::max(w, cell.weight(i));
  return w > 0.0 ? w : 1.0;
}

PowerAllocation silent_allocation(const CellInstance& cell) {
  PowerAllocation out;
  out.p.assign(cell.n, 0.0);
  out.aux.assign(cell.n, 0.0);
  out.rates.assign(cell.n, 0.0);
  out.target_rates.assign(cell.n, 0.0);
  out.converged = true;
  out.objective = gap_objective(cell, out.rates);
  return out;
}

void check_sizes(const CellInstance& cell) {
  if (cell.coupling.size() != cell.n * cell.n || cell.demands_bps.size() != cell.n ||
      (!cell.weights.empty() && cell.weights.size() != cell.n))
    throw std::invalid_argument("cell instance: inconsistent sizes");
  if (!(cell.bandwidth_hz > 0.0) || !(cell.noise_w > 0.0) || cell.p_budget_w < 0.0)
    throw std::invalid_argument("cell instance: bandwidth, noise and budget must be positive");
}

// Rate-space problem shared by the convex and orthogonal models: minimize
// sum w (r - d)^2 over lo <= r <= d subject to budget(r) <= 1, r in units of B.
struct RateSpace {
  std::vector<double> d, lo, w;
  std::function<double(const std::vector<double>&)> budget;
  std::function<void(const std::vector<double>&, std::vector<double>&, std::vector<double>&)> budget_derivs;
};

std::vector<double> solve_rate_space(const RateSpace& prob, int& steps, bool& converged) {
  const std::size_t n = prob.d.size();
  steps = 0;
  converged = true;
  if (prob.budget(prob.d) <= 1.0) return prob.d;
  if (prob.budget(prob.lo) >= 1.0 - 1e-13) return prob.lo;

  detail::Evaluator eval = [&](const std::vector<double>& r, bool derivs, detail::Evaluation& ev) {
    ev.f0 = 0.0;
    for (std::size_t i = 0; i < n; ++i) ev.f0 += prob.w[i] * (r[i] - prob.d[i]) * (r[i] - prob.d[i]);
    ev.budget = prob.budget(r);
    if (!derivs) return;
    ev.grad0.assign(n, 0.0);
    ev.hess0.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      ev.grad0[i] = 2.0 * prob.w[i] * (r[i] - prob.d[i]);
      ev.hess0[i * n + i] = 2.0 * prob.w[i];
    }
    prob.budget_derivs(r, ev.budget_grad, ev.budget_hess);
  };
  auto res = detail::barrier_newton(eval, prob.lo, prob.lo, prob.d, kBetas);
  steps = res.newton_steps;
  converged = res.converged;
  return res.x;
}

int first_over_budget(std::span<const double> p, double budget) {
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    acc += p[i];
    if (acc > budget) return static_cast<int>(i);
  }
  return p.empty() ? -1 : static_cast<int>(p.size()) - 1;
}

}  // namespace

double CellInstance::leakage(std::size_t i, std::size_t j) const {
  if (i == j) return 0.0;
  const bool before = j < i;
  const bool seen = sic_order == SicOrder::printed ? before : !before;
  return seen ? 1.0 : kappa;
}

CellInstance make_instance(const ChannelMatrix& channels, const BeamMatrix& beams,
                           std::span<const std::size_t> columns, std::span<const double> demands_bps,
                           const ScenarioConfig& config, double bandwidth_hz, double noise_w, double p_budget_w,
                           std::vector<std::size_t>& perm) {
  if (demands_bps.size() != columns.size()) throw std::invalid_argument("make_instance: demand count mismatch");
  const std::size_t n = columns.size();
  std::vector<double> own(n);
  for (std::size_t a = 0; a < n; ++a) {
    const auto& h = channels.columns.at(columns[a]).h;
    own[a] = kernels::inner_abs2(h, beams.direction.at(columns[a]));
  }
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return own[a] > own[b]; });

  CellInstance cell;
  cell.n = n;
  cell.coupling.resize(n * n);
  cell.demands_bps.resize(n);
  perm.resize(n);
  for (std::size_t a = 0; a < n; ++a) {
    perm[a] = columns[idx[a]];
    cell.demands_bps[a] = demands_bps[idx[a]];
  }
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      cell.coupling[a * n + b] = kernels::inner_abs2(channels.columns[perm[a]].h, beams.direction[perm[b]]);
  cell.bandwidth_hz = bandwidth_hz;
  cell.noise_w = noise_w;
  cell.p_budget_w = p_budget_w;
  cell.r_min_bps = config.min_rate_bps;
  cell.kappa = config.ipSIC_factor;
  cell.sic_order = config.sic_order;
  return cell;
}

std::vector<double> sinr(const CellInstance& cell, std::span<const double> p) {
  if (p.size() != cell.n) throw std::invalid_argument("sinr: power vector size mismatch");
  std::vector<double> gamma(cell.n);
  for (std::size_t i = 0; i < cell.n; ++i) {
    double interference = 0.0;
    for (std::size_t j = 0; j < cell.n; ++j) interference += cell.leakage(i, j) * cell.c(i, j) * p[j];
    gamma[i] = cell.gain(i) * p[i] / (interference + cell.noise_w);
  }
  return gamma;
}

std::vector<double> achievable_rate(std::span<const double> gamma, double bandwidth_hz, int mu) {
  std::vector<double> r(gamma.size(), 0.0);
  if (mu == 0) return r;
  for (std::size_t i = 0; i < gamma.size(); ++i) r[i] = bandwidth_hz * std::log2(1.0 + gamma[i]);
  return r;
}

std::vector<double> achievable_rate(const CellInstance& cell, std::span<const double> p) {
  return achievable_rate(sinr(cell, p), cell.bandwidth_hz, cell.mu);
}

XiDecomposition xi_decompose(const CellInstance& cell, std::span<const double> p) {
  if (p.size() != cell.n) throw std::invalid_argument("xi_decompose: power vector size mismatch");
  XiDecomposition xi;
  xi.plus.resize(cell.n);
  xi.minus.resize(cell.n);
  for (std::size_t i = 0; i < cell.n; ++i) {
    double interference = 0.0;
    for (std::size_t j = 0; j < cell.n; ++j) interference += cell.leakage(i, j) * cell.c(i, j) * p[j];
    xi.plus[i] = cell.bandwidth_hz * std::log2(cell.noise_w + cell.gain(i) * p[i] + interference);
    xi.minus[i] = cell.bandwidth_hz * std::log2(cell.noise_w + interference);
  }
  return xi;
}

double gap_objective(const CellInstance& cell, std::span<const double> rates) {
  double total = 0.0;
  for (std::size_t i = 0; i < cell.n; ++i) {
    const double gap = rates[i] - cell.demands_bps[i];
    total += cell.weight(i) * gap * gap;
  }
  return total;
}

static void check_ordered(std::span<const double> gains) {
  for (std::size_t i = 0; i < gains.size(); ++i) {
    if (!(gains[i] > 0.0)) throw std::invalid_argument("cascade: gains must be positive");
    if (i > 0 && gains[i] > gains[i - 1]) throw std::invalid_argument("cascade: gains must be non-increasing");
  }
}

std::vector<double> cascade_powers(std::span<const double> rates_bps, std::span<const double> gains, double noise_w,
                                   double bandwidth_hz) {
  if (rates_bps.size() != gains.size()) throw std::invalid_argument("cascade: size mismatch");
  check_ordered(gains);
  std::vector<double> p(gains.size());
  double before = 0.0;
  for (std::size_t i = 0; i < gains.size(); ++i) {
    p[i] = std::expm1(kLn2 * rates_bps[i] / bandwidth_hz) * (before + noise_w / gains[i]);
    before += p[i];
  }
  return p;
}

double cascade_total_power(std::span<const double> rates_bps, std::span<const double> gains, double noise_w,
                           double bandwidth_hz) {
  if (rates_bps.size() != gains.size()) throw std::invalid_argument("cascade: size mismatch");
  check_ordered(gains);
  const std::size_t n = gains.size();
  if (n == 0) return 0.0;
  double total = 0.0, tail = 0.0, prev = 0.0;
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    tail += rates_bps[i] / bandwidth_hz;
    x[i] = tail;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double inv = noise_w / gains[i];
    total += (inv - prev) * std::exp2(x[i]);
    prev = inv;
  }
  return total - prev;
}

bool powers_for_rates(const CellInstance& cell, std::span<const double> rates_bps, std::vector<double>& p) {
  const std::size_t n = cell.n;
  std::vector<double> a(n * n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double gamma = std::expm1(kLn2 * rates_bps[i] / cell.bandwidth_hz);
    for (std::size_t j = 0; j < n; ++j)
      a[i * n + j] = i == j ? cell.gain(i) : -gamma * cell.leakage(i, j) * cell.c(i, j);
    b[i] = gamma * cell.noise_w;
  }
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r * n + col]) > std::abs(a[piv * n + col])) piv = r;
    if (a[piv * n + col] == 0.0) return false;
    if (piv != col) {
      for (std::size_t k = 0; k < n; ++k) std::swap(a[col * n + k], a[piv * n + k]);
      std::swap(b[col], b[piv]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r * n + col] / a[col * n + col];
      for (std::size_t k = col; k < n; ++k) a[r * n + k] -= f * a[col * n + k];
      b[r] -= f * b[col];
    }
  }
  p.assign(n, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    double v = b[i];
    for (std::size_t k = i + 1; k < n; ++k) v -= a[i * n + k] * p[k];
    p[i] = v / a[i * n + i];
    if (!std::isfinite(p[i])) return false;
  }
  for (double& v : p) {
    if (v < -1e-12 * cell.p_budget_w - 1e-300) return false;
    v = std::max(v, 0.0);
  }
  return true;
}

PowerAllocation expcone_power_solve(const CellInstance& cell, const SolverParams& params) {
  (void)params;
  check_sizes(cell);
  if (cell.kappa > 0.0) throw UnsupportedError("convex power model requires perfect SIC (ipSIC_factor = 0)");
  if (cell.sic_order != SicOrder::printed) throw UnsupportedError("convex power model requires the printed SIC order");
  if (cell.n == 0) return {};
  if (cell.mu == 0) return silent_allocation(cell);

  std::vector<double> gains(cell.n);
  for (std::size_t i = 0; i < cell.n; ++i) gains[i] = cell.gain(i);
  check_ordered(gains);

  const std::size_t n = cell.n;
  const double B = cell.bandwidth_hz, P = cell.p_budget_w;
  const double wmax = max_weight(cell);
  RateSpace prob;
  prob.d.resize(n);
  prob.lo.resize(n);
  prob.w.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    prob.d[i] = cell.demands_bps[i] / B;
    prob.lo[i] = std::min(cell.r_min_bps / B, prob.d[i]);
    prob.w[i] = cell.weight(i) / wmax;
  }
  // a_i = (sigma^2/g_i - sigma^2/g_{i-1}) / P; budget = sum a_i 2^{x_i} - sigma^2/(g_N P).
  std::vector<double> coef(n);
  double prev = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double inv = cell.noise_w / gains[i];
    coef[i] = (inv - prev) / (P > 0.0 ? P : 1e-300);
    prev = inv;
  }
  const double offset = prev / (P > 0.0 ? P : 1e-300);
  auto tails = [n](const std::vector<double>& r) {
    std::vector<double> x(n);
    double t = 0.0;
    for (std::size_t i = n; i-- > 0;) {
      t += r[i];
      x[i] = t;
    }
    return x;
  };
  prob.budget = [&, tails](const std::vector<double>& r) {
    const auto x = tails(r);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += coef[i] * std::exp2(x[i]);
    return s - offset;
  };
  prob.budget_derivs = [&, tails](const std::vector<double>& r, std::vector<double>& g, std::vector<double>& h) {
    const auto x = tails(r);
    std::vector<double> term(n), cum(n);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      term[i] = coef[i] * std::exp2(x[i]);
      acc += term[i];
      cum[i] = acc;
    }
    g.resize(n);
    h.resize(n * n);
    for (std::size_t k = 0; k < n; ++k) {
      g[k] = kLn2 * cum[k];
      for (std::size_t l = 0; l < n; ++l) h[k * n + l] = kLn2 * kLn2 * cum[std::min(k, l)];
    }
  };

  if (prob.budget(prob.lo) > 1.0 + 1e-12) {
    std::vector<double> floor(n);
    for (std::size_t i = 0; i < n; ++i) floor[i] = prob.lo[i] * B;
    const auto p_floor = cascade_powers(floor, gains, cell.noise_w, B);
    const int who = first_over_budget(p_floor, P);
    throw InfeasibleError("rate floor needs more than the power budget at user " + std::to_string(who), who);
  }

  PowerAllocation out;
  const auto r = solve_rate_space(prob, out.iterations, out.converged);
  out.target_rates.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.target_rates[i] = r[i] * B;
  out.p = cascade_powers(out.target_rates, gains, cell.noise_w, B);
  const double total = std::accumulate(out.p.begin(), out.p.end(), 0.0);
  if (total > P) {
    for (double& v : out.p) v *= P / total;
  }
  out.aux.assign(n, 0.0);
  out.rates = achievable_rate(cell, out.p);
  out.objective = gap_objective(cell, out.rates);
  return out;
}

PowerAllocation orthogonal_power_solve(const CellInstance& cell, std::span<const double> share,
                                       const SolverParams& params) {
  (void)params;
  check_sizes(cell);
  if (share.size() != cell.n) throw std::invalid_argument("orthogonal: share size mismatch");
  if (cell.n == 0) return {};
  if (cell.mu == 0) return silent_allocation(cell);
  const std::size_t n = cell.n;
  const double B = cell.bandwidth_hz, P = cell.p_budget_w;
  const double wmax = max_weight(cell);
  std::vector<double> coef(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(share[i] > 0.0)) throw std::invalid_argument("orthogonal: shares must be positive");
    coef[i] = cell.noise_w * share[i] / (cell.gain(i) * (P > 0.0 ? P : 1e-300));
  }
  RateSpace prob;
  prob.d.resize(n);
  prob.lo.resize(n);
  prob.w.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    prob.d[i] = cell.demands_bps[i] / B;
    prob.lo[i] = std::min(cell.r_min_bps / B, prob.d[i]);
    prob.w[i] = cell.weight(i) / wmax;
  }
  prob.budget = [&](const std::vector<double>& r) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += coef[i] * std::expm1(kLn2 * r[i] / share[i]);
    return s;
  };
  prob.budget_derivs = [&](const std::vector<double>& r, std::vector<double>& g, std::vector<double>& h) {
    g.assign(n, 0.0);
    h.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double e = coef[i] * std::exp2(r[i] / share[i]);
      g[i] = kLn2 / share[i] * e;
      h[i * n + i] = kLn2 * kLn2 / (share[i] * share[i]) * e;
    }
  };
  auto powers = [&](const std::vector<double>& r) {
    std::vector<double> p(n);
    for (std::size_t i = 0; i < n; ++i)
      p[i] = cell.noise_w * share[i] / cell.gain(i) * std::expm1(kLn2 * r[i] / share[i]);
    return p;
  };
  if (prob.budget(prob.lo) > 1.0 + 1e-12) {
    const int who = first_over_budget(powers(prob.lo), P);
    throw InfeasibleError("rate floor needs more than the power budget at user " + std::to_string(who), who);
  }
  PowerAllocation out;
  const auto r = solve_rate_space(prob, out.iterations, out.converged);
  out.p = powers(r);
  const double total = std::accumulate(out.p.begin(), out.p.end(), 0.0);
  if (total > P) {
    for (double& v : out.p) v *= P / total;
  }
  out.rates.resize(n);
  out.target_rates.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.target_rates[i] = r[i] * B;
    const double snr = cell.gain(i) * out.p[i] / (cell.noise_w * share[i]);
    out.rates[i] = share[i] * B * std::log2(1.0 + snr);
  }
  out.aux.assign(n, 0.0);
  out.objective = gap_objective(cell, out.rates);
  return out;
}

namespace {

// Power-space model in budget-normalized units: q = p / P, rates in units of B.
struct Normalized {
  std::size_t n = 0;
  std::vector<double> a;  // a[i*n+j]: SNR contribution of q_j at user i (leakage applied off-diagonal)
  std::vector<double> d, w;
  double rmin = 0.0;

  double total_in(std::size_t i, const std::vector<double>& q) const {
    double t = 1.0;
    for (std::size_t j = 0; j < n; ++j) t += a[i * n + j] * q[j];
    return t;
  }
  double interference_in(std::size_t i, const std::vector<double>& q) const {
    return total_in(i, q) - a[i * n + i] * q[i];
  }
  std::vector<double> rates(const std::vector<double>& q) const {
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n; ++i) r[i] = std::log2(total_in(i, q) / interference_in(i, q));
    return r;
  }
  double objective(const std::vector<double>& q) const {
    const auto r = rates(q);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      s += w[i] * (r[i] - d[i]) * (r[i] - d[i]);
      const double viol = rmin - r[i];
      if (viol > 0.0) s += kFloorPenalty * viol * viol;
    }
    return s;
  }
  static constexpr double kFloorPenalty = 1e3;
};

struct CcpResult {
  std::vector<double> q;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
};

CcpResult run_ccp(const Normalized& m, std::vector<double> q, const SolverParams& params) {
  const std::size_t n = m.n;
  CcpResult out;
  double sum = std::accumulate(q.begin(), q.end(), 0.0);
  if (sum >= 1.0 - 1e-12) {
    for (double& v : q) v *= (1.0 - 1e-9) / sum;
  }
  double phi = m.objective(q);
  const int max_outer = std::min(params.max_iters, 200);
  std::vector<double> lin(n * n), lin_const(n);

  for (int it = 0; it < max_outer; ++it) {
    out.iterations = it + 1;
    for (std::size_t i = 0; i < n; ++i) {
      const double ti = m.interference_in(i, q);
      double dot = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        lin[i * n + j] = j == i ? 0.0 : m.a[i * n + j] / (kLn2 * ti);
        dot += lin[i * n + j] * q[j];
      }
      lin_const[i] = std::log2(ti) - dot;
    }
    detail::Evaluator eval = [&](const std::vector<double>& x, bool derivs, detail::Evaluation& ev) {
      ev.f0 = 0.0;
      ev.budget = std::accumulate(x.begin(), x.end(), 0.0);
      if (derivs) {
        ev.grad0.assign(n, 0.0);
        ev.hess0.assign(n * n, 0.0);
        ev.budget_grad.assign(n, 1.0);
        ev.budget_hess.clear();
      }
      std::vector<double> grad(n);
      for (std::size_t i = 0; i < n; ++i) {
        const double t = m.total_in(i, x);
        double lin_dot = 0.0;
        for (std::size_t j = 0; j < n; ++j) lin_dot += lin[i * n + j] * x[j];
        const double r_hat = std::log2(t) - lin_dot - lin_const[i];
        const double res = r_hat - m.d[i];
        const double viol = std::max(m.rmin - r_hat, 0.0);
        ev.f0 += m.w[i] * res * res + Normalized::kFloorPenalty * viol * viol;
        if (!derivs) continue;
        for (std::size_t j = 0; j < n; ++j) grad[j] = m.a[i * n + j] / (kLn2 * t) - lin[i * n + j];
        // Gauss-Newton plus the curvature terms that keep the model convex.
        const double outer = 2.0 * m.w[i] + (viol > 0.0 ? 2.0 * Normalized::kFloorPenalty : 0.0);
        const double curv = (2.0 * m.w[i] * std::max(-res, 0.0) + 2.0 * Normalized::kFloorPenalty * viol) /
                            (kLn2 * t * t);
        const double slope = 2.0 * m.w[i] * res - 2.0 * Normalized::kFloorPenalty * viol;
        for (std::size_t j = 0; j < n; ++j) {
          ev.grad0[j] += slope * grad[j];
          for (std::size_t k = 0; k < n; ++k)
            ev.hess0[j * n + k] += outer * grad[j] * grad[k] + curv * m.a[i * n + j] * m.a[i * n + k];
        }
      }
    };
    const std::vector<double> lo(n, 0.0), hi(n, 1.0);
    auto sub = detail::barrier_newton(eval, q, lo, hi, {1e-6, 1e-9, 1e-12, 1e-15}, 40);

    // Keep the step only if the true objective improves; otherwise shorten it.
    std::vector<double> cand = sub.x;
    double cand_phi = m.objective(cand);
    for (int shrink = 0; shrink < 4 && !(cand_phi < phi); ++shrink) {
      for (std::size_t j = 0; j < n; ++j) cand[j] = 0.5 * (cand[j] + q[j]);
      cand_phi = m.objective(cand);
    }
    if (!(cand_phi < phi)) {
      out.converged = true;
      break;
    }
    const double gain = phi - cand_phi;
    q = std::move(cand);
    phi = cand_phi;
    if (gain <= params.tol * std::max(phi, 1e-12) || phi <= 1e-24) {
      out.converged = true;
      break;
    }
  }
  out.q = std::move(q);
  out.objective = phi;
  return out;
}

}  // namespace

PowerAllocation monotonic_power_solve(const CellInstance& cell, const SolverParams& params,
                                      std::span<const double> initial) {
  check_sizes(cell);
  const std::size_t n = cell.n;
  if (n == 0) return {};
  if (cell.mu == 0) return silent_allocation(cell);
  const double B = cell.bandwidth_hz, P = cell.p_budget_w;

  for (std::size_t i = 0; i < n; ++i) {
    const double alone = B * std::log2(1.0 + cell.gain(i) * P / cell.noise_w);
    if (alone < cell.r_min_bps)
      throw InfeasibleError("user " + std::to_string(i) + " cannot reach the rate floor with the full budget",
                            static_cast<int>(i));
  }

  Normalized m;
  m.n = n;
  m.a.resize(n * n);
  m.d.resize(n);
  m.w.resize(n);
  const double wmax = max_weight(cell);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j)
      m.a[i * n + j] = (i == j ? 1.0 : cell.leakage(i, j)) * cell.c(i, j) * P / cell.noise_w;
    m.d[i] = cell.demands_bps[i] / B;
    m.w[i] = cell.weight(i) / wmax;
  }
  m.rmin = cell.r_min_bps / B;

  std::vector<std::vector<double>> starts;
  if (initial.size() == n && P > 0.0) {
    std::vector<double> q(n);
    for (std::size_t i = 0; i < n; ++i) q[i] = std::max(initial[i], 0.0) / P;
    const double s = std::accumulate(q.begin(), q.end(), 0.0);
    if (s > 0.0) {
      if (s > 1.0)
        for (double& v : q) v /= s;
      starts.push_back(std::move(q));
    }
  }
  starts.emplace_back(n, 1.0 / static_cast<double>(n));
  {
    // Largest common fraction of the demands reachable exactly with the true coupling.
    std::vector<double> best, p, target(n);
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 50; ++it) {
      const double t = it == 0 ? 1.0 : 0.5 * (lo + hi);
      for (std::size_t i = 0; i < n; ++i) target[i] = t * cell.demands_bps[i];
      const bool ok = powers_for_rates(cell, target, p) && std::accumulate(p.begin(), p.end(), 0.0) <= P;
      if (ok) {
        best = p;
        lo = t;
        if (it == 0) break;
      } else {
        hi = t;
      }
    }
    if (!best.empty()) {
      for (double& v : best) v /= P;
      starts.push_back(std::move(best));
    }
  }

  CcpResult winner;
  bool have = false;
  int iterations = 0;
  for (auto& s : starts) {
    auto r = run_ccp(m, s, params);
    iterations += r.iterations;
    if (!have || r.objective < winner.objective) {
      winner = std::move(r);
      have = true;
    }
  }

  PowerAllocation out;
  out.p.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.p[i] = winner.q[i] * P;
  const double total = std::accumulate(out.p.begin(), out.p.end(), 0.0);
  if (total > P) {
    for (double& v : out.p) v *= P / total;
  }
  // Headroom of the interference term: xi_minus with every other user at the
  // full budget minus xi_minus at the solution.
  const auto xi = xi_decompose(cell, out.p);
  out.aux.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double worst = 0.0;
    for (std::size_t j = 0; j < n; ++j) worst += cell.leakage(i, j) * cell.c(i, j) * P;
    out.aux[i] = B * std::log2(cell.noise_w + worst) - xi.minus[i];
  }
  out.rates = achievable_rate(cell, out.p);
  out.iterations = iterations;
  out.converged = winner.converged;
  out.objective = gap_objective(cell, out.rates);
  for (std::size_t i = 0; i < n; ++i) {
    if (out.rates[i] < cell.r_min_bps * (1.0 - 1e-6))
      throw InfeasibleError("no allocation keeps user " + std::to_string(i) + " above the rate floor",
                            static_cast<int>(i));
  }
  return out;
}

}  // namespace rnoma
