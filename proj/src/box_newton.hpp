#pragma once

// Small dense projected-Newton / log-barrier machinery shared by the power
// solvers. Problems here have at most a few dozen variables.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace rnoma::detail {

// f0, its gradient and a positive semidefinite curvature model, plus a convex
// budget function G with the constraint G(x) <= 1.
struct Evaluation {
  double f0 = 0.0;
  std::vector<double> grad0;
  std::vector<double> hess0;  // n x n row-major
  double budget = 0.0;
  std::vector<double> budget_grad;
  std::vector<double> budget_hess;  // empty when G is affine
};

using Evaluator = std::function<void(const std::vector<double>& x, bool derivatives, Evaluation& out)>;

// Cholesky solve of H d = -g in place; returns false if H is not positive
// definite even after a small ridge.
inline bool solve_spd(std::vector<double> h, std::vector<double>& rhs, std::size_t n) {
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(h[i * n + i]));
  if (scale == 0.0) return false;
  for (double ridge : {0.0, 1e-12, 1e-9, 1e-6}) {
    std::vector<double> l = h;
    for (std::size_t i = 0; i < n; ++i) l[i * n + i] += ridge * scale;
    bool ok = true;
    for (std::size_t j = 0; j < n && ok; ++j) {
      double diag = l[j * n + j];
      for (std::size_t k = 0; k < j; ++k) diag -= l[j * n + k] * l[j * n + k];
      if (!(diag > 0.0)) {
        ok = false;
        break;
      }
      l[j * n + j] = std::sqrt(diag);
      for (std::size_t i = j + 1; i < n; ++i) {
        double v = l[i * n + j];
        for (std::size_t k = 0; k < j; ++k) v -= l[i * n + k] * l[j * n + k];
        l[i * n + j] = v / l[j * n + j];
      }
    }
    if (!ok) continue;
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      double v = rhs[i];
      for (std::size_t k = 0; k < i; ++k) v -= l[i * n + k] * y[k];
      y[i] = v / l[i * n + i];
    }
    for (std::size_t i = n; i-- > 0;) {
      double v = y[i];
      for (std::size_t k = i + 1; k < n; ++k) v -= l[k * n + i] * rhs[k];
      rhs[i] = v / l[i * n + i];
    }
    return true;
  }
  return false;
}

struct BarrierResult {
  std::vector<double> x;
  int newton_steps = 0;
  bool converged = false;
};

// Minimizes f0(x) - beta * log(1 - G(x)) over lo <= x <= hi for a decreasing
// sequence of beta. x0 must satisfy G(x0) < 1.
inline BarrierResult barrier_newton(const Evaluator& eval, std::vector<double> x, const std::vector<double>& lo,
                                    const std::vector<double>& hi, std::initializer_list<double> betas,
                                    int max_steps_per_stage = 60) {
  const std::size_t n = x.size();
  BarrierResult result;
  Evaluation ev;

  auto project = [&](std::vector<double>& v) {
    for (std::size_t i = 0; i < n; ++i) v[i] = std::clamp(v[i], lo[i], hi[i]);
  };
  auto total = [&](const std::vector<double>& v, double beta, double& value) -> bool {
    eval(v, false, ev);
    if (!(ev.budget < 1.0) || !std::isfinite(ev.f0)) return false;
    value = ev.f0 - beta * std::log1p(-ev.budget);
    return true;
  };

  project(x);
  bool stage_converged = false;
  for (double beta : betas) {
    stage_converged = false;
    for (int step = 0; step < max_steps_per_stage; ++step) {
      eval(x, true, ev);
      const double slack = 1.0 - ev.budget;
      if (!(slack > 0.0)) break;
      const double fx = ev.f0 - beta * std::log1p(-ev.budget);
      std::vector<double> g(n), h = ev.hess0;
      for (std::size_t i = 0; i < n; ++i) g[i] = ev.grad0[i] + beta * ev.budget_grad[i] / slack;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          double v = beta * ev.budget_grad[i] * ev.budget_grad[j] / (slack * slack);
          if (!ev.budget_hess.empty()) v += beta * ev.budget_hess[i * n + j] / slack;
          h[i * n + j] += v;
        }

      // Variables pinned at a bound with the gradient pushing outward stay put.
      std::vector<std::size_t> free;
      for (std::size_t i = 0; i < n; ++i) {
        const bool at_lo = x[i] <= lo[i] && g[i] > 0.0;
        const bool at_hi = x[i] >= hi[i] && g[i] < 0.0;
        if (!at_lo && !at_hi) free.push_back(i);
      }
      if (free.empty()) {
        stage_converged = true;
        break;
      }
      const std::size_t m = free.size();
      std::vector<double> hf(m * m), d(m);
      for (std::size_t a = 0; a < m; ++a) {
        d[a] = -g[free[a]];
        for (std::size_t b = 0; b < m; ++b) hf[a * m + b] = h[free[a] * n + free[b]];
      }
      if (!solve_spd(hf, d, m)) {
        for (std::size_t a = 0; a < m; ++a) d[a] = -g[free[a]] / std::max(std::abs(hf[a * m + a]), 1e-300);
      }
      double decrement = 0.0;
      for (std::size_t a = 0; a < m; ++a) decrement -= g[free[a]] * d[a];
      if (decrement <= 1e-15 * std::max(1.0, std::abs(fx))) {
        stage_converged = true;
        break;
      }

      bool moved = false;
      for (double alpha = 1.0; alpha > 1e-12; alpha *= 0.5) {
        std::vector<double> trial = x;
        for (std::size_t a = 0; a < m; ++a) trial[free[a]] += alpha * d[a];
        project(trial);
        double ft;
        if (!total(trial, beta, ft)) continue;
        double descent = 0.0;
        for (std::size_t i = 0; i < n; ++i) descent += g[i] * (trial[i] - x[i]);
        if (ft <= fx + 1e-4 * descent) {
          moved = ft < fx || descent < 0.0;
          x = std::move(trial);
          break;
        }
      }
      ++result.newton_steps;
      if (!moved) {
        stage_converged = true;
        break;
      }
    }
  }
  result.x = std::move(x);
  result.converged = stage_converged;
  return result;
}

}  // namespace rnoma::detail
