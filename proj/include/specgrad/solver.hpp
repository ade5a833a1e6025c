//
// specgrad - Copyright 2026 the specgrad authors.
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "specgrad/problems.hpp"
#include "specgrad/stepsize.hpp"
#include "specgrad/vector_ops.hpp"

namespace specgrad {

enum class SolveStatus { Converged, MaxIter, MaxFeval, LineSearchFailure, NumericalBreakdown };

inline std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "Converged";
    case SolveStatus::MaxIter: return "MaxIter";
    case SolveStatus::MaxFeval: return "MaxFeval";
    case SolveStatus::LineSearchFailure: return "LineSearchFailure";
    case SolveStatus::NumericalBreakdown: return "NumericalBreakdown";
  }
  return "?";
}

inline SolveStatus solve_status_from_string(const std::string& s) {
  if (s == "Converged") return SolveStatus::Converged;
  if (s == "MaxIter") return SolveStatus::MaxIter;
  if (s == "MaxFeval") return SolveStatus::MaxFeval;
  if (s == "LineSearchFailure") return SolveStatus::LineSearchFailure;
  if (s == "NumericalBreakdown") return SolveStatus::NumericalBreakdown;
  throw std::invalid_argument("unknown solve status '" + s + "'");
}

struct SolverConfig {
  double epsilon = 1e-6;    // stop when ||g_k|| <= epsilon * ||g_1||
  int max_iter = 20000;
  long max_feval = 100000;
  double alpha_min = 1e-30;
  double alpha_max = 1e30;
  int memory = 10;          // nonmonotone window M
  double sigma = 1e-4;      // sufficient-decrease coefficient
  double delta = 0.5;       // backtracking contraction
  int max_backtracks = 100; // per outer iteration
  bool record_iterations = true;

  // Optional proximity stop ||x_k - target|| < target_radius (Rosenbrock study).
  std::optional<Vector> target_point;
  double target_radius = 0.0;

  void validate() const {
    if (!(alpha_min > 0.0 && alpha_min < alpha_max))
      throw std::invalid_argument("SolverConfig: need 0 < alpha_min < alpha_max");
    if (!(sigma > 0.0 && sigma < 1.0)) throw std::invalid_argument("SolverConfig: sigma in (0,1)");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("SolverConfig: delta in (0,1)");
    if (memory < 1) throw std::invalid_argument("SolverConfig: memory must be >= 1");
    if (max_iter < 1) throw std::invalid_argument("SolverConfig: max_iter must be >= 1");
  }
};

struct IterationRecord {
  int k = 0;
  double alpha = 0.0;
  std::optional<double> m;     // pbb interpolation weight, when applicable
  double grad_norm = 0.0;
  double f = 0.0;
  std::optional<double> cos2;  // undefined at k = 1
  long fevals = 0;
  int backtracks = 0;
};

struct Trace {
  std::vector<IterationRecord> rows;
  SolveStatus status = SolveStatus::MaxIter;
  int iterations = 0;
  long fevals = 0;
  double grad_norm_initial = 0.0;
  double grad_norm_final = 0.0;
  double f_final = 0.0;
  Vector x_final;

  double grad_ratio() const {
    return (grad_norm_initial > 0.0) ? grad_norm_final / grad_norm_initial : 0.0;
  }

  /// CSV rows (k, alpha, m_k, grad_norm, f, cos2, fevals, backtracks) followed
  /// by one summary line.
  void write_csv(std::ostream& os) const {
    auto num = [](double v) {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", v);
      return std::string(buf);
    };
    os << "k,alpha,m_k,grad_norm,f,cos2,fevals,backtracks\n";
    for (const auto& r : rows) {
      os << r.k << ',' << num(r.alpha) << ',' << (r.m ? num(*r.m) : "") << ',' << num(r.grad_norm)
         << ',' << num(r.f) << ',' << (r.cos2 ? num(*r.cos2) : "") << ',' << r.fevals << ','
         << r.backtracks << '\n';
    }
    os << "summary," << to_string(status) << ",iterations=" << iterations << ",fevals=" << fevals
       << ",grad_ratio=" << num(grad_ratio()) << '\n';
  }
};

/// Nonmonotone acceptance: f_trial may not exceed the worst of the recent
/// accepted values minus sigma*gamma*(1/alpha)*g^T g.
inline bool gll_accept(double f_trial, std::span<const double> history, double sigma, double gamma,
                       double alpha, double gsq) {
  if (history.empty()) throw std::invalid_argument("gll_accept: empty history");
  const double worst = *std::max_element(history.begin(), history.end());
  return f_trial <= worst - sigma * gamma * (1.0 / alpha) * gsq;
}

/// Observer for the quadratic driver: called once per iteration with the
/// current gradient and the step scalar about to be applied.
using QuadObserver = std::function<void(int k, const Vector& g, double alpha)>;

/// Fixed-point iteration x <- x - (1/alpha) g for an SPD quadratic, no line
/// search. The first step is the exact Cauchy step; afterwards alpha comes from
/// the rule, clamped into [alpha_min, alpha_max]. The gradient is advanced by
/// the exact recurrence g <- g - (1/alpha) A g, reusing A g for the (s,y)
/// products, so each iteration costs one operator application.
inline Trace solve_quadratic(const QuadraticProblem& problem, const RuleConfig& rule,
                             const SolverConfig& cfg, const Vector& x1,
                             const QuadObserver& observer = {}) {
  cfg.validate();
  const int n = problem.dimension();
  if (static_cast<int>(x1.size()) != n)
    throw std::invalid_argument("solve_quadratic: start point dimension mismatch");

  Trace trace;
  Vector d = subtract(x1, problem.minimizer);  // x - x*
  Vector g = problem.apply(d);
  double gg = dot(g, g);
  trace.grad_norm_initial = std::sqrt(gg);
  const double stop_norm = cfg.epsilon * trace.grad_norm_initial;

  RuleState state;
  // Products of the previous iteration, for the next (s,y) pair.
  double prev_gg = 0.0, prev_gw = 0.0, prev_ww = 0.0, prev_alpha = 0.0;
  bool have_pair = false;

  int k = 1;
  trace.status = SolveStatus::MaxIter;
  while (true) {
    const double gnorm = std::sqrt(gg);
    if (!std::isfinite(gnorm)) {
      trace.status = SolveStatus::NumericalBreakdown;
      break;
    }
    if (gnorm <= stop_norm) {
      trace.status = SolveStatus::Converged;
      break;
    }
    if (k > cfg.max_iter) {
      trace.status = SolveStatus::MaxIter;
      break;
    }

    const Vector w = problem.apply(g);
    const double gw = dot(g, w);
    const double ww = dot(w, w);

    double alpha;
    if (!have_pair) {
      alpha = gw / gg;  // exact Cauchy step on the first iteration
    } else {
      const double inv2 = 1.0 / (prev_alpha * prev_alpha);
      const StepPair pair = StepPair::from_products(prev_gg * inv2, prev_gw * inv2, prev_ww * inv2);
      state.k = k;
      alpha = next_alpha(rule, state, pair);
    }
    alpha = std::clamp(alpha, cfg.alpha_min, cfg.alpha_max);
    state.prev_alpha = alpha;

    if (observer) observer(k, g, alpha);
    if (cfg.record_iterations) {
      IterationRecord row;
      row.k = k;
      row.alpha = alpha;
      row.m = state.last_m;
      row.grad_norm = gnorm;
      row.f = 0.5 * dot(d, g);
      if (have_pair) {
        const StepPair pair = StepPair::from_products(prev_gg, prev_gw, prev_ww);
        row.cos2 = pair.cos2();
      }
      row.fevals = k;
      trace.rows.push_back(std::move(row));
    }

    prev_gg = gg;
    prev_gw = gw;
    prev_ww = ww;
    prev_alpha = alpha;
    have_pair = true;

    const double inv = 1.0 / alpha;
    for (int i = 0; i < n; ++i) {
      d[i] -= inv * g[i];
      g[i] -= inv * w[i];
    }
    gg = dot(g, g);
    ++k;
  }

  trace.iterations = k - 1;
  trace.fevals = k - 1;  // one operator application per iteration
  trace.grad_norm_final = std::sqrt(std::max(gg, 0.0));
  trace.f_final = 0.5 * dot(d, g);
  trace.x_final = axpy(1.0, d, problem.minimizer);
  return trace;
}

inline Trace solve_quadratic(const QuadraticProblem& problem, const RuleConfig& rule,
                             const SolverConfig& cfg) {
  return solve_quadratic(problem, rule, cfg, Vector(static_cast<std::size_t>(problem.dimension()), 0.0));
}

/// Gradient descent with the GLL nonmonotone line search for general smooth
/// objectives. Backtracking restarts at gamma = 1 each outer iteration and the
/// accepted trial point becomes the next iterate. A nonpositive-curvature pair
/// replaces the rule value by the gradient-norm fallback step.
inline Trace solve_nonquadratic(const ObjectiveFunction& f, const RuleConfig& rule,
                                const SolverConfig& cfg, const Vector& x1) {
  cfg.validate();
  if (static_cast<int>(x1.size()) != f.dimension)
    throw std::invalid_argument("solve_nonquadratic: start point dimension mismatch");

  Trace trace;
  Vector x = x1;
  double fx = f.value(x);
  long fevals = 1;
  if (!std::isfinite(fx)) throw std::invalid_argument("solve_nonquadratic: f(x1) is not finite");
  Vector g = f.gradient(x);
  double gnorm = norm2(g);
  trace.grad_norm_initial = gnorm;
  const double stop_norm = cfg.epsilon * gnorm;

  std::vector<double> history{fx};  // last min(k,M) accepted objective values
  RuleState state;
  double alpha = 1.0;  // initial step length 1/alpha_1 = 1
  state.prev_alpha = alpha;

  auto near_target = [&](const Vector& pt) {
    return cfg.target_point && norm2(subtract(pt, *cfg.target_point)) < cfg.target_radius;
  };

  int k = 1;
  trace.status = SolveStatus::MaxIter;
  while (true) {
    if (!std::isfinite(gnorm) || !std::isfinite(fx)) {
      trace.status = SolveStatus::NumericalBreakdown;
      break;
    }
    if (gnorm <= stop_norm || near_target(x)) {
      trace.status = SolveStatus::Converged;
      break;
    }
    if (k > cfg.max_iter) {
      trace.status = SolveStatus::MaxIter;
      break;
    }
    if (fevals >= cfg.max_feval) {
      trace.status = SolveStatus::MaxFeval;
      break;
    }

    const double gsq = dot(g, g);
    const double inv_alpha = 1.0 / alpha;
    double gamma = 1.0;
    int backtracks = 0;
    Vector x_trial;
    double f_trial = 0.0;
    bool accepted = false, out_of_budget = false;
    while (true) {
      x_trial = axpy(-gamma * inv_alpha, g, x);
      f_trial = f.value(x_trial);
      ++fevals;
      if (std::isfinite(f_trial) &&
          gll_accept(f_trial, history, cfg.sigma, gamma, alpha, gsq)) {
        accepted = true;
        break;
      }
      if (fevals >= cfg.max_feval) {
        out_of_budget = true;
        break;
      }
      if (++backtracks > cfg.max_backtracks) break;
      gamma *= cfg.delta;
    }
    if (!accepted) {
      trace.status = out_of_budget ? SolveStatus::MaxFeval : SolveStatus::LineSearchFailure;
      break;
    }

    if (cfg.record_iterations) {
      IterationRecord row;
      row.k = k;
      row.alpha = alpha;
      row.m = state.last_m;
      row.grad_norm = gnorm;
      row.f = fx;
      if (state.prev_cos2) row.cos2 = state.prev_cos2;
      row.fevals = fevals;
      row.backtracks = backtracks;
      trace.rows.push_back(std::move(row));
    }

    const Vector s = subtract(x_trial, x);
    Vector g_new = f.gradient(x_trial);
    const Vector y = subtract(g_new, g);
    if (!all_finite(g_new)) {
      trace.status = SolveStatus::NumericalBreakdown;
      break;
    }

    x = std::move(x_trial);
    fx = f_trial;
    g = std::move(g_new);
    gnorm = norm2(g);
    history.push_back(fx);
    while (static_cast<int>(history.size()) > cfg.memory) history.erase(history.begin());

    const double sy = dot(s, y);
    double next;
    if (sy <= 0.0) {
      // 1/alpha = max(min(1/||g||, 1e5), 1): a bounded, moderate step length.
      const double step = std::max(std::min(1.0 / gnorm, 1e5), 1.0);
      next = 1.0 / step;
      state.last_m.reset();
    } else {
      const StepPair pair = StepPair::from_products(dot(s, s), sy, dot(y, y));
      state.k = k + 1;
      next = next_alpha(rule, state, pair);
    }
    alpha = std::clamp(next, cfg.alpha_min, cfg.alpha_max);
    state.prev_alpha = alpha;
    ++k;
  }

  trace.iterations = k - 1;
  trace.fevals = fevals;
  trace.grad_norm_final = gnorm;
  trace.f_final = fx;
  trace.x_final = std::move(x);
  return trace;
}

}  // namespace specgrad
