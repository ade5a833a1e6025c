//
// specgrad - Copyright 2026 the specgrad authors.
// SPDX-License-Identifier: Apache-2.0
//
// Closed forms for gradient descent on diag(lambda, 1): every quantity is a
// function of eps = (g^(1))^2 / (g^(2))^2, the squared ratio of gradient
// components. The step scalar, the per-step contraction factor e(eps) of the
// ratio, and the second-order recurrence eps_{k+2} = e(eps_k)^2 eps_{k+1} are
// evaluated here without forming any vectors, which makes them usable as exact
// oracles against the full solver.
//
#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "specgrad/stepsize.hpp"

namespace specgrad {

/// BB1 in ratio form: (lambda*eps + 1)/(eps + 1); ranges over (1, lambda).
inline double bb1_eps(double eps, double lambda) {
  const double num = lambda * eps + 1.0;
  if (std::isfinite(num)) return num / (eps + 1.0);
  return lambda - (lambda - 1.0) / (eps + 1.0);  // huge eps: same value, no inf/inf
}

/// BB2 in ratio form: (lambda^2*eps + 1)/(lambda*eps + 1).
inline double bb2_eps(double eps, double lambda) {
  const double num = lambda * lambda * eps + 1.0;
  if (std::isfinite(num)) return num / (lambda * eps + 1.0);
  return lambda - (lambda - 1.0) / (lambda * eps + 1.0);
}

namespace detail {
inline void check_eps_args(double eps, double lambda, double m, const char* where) {
  if (!(eps > 0.0)) throw std::invalid_argument(std::string(where) + ": eps must be > 0");
  if (!(lambda > 1.0)) throw std::invalid_argument(std::string(where) + ": lambda must be > 1");
  if (!(m > 0.0 && m <= 1.0))
    throw std::invalid_argument(std::string(where) + ": m must lie in (0,1]");
}

// Nonnegative excess sqrt(D) - base of the ratio-form discriminant
//   D = base^2 + t,  base = lambda*eps + 1,  t = 4m(1-m)(lambda-1)^2 eps,
// evaluated as (t/base)/(1 + sqrt(1 + t/base^2)) so no intermediate can
// overflow for any positive eps; exactly 0 at m = 1.
inline double discriminant_excess(double eps, double lambda, double m) {
  const double coeff = 4.0 * m * (1.0 - m) * (lambda - 1.0) * (lambda - 1.0);
  if (coeff == 0.0) return 0.0;
  const double u = 1.0 / (lambda + 1.0 / eps);  // eps/base, bounded by 1/lambda
  const double t_over_base = coeff * u;
  const double base = lambda * eps + 1.0;
  const double r = std::isfinite(base) ? t_over_base / base : 0.0;  // t/base^2
  return t_over_base / (1.0 + std::sqrt(1.0 + r));
}
}  // namespace detail

/// Interpolated step scalar in ratio form; equals bb1_eps at m = 1 (exactly)
/// and tends to bb2_eps as m -> 0. Always inside [bb1_eps, bb2_eps] c [1, lambda].
inline double alpha_pbb_eps(double eps, double lambda, double m) {
  detail::check_eps_args(eps, lambda, m, "alpha_pbb_eps");
  const double excess = detail::discriminant_excess(eps, lambda, m);
  return bb1_eps(eps, lambda) + excess / (2.0 * m * (eps + 1.0));
}

struct EFactorParts {
  double numerator;    // 2m(eps+1)(alpha - lambda) <= 0
  double denominator;  // 2m(eps+1)(alpha - 1) >= 2m(lambda-1)*eps > 0
  double value() const { return numerator / denominator; }
};

/// The contraction factor e(eps) = (alpha - lambda)/(alpha - 1) in the exact
/// numerator/denominator split. The denominator is assembled as
/// 2m(lambda-1)*eps + excess, a sum of nonnegative terms whose first summand
/// is the proven lower bound, so the bound holds verbatim in floating point.
inline EFactorParts e_factor_parts(double eps, double lambda, double m) {
  detail::check_eps_args(eps, lambda, m, "e_factor");
  const double excess = detail::discriminant_excess(eps, lambda, m);
  const double bound = 2.0 * m * (lambda - 1.0) * eps;
  EFactorParts parts;
  parts.numerator = excess - 2.0 * m * (lambda - 1.0);
  parts.denominator = bound + excess;
  if (!(parts.denominator >= bound))
    throw std::runtime_error("e_factor: denominator fell below the positivity bound");
  return parts;
}

inline double e_factor(double eps, double lambda, double m) {
  return e_factor_parts(eps, lambda, m).value();
}

/// One step of the ratio dynamics: eps_{k+2} = e(eps_k)^2 * eps_{k+1}.
inline double step_dynamics(double eps_k, double eps_k1, double lambda, double m) {
  if (!(eps_k1 > 0.0)) throw std::invalid_argument("step_dynamics: eps_{k+1} must be > 0");
  const double e = e_factor(eps_k, lambda, m);
  return e * e * eps_k1;
}

/// Interpolation-weight policy for the dynamics: either frozen m or the
/// adaptive scheme with cos^2 derived from the ratio form and a one-step
/// history (cold start treats the undefined previous value as 1).
struct MPolicy {
  std::optional<double> fixed;
  int q = 8;

  static MPolicy fixed_m(double m) { return {m, 8}; }
  static MPolicy adaptive(int q = 8) { return {std::nullopt, q}; }
};

struct EpsState {
  double eps_k = 1.0;
  double eps_k1 = 1.0;
  double lambda = 10.0;
  MPolicy policy;
};

struct DynamicsResult {
  // eps[j] is the newest ratio after j steps; eps[0] is the initial eps_{k+1}.
  std::vector<double> eps;
  std::optional<int> first_index_le_one;
  std::optional<int> divergence_index;  // overflow diagnostic, not expected for m in (0,1]
};

/// cos^2 theta as a function of the ratio: (lambda*eps+1)^2 over
/// (eps+1)(lambda^2*eps+1), evaluated as bb1_eps/bb2_eps (the same quantity,
/// immune to overflow at extreme ratios).
inline double abb_ratio(double eps, double lambda) {
  if (!(eps > 0.0)) throw std::invalid_argument("abb_ratio: eps must be > 0");
  if (!(lambda > 1.0)) throw std::invalid_argument("abb_ratio: lambda must be > 1");
  return bb1_eps(eps, lambda) / bb2_eps(eps, lambda);
}

/// Iterate the ratio dynamics and report the first index with eps <= 1
/// (index 0 is the newest initial value, matching the existence statement
/// "there is an N >= 1 with eps_{k+N+1} <= 1" counted from eps_{k+1}).
inline DynamicsResult simulate_dynamics(const EpsState& state, int steps = 200) {
  if (steps < 1) throw std::invalid_argument("simulate_dynamics: steps must be >= 1");
  if (!(state.eps_k > 0.0 && state.eps_k1 > 0.0))
    throw std::invalid_argument("simulate_dynamics: eps values must be > 0");
  if (state.policy.fixed) detail::check_eps_args(1.0, state.lambda, *state.policy.fixed, "simulate_dynamics");

  DynamicsResult out;
  out.eps.reserve(static_cast<std::size_t>(steps) + 1);
  out.eps.push_back(state.eps_k1);
  if (std::min(state.eps_k, state.eps_k1) <= 1.0) out.first_index_le_one = 0;

  double older = state.eps_k;
  double newer = state.eps_k1;
  double prev_cos2 = 1.0;  // cold start
  for (int j = 1; j <= steps; ++j) {
    double m;
    if (state.policy.fixed) {
      m = *state.policy.fixed;
    } else {
      const double c2 = abb_ratio(older, state.lambda);
      m = m_k(zeta(c2, prev_cos2), bb1_eps(older, state.lambda), state.policy.q);
      prev_cos2 = c2;
    }
    double e;
    if (m < kPbbTruncation) {
      // Truncated step equals BB2, whose contraction factor is exactly -1/(lambda*eps).
      e = -1.0 / (state.lambda * older);
    } else {
      e = e_factor(older, state.lambda, m);
    }
    const double next = e * e * newer;
    if (!std::isfinite(next)) {
      out.divergence_index = j;
      break;
    }
    out.eps.push_back(next);
    if (!out.first_index_le_one && next <= 1.0) out.first_index_le_one = j;
    if (next == 0.0) break;  // ratio underflowed; the trajectory is done
    older = newer;
    newer = next;
  }
  return out;
}

/// Threshold 4*lambda/(1+lambda)^2 below which the alternating inequality has
/// no real roots.
inline double abb_condition_threshold(double lambda) {
  return 4.0 * lambda / ((1.0 + lambda) * (1.0 + lambda));
}

/// Phi(eps) = lambda^2(1-eta) eps^2 + (2 lambda - eta(1+lambda^2)) eps + (1-eta);
/// negative exactly where the BB ratio falls below eta.
inline double abb_threshold_poly(double eps, double lambda, double eta) {
  return lambda * lambda * (1.0 - eta) * eps * eps +
         (2.0 * lambda - eta * (1.0 + lambda * lambda)) * eps + (1.0 - eta);
}

struct ThresholdRoots {
  double eps1 = 0.0;  // smaller root
  double eps2 = 0.0;  // larger root
  double lambda = 0.0;
  double eta = 0.0;
};

/// Both positive roots of Phi. The larger root uses the additive closed form;
/// the smaller comes from the exact product eps1*eps2 = 1/lambda^2, which is
/// also the numerically stable arrangement (the subtractive form cancels
/// catastrophically for large lambda).
inline ThresholdRoots abb_threshold_roots(double lambda, double eta) {
  if (!(lambda > 1.0)) throw std::invalid_argument("abb_threshold_roots: lambda must be > 1");
  if (!(eta > 0.0 && eta < 1.0))
    throw std::invalid_argument("abb_threshold_roots: eta must lie in (0,1)");
  const double threshold = abb_condition_threshold(lambda);
  if (!(eta > threshold))
    throw std::domain_error("abb_threshold_roots: no real roots (eta <= 4*lambda/(1+lambda)^2)");

  const double b = eta * (1.0 + lambda * lambda) - 2.0 * lambda;  // > 0 under the condition
  const double s = (lambda * lambda - 1.0) * std::sqrt(eta * (eta - threshold));
  ThresholdRoots r;
  r.lambda = lambda;
  r.eta = eta;
  r.eps2 = (b + s) / (2.0 * lambda * lambda * (1.0 - eta));
  r.eps1 = 1.0 / (lambda * lambda * r.eps2);
  return r;
}

}  // namespace specgrad
