//
// specgrad - Copyright 2026 the specgrad authors.
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>

#include "specgrad/vector_ops.hpp"

namespace specgrad {

/// Below this interpolation weight the parameterized step is truncated to BB2.
inline constexpr double kPbbTruncation = 1e-8;

/// Cached inner products of one displacement/gradient-difference pair
/// (s, y) = (x_k - x_{k-1}, g_k - g_{k-1}). All step-size rules are scalar
/// functions of these three numbers.
struct StepPair {
  double ss = 0.0;  // s^T s > 0
  double sy = 0.0;  // s^T y
  double yy = 0.0;  // y^T y >= 0

  static StepPair from_vectors(std::span<const double> s, std::span<const double> y) {
    require_same_size(s, y, "StepPair");
    StepPair p;
    p.ss = dot(s, s);
    p.sy = dot(s, y);
    p.yy = dot(y, y);
    p.validate();
    return p;
  }

  static StepPair from_products(double ss, double sy, double yy) {
    StepPair p{ss, sy, yy};
    p.validate();
    return p;
  }

  void validate() const {
    if (!(ss > 0.0)) throw std::invalid_argument("StepPair: s^T s must be > 0");
    if (yy < 0.0) throw std::invalid_argument("StepPair: y^T y must be >= 0");
  }

  /// cos^2 of the angle between s and y, clamped into [0,1]; equals bb1/bb2.
  double cos2() const {
    if (yy == 0.0) return 0.0;
    return std::clamp(sy * sy / (ss * yy), 0.0, 1.0);
  }
};

inline double bb1(const StepPair& p) { return p.sy / p.ss; }

inline double bb2(const StepPair& p) {
  if (p.sy == 0.0) throw std::domain_error("bb2: degenerate pair (s^T y = 0)");
  return p.yy / p.sy;
}

/// Positive root of  m*ss*a^2 - (2m-1)*sy*a + (m-1)*yy = 0, which interpolates
/// between bb1 (m=1) and bb2 (m->0); m = 1/2 gives the geometric mean.
/// Evaluated cancellation-free: the discriminant is w^2 + 4m(1-m)*ss*yy (a sum
/// of nonnegative terms for m in (0,1]) and the conjugate form is used when the
/// linear coefficient w = (2m-1)*sy is negative. m below the truncation
/// threshold falls back to bb2 exactly.
inline double pbb(const StepPair& p, double m) {
  if (!(p.sy > 0.0)) throw std::domain_error("pbb: requires s^T y > 0");
  if (!(m >= 0.0 && m <= 1.0)) throw std::invalid_argument("pbb: m must lie in [0,1]");
  if (m < kPbbTruncation) return bb2(p);
  const double w = (2.0 * m - 1.0) * p.sy;
  const double t = 4.0 * m * (1.0 - m) * p.ss * p.yy;
  const double root = (t == 0.0) ? std::abs(w) : std::sqrt(w * w + t);
  if (w >= 0.0) return (w + root) / (2.0 * m * p.ss);
  return t / (2.0 * m * p.ss * (root - w));
}

/// Alignment indicator zeta_k = cos2_k * (cos2_k / cos2_{k-1}); values above 1
/// say the last direction tracks a Hessian eigenvector well (take a long step),
/// values below 1 argue for a short one.
inline double zeta(double cos2_k, double cos2_prev) {
  if (!(cos2_k > 0.0)) throw std::invalid_argument("zeta: cos2_k must be positive");
  cos2_prev = std::max(cos2_prev, 1e-16);
  return cos2_k * (cos2_k / cos2_prev);
}

/// Interpolation weight m = zeta^q / (bb1 + zeta^q) in (0,1). Large q snaps m
/// towards 0 or 1; the bb1 term in the denominator penalizes steep curvature.
/// Evaluated in log space once q*log(zeta) leaves the safe exponent range.
inline double m_k(double zeta_val, double bb1_val, int q) {
  if (!(zeta_val > 0.0)) throw std::invalid_argument("m_k: zeta must be positive");
  if (!(bb1_val > 0.0)) throw std::invalid_argument("m_k: bb1 must be positive");
  if (q < 1) throw std::invalid_argument("m_k: q must be >= 1");
  const double log_zq = q * std::log(zeta_val);
  if (std::abs(log_zq) <= 300.0) {
    const double zq = std::pow(zeta_val, q);
    return zq / (bb1_val + zq);
  }
  // m = 1 / (1 + exp(log(bb1) - q*log(zeta)))
  const double u = std::log(bb1_val) - log_zq;
  if (u > 745.0) return 0.0;
  if (u < -745.0) return 1.0;
  return 1.0 / (1.0 + std::exp(u));
}

/// Alternating rule: short BB2 step when the BB ratio (= cos^2 theta) drops
/// below the threshold eta, long BB1 step otherwise.
inline double abb(const StepPair& p, double eta) {
  if (!(p.sy > 0.0)) throw std::domain_error("abb: requires s^T y > 0");
  return (p.cos2() < eta) ? bb2(p) : bb1(p);
}

/// Windowed variant: when alignment is poor, reuse the largest BB2 value of the
/// recent window (the smallest step length) as a spectrum probe.
inline double abbmin(const StepPair& p, std::span<const double> bb2_window, double xi) {
  if (!(p.sy > 0.0)) throw std::domain_error("abbmin: requires s^T y > 0");
  if (bb2_window.empty()) throw std::invalid_argument("abbmin: empty bb2 window");
  if (p.cos2() < xi) return *std::max_element(bb2_window.begin(), bb2_window.end());
  return bb1(p);
}

/// Truncated cyclic rule: restart from BB1 every cycle_m iterations, otherwise
/// reuse the previous value clamped into [bb1, bb2].
inline double atc(const StepPair& p, double prev_alpha, int k, int cycle_m) {
  if (!(p.sy > 0.0)) throw std::domain_error("atc: requires s^T y > 0");
  if (cycle_m < 1) throw std::invalid_argument("atc: cycle length must be >= 1");
  if (!(prev_alpha > 0.0)) throw std::invalid_argument("atc: prev_alpha must be > 0");
  const double a1 = bb1(p);
  if (k % cycle_m == 0) return a1;
  const double a2 = bb2(p);
  return std::clamp(prev_alpha, a1, a2);
}

/// Target-parameter rule alpha(tau) = (yy - tau*sy)/(sy - tau*ss); tau = 0 gives
/// BB2 and tau -> -inf gives BB1.
inline double tbb(const StepPair& p, double tau) {
  if (!(p.sy > 0.0)) throw std::domain_error("tbb: requires s^T y > 0");
  const double denom = p.sy - tau * p.ss;
  if (std::abs(denom) < 1e-300) return bb2(p);
  return (p.yy - tau * p.sy) / denom;
}

/// tau_k = -cot(theta_k) from the pair's angle; the aligned limit returns BB1.
inline double tbb_auto(const StepPair& p) {
  const double c2 = p.cos2();
  if (c2 >= 1.0) return bb1(p);
  const double cot = std::sqrt(c2 / (1.0 - c2));  // cos > 0 since sy > 0
  return tbb(p, -cot);
}

enum class RuleKind { bb1, bb2, pbb, abb, abbmin, abbbon, atc, tbb };

inline std::string rule_name(RuleKind k) {
  switch (k) {
    case RuleKind::bb1: return "bb1";
    case RuleKind::bb2: return "bb2";
    case RuleKind::pbb: return "pbb";
    case RuleKind::abb: return "abb";
    case RuleKind::abbmin: return "abbmin";
    case RuleKind::abbbon: return "abbbon";
    case RuleKind::atc: return "atc";
    case RuleKind::tbb: return "tbb";
  }
  return "?";
}

struct RuleConfig {
  RuleKind kind = RuleKind::pbb;
  double eta = 0.5;  // abb threshold
  double xi = 0.8;   // abbmin fixed threshold
  int window = 5;    // abbmin/abbbon keep the last window+1 BB2 values
  int cycle = 4;     // atc cycle length
  int q = 8;         // adaptive-m scaling exponent
  std::optional<double> fixed_m;  // pbb with a frozen interpolation weight

  std::string name() const { return rule_name(kind); }

  std::string to_text() const {
    std::ostringstream os;
    os << "rule_name=" << name() << " eta=" << eta << " xi=" << xi << " window=" << window
       << " cycle=" << cycle << " q=" << q;
    if (fixed_m) os << " fixed_m=" << *fixed_m;
    return os.str();
  }
};

inline RuleKind parse_rule_kind(const std::string& s) {
  if (s == "bb1") return RuleKind::bb1;
  if (s == "bb2") return RuleKind::bb2;
  if (s == "pbb") return RuleKind::pbb;
  if (s == "abb") return RuleKind::abb;
  if (s == "abbmin") return RuleKind::abbmin;
  if (s == "abbbon") return RuleKind::abbbon;
  if (s == "atc") return RuleKind::atc;
  if (s == "tbb") return RuleKind::tbb;
  throw std::invalid_argument(
      "unknown rule '" + s + "'; expected one of bb1, bb2, pbb, abb, abbmin, abbbon, atc, tbb");
}

/// Per-run mutable history consumed by the rules. The solver owns one per run;
/// prev_alpha is refreshed by the solver after every iteration (including
/// fallback steps) so atc always sees the value actually used.
struct RuleState {
  int k = 0;                       // solver iteration at the time of the call
  double prev_alpha = 1.0;
  std::optional<double> prev_cos2; // undefined before the first pair; treated as 1
  std::vector<double> bb2_window;  // most recent last
  double xi = 0.5;                 // abbbon adaptive threshold, clamped to (1e-8, 1-1e-8)
  std::optional<double> last_m;    // diagnostic: pbb's most recent weight
};

/// One step-size decision given the current pair. Requires p.sy > 0; the
/// negative-curvature fallback is the solver's job.
inline double next_alpha(const RuleConfig& cfg, RuleState& state, const StepPair& p) {
  if (!(p.sy > 0.0)) throw std::domain_error("next_alpha: requires s^T y > 0");
  const double c2 = p.cos2();
  state.last_m.reset();

  // Maintain the BB2 window (last window+1 values including the current one).
  state.bb2_window.push_back(bb2(p));
  while (static_cast<int>(state.bb2_window.size()) > cfg.window + 1)
    state.bb2_window.erase(state.bb2_window.begin());

  double alpha = 0.0;
  switch (cfg.kind) {
    case RuleKind::bb1: alpha = bb1(p); break;
    case RuleKind::bb2: alpha = bb2(p); break;
    case RuleKind::pbb: {
      double m;
      if (cfg.fixed_m) {
        m = *cfg.fixed_m;
      } else {
        const double z = zeta(std::max(c2, 1e-16), state.prev_cos2.value_or(1.0));
        m = m_k(z, bb1(p), cfg.q);
      }
      state.last_m = m;
      alpha = pbb(p, m);
      break;
    }
    case RuleKind::abb: alpha = abb(p, cfg.eta); break;
    case RuleKind::abbmin:
      alpha = abbmin(p, state.bb2_window, cfg.xi);
      break;
    case RuleKind::abbbon: {
      alpha = abbmin(p, state.bb2_window, state.xi);
      state.xi = std::clamp((c2 < state.xi) ? 0.9 * state.xi : 1.1 * state.xi, 1e-8, 1.0 - 1e-8);
      break;
    }
    case RuleKind::atc: alpha = atc(p, state.prev_alpha, state.k, cfg.cycle); break;
    case RuleKind::tbb: alpha = tbb_auto(p); break;
  }

  state.prev_cos2 = c2;
  return alpha;
}

}  // namespace specgrad
