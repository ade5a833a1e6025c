//
// specgrad - Copyright 2026 the specgrad authors.
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <variant>

#include "specgrad/householder.hpp"
#include "specgrad/rng.hpp"
#include "specgrad/vector_ops.hpp"

namespace specgrad {

/// Evaluation interface shared by every benchmark objective.
struct ObjectiveFunction {
  std::string name;
  int dimension = 0;
  std::function<double(std::span<const double>)> value;
  std::function<Vector(std::span<const double>)> gradient;
  Vector suggested_start;
  std::optional<double> known_minimum_value;
};

/// Constant-coefficient symmetric tridiagonal operator.
struct TridiagonalOperator {
  int n = 0;
  double diag = 0.0;
  double off = 0.0;
};

/// f(x) = 1/2 (x-x*)^T A (x-x*) with A SPD and the minimizer known exactly.
struct QuadraticProblem {
  std::variant<HouseholderChain, TridiagonalOperator> op;
  Vector minimizer;
  double lambda_min = 0.0;
  double lambda_max = 0.0;

  int dimension() const { return static_cast<int>(minimizer.size()); }
  double condition_estimate() const { return lambda_max / lambda_min; }

  Vector apply(std::span<const double> v) const {
    if (const auto* chain = std::get_if<HouseholderChain>(&op)) return apply_operator(*chain, v);
    const auto& tri = std::get<TridiagonalOperator>(op);
    if (static_cast<int>(v.size()) != tri.n)
      throw std::invalid_argument("QuadraticProblem::apply: dimension mismatch");
    Vector w(v.size());
    for (int i = 0; i < tri.n; ++i) {
      double s = tri.diag * v[i];
      if (i > 0) s += tri.off * v[i - 1];
      if (i + 1 < tri.n) s += tri.off * v[i + 1];
      w[i] = s;
    }
    return w;
  }

  Vector gradient(std::span<const double> x) const {
    return apply(subtract(x, minimizer));
  }

  double value(std::span<const double> x) const {
    const Vector d = subtract(x, minimizer);
    return 0.5 * dot(d, apply(d));
  }

  ObjectiveFunction as_objective(std::string name) const {
    auto self = std::make_shared<QuadraticProblem>(*this);
    ObjectiveFunction f;
    f.name = std::move(name);
    f.dimension = dimension();
    f.value = [self](std::span<const double> x) { return self->value(x); };
    f.gradient = [self](std::span<const double> x) { return self->gradient(x); };
    f.suggested_start = Vector(static_cast<std::size_t>(dimension()), 0.0);
    f.known_minimum_value = 0.0;
    return f;
  }
};

/// Which of the seven eigenvalue layouts to draw, at condition number kappa.
struct SpectrumSpec {
  int distribution_id = 1;  // 1..7
  double kappa = 1e3;
  int n = 100;
};

namespace detail {
struct Block {
  int first, last;  // 1-based eigenvalue indices, inclusive
  double lo, hi;
};

inline std::vector<Block> spectrum_blocks(const SpectrumSpec& s) {
  const int n = s.n;
  const double k = s.kappa;
  std::vector<Block> b;
  switch (s.distribution_id) {
    case 1: b = {{2, n - 1, 1.0, k}}; break;
    case 2: b = {{2, n / 5, 1.0, 100.0}, {n / 5 + 1, n - 1, k / 2, k}}; break;
    case 3: b = {{2, n / 2, 1.0, 100.0}, {n / 2 + 1, n - 1, k / 2, k}}; break;
    case 4: b = {{2, 4 * n / 5, 1.0, 100.0}, {4 * n / 5 + 1, n - 1, k / 2, k}}; break;
    case 5:
      b = {{2, n / 5, 1.0, 100.0},
           {n / 5 + 1, 4 * n / 5, 100.0, k / 2},
           {4 * n / 5 + 1, n - 1, k / 2, k}};
      break;
    case 6: b = {{2, 10, 1.0, 100.0}, {11, n - 1, k / 2, k}}; break;
    case 7: b = {{2, n - 10, 1.0, 100.0}, {n - 9, n - 1, k / 2, k}}; break;
    default:
      throw std::invalid_argument("spectrum distribution_id must be in 1..7, got " +
                                  std::to_string(s.distribution_id));
  }
  for (auto& blk : b) {
    blk.first = std::max(blk.first, 2);
    blk.last = std::min(blk.last, n - 1);
  }
  return b;
}
}  // namespace detail

/// Random quadratic with the prescribed spectrum layout. Draw order is fixed:
/// interior eigenvalues v_2..v_{n-1} in index order, then three unit reflectors,
/// then x* ~ Uniform[-10,10]^n, so regenerating from the same seed is bit-exact.
inline QuadraticProblem make_random_quadratic(const SpectrumSpec& spec, Rng& rng) {
  if (spec.n < 3) throw std::invalid_argument("make_random_quadratic: n must be >= 3");
  if (!(spec.kappa > 1.0)) throw std::invalid_argument("make_random_quadratic: kappa must be > 1");
  const auto blocks = detail::spectrum_blocks(spec);

  Vector diag(static_cast<std::size_t>(spec.n), 0.0);
  diag.front() = 1.0;
  diag.back() = spec.kappa;
  for (const auto& blk : blocks) {
    if (blk.first > blk.last) continue;
    if (!(blk.lo < blk.hi))
      throw std::invalid_argument("make_random_quadratic: empty eigenvalue interval (" +
                                  std::to_string(blk.lo) + "," + std::to_string(blk.hi) +
                                  "); kappa too small for this distribution");
    for (int j = blk.first; j <= blk.last; ++j)
      diag[static_cast<std::size_t>(j - 1)] = rng.uniform_open(blk.lo, blk.hi);
  }

  std::vector<Vector> reflectors;
  reflectors.reserve(3);
  for (int i = 0; i < 3; ++i) reflectors.push_back(unit_random_vector(rng, spec.n));

  Vector xs(static_cast<std::size_t>(spec.n));
  for (auto& e : xs) e = rng.uniform(-10.0, 10.0);

  QuadraticProblem p{HouseholderChain(std::move(reflectors), std::move(diag)), std::move(xs), 1.0,
                     spec.kappa};
  return p;
}

/// Tridiagonal quadratic from the discretized two-point boundary value problem:
/// diagonal 2/h^2, off-diagonal -1/h^2, h = 11/n; x* ~ Uniform[-10,10]^n.
inline QuadraticProblem make_bvp_quadratic(int n, Rng& rng) {
  if (n < 2) throw std::invalid_argument("make_bvp_quadratic: n must be >= 2");
  const double h = 11.0 / n;
  const double d = 2.0 / (h * h);
  TridiagonalOperator tri{n, d, -1.0 / (h * h)};

  Vector xs(static_cast<std::size_t>(n));
  for (auto& e : xs) e = rng.uniform(-10.0, 10.0);

  // Eigenvalues of the constant tridiagonal are (2/h^2)(1 - cos(k pi/(n+1))).
  const double lam_min = d * (1.0 - std::cos(std::numbers::pi / (n + 1)));
  const double lam_max = d * (1.0 - std::cos(n * std::numbers::pi / (n + 1)));
  return QuadraticProblem{tri, std::move(xs), lam_min, lam_max};
}

/// f(x) = c (x2 - x1^2)^2 + (1 - x1)^2, start (-1.2, 1), minimum 0 at (1, 1).
inline ObjectiveFunction rosenbrock(double c) {
  if (!(c > 0.0)) throw std::invalid_argument("rosenbrock: c must be > 0");
  ObjectiveFunction f;
  f.name = "Rosenbrock";
  f.dimension = 2;
  f.suggested_start = {-1.2, 1.0};
  f.known_minimum_value = 0.0;
  f.value = [c](std::span<const double> x) {
    const double t = x[1] - x[0] * x[0];
    return c * t * t + (1.0 - x[0]) * (1.0 - x[0]);
  };
  f.gradient = [c](std::span<const double> x) {
    const double t = x[1] - x[0] * x[0];
    return Vector{-4.0 * c * x[0] * t - 2.0 * (1.0 - x[0]), 2.0 * c * t};
  };
  return f;
}

/// Max over coordinates of |analytic - central difference| / max(1, |analytic|),
/// with per-coordinate step h*max(1,|x_i|).
inline double check_gradient(const ObjectiveFunction& f, std::span<const double> x,
                             double h = 1e-6) {
  if (!(h > 0.0)) throw std::invalid_argument("check_gradient: h must be > 0");
  const Vector g = f.gradient(x);
  Vector xp(x.begin(), x.end());
  double worst = 0.0;
  for (std::size_t i = 0; i < xp.size(); ++i) {
    const double hi = h * std::max(1.0, std::abs(x[i]));
    const double xi = xp[i];
    xp[i] = xi + hi;
    const double fp = f.value(xp);
    xp[i] = xi - hi;
    const double fm = f.value(xp);
    xp[i] = xi;
    if (!std::isfinite(fp) || !std::isfinite(fm))
      throw std::runtime_error("check_gradient: non-finite objective near x");
    const double numeric = (fp - fm) / (2.0 * hi);
    const double err = std::abs(numeric - g[i]) / std::max(1.0, std::abs(g[i]));
    worst = std::max(worst, err);
  }
  return worst;
}

/// Plain-text key-value description of a benchmark problem; together with the
/// seed it regenerates the instance bit-exactly.
struct ProblemSpec {
  std::string kind;  // quad | bvp | rosenbrock | nonquad
  int n = 0;
  double kappa = 0.0;
  int distribution_id = 0;
  std::uint64_t seed = 0;
  double c = 0.0;
  std::string name;  // registry name for kind=nonquad

  std::string to_text() const {
    std::ostringstream os;
    os << "kind=" << kind << "\n"
       << "n=" << n << "\n";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", kappa);
    os << "kappa=" << buf << "\n"
       << "distribution_id=" << distribution_id << "\n"
       << "seed=" << seed << "\n";
    std::snprintf(buf, sizeof buf, "%.17g", c);
    os << "c=" << buf << "\n";
    if (!name.empty()) os << "name=" << name << "\n";
    return os.str();
  }

  static ProblemSpec from_text(const std::string& text) {
    ProblemSpec p;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = line.substr(0, eq);
      const std::string val = line.substr(eq + 1);
      if (key == "kind") p.kind = val;
      else if (key == "n") p.n = std::stoi(val);
      else if (key == "kappa") p.kappa = std::stod(val);
      else if (key == "distribution_id") p.distribution_id = std::stoi(val);
      else if (key == "seed") p.seed = std::stoull(val);
      else if (key == "c") p.c = std::stod(val);
      else if (key == "name") p.name = val;
      else throw std::invalid_argument("ProblemSpec: unknown key '" + key + "'");
    }
    if (p.kind.empty()) throw std::invalid_argument("ProblemSpec: missing kind");
    return p;
  }
};

}  // namespace specgrad
