//
// specgrad - Copyright 2026 the specgrad authors.
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "specgrad/problems.hpp"
#include "specgrad/solver.hpp"
#include "specgrad/test_functions.hpp"

namespace specgrad {

/// Outcome of one (problem instance, rule, tolerance) run.
struct RunRecord {
  std::string problem_id;
  std::string rule_name;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  long iterations = 0;
  long fevals = 0;
  double grad_ratio_final = 0.0;
  SolveStatus status = SolveStatus::MaxIter;
  double wall_time_ms = 0.0;
};

namespace detail {
inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf);
}
}  // namespace detail

inline void write_records_csv(std::ostream& os, const std::vector<RunRecord>& records,
                              const std::vector<std::string>& metadata = {}) {
  for (const auto& line : metadata) os << "# " << line << '\n';
  os << "problem_id,rule,eps,seed,iters,fevals,grad_ratio,status,ms\n";
  for (const auto& r : records) {
    os << r.problem_id << ',' << r.rule_name << ',' << detail::fmt17(r.epsilon) << ',' << r.seed
       << ',' << r.iterations << ',' << r.fevals << ',' << detail::fmt17(r.grad_ratio_final) << ','
       << to_string(r.status) << ',' << detail::fmt17(r.wall_time_ms) << '\n';
  }
}

inline std::vector<RunRecord> read_records_csv(std::istream& is) {
  std::vector<RunRecord> out;
  std::string line;
  bool header_seen = false;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {  // skip the column header
      header_seen = true;
      continue;
    }
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) cols.push_back(item);
    if (cols.size() != 9)
      throw std::invalid_argument("records CSV: expected 9 columns, got " +
                                  std::to_string(cols.size()) + " in line: " + line);
    RunRecord r;
    r.problem_id = cols[0];
    r.rule_name = cols[1];
    r.epsilon = std::stod(cols[2]);
    r.seed = std::stoull(cols[3]);
    r.iterations = std::stol(cols[4]);
    r.fevals = std::stol(cols[5]);
    r.grad_ratio_final = std::stod(cols[6]);
    r.status = solve_status_from_string(cols[7]);
    r.wall_time_ms = std::stod(cols[8]);
    out.push_back(std::move(r));
  }
  return out;
}

/// A suite is the cross product problems x rules x tolerances x repetitions.
struct SuiteSpec {
  std::vector<ProblemSpec> problems;
  std::vector<RuleConfig> rules;
  std::vector<double> tolerances;
  int repetitions = 1;
  SolverConfig solver;  // epsilon is overridden per tolerance
};

namespace detail {

inline std::string problem_label(const ProblemSpec& p, int rep) {
  std::ostringstream os;
  if (p.kind == "quad") {
    os << "quad_d" << p.distribution_id << "_n" << p.n << "_k" << p.kappa;
  } else if (p.kind == "bvp") {
    os << "bvp_n" << p.n;
  } else if (p.kind == "rosenbrock") {
    os << "rosenbrock_c" << p.c;
  } else if (p.kind == "nonquad") {
    std::string compact;
    for (char c : p.name)
      if (c != ' ') compact.push_back(c);
    os << "nonquad_" << compact;
  } else {
    throw std::invalid_argument("unknown problem kind '" + p.kind + "'");
  }
  os << "_r" << rep;
  return os.str();
}

inline std::uint64_t instance_seed(std::uint64_t master, std::size_t problem_index, int rep) {
  std::uint64_t x = master ^ (0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(problem_index) + 1));
  x ^= 0xBF58476D1CE4E5B9ULL * (static_cast<std::uint64_t>(rep) + 1);
  return x;
}

}  // namespace detail

/// Execute every cell of the suite. Instances are regenerated deterministically
/// from (master_seed, problem index, repetition); failed runs keep their status
/// and are ranked as infinite cost by the profile. Records come back in the
/// canonical order (problem_id, rule, eps, seed).
inline std::vector<RunRecord> run_suite(const SuiteSpec& suite, std::uint64_t master_seed) {
  if (suite.problems.empty()) throw std::invalid_argument("run_suite: no problems");
  if (suite.rules.empty()) throw std::invalid_argument("run_suite: no rules");
  if (suite.tolerances.empty()) throw std::invalid_argument("run_suite: no tolerances");
  if (suite.repetitions < 1) throw std::invalid_argument("run_suite: repetitions must be >= 1");
  // Validate the whole configuration before any run starts.
  for (const auto& p : suite.problems) {
    if (p.kind == "nonquad") {
      registry_lookup(p.name, p.n);
    } else if (p.kind == "quad") {
      if (p.n < 3) throw std::invalid_argument("run_suite: quad needs n >= 3");
      if (!(p.kappa > 1.0)) throw std::invalid_argument("run_suite: quad needs kappa > 1");
      detail::spectrum_blocks({p.distribution_id, p.kappa, p.n});
    } else if (p.kind == "bvp") {
      if (p.n < 2) throw std::invalid_argument("run_suite: bvp needs n >= 2");
    } else if (p.kind == "rosenbrock") {
      if (!(p.c > 0.0)) throw std::invalid_argument("run_suite: rosenbrock needs c > 0");
    } else {
      throw std::invalid_argument("run_suite: unknown problem kind '" + p.kind + "'");
    }
  }

  std::vector<RunRecord> records;
  for (std::size_t pi = 0; pi < suite.problems.size(); ++pi) {
    const ProblemSpec& spec = suite.problems[pi];
    for (int rep = 0; rep < suite.repetitions; ++rep) {
      const std::uint64_t seed = detail::instance_seed(master_seed, pi, rep);
      Rng rng(seed);
      const std::string label = detail::problem_label(spec, rep);

      std::optional<QuadraticProblem> quad;
      std::optional<ObjectiveFunction> obj;
      Vector x1;
      if (spec.kind == "quad") {
        quad = make_random_quadratic({spec.distribution_id, spec.kappa, spec.n}, rng);
        x1 = Vector(static_cast<std::size_t>(spec.n), 0.0);
      } else if (spec.kind == "bvp") {
        quad = make_bvp_quadratic(spec.n, rng);
        x1 = Vector(static_cast<std::size_t>(spec.n), 1.0);
      } else if (spec.kind == "rosenbrock") {
        obj = rosenbrock(spec.c);
        x1 = obj->suggested_start;
      } else {
        obj = registry_lookup(spec.name, spec.n);
        x1 = obj->suggested_start;
      }

      for (const auto& rule : suite.rules) {
        for (double eps : suite.tolerances) {
          SolverConfig cfg = suite.solver;
          cfg.epsilon = eps;
          cfg.record_iterations = false;
          if (spec.kind == "rosenbrock") {
            // proximity rule |x - (1,1)| < eps is the only stopping criterion
            cfg.target_point = Vector{1.0, 1.0};
            cfg.target_radius = eps;
            cfg.epsilon = 0.0;
          }
          const auto t0 = std::chrono::steady_clock::now();
          const Trace trace = quad ? solve_quadratic(*quad, rule, cfg, x1)
                                   : solve_nonquadratic(*obj, rule, cfg, x1);
          const auto t1 = std::chrono::steady_clock::now();

          RunRecord rec;
          rec.problem_id = label;
          rec.rule_name = rule.name();
          rec.epsilon = eps;
          rec.seed = seed;
          rec.iterations = trace.iterations;
          rec.fevals = trace.fevals;
          rec.grad_ratio_final = trace.grad_ratio();
          rec.status = trace.status;
          rec.wall_time_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
          records.push_back(std::move(rec));
        }
      }
    }
  }

  std::sort(records.begin(), records.end(), [](const RunRecord& a, const RunRecord& b) {
    return std::tie(a.problem_id, a.rule_name, a.epsilon, a.seed) <
           std::tie(b.problem_id, b.rule_name, b.epsilon, b.seed);
  });
  return records;
}

enum class ProfileMetric { iterations, fevals };

inline ProfileMetric parse_profile_metric(const std::string& s) {
  if (s == "iterations" || s == "iters") return ProfileMetric::iterations;
  if (s == "fevals") return ProfileMetric::fevals;
  throw std::invalid_argument("unknown profile metric '" + s + "' (use iterations or fevals)");
}

/// Cumulative distribution of log2 cost ratios for one rule.
struct ProfileCurve {
  std::string rule_name;
  std::vector<std::pair<double, double>> points;  // (omega, rho(omega)), omega = log2(ratio)
};

/// Dolan-More profiles in log2 scale. A cell is one (problem_id, eps, seed)
/// triple; unsolved runs get infinite ratio and cells nobody solved stay in the
/// denominator, so rho at the right end is the fraction of cells solved.
inline std::vector<ProfileCurve> performance_profile(const std::vector<RunRecord>& records,
                                                     ProfileMetric metric) {
  if (records.empty()) throw std::invalid_argument("performance_profile: no records");

  using CellKey = std::tuple<std::string, double, std::uint64_t>;
  std::map<CellKey, std::map<std::string, double>> cells;  // cell -> rule -> cost (inf if unsolved)
  std::vector<std::string> rules;
  for (const auto& r : records) {
    const double cost =
        (r.status == SolveStatus::Converged)
            ? static_cast<double>(metric == ProfileMetric::iterations ? r.iterations : r.fevals)
            : std::numeric_limits<double>::infinity();
    cells[{r.problem_id, r.epsilon, r.seed}][r.rule_name] = cost;
    if (std::find(rules.begin(), rules.end(), r.rule_name) == rules.end())
      rules.push_back(r.rule_name);
  }

  // log2 ratios per (cell, rule); min over solved rules only.
  std::map<std::string, std::vector<double>> omegas;
  for (const auto& [key, byrule] : cells) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [_, cost] : byrule) best = std::min(best, cost);
    for (const auto& rule : rules) {
      const auto it = byrule.find(rule);
      const double cost = (it == byrule.end()) ? std::numeric_limits<double>::infinity() : it->second;
      const double ratio = (std::isfinite(cost) && std::isfinite(best) && best > 0.0)
                               ? cost / best
                               : std::numeric_limits<double>::infinity();
      omegas[rule].push_back(std::isfinite(ratio) ? std::log2(ratio)
                                                  : std::numeric_limits<double>::infinity());
    }
  }

  // Union of finite breakpoints; omega = 0 always present.
  std::vector<double> breaks{0.0};
  for (const auto& [_, v] : omegas)
    for (double w : v)
      if (std::isfinite(w)) breaks.push_back(w);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  const double total = static_cast<double>(cells.size());
  std::vector<ProfileCurve> curves;
  for (const auto& rule : rules) {
    ProfileCurve c;
    c.rule_name = rule;
    const auto& v = omegas[rule];
    for (double w : breaks) {
      const auto count = std::count_if(v.begin(), v.end(), [w](double x) { return x <= w; });
      c.points.emplace_back(w, static_cast<double>(count) / total);
    }
    curves.push_back(std::move(c));
  }
  return curves;
}

inline void write_profile_csv(std::ostream& os, const std::vector<ProfileCurve>& curves) {
  os << "rule,omega,rho\n";
  for (const auto& c : curves)
    for (const auto& [w, rho] : c.points)
      os << c.rule_name << ',' << detail::fmt17(w) << ',' << detail::fmt17(rho) << '\n';
}

}  // namespace specgrad
