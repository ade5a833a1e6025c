//
// specgrad - Copyright 2026 the specgrad authors.
// SPDX-License-Identifier: Apache-2.0
//
// Command-line benchmark harness: seeded suites over problems x rules x
// tolerances, ratio-dynamics sweeps, and log2 performance profiles, all
// emitted as CSV.
//
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "specgrad/specgrad.hpp"

namespace {

using namespace specgrad;

std::string default_out(const std::string& stem) {
  const char* dir = std::getenv("SPECGRAD_OUT_DIR");
  const std::filesystem::path base = (dir && *dir) ? dir : ".";
  return (base / (stem + ".csv")).string();
}

std::vector<RuleConfig> build_rules(const std::vector<std::string>& names, double eta, double xi,
                                    int window, int cycle, int q) {
  if (names.empty()) throw std::invalid_argument("--rules must name at least one rule");
  std::vector<RuleConfig> rules;
  for (const auto& n : names) {
    RuleConfig cfg;
    cfg.kind = parse_rule_kind(n);
    cfg.eta = eta;
    cfg.xi = xi;
    cfg.window = window;
    cfg.cycle = cycle;
    cfg.q = q;
    rules.push_back(cfg);
  }
  return rules;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open output file '" + path + "'");
  return os;
}

std::vector<std::string> rule_metadata(const std::vector<RuleConfig>& rules) {
  std::vector<std::string> meta;
  for (const auto& r : rules) meta.push_back(r.to_text());
  return meta;
}

struct CommonFlags {
  std::vector<std::string> rules{};
  std::vector<double> eps{1e-6};
  std::uint64_t seed = 20260101;
  std::string out;
  double eta = 0.5;
  double xi = 0.8;
  int window = 5;
  int cycle = 4;
  int q = 8;
};

void add_common(CLI::App* cmd, CommonFlags& f, int default_cycle) {
  f.cycle = default_cycle;
  cmd->add_option("--rules", f.rules,
                  "step-size rules: bb1 bb2 pbb abb abbmin abbbon atc tbb")
      ->required()
      ->delimiter(',');
  cmd->add_option("--eps", f.eps, "stopping tolerances")->delimiter(',');
  cmd->add_option("--seed", f.seed, "master seed");
  cmd->add_option("--out", f.out, "output CSV path (default: $SPECGRAD_OUT_DIR/<cmd>.csv)");
  cmd->add_option("--eta", f.eta, "abb threshold");
  cmd->add_option("--xi", f.xi, "abbmin threshold");
  cmd->add_option("--window", f.window, "abbmin/abbbon BB2 window");
  cmd->add_option("--cycle", f.cycle, "atc cycle length");
  cmd->add_option("--q", f.q, "adaptive interpolation exponent");
}

void emit_records(const std::string& out_path, const std::string& stem,
                  const std::vector<RunRecord>& records, std::vector<std::string> metadata) {
  const std::string path = out_path.empty() ? default_out(stem) : out_path;
  auto os = open_out(path);
  write_records_csv(os, records, metadata);
  std::cout << records.size() << " records -> " << path << "\n";
}

int run_quad(const CommonFlags& f, int n, const std::vector<double>& kappas,
             const std::vector<int>& dists, int reps) {
  SuiteSpec suite;
  for (int d : dists)
    for (double k : kappas) {
      ProblemSpec p;
      p.kind = "quad";
      p.n = n;
      p.kappa = k;
      p.distribution_id = d;
      suite.problems.push_back(p);
    }
  suite.rules = build_rules(f.rules, f.eta, f.xi, f.window, f.cycle, f.q);
  suite.tolerances = f.eps;
  suite.repetitions = reps;

  auto meta = rule_metadata(suite.rules);
  meta.push_back("suite=quad n=" + std::to_string(n) + " reps=" + std::to_string(reps) +
                 " master_seed=" + std::to_string(f.seed));
  meta.push_back("eigenvalues sampled uniformly inside each layout interval");
  emit_records(f.out, "quad", run_suite(suite, f.seed), std::move(meta));
  return 0;
}

int run_bvp(const CommonFlags& f, const std::vector<int>& ns, int reps) {
  SuiteSpec suite;
  for (int n : ns) {
    ProblemSpec p;
    p.kind = "bvp";
    p.n = n;
    suite.problems.push_back(p);
  }
  suite.rules = build_rules(f.rules, f.eta, f.xi, f.window, f.cycle, f.q);
  suite.tolerances = f.eps;
  suite.repetitions = reps;

  auto meta = rule_metadata(suite.rules);
  meta.push_back("suite=bvp master_seed=" + std::to_string(f.seed));
  emit_records(f.out, "bvp", run_suite(suite, f.seed), std::move(meta));
  return 0;
}

int run_rosenbrock(const CommonFlags& f, const std::vector<double>& cs) {
  SuiteSpec suite;
  for (double c : cs) {
    ProblemSpec p;
    p.kind = "rosenbrock";
    p.n = 2;
    p.c = c;
    suite.problems.push_back(p);
  }
  suite.rules = build_rules(f.rules, f.eta, f.xi, f.window, f.cycle, f.q);
  suite.tolerances = f.eps;
  suite.repetitions = 1;

  auto meta = rule_metadata(suite.rules);
  meta.push_back("suite=rosenbrock start=(-1.2,1) stop=|x-(1,1)|<eps");
  emit_records(f.out, "rosenbrock", run_suite(suite, f.seed), std::move(meta));
  return 0;
}

int run_nonquad(const CommonFlags& f, std::vector<std::string> functions) {
  if (functions.size() == 1 && functions[0] == "core") functions = registry_core_names();
  else if (functions.size() == 1 && functions[0] == "all") functions = registry_names();

  SuiteSpec suite;
  for (const auto& name : functions) {
    ProblemSpec p;
    p.kind = "nonquad";
    p.name = name;
    suite.problems.push_back(p);
  }
  suite.rules = build_rules(f.rules, f.eta, f.xi, f.window, f.cycle, f.q);
  suite.tolerances = f.eps;
  suite.repetitions = 1;

  auto meta = rule_metadata(suite.rules);
  meta.push_back("suite=nonquad master_seed=" + std::to_string(f.seed));
  emit_records(f.out, "nonquad", run_suite(suite, f.seed), std::move(meta));
  return 0;
}

// One (lambda, policy) pair emits the trajectory (step, eps); several pairs
// emit one sweep row (lambda, m_or_policy, eps0, eps1, first_index_le_1, steps)
// per combination.
int run_dynamics(const std::vector<double>& lambdas, const std::vector<double>& fixed_ms,
                 bool adaptive, int q, double eps0, double eps1, int steps,
                 const std::string& out_path) {
  if (fixed_ms.empty() && !adaptive)
    throw std::invalid_argument("dynamics needs --m VALUE(S) and/or --adaptive");

  std::vector<MPolicy> policies;
  std::vector<std::string> policy_names;
  for (double m : fixed_ms) {
    policies.push_back(MPolicy::fixed_m(m));
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", m);
    policy_names.emplace_back(buf);
  }
  if (adaptive) {
    policies.push_back(MPolicy::adaptive(q));
    policy_names.push_back("adaptive_q" + std::to_string(q));
  }

  const std::string path = out_path.empty() ? default_out("dynamics") : out_path;
  auto os = open_out(path);
  char buf[40];

  if (lambdas.size() == 1 && policies.size() == 1) {
    const auto result = simulate_dynamics({eps0, eps1, lambdas[0], policies[0]}, steps);
    os << "step,eps\n";
    for (std::size_t j = 0; j < result.eps.size(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", result.eps[j]);
      os << j << ',' << buf << '\n';
    }
    if (result.first_index_le_one)
      os << "# first_index_le_1=" << *result.first_index_le_one << '\n';
    if (result.divergence_index) os << "# divergence_index=" << *result.divergence_index << '\n';
    std::cout << result.eps.size() << " steps -> " << path << "\n";
    return 0;
  }

  os << "lambda,m_or_policy,eps0,eps1,first_index_le_1,steps\n";
  for (double lambda : lambdas) {
    for (std::size_t pi = 0; pi < policies.size(); ++pi) {
      const auto result = simulate_dynamics({eps0, eps1, lambda, policies[pi]}, steps);
      std::snprintf(buf, sizeof buf, "%.17g", lambda);
      os << buf << ',' << policy_names[pi] << ',';
      std::snprintf(buf, sizeof buf, "%.17g", eps0);
      os << buf << ',';
      std::snprintf(buf, sizeof buf, "%.17g", eps1);
      os << buf << ',';
      if (result.first_index_le_one) os << *result.first_index_le_one;
      os << ',' << steps << '\n';
    }
  }
  std::cout << lambdas.size() * policies.size() << " sweep rows -> " << path << "\n";
  return 0;
}

int run_profile(const std::string& input, const std::string& metric, const std::string& out_path) {
  std::ifstream is(input);
  if (!is) throw std::invalid_argument("cannot read records file '" + input + "'");
  const auto records = read_records_csv(is);
  const auto curves = performance_profile(records, parse_profile_metric(metric));
  const std::string path = out_path.empty() ? default_out("profile") : out_path;
  auto os = open_out(path);
  write_profile_csv(os, curves);
  std::cout << curves.size() << " curves -> " << path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spectral gradient step-size benchmark harness"};
  app.require_subcommand(1);
  app.set_config("--config", "",
                 "key=value file; keys match the flags, grouped under a [subcommand] header");

  // quad
  CommonFlags quad_flags;
  int quad_n = 100, quad_reps = 10;
  std::vector<double> quad_kappas{1e3, 1e4};
  std::vector<int> quad_dists{1, 2, 3, 4, 5, 6, 7};
  auto* quad = app.add_subcommand("quad", "random quadratics with prescribed spectra");
  quad->add_option("--n", quad_n, "problem dimension");
  quad->add_option("--kappa", quad_kappas, "condition numbers")->delimiter(',');
  quad->add_option("--dist", quad_dists, "spectrum layouts (1..7)")->delimiter(',');
  quad->add_option("--reps", quad_reps, "independent repetitions");
  add_common(quad, quad_flags, 4);

  // bvp
  CommonFlags bvp_flags;
  std::vector<int> bvp_ns{500, 1000};
  int bvp_reps = 10;
  auto* bvp = app.add_subcommand("bvp", "two-point boundary-value tridiagonal quadratics");
  bvp->add_option("--n", bvp_ns, "problem sizes")->delimiter(',');
  bvp->add_option("--reps", bvp_reps, "independent repetitions");
  add_common(bvp, bvp_flags, 8);

  // rosenbrock
  CommonFlags rosen_flags;
  rosen_flags.eps = {1e-1, 1e-2, 1e-4, 1e-8};
  std::vector<double> rosen_cs{100.0};
  auto* rosen = app.add_subcommand("rosenbrock", "valley problem, proximity stopping rule");
  rosen->add_option("--c", rosen_cs, "difficulty constants")->delimiter(',');
  add_common(rosen, rosen_flags, 4);

  // nonquad
  CommonFlags nonquad_flags;
  nonquad_flags.eps = {1e-4, 1e-6, 1e-8};
  std::vector<std::string> nonquad_functions{"core"};
  auto* nonquad = app.add_subcommand("nonquad", "named test functions with analytic gradients");
  nonquad->add_option("--functions", nonquad_functions,
                      "registry names, or 'core' / 'all'")
      ->delimiter(',');
  add_common(nonquad, nonquad_flags, 4);

  // dynamics
  std::vector<double> dyn_lambdas, dyn_ms;
  double dyn_eps0 = 2.0, dyn_eps1 = 3.0;
  bool dyn_adaptive = false;
  int dyn_steps = 200, dyn_q = 8;
  std::string dyn_out;
  auto* dyn = app.add_subcommand("dynamics", "gradient-ratio recurrence sweep");
  dyn->add_option("--lambda", dyn_lambdas, "larger eigenvalue(s), each > 1")
      ->required()
      ->delimiter(',');
  dyn->add_option("--m", dyn_ms, "fixed interpolation weight(s) in (0,1]")->delimiter(',');
  dyn->add_flag("--adaptive", dyn_adaptive, "adaptive interpolation weight");
  dyn->add_option("--q", dyn_q, "adaptive exponent");
  dyn->add_option("--eps0", dyn_eps0, "older initial ratio")->required();
  dyn->add_option("--eps1", dyn_eps1, "newer initial ratio")->required();
  dyn->add_option("--steps", dyn_steps, "number of recurrence steps");
  dyn->add_option("--out", dyn_out, "output CSV path");

  // profile
  std::string prof_input, prof_metric = "iterations", prof_out;
  auto* prof = app.add_subcommand("profile", "log2 performance profiles from a records CSV");
  prof->add_option("--input", prof_input, "records CSV produced by a suite command")->required();
  prof->add_option("--metric", prof_metric, "iterations or fevals");
  prof->add_option("--out", prof_out, "output CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (quad->parsed()) return run_quad(quad_flags, quad_n, quad_kappas, quad_dists, quad_reps);
    if (bvp->parsed()) return run_bvp(bvp_flags, bvp_ns, bvp_reps);
    if (rosen->parsed()) return run_rosenbrock(rosen_flags, rosen_cs);
    if (nonquad->parsed()) return run_nonquad(nonquad_flags, nonquad_functions);
    if (dyn->parsed())
      return run_dynamics(dyn_lambdas, dyn_ms, dyn_adaptive, dyn_q, dyn_eps0, dyn_eps1, dyn_steps,
                          dyn_out);
    if (prof->parsed()) return run_profile(prof_input, prof_metric, prof_out);
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::out_of_range& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
