#include <catch2/catch.hpp>

#include <cmath>
#include <sstream>

#include "specgrad/problems.hpp"
#include "specgrad/solver.hpp"

using namespace specgrad;

namespace {

QuadraticProblem diag_problem(Vector eigenvalues, Vector minimizer) {
  const double lo = *std::min_element(eigenvalues.begin(), eigenvalues.end());
  const double hi = *std::max_element(eigenvalues.begin(), eigenvalues.end());
  return QuadraticProblem{HouseholderChain({}, std::move(eigenvalues)), std::move(minimizer), lo, hi};
}

ObjectiveFunction half_sqnorm(int n) {
  ObjectiveFunction f;
  f.name = "half_sqnorm";
  f.dimension = n;
  f.suggested_start = Vector(static_cast<std::size_t>(n), 1.0);
  f.known_minimum_value = 0.0;
  f.value = [](std::span<const double> x) { return 0.5 * dot(x, x); };
  f.gradient = [](std::span<const double> x) { return Vector(x.begin(), x.end()); };
  return f;
}

}  // namespace

TEST_CASE("gll acceptance test") {
  const Vector history{5.0, 4.0, 6.0};
  SECTION("zero gradient term compares against the window max") {
    CHECK(gll_accept(6.0, history, 1e-4, 1.0, 1.0, 0.0));
    CHECK_FALSE(gll_accept(6.0 + 1e-9, history, 1e-4, 1.0, 1.0, 0.0));
  }
  SECTION("threshold arithmetic") {
    const double threshold = 6.0 - 1e-4;
    CHECK(gll_accept(threshold, history, 1e-4, 1.0, 1.0, 1.0));
    CHECK_FALSE(gll_accept(threshold + 1e-8, history, 1e-4, 1.0, 1.0, 1.0));
  }
  SECTION("window of one is plain Armijo") {
    CHECK(gll_accept(1.0 - 2e-4, Vector{1.0}, 1e-4, 1.0, 1.0, 1.0));
    CHECK_FALSE(gll_accept(1.0, Vector{1.0}, 1e-4, 1.0, 1.0, 1.0));
  }
  SECTION("empty history rejected") {
    CHECK_THROWS_AS(gll_accept(0.0, Vector{}, 1e-4, 1.0, 1.0, 1.0), std::invalid_argument);
  }
}

TEST_CASE("quadratic driver: 1-D converges in one Cauchy step") {
  const auto p = diag_problem(Vector{5.0}, Vector{1.0});
  SolverConfig cfg;
  cfg.epsilon = 1e-10;
  const Trace t = solve_quadratic(p, RuleConfig{RuleKind::bb1}, cfg, Vector{3.0});
  CHECK(t.status == SolveStatus::Converged);
  CHECK(t.iterations == 1);
  CHECK(t.x_final[0] == Approx(1.0));
}

TEST_CASE("quadratic driver: eigen-direction start finishes in two steps") {
  const auto p = diag_problem(Vector{50.0, 1.0}, Vector{0.0, 0.0});
  SolverConfig cfg;
  cfg.epsilon = 1e-12;
  const Trace t = solve_quadratic(p, RuleConfig{RuleKind::bb1}, cfg, Vector{2.0, 0.0});
  CHECK(t.status == SolveStatus::Converged);
  CHECK(t.iterations <= 2);
  CHECK(t.rows.front().alpha == Approx(50.0));  // Rayleigh quotient of the eigenvector
}

TEST_CASE("quadratic driver handles the tridiagonal operator") {
  Rng rng(303);
  const auto p = make_bvp_quadratic(200, rng);
  SolverConfig cfg;
  cfg.epsilon = 1e-8;
  const Trace t =
      solve_quadratic(p, RuleConfig{RuleKind::pbb}, cfg, Vector(200, 1.0));
  CHECK(t.status == SolveStatus::Converged);
  CHECK(t.grad_ratio() <= 1e-8);
  // ||x - x*|| <= ||A(x - x*)|| / lambda_min, with slack for the final norms
  CHECK(norm2(subtract(t.x_final, p.minimizer)) <=
        1.01 * t.grad_norm_final / p.lambda_min);
}

TEST_CASE("quadratic driver converges on a seeded random instance") {
  Rng rng(101);
  const auto p = make_random_quadratic({1, 1e3, 100}, rng);
  SolverConfig cfg;
  cfg.epsilon = 1e-6;
  for (RuleKind kind : {RuleKind::pbb, RuleKind::bb1, RuleKind::abb, RuleKind::tbb}) {
    RuleConfig rule;
    rule.kind = kind;
    const Trace t = solve_quadratic(p, rule, cfg);
    INFO("rule " << rule.name());
    CHECK(t.status == SolveStatus::Converged);
    CHECK(t.grad_ratio() <= 1e-6);
    for (const auto& row : t.rows) {
      CHECK(row.alpha >= cfg.alpha_min);
      CHECK(row.alpha <= cfg.alpha_max);
    }
  }
}

TEST_CASE("bb1 gradients on diag(lambda,1) follow the ratio recurrence") {
  const double lambda = 30.0;
  const auto p = diag_problem(Vector{lambda, 1.0}, Vector{0.0, 0.0});
  std::vector<Vector> gradients;
  SolverConfig cfg;
  cfg.epsilon = 1e-14;
  solve_quadratic(p, RuleConfig{RuleKind::bb1}, cfg, Vector{1.0 / lambda, 1.0},
                  [&](int, const Vector& g, double) { gradients.push_back(g); });

  // ratios measured while components exceed 1e-12 and the ratio stays within
  // the eight decades where the component update resolves below the tolerance
  std::vector<double> eps;
  for (const auto& g : gradients) {
    if (std::abs(g[0]) < 1e-12 || std::abs(g[1]) < 1e-12) break;
    const double e = (g[0] * g[0]) / (g[1] * g[1]);
    if (e < 1e-8 || e > 1e8) break;
    eps.push_back(e);
  }
  REQUIRE(eps.size() >= 20);
  for (std::size_t k = 0; k + 2 < eps.size(); ++k) {
    const double predicted = eps[k + 1] / (eps[k] * eps[k]);
    CHECK(eps[k + 2] == Approx(predicted).epsilon(1e-8));
  }
}

TEST_CASE("nonquadratic driver: unit step solves the separable quadratic") {
  const auto f = half_sqnorm(6);
  SolverConfig cfg;
  cfg.epsilon = 1e-10;
  const Trace t = solve_nonquadratic(f, RuleConfig{RuleKind::pbb}, cfg, f.suggested_start);
  CHECK(t.status == SolveStatus::Converged);
  CHECK(t.iterations == 1);
  CHECK(t.fevals == 2);
}

TEST_CASE("nonquadratic driver on rosenbrock") {
  const auto f = rosenbrock(100.0);
  SolverConfig cfg;
  cfg.epsilon = 1e-8;

  RuleConfig rule;  // adaptive pbb
  const Trace t = solve_nonquadratic(f, rule, cfg, f.suggested_start);
  REQUIRE(t.status == SolveStatus::Converged);
  CHECK(t.grad_ratio() <= 1e-8);
  CHECK(norm2(subtract(t.x_final, Vector{1.0, 1.0})) < 1e-3);

  SECTION("feval accounting: initial + one per line-search trial") {
    long expected = 1;
    for (const auto& row : t.rows) expected += row.backtracks + 1;
    CHECK(t.fevals == expected);
  }
  SECTION("accepted values satisfy the nonmonotone guarantee") {
    for (std::size_t i = 1; i < t.rows.size(); ++i) {
      double worst = -1e300;
      for (std::size_t j = (i >= 10 ? i - 10 : 0); j < i; ++j)
        worst = std::max(worst, t.rows[j].f);
      CHECK(t.rows[i].f <= worst + 1e-12 * std::abs(worst));
    }
  }
  SECTION("alphas stay inside the safeguard interval") {
    for (const auto& row : t.rows) {
      CHECK(row.alpha >= cfg.alpha_min);
      CHECK(row.alpha <= cfg.alpha_max);
    }
  }
}

TEST_CASE("nonquadratic driver stops near a target point") {
  const auto f = rosenbrock(100.0);
  SolverConfig cfg;
  cfg.epsilon = 1e-14;  // gradient criterion effectively off
  cfg.target_point = Vector{1.0, 1.0};
  cfg.target_radius = 1e-1;
  const Trace t = solve_nonquadratic(f, RuleConfig{RuleKind::pbb}, cfg, f.suggested_start);
  CHECK(t.status == SolveStatus::Converged);
  CHECK(norm2(subtract(t.x_final, Vector{1.0, 1.0})) < 1e-1);
}

TEST_CASE("negative curvature triggers the gradient-norm fallback") {
  ObjectiveFunction f;
  f.name = "sine";
  f.dimension = 1;
  f.suggested_start = Vector{2.0};
  f.value = [](std::span<const double> x) { return std::sin(x[0]); };
  f.gradient = [](std::span<const double> x) { return Vector{std::cos(x[0])}; };

  SolverConfig cfg;
  cfg.epsilon = 1e-8;
  cfg.max_iter = 50;
  const Trace t = solve_nonquadratic(f, RuleConfig{RuleKind::bb1}, cfg, f.suggested_start);
  REQUIRE(t.rows.size() >= 2);
  // first step: x 2 -> 2.416..., s^T y < 0 there, so the second alpha must be
  // the fallback 1/max(min(1/||g||,1e5),1) with ||g|| = |cos(x_2)| < 1
  const double x2 = 2.0 - std::cos(2.0);
  const double gnorm2 = std::abs(std::cos(x2));
  REQUIRE(gnorm2 < 1.0);
  CHECK(t.rows[1].alpha == Approx(gnorm2));
  const double step = 1.0 / t.rows[1].alpha;
  CHECK(step >= 1.0);
  CHECK(step <= 1e5);
}

TEST_CASE("status reporting") {
  const auto f = rosenbrock(100.0);
  SECTION("maximum iterations") {
    SolverConfig cfg;
    cfg.epsilon = 1e-14;
    cfg.max_iter = 3;
    CHECK(solve_nonquadratic(f, RuleConfig{}, cfg, f.suggested_start).status ==
          SolveStatus::MaxIter);
  }
  SECTION("function evaluation budget") {
    SolverConfig cfg;
    cfg.epsilon = 1e-14;
    cfg.max_feval = 10;
    const Trace t = solve_nonquadratic(f, RuleConfig{}, cfg, f.suggested_start);
    CHECK(t.status == SolveStatus::MaxFeval);
    CHECK(t.fevals <= 10);
  }
  SECTION("line search failure on a lying gradient") {
    ObjectiveFunction lie;
    lie.name = "flat_with_fake_gradient";
    lie.dimension = 1;
    lie.value = [](std::span<const double>) { return 0.0; };
    lie.gradient = [](std::span<const double>) { return Vector{1.0}; };
    SolverConfig cfg;
    cfg.epsilon = 1e-14;
    const Trace t = solve_nonquadratic(lie, RuleConfig{}, cfg, Vector{0.0});
    CHECK(t.status == SolveStatus::LineSearchFailure);
  }
}

TEST_CASE("solver configuration is validated") {
  const auto p = diag_problem(Vector{2.0}, Vector{0.0});
  SolverConfig cfg;
  cfg.sigma = 1.5;
  CHECK_THROWS_AS(solve_quadratic(p, RuleConfig{}, cfg, Vector{1.0}), std::invalid_argument);
  cfg.sigma = 1e-4;
  cfg.memory = 0;
  CHECK_THROWS_AS(solve_nonquadratic(half_sqnorm(2), RuleConfig{}, cfg, Vector{1.0, 1.0}),
                  std::invalid_argument);
}

TEST_CASE("trace serializes to csv") {
  const auto p = diag_problem(Vector{4.0, 1.0}, Vector{0.5, -0.5});
  SolverConfig cfg;
  cfg.epsilon = 1e-8;
  const Trace t = solve_quadratic(p, RuleConfig{RuleKind::pbb}, cfg, Vector{1.0, 1.0});
  std::ostringstream os;
  t.write_csv(os);
  const std::string text = os.str();
  CHECK(text.rfind("k,alpha,m_k,grad_norm,f,cos2,fevals,backtracks\n", 0) == 0);
  CHECK(text.find("summary,Converged") != std::string::npos);
}
