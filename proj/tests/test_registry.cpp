#include <catch2/catch.hpp>

#include <cmath>

#include "specgrad/rng.hpp"
#include "specgrad/test_functions.hpp"

using namespace specgrad;

namespace {

// Exactly-quadratic objectives admit any finite-difference step (the central
// difference has no truncation term), and need a large one: at their catalog
// start f can reach ~1e9, where a 1e-6 step changes f by only a few ulp.
bool exactly_quadratic(const std::string& name) {
  static const std::vector<std::string> quads = {
      "Almost Perturbed Quadratic", "Perturbed Quadratic", "Diagonal4", "DIXON3DQ",
      "DQDRTIC",                    "POWER",               "BIGGSB1"};
  return std::find(quads.begin(), quads.end(), name) != quads.end();
}

double fd_step_for(const std::string& name) { return exactly_quadratic(name) ? 0.1 : 1e-6; }

}  // namespace

TEST_CASE("registry lookups") {
  CHECK(registry_lookup("POWER").dimension == 2000);
  CHECK(registry_lookup("Extended Rosenbrock").dimension == 50);
  CHECK(registry_lookup("extended_rosenbrock", 10).dimension == 10);
  CHECK_THROWS_AS(registry_lookup("FOO"), std::out_of_range);
  CHECK_THROWS_WITH(registry_lookup("FOO"), Catch::Contains("POWER"));
}

TEST_CASE("every registered function passes the gradient check") {
  Rng rng(777);
  for (const auto& name : registry_names()) {
    // keep POWER small here; the acceptance suite runs it at full size
    const auto f = registry_lookup(name, name == "POWER" ? 200 : 0);
    const double h = fd_step_for(name);
    INFO("function " << name);
    CHECK(check_gradient(f, f.suggested_start, h) <= 1e-6);
    for (int trial = 0; trial < 5; ++trial) {
      Vector x = f.suggested_start;
      for (auto& e : x) e += rng.uniform(-0.25, 0.25);
      CHECK(check_gradient(f, x, h) <= 1e-6);
    }
  }
}

TEST_CASE("known minima evaluate to zero") {
  struct Case {
    std::string name;
    double at;
  };
  for (const auto& c : std::vector<Case>{{"Extended Rosenbrock", 1.0},
                                         {"Generalized Rosenbrock", 1.0},
                                         {"LIARWHD", 1.0},
                                         {"NONDIA", 1.0},
                                         {"CUBE", 1.0},
                                         {"BIGGSB1", 1.0},
                                         {"POWER", 0.0},
                                         {"Diagonal4", 0.0}}) {
    const auto f = registry_lookup(c.name, c.name == "POWER" ? 100 : 0);
    const Vector x(static_cast<std::size_t>(f.dimension), c.at);
    INFO("function " << c.name);
    CHECK(f.value(x) == Approx(0.0).margin(1e-12));
    CHECK(norm2(f.gradient(x)) == Approx(0.0).margin(1e-10));
  }
}

TEST_CASE("core set is registered") {
  for (const auto& name : registry_core_names()) {
    CHECK_NOTHROW(registry_lookup(name));
  }
}

TEST_CASE("dimension handling") {
  CHECK(registry_lookup("Diagonal4", 60).dimension == 60);
  CHECK_THROWS_AS(registry_lookup("Diagonal4", 1), std::invalid_argument);
}
