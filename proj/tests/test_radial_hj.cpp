#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "curveflow/radial_hj.hpp"

using namespace curveflow;

namespace {
double zero(double) { return 0.0; }
}

TEST_CASE("hamiltonian") {
  CHECK(hamiltonian(1.0, 0.0, zero_source()) == 0.0);
  CHECK(hamiltonian(2.0, 1.0, tent_source(2.0)) == doctest::Approx(-2.5));
  const auto src = tent_source(2.0);
  for (double r : {0.3, 1.0, 4.0})
    for (double p : {-2.0, 0.5, 3.0})
      CHECK(hamiltonian(r, p, src) - hamiltonian(r, -p, src) == doctest::Approx(-2.0 * p / r));
  CHECK_THROWS_AS(hamiltonian(0.0, 1.0, src), ConfigError);
  // concavity in p
  for (double p : {-1.0, 0.0, 0.7})
    CHECK(hamiltonian(1.5, p, src) >=
          0.5 * (hamiltonian(1.5, p - 0.3, src) + hamiltonian(1.5, p + 0.3, src)) - 1e-12);
}

TEST_CASE("grid") {
  const auto g = RadialGrid::make(0.1, 5.0);
  CHECK(g.r_min == doctest::Approx(0.05));
  CHECK(g.node(0) > 0.0);
  CHECK(g.node(g.size - 1) <= 5.0 + 1e-12);
  CHECK_THROWS_AS(RadialGrid::make(0.0, 5.0), ConfigError);
}

TEST_CASE("single steps") {
  const auto g = RadialGrid::make(0.1, 10.0, 0.1);
  SUBCASE("zero data gets dt f") {
    const auto tent = tent_source(2.0);
    const RadialHJSolver s(tent, g, -1.0);
    const double dt = 0.5 * s.max_stable_dt();
    const auto phi = s.step(RadialField::from_function(g, zero), dt);
    for (std::size_t i = 0; i + 1 < g.size; ++i)
      CHECK(phi.values[i] == doctest::Approx(dt * tent.profile(g.node(i))));
  }
  SUBCASE("constants are stationary without source") {
    const RadialHJSolver s(zero_source(), g, 0.0);
    const auto phi = s.step(RadialField::from_function(g, [](double) { return 3.0; }), s.max_stable_dt());
    for (double v : phi.values) CHECK(v == doctest::Approx(3.0));
  }
  SUBCASE("phi = -r at r = 5") {
    // Exact slopes -1: phi_t = (1/5)(-1) + |-1| = 4/5, so the node rises.
    const RadialHJSolver s(zero_source(), g, -1.0);
    const double dt = s.max_stable_dt();
    const auto phi = s.step(RadialField::from_function(g, [](double r) { return -r; }), dt);
    const std::size_t i = g.nearest(5.0);
    REQUIRE(g.node(i) == doctest::Approx(5.0));
    CHECK(phi.values[i] == doctest::Approx(-5.0 + 0.8 * dt).epsilon(1e-12));
  }
  SUBCASE("CFL violation is rejected") {
    const RadialHJSolver s(zero_source(), g, 0.0);
    CHECK_THROWS_AS(s.step(RadialField::from_function(g, zero), 1.01 * s.max_stable_dt()), NumericError);
  }
}

TEST_CASE("evolve") {
  const auto g = RadialGrid::make(0.05, 20.0, 0.05);
  const auto tent = tent_source(2.0);
  SUBCASE("T = 0 leaves the data alone") {
    const auto phi0 = RadialField::from_function(g, [](double r) { return std::sin(r); });
    const auto phi = RadialHJSolver(tent, g, -1.0).evolve(phi0, 0.0);
    CHECK(phi.values == phi0.values);
  }
  SUBCASE("nonincreasing data stays nonincreasing without source") {
    const auto phi = RadialHJSolver(zero_source(), g, -1.0)
                         .evolve(RadialField::from_function(g, [](double r) { return -r * r / 10.0; }), 2.0);
    for (std::size_t i = 1; i < g.size; ++i) CHECK(phi.values[i] <= phi.values[i - 1] + 1e-12);
  }
  SUBCASE("speed at the peak") {
    const auto rep = evolve(RadialField::from_function(g, zero), 20.0, tent);
    CHECK(rep.field.values[g.nearest(2.0)] / 20.0 == doctest::Approx(1.0).epsilon(0.05));
    CHECK(rep.steps > 0);
  }
}

TEST_CASE("comparison principle on random ordered data") {
  const auto g = RadialGrid::make(0.1, 12.0, 0.1);
  const RadialHJSolver s(tent_source(2.0), g, -1.0);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const double a = U(rng), b = U(rng), k = 2.0 + U(rng), lift = 0.75 + 0.5 * U(rng);
    auto lo = RadialField::from_function(g, [&](double r) { return a * std::sin(k * r) + b; });
    auto hi = RadialField::from_function(g, [&](double r) {
      return a * std::sin(k * r) + b + lift * std::max(0.0, 1.0 - std::abs(r - 4.0));
    });
    const double dt = s.max_stable_dt();
    for (int n = 0; n < 200; ++n) {
      lo = s.step(lo, dt);
      hi = s.step(hi, dt);
      for (std::size_t i = 0; i < g.size; ++i) REQUIRE(lo.values[i] <= hi.values[i] + 1e-12);
    }
  }
}

TEST_CASE("causality: far perturbations do not travel faster than the CFL cone") {
  const auto g = RadialGrid::make(0.1, 20.0, 0.1);
  const RadialHJSolver s(tent_source(2.0), g, -1.0);
  auto a = RadialField::from_function(g, zero);
  auto b = RadialField::from_function(g, [](double r) { return r > 15.0 ? 5.0 : 0.0; });
  const double dt = s.max_stable_dt();
  const int steps = 20;
  for (int n = 0; n < steps; ++n) {
    a = s.step(a, dt);
    b = s.step(b, dt);
  }
  // One node per step at most.
  for (std::size_t i = 0; i < g.size; ++i)
    if (g.node(i) < 15.0 - 0.1 * (steps + 1)) CHECK(a.values[i] == b.values[i]);
}

TEST_CASE("control oracle") {
  const auto tent = tent_source(2.0);
  CHECK(control_oracle(3.0, 2.0, [](double) { return 4.0; }, zero_source()) == doctest::Approx(4.0));
  CHECK(control_oracle(1.7, 0.0, [](double r) { return r * r; }, tent) == doctest::Approx(2.89));
  // Staying at the peak is admissible: the value is just below t.
  OracleOptions coarse;
  coarse.h = 0.02;
  OracleOptions fine;
  fine.h = 0.01;
  const double v1 = control_oracle(2.0, 1.0, zero, tent, coarse);
  const double v2 = control_oracle(2.0, 1.0, zero, tent, fine);
  CHECK(v2 >= 0.9);
  CHECK(v2 <= 1.0 + 1e-9);
  CHECK(std::abs(v2 - v1) <= 0.05);
  CHECK_THROWS_AS(control_oracle(2.0, 1.005, zero, tent, fine), ConfigError);
}

TEST_CASE("solver agrees with the control oracle") {
  const auto tent = tent_source(2.0);
  const auto g = RadialGrid::make(0.02, 12.0, 0.02);
  const auto u0 = [](double r) { return -0.3 * r; };
  const auto phi = RadialHJSolver(tent, g, -1.0).evolve(RadialField::from_function(g, u0), 2.0);
  OracleOptions opt;
  opt.h = 0.01;
  for (double r : {0.5, 1.0, 2.0, 3.0, 4.5}) {
    const double oracle = control_oracle(r, 2.0, u0, tent, opt);
    CHECK(std::abs(phi.sample(r) - oracle) <= 0.1);
  }
}
