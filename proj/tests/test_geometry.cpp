#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "curveflow/geometry.hpp"

using namespace curveflow;

namespace {

std::vector<Point2> arc(Point2 c, double radius, double a0, double a1, int m) {
  std::vector<Point2> pts;
  for (int k = 0; k < m; ++k) {
    const double t = a0 + (a1 - a0) * k / (m - 1);
    pts.push_back({c.x + radius * std::cos(t), c.y + radius * std::sin(t)});
  }
  return pts;
}

// Level radii 1 +- delta under r' = 1 - 1/r, RK4 at a fine step.
double slab_factor(double delta, double T) {
  auto rk4 = [](double r, double T) {
    const double h = 1e-5;
    for (int k = 0; k < static_cast<int>(T / h); ++k) {
      auto f = [](double x) { return 1.0 - 1.0 / x; };
      const double k1 = f(r), k2 = f(r + 0.5 * h * k1), k3 = f(r + 0.5 * h * k2), k4 = f(r + h * k3);
      r += h * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0;
    }
    return r;
  };
  const double hi = rk4(1.0 + delta, T), lo = rk4(1.0 - delta, T);
  return (hi * hi - lo * lo) / ((1 + delta) * (1 + delta) - (1 - delta) * (1 - delta));
}

const StadiumSpec kSpec{1.0};

}  // namespace

TEST_CASE("explicit solution") {
  CHECK(explicit_solution({1.5, 0.0}) == doctest::Approx(-0.5));
  CHECK(explicit_solution({0.6, 0.8}) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(explicit_solution({-0.5, 0.3}) == 0.0);
  CHECK(explicit_solution({1.5, 0.0}, kSpec, [](double s) { return s * s * s; }) == doctest::Approx(-0.125));
  CHECK_THROWS_AS(explicit_solution({3.0, 0.0}), ConfigError);
  CHECK_THROWS_AS(explicit_solution({1.5, 0.0}, kSpec, [](double s) { return s + 1.0; }), ConfigError);
}

TEST_CASE("residual on U") {
  const double dx = 0.02, eps = dx * dx;
  const auto g = Grid2D::make(2.5, dx);
  const double bound = 10.0 * (dx + eps);
  CHECK(residual_on_U(explicit_solution_field(g, kSpec), kSpec, eps) <= bound);
  CHECK(residual_on_U(explicit_solution_field(g, kSpec, [](double s) { return s * s * s; }), kSpec, eps) <= bound);
  const auto flat = LevelSetField2D::from_function(g, [](Point2 x) { return x.x; });
  CHECK(residual_on_U(flat, kSpec, eps) == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("level curves of the explicit solution are unit arcs") {
  const double dx = 0.02, m = 2 * dx;
  const auto g = Grid2D::make(2.5, dx);
  const auto v = explicit_solution_field(g, kSpec);
  const CellMask mask = [&](Point2 x) { return x.x > m && std::abs(x.y) <= 1 - m && kSpec.contains(x, m); };
  int count = 0;
  for (int k = 1; k <= 9; ++k) {
    const auto curves = extract_level_curves(v, -0.1 * k, mask);
    REQUIRE(curves.size() == 1);
    const auto& c = curves[0];
    for (std::size_t i = 1; i < c.points.size(); ++i) CHECK(distance(c.points[i], c.points[i - 1]) <= 2 * dx);
    const auto fit = circle_fit(c.points);
    CHECK(std::abs(fit.radius - 1.0) <= 0.05);
    CHECK(fit.center.x == doctest::Approx(0.1 * k).epsilon(0.01));
    ++count;
  }
  CHECK(count == 9);
}

TEST_CASE("closed level curve") {
  const auto g = Grid2D::make(2.0, 0.05);
  const auto u = LevelSetField2D::from_function(g, [](Point2 x) { return 1.0 - x.norm(); });
  const auto curves = extract_level_curves(u, 0.0);
  REQUIRE(curves.size() == 1);
  CHECK(curves[0].closed);
  CHECK(circle_fit(curves[0].points).radius == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("circle fit") {
  const auto unit = arc({0, 0}, 1.0, 0.0, 2 * M_PI, 40);
  const auto f = circle_fit(unit);
  CHECK(f.radius == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(f.rms <= 1e-12);

  const double c = 0.7;
  const auto half = circle_fit(arc({c, 0}, 1.0, -M_PI / 2, M_PI / 2, 30));
  CHECK(half.center.x == doctest::Approx(c).epsilon(1e-9));
  CHECK(half.center.y == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(half.radius == doctest::Approx(1.0).epsilon(1e-9));

  std::vector<Point2> line;
  for (int k = 0; k < 20; ++k) line.push_back({0.1 * k, 0.05 * k});
  CHECK_THROWS_AS(circle_fit(line), NumericError);
  CHECK_THROWS_AS(circle_fit(arc({0, 0}, 1.0, 0.0, 1.0, 7)), NumericError);
}

TEST_CASE("circle fit is equivariant") {
  std::vector<Point2> pts;
  for (int k = 0; k < 25; ++k) {
    const double t = 0.2 * k;
    const double wobble = 0.01 * std::sin(7.0 * t);
    pts.push_back({1.3 + (0.8 + wobble) * std::cos(t), -0.4 + (0.8 + wobble) * std::sin(t)});
  }
  const auto base = circle_fit(pts);
  const double th = 0.9;
  const Point2 shift{2.0, -3.0};
  std::vector<Point2> moved;
  for (const auto& p : pts)
    moved.push_back(Point2{std::cos(th) * p.x - std::sin(th) * p.y, std::sin(th) * p.x + std::cos(th) * p.y} + shift);
  const auto fit = circle_fit(moved);
  const Point2 expect =
      Point2{std::cos(th) * base.center.x - std::sin(th) * base.center.y,
             std::sin(th) * base.center.x + std::cos(th) * base.center.y} + shift;
  CHECK(fit.radius == doctest::Approx(base.radius).epsilon(1e-9));
  CHECK(fit.center.x == doctest::Approx(expect.x).epsilon(1e-9));
  CHECK(fit.center.y == doctest::Approx(expect.y).epsilon(1e-9));
  CHECK(fit.rms == doctest::Approx(base.rms).epsilon(1e-6));
}

TEST_CASE("hausdorff") {
  CHECK(hausdorff({{0, 0}, {1, 0}}, {{0, 0}, {1, 0}}) == 0.0);
  CHECK(hausdorff({{0, 0}}, {{0, 0}, {3, 4}}) == doctest::Approx(5.0));
}

TEST_CASE("foliation") {
  const double dx = 0.02;
  const auto g = Grid2D::make(2.5, dx);
  const auto v = explicit_solution_field(g, kSpec);
  std::vector<double> levels, cubes;
  for (int k = 1; k <= 9; ++k) {
    levels.push_back(-0.1 * k);
    cubes.push_back(std::pow(-0.1 * k, 3));
  }
  const auto self = foliation_check(v, v, kSpec, levels);
  CHECK(self.ok());
  CHECK(self.max_distance <= 2 * dx);
  const auto cube = foliation_check(explicit_solution_field(g, kSpec, [](double s) { return s * s * s; }), v, kSpec, cubes);
  CHECK(cube.ok());
  CHECK(cube.max_distance <= 2 * dx);
  const auto bent = LevelSetField2D::from_function(g, [](Point2 x) {
    const double base = (x.x <= 0 || x.norm() <= 1) ? 0.0 : std::sqrt(std::max(0.0, 1 - x.y * x.y)) - x.x;
    return base + 1.5 * std::max(x.x, 0.0) * x.y * x.y;
  });
  CHECK_FALSE(foliation_check(bent, v, kSpec, levels).ok());
}

TEST_CASE("radial front ODE") {
  CHECK(radial_front_radius(1.0, 3.0) == doctest::Approx(1.0));
  // Implicit solution t = r - r0 + log((r - 1) / (r0 - 1)).
  const double r = radial_front_radius(2.0, 1.0);
  CHECK(r - 2.0 + std::log(r - 1.0) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(r == doctest::Approx(2.557).epsilon(1e-3));
  const double te = extinction_time(0.5);
  CHECK(te == doctest::Approx(-0.5 - std::log(0.5)));
  CHECK(radial_front_radius(0.5, te + 0.01) == 0.0);
  CHECK(radial_front_radius(0.5, te - 0.01) > 0.0);
}

TEST_CASE("stationarity") {
  const double dx = 0.1;
  const auto unit = stationarity_check(1.0, 1.0, dx);
  CHECK(unit.hausdorff_to_initial <= 3 * dx);
  const auto big = stationarity_check(2.0, 1.0, dx);
  CHECK(big.fitted_radius > 2.0);
  CHECK(std::abs(big.fitted_radius - big.ode_radius) <= 2 * dx);
  const auto small = stationarity_check(0.5, 1.0, dx);
  CHECK(small.extinct);
}

TEST_CASE("fattening probe") {
  FatteningSetup s;
  s.dx = 0.05;
  s.delta = 0.08;
  const auto tangent = fattening_probe(s);
  s.gap = 0.5;
  const auto separated = fattening_probe(s);
  CHECK(tangent.factor > separated.factor);
  s.single = true;
  s.gap = 0.0;
  const auto single = fattening_probe(s);
  CHECK(single.factor == doctest::Approx(slab_factor(s.delta, s.T)).epsilon(0.03));
  CHECK(separated.factor == doctest::Approx(single.factor).epsilon(0.03));
}
