#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "curveflow/levelset2d.hpp"
#include "curveflow/source_model.hpp"

using namespace curveflow;

TEST_CASE("speed of a tent is its peak") {
  const auto rep = asymptotic_speed(tent_source(2.0));
  CHECK(rep.c == doctest::Approx(1.0).epsilon(1e-9));
  REQUIRE(rep.argmax_radii.size() == 1);
  CHECK(rep.argmax_radii[0] == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("speed ignores peaks inside r < n-1") {
  const auto src = multi_tent_source({{{0.5, 2.0, 0.4}}, {{3.0, 1.0, 1.0}}});
  CHECK(asymptotic_speed(src).c == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("zero source has zero speed") {
  CHECK(asymptotic_speed(zero_source()).c == 0.0);
}

TEST_CASE("speed is positively homogeneous") {
  const auto src = smooth_bump_source(2.5, 0.7, 1.2);
  const double c = asymptotic_speed(src).c;
  for (double lambda : {0.5, 2.0, 3.7})
    CHECK(asymptotic_speed(src.scaled(lambda)).c == doctest::Approx(lambda * c).epsilon(1e-6));
}

TEST_CASE("dense sampling oracle for the speed") {
  // Peak at 0.6, inside r < 1; oracle: brute max over r >= 1.
  const auto src = SourceModel::radial(
      2, 2.1, [](double r) { return std::max(0.0, 1.0 - std::abs(r - 0.6) / 1.5); }, 1.0 / 1.5);
  double best = 0.0;
  for (int k = 0; k <= 400000; ++k) best = std::max(best, src.profile(1.0 + k * 1e-5));
  CHECK(asymptotic_speed(src).c == doctest::Approx(best).epsilon(1e-6));
}

TEST_CASE("equilibrium sets") {
  SUBCASE("tent") {
    const auto e = equilibrium_set(tent_source(2.0), 1.0, 1e-6);
    REQUIRE(e.intervals.size() == 1);
    CHECK(e.min() == doctest::Approx(2.0).epsilon(1e-5));
    CHECK(e.max() == doctest::Approx(2.0).epsilon(1e-5));
  }
  SUBCASE("two tents") {
    const auto e = equilibrium_set(multi_tent_source({{{2.0, 1.0, 1.0}}, {{5.0, 1.0, 1.0}}}), 1.0, 1e-6);
    REQUIRE(e.intervals.size() == 2);
    CHECK(e.min() == doctest::Approx(2.0).epsilon(1e-5));
    CHECK(e.max() == doctest::Approx(5.0).epsilon(1e-5));
  }
  SUBCASE("plateau") {
    const auto e = equilibrium_set(plateau_source(2.0, 3.0), 1.0, 1e-6);
    REQUIRE(e.intervals.size() == 1);
    CHECK(e.intervals[0].lo == doctest::Approx(2.0).epsilon(1e-4));
    CHECK(e.intervals[0].hi == doctest::Approx(3.0).epsilon(1e-4));
  }
  SUBCASE("inconsistent speed is reported") {
    CHECK_THROWS_AS(equilibrium_set(tent_source(2.0), 1.5, 1e-6), NumericError);
  }
}

TEST_CASE("equilibrium set grows with tol") {
  const auto src = smooth_bump_source(3.0, 1.0, 2.0);
  const double c = asymptotic_speed(src).c;
  const auto small = equilibrium_set(src, c, 1e-4, 1e-4);
  const auto large = equilibrium_set(src, c, 1e-2, 1e-4);
  for (const auto& iv : small.intervals) {
    CHECK(large.contains(iv.lo, 1e-12));
    CHECK(large.contains(iv.hi, 1e-12));
  }
  for (double r = 1.0; r < 6.0; r += 0.01)
    if (small.contains(r)) CHECK(std::abs(src.profile(r) - c) <= 1e-4 + 1e-9);
}

TEST_CASE("angular envelopes") {
  std::vector<double> r;
  for (int k = 0; k <= 60; ++k) r.push_back(0.05 * k);

  SUBCASE("radial source") {
    const auto tent = tent_source(1.5);
    const auto env = angular_envelopes(as_planar(tent), r);
    for (std::size_t i = 0; i < r.size(); ++i) {
      CHECK(env.upper[i] == doctest::Approx(tent.profile(r[i])).epsilon(1e-12));
      CHECK(env.lower[i] == doctest::Approx(tent.profile(r[i])).epsilon(1e-12));
    }
  }
  SUBCASE("stadium") {
    // Oracle: f = c on U, so the envelopes equal c exactly where the circle
    // of radius r meets U (r <= 2) or lies inside it (r <= 1).
    const auto src = stadium_source(StadiumSpec{1.0});
    const auto env = angular_envelopes(src, r);
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (r[i] <= 2.0 + 1e-12) CHECK(env.upper[i] == doctest::Approx(1.0));
      if (r[i] <= 1.0 + 1e-12) CHECK(env.lower[i] == doctest::Approx(1.0));
      if (r[i] > 1.2) CHECK(env.lower[i] < 1.0);
    }
    CHECK(env.upper_last_max == doctest::Approx(2.0));
    CHECK(env.lower_last_max == doctest::Approx(1.0));
  }
  SUBCASE("zero") {
    const auto env = angular_envelopes(as_planar(zero_source()), r);
    for (std::size_t i = 0; i < r.size(); ++i) {
      CHECK(env.upper[i] == 0.0);
      CHECK(env.lower[i] == 0.0);
    }
  }
  SUBCASE("sandwich") {
    const auto src = stadium_source(StadiumSpec{0.7}, 1.0, 0.4);
    const auto env = angular_envelopes(src, r, 720);
    for (std::size_t i = 0; i < r.size(); ++i)
      for (int a = 0; a < 720; ++a) {
        const double th = 2.0 * M_PI * a / 720.0;
        const double v = src.at({r[i] * std::cos(th), r[i] * std::sin(th)});
        CHECK(env.lower[i] <= v + 1e-12);
        CHECK(v <= env.upper[i] + 1e-12);
      }
  }
}

TEST_CASE("invariants are validated") {
  CHECK_NOTHROW(tent_source(2.0).validate());
  CHECK_NOTHROW(stadium_source(StadiumSpec{1.0}).validate());
  CHECK_THROWS_AS(SourceModel::from_table(2, {0.0, 1.0}, {1.0, -0.5}), ConfigError);
  CHECK_THROWS_AS(SourceModel::from_table(2, {0.0, 0.0}, {1.0, 0.5}), ConfigError);
  // Stated Lipschitz bound too small.
  const auto bad = SourceModel::radial(2, 3.0, [](double r) { return std::max(0.0, 1.0 - std::abs(r - 2.0)); }, 0.5);
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  // Nonzero beyond the support radius.
  const auto leak = SourceModel::radial(2, 1.0, [](double) { return 0.1; }, 0.0);
  CHECK_THROWS_AS(leak.validate(), ConfigError);
}

TEST_CASE("table source interpolates") {
  const auto src = SourceModel::from_table(2, {0.0, 1.0, 2.0, 3.0}, {0.0, 0.5, 1.0, 0.0});
  CHECK(src.profile(1.5) == doctest::Approx(0.75));
  CHECK(src.profile(4.0) == 0.0);
  CHECK(asymptotic_speed(src).c == doctest::Approx(1.0).epsilon(1e-9));
}
