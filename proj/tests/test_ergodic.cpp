#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "curveflow/ergodic.hpp"

using namespace curveflow;

namespace {

const ProfileGrid kGrid{0.01, 30.0};

std::size_t node(const ErgodicProfile& p, double r) {
  return static_cast<std::size_t>(std::llround(r / p.dr));
}

SourceModel two_tents() { return multi_tent_source({{{2.0, 1.0, 1.0}}, {{5.0, 1.0, 1.0}}}); }

// Composite Simpson on [a, b].
template <class F>
double simpson(F f, double a, double b, int m = 2000) {
  const double h = (b - a) / m;
  double s = f(a) + f(b);
  for (int k = 1; k < m; ++k) s += (k % 2 ? 4.0 : 2.0) * f(a + k * h);
  return s * h / 3.0;
}

}  // namespace

TEST_CASE("tent profile: pointwise formulas") {
  const auto tent = tent_source(2.0);
  const auto psi = build_psi(tent, 1.0, kGrid);
  CHECK(psi.psi[0] == 0.0);
  CHECK(psi.dpsi[0] == 0.0);
  CHECK(psi.r0 == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(psi.dpsi[node(psi, 4.0)] == doctest::Approx(-4.0 / 3.0).epsilon(1e-12));
  CHECK(psi.dpsi[node(psi, 1.5)] == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(psi.dpsi[node(psi, 2.0)] == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(psi.tag[node(psi, 4.0)] == RegionTag::Outer);
}

TEST_CASE("tent profile: closed-form increments") {
  // On [2,3]: dpsi = -(r-1) + 1/(r-1). On [1,2]: dpsi = 3 - r - 3/(r+1).
  const auto psi = build_psi(tent_source(2.0), 1.0, kGrid);
  CHECK(psi.sample(3.0) - psi.sample(2.0) == doctest::Approx(-(1.5 - std::log(2.0))).epsilon(1e-5));
  CHECK(psi.sample(2.0) - psi.sample(1.0) == doctest::Approx(1.5 - 3.0 * std::log(1.5)).epsilon(1e-5));
}

TEST_CASE("residual") {
  const auto tent = tent_source(2.0);
  SUBCASE("construction is exact") {
    const auto psi = build_psi(tent, 1.0, kGrid);
    CHECK(residual(psi, tent, 1.0) <= 1e-12);
    const auto two = two_tents();
    CHECK(residual(build_psi(two, 1.0, kGrid), two, 1.0) <= 1e-12);
    CHECK(residual(build_psi_pinned(two, 1.0, {0.0, 0.0}, kGrid), two, 1.0) <= 1e-12);
    const auto bump = smooth_bump_source(3.0, 1.0, 1.5);
    const double c = asymptotic_speed(bump).c;
    CHECK(residual(build_psi(bump, c, kGrid), bump, c) <= 1e-12);
  }
  SUBCASE("zero profile leaves max |h| = c") {
    auto psi = build_psi(tent, 1.0, kGrid);
    std::fill(psi.psi.begin(), psi.psi.end(), 0.0);
    std::fill(psi.dpsi.begin(), psi.dpsi.end(), 0.0);
    psi.corner_radii.clear();
    CHECK(residual(psi, tent, 1.0) == doctest::Approx(1.0));
  }
  SUBCASE("pure linear profile at r = 10") {
    ErgodicProfile p;
    p.n = 2;
    p.c = 1.0;
    p.dr = 0.01;
    for (double r : {9.99, 10.0, 10.01}) {
      p.r.push_back(r);
      p.psi.push_back(-r);
      p.dpsi.push_back(-1.0);
      p.tag.push_back(RegionTag::Outer);
      p.branch.push_back(Branch::Falling);
    }
    CHECK(residual(p, tent, 1.0) == doctest::Approx(0.1));
  }
}

TEST_CASE("growth rate") {
  const auto tent = tent_source(2.0);
  const auto psi = build_psi(tent, 1.0, kGrid);
  const double g = growth_rate(psi);
  CHECK(g >= -1.05);
  CHECK(g <= -0.95);
  const auto psi2 = build_psi(tent, 1.0, {0.01, 60.0});
  const double ratio = std::abs(growth_rate(psi2) + 1.0) / std::abs(g + 1.0);
  CHECK(ratio == doctest::Approx(0.5).epsilon(0.15));
  const auto zero = build_psi(zero_source(), 0.0, kGrid);
  CHECK(growth_rate(zero) == doctest::Approx(0.0));
}

TEST_CASE("sandwich bound") {
  for (const auto& src : {tent_source(2.0), two_tents(), smooth_bump_source(3.0, 1.0, 1.5)}) {
    const double c = asymptotic_speed(src).c;
    const auto psi = build_psi(src, c, kGrid);
    const double C = 2.0 * (1.0 + c * src.support_radius());
    for (std::size_t i = 0; i < psi.size(); ++i) {
      const double r = psi.r[i];
      CHECK(psi.psi[i] <= -c * r + C);
      CHECK(psi.psi[i] >= -c * r - c * std::log(r + 1.0) - C);
    }
  }
}

TEST_CASE("sign structure on A and C, and dpsi fixed on [0, n-1]") {
  const auto src = multi_tent_source({{{0.5, 1.6, 0.4}}, {{2.0, 1.0, 1.0}}, {{5.0, 1.0, 1.0}}});
  const double c = asymptotic_speed(src).c;
  const auto a = build_psi(src, c, kGrid);
  const auto b = build_psi_pinned(src, c, {0.0, 0.0}, kGrid);
  bool saw_a = false, saw_c = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.tag[i] == RegionTag::A) {
      CHECK(a.dpsi[i] >= 0.0);
      saw_a = true;
    }
    if (a.tag[i] == RegionTag::C) {
      CHECK(a.dpsi[i] <= 0.0);
      saw_c = true;
    }
    if (a.r[i] <= 1.0) CHECK(a.dpsi[i] == b.dpsi[i]);
  }
  CHECK(saw_a);
  CHECK(saw_c);
}

TEST_CASE("corner audit") {
  SUBCASE("tent has no corner from above") {
    const auto tent = tent_source(2.0);
    const auto rep = corner_audit(build_psi(tent, 1.0, kGrid), tent, 1.0);
    CHECK(rep.corners_from_above.empty());
    CHECK(rep.ok());
  }
  SUBCASE("two tents: one corner from below where the branches meet") {
    const auto two = two_tents();
    const auto psi = build_psi_pinned(two, 1.0, {0.0, 0.0}, kGrid);
    const auto rep = corner_audit(psi, two, 1.0);
    CHECK(rep.ok());
    REQUIRE(rep.corners_from_below.size() == 1);
    // Oracle: falling branch from 2 and rising branch into 5, integrated by
    // Simpson; the corner is where they cross.
    auto h = [&](double r) { return two.profile(r) - 1.0; };
    auto fall = [&](double x) { return simpson([&](double r) { return r * h(r) / (r - 1.0); }, 2.0, x); };
    auto rise = [&](double x) { return -simpson([&](double r) { return -r * h(r) / (r + 1.0); }, x, 5.0); };
    double lo = 2.0, hi = 5.0;
    for (int k = 0; k < 60; ++k) {
      const double mid = 0.5 * (lo + hi);
      (fall(mid) > rise(mid) ? lo : hi) = mid;
    }
    CHECK(rep.corners_from_below[0] == doctest::Approx(lo).epsilon(2e-3));
  }
  SUBCASE("injected maximum is flagged") {
    const auto tent = tent_source(2.0);
    auto psi = build_psi(tent, 1.0, kGrid);
    const std::size_t i = node(psi, 6.0);
    for (std::size_t k = i - 20; k <= i + 20; ++k) {
      const double bump = 0.5 * (1.0 - std::abs(static_cast<double>(k) - static_cast<double>(i)) / 20.0);
      psi.psi[k] += bump;
      psi.dpsi[k] += (k < i ? 1.0 : -1.0) * 0.5 / (20.0 * psi.dr);
    }
    const auto rep = corner_audit(psi, tent, 1.0);
    CHECK_FALSE(rep.ok());
    CHECK_FALSE(rep.corners_from_above.empty());
  }
}

TEST_CASE("pinned data must be attainable") {
  const auto two = two_tents();
  CHECK_THROWS_AS(build_psi_pinned(two, 1.0, {0.0}, kGrid), ConfigError);
  CHECK_THROWS_AS(build_psi_pinned(two, 1.0, {0.0, 50.0}, kGrid), NumericError);
}

TEST_CASE("uniqueness check") {
  const auto psi = build_psi(tent_source(2.0), 1.0, kGrid);
  auto f = [&](double x) { return psi.sample(x); };
  auto g = [&](double x) { return psi.sample(x) + 5.0; };
  const auto res = uniqueness_check(f, g, {2.0}, 0.5, 10.0, 0.01);
  CHECK(res.shift == doctest::Approx(-5.0));
  CHECK(res.max_difference <= 1e-12);

  const auto two = two_tents();
  const auto canon = build_psi(two, 1.0, kGrid);
  const auto pinned = build_psi_pinned(two, 1.0, {0.0, 0.0}, kGrid);
  CHECK_THROWS_AS(uniqueness_check([&](double x) { return canon.sample(x); },
                                   [&](double x) { return pinned.sample(x); }, {2.0, 5.0}, 0.5,
                                   10.0, 0.01),
                  UniquenessError);
}

TEST_CASE("empty equilibrium set is an error") {
  CHECK_THROWS_AS(build_psi(tent_source(2.0), 2.0, kGrid), NumericError);
}
