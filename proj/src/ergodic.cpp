#include "curveflow/ergodic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace curveflow {

namespace {

constexpr double kZeroH = 1e-12;

struct Branches {
  std::vector<double> F;   // falling formula at nodes
  std::vector<double> G;   // rising formula at nodes
  std::vector<double> PF;  // cumulative trapezoid integrals from node s
  std::vector<double> PG;
  std::size_t s = 0;       // first node with r >= n-1
};

bool at_barrier(double r, double n1) { return std::abs(r - n1) <= 1e-9 * std::max(1.0, n1); }

double interp_cumulative(const std::vector<double>& P, const std::vector<double>& r,
                         std::size_t s, double x) {
  const double dr = r[1] - r[0];
  double k = (x - r[s]) / dr;
  std::size_t i = s;
  if (k > 0.0) {
    i = std::min(s + static_cast<std::size_t>(k), P.size() - 2);
    k = (x - r[i]) / dr;
  }
  if (i + 1 >= P.size()) return P.back();
  return P[i] + k * (P[i + 1] - P[i]);
}

ErgodicProfile skeleton(const SourceModel& src, double c, const ProfileGrid& grid) {
  if (src.kind() != SourceKind::radial) throw ConfigError("ergodic profile needs a radial source");
  if (!(grid.dr > 0.0) || !(grid.r_max > grid.dr))
    throw ConfigError("ergodic profile: need 0 < dr < r_max");
  ErgodicProfile p;
  p.n = src.dimension();
  p.c = c;
  p.dr = grid.dr;
  const auto N = static_cast<std::size_t>(std::floor(grid.r_max / grid.dr + 1e-9)) + 1;
  p.r.resize(N);
  for (std::size_t i = 0; i < N; ++i) p.r[i] = grid.dr * static_cast<double>(i);
  p.psi.assign(N, 0.0);
  p.dpsi.assign(N, 0.0);
  p.tag.assign(N, RegionTag::Outer);
  p.branch.assign(N, Branch::Flat);
  return p;
}

Branches outer_branches(const ErgodicProfile& p, const SourceModel& src) {
  const double n1 = p.n - 1.0;
  const std::size_t N = p.size();
  Branches b;
  b.F.assign(N, 0.0);
  b.G.assign(N, 0.0);
  while (b.s < N && p.r[b.s] < n1 && !at_barrier(p.r[b.s], n1)) ++b.s;
  if (b.s + 1 >= N) throw ConfigError("ergodic profile: grid must extend past n-1");
  for (std::size_t i = b.s; i < N; ++i) {
    const double r = p.r[i];
    const double h = src.profile(r) - p.c;
    if (at_barrier(r, n1)) {
      // limit of r h / (r - (n-1)) as r -> n-1 when h(n-1) = 0
      const double dh = (src.profile(r + p.dr) - src.profile(r)) / p.dr;
      b.F[i] = std::abs(h) <= kZeroH ? n1 * dh : kNegInf;
      b.G[i] = -h / 2.0;
      if (n1 == 0.0) b.G[i] = 0.0;
    } else {
      b.F[i] = r * h / (r - n1);
      b.G[i] = -r * h / (r + n1);
    }
  }
  b.PF.assign(N, 0.0);
  b.PG.assign(N, 0.0);
  for (std::size_t i = b.s + 1; i < N; ++i) {
    const double f0 = std::isfinite(b.F[i - 1]) ? b.F[i - 1] : b.F[i];
    b.PF[i] = b.PF[i - 1] + 0.5 * p.dr * (f0 + b.F[i]);
    b.PG[i] = b.PG[i - 1] + 0.5 * p.dr * (b.G[i - 1] + b.G[i]);
  }
  return b;
}

// Inner region (0, n-1): the branch is forced by the sign of h.
void fill_inner(ErgodicProfile& p, const SourceModel& src, std::size_t s) {
  const double n1 = p.n - 1.0;
  for (std::size_t i = 0; i < s; ++i) {
    const double r = p.r[i];
    const double h = src.profile(r) - p.c;
    if (h < -kZeroH) {
      p.tag[i] = RegionTag::A;
      p.branch[i] = Branch::Rising;
      p.dpsi[i] = -r * h / (r + n1);
    } else if (h > kZeroH) {
      p.tag[i] = RegionTag::C;
      p.branch[i] = Branch::Falling;
      p.dpsi[i] = r * h / (r - n1);
    } else {
      p.tag[i] = RegionTag::B;
      p.branch[i] = Branch::Flat;
      p.dpsi[i] = 0.0;
    }
  }
  p.dpsi[0] = 0.0;
  p.branch[0] = Branch::Flat;
  for (std::size_t k = s; k-- > 0;)
    p.psi[k] = p.psi[k + 1] - 0.5 * p.dr * (p.dpsi[k] + p.dpsi[k + 1]);
}

ErgodicProfile assemble(const SourceModel& src, double c, const EquilibriumSet& eq,
                        const std::vector<double>& anchors, const ProfileGrid& grid,
                        bool check_feasible) {
  ErgodicProfile p = skeleton(src, c, grid);
  p.r0 = eq.min();
  const Branches b = outer_branches(p, src);
  const auto& iv = eq.intervals;
  const std::size_t m = iv.size();
  auto PF = [&](double x) { return interp_cumulative(b.PF, p.r, b.s, x); };
  auto PG = [&](double x) { return interp_cumulative(b.PG, p.r, b.s, x); };
  auto falling_from = [&](std::size_t k, double x) { return anchors[k] + PF(x) - PF(iv[k].hi); };
  auto rising_to = [&](std::size_t k, double x) { return anchors[k] - (PG(iv[k].lo) - PG(x)); };

  if (check_feasible) {
    const double slack = 1e-9 + 4.0 * src.lipschitz_bound() * p.dr * p.dr;
    for (std::size_t k = 0; k + 1 < m; ++k) {
      if (!std::isfinite(iv[k].hi)) break;
      const double over_right = falling_from(k, iv[k + 1].lo) - anchors[k + 1];
      const double over_left = rising_to(k + 1, iv[k].hi) - anchors[k];
      if (over_right > slack || over_left > slack) {
        std::ostringstream os;
        os << "pinned profile: anchors " << anchors[k] << " at r = " << iv[k].hi << " and "
           << anchors[k + 1] << " at r = " << iv[k + 1].lo << " are not attainable";
        throw NumericError(os.str());
      }
    }
  }

  const std::size_t N = p.size();
  std::size_t k = 0;
  double prev_gap = 0.0;  // sign of (falling - rising) at the previous gap node
  for (std::size_t i = b.s; i < N; ++i) {
    const double r = p.r[i];
    while (k < m && r > iv[k].hi) {
      ++k;
      prev_gap = 0.0;
    }
    p.tag[i] = RegionTag::Outer;
    if (k < m && r >= iv[k].lo) {
      // inside a component: psi sits on the anchor; dpsi uses the formula
      // that solves the equation exactly for the sign of h at this node
      p.psi[i] = anchors[k];
      p.branch[i] = Branch::Flat;
      const double mid = std::isfinite(iv[k].hi) ? 0.5 * (iv[k].lo + iv[k].hi) : iv[k].lo;
      p.dpsi[i] = r >= mid ? b.F[i] : b.G[i];
      if (at_barrier(r, p.n - 1.0) && k == 0 && iv[0].hi - iv[0].lo < p.dr) {
        p.dpsi[i] = b.F[i];
        p.branch[i] = Branch::Falling;
      }
      continue;
    }
    if (k == 0) {
      p.psi[i] = rising_to(0, r);
      p.dpsi[i] = b.G[i];
      p.branch[i] = Branch::Rising;
      continue;
    }
    if (k == m) {
      p.psi[i] = falling_from(m - 1, r);
      p.dpsi[i] = b.F[i];
      p.branch[i] = Branch::Falling;
      continue;
    }
    const double L = falling_from(k - 1, r);
    const double R = rising_to(k, r);
    const double gap = L - R;
    if (gap >= 0.0) {
      p.psi[i] = L;
      p.dpsi[i] = b.F[i];
      p.branch[i] = Branch::Falling;
    } else {
      p.psi[i] = R;
      p.dpsi[i] = b.G[i];
      p.branch[i] = Branch::Rising;
    }
    if (prev_gap > 0.0 && gap < 0.0) {
      const double w = prev_gap / (prev_gap - gap);
      p.corner_radii.push_back(r - p.dr + w * p.dr);
    }
    prev_gap = gap;
  }
  fill_inner(p, src, b.s);
  return p;
}

}  // namespace

const char* to_string(RegionTag tag) {
  switch (tag) {
    case RegionTag::A: return "A";
    case RegionTag::B: return "B";
    case RegionTag::C: return "C";
    case RegionTag::Outer: return "outer";
  }
  return "?";
}

double ErgodicProfile::sample(double x) const {
  if (r.empty()) throw NumericError("empty profile");
  const double k = x / dr;
  if (k <= 0.0) return psi.front();
  const auto i = static_cast<std::size_t>(k);
  if (i + 1 >= psi.size()) return psi.back();
  const double w = k - static_cast<double>(i);
  return (1.0 - w) * psi[i] + w * psi[i + 1];
}

EquilibriumSet profile_equilibria(const SourceModel& src, double c, double equilibrium_tol) {
  return equilibrium_set(src, c, equilibrium_tol);
}

ErgodicProfile build_psi(const SourceModel& src, double c, const ProfileGrid& grid,
                         double equilibrium_tol) {
  const EquilibriumSet eq = profile_equilibria(src, c, equilibrium_tol);
  // Pure falling after r0: chain the anchors along the falling branch.
  ErgodicProfile skel = skeleton(src, c, grid);
  const Branches b = outer_branches(skel, src);
  auto PF = [&](double x) { return interp_cumulative(b.PF, skel.r, b.s, x); };
  std::vector<double> anchors(eq.intervals.size(), 0.0);
  for (std::size_t k = 1; k < anchors.size(); ++k)
    anchors[k] = anchors[k - 1] + PF(eq.intervals[k].lo) - PF(eq.intervals[k - 1].hi);
  ErgodicProfile p = assemble(src, c, eq, anchors, grid, false);
  const double shift = p.psi[0];
  for (double& v : p.psi) v -= shift;
  return p;
}

ErgodicProfile build_psi_pinned(const SourceModel& src, double c,
                                const std::vector<double>& anchors, const ProfileGrid& grid,
                                double equilibrium_tol) {
  const EquilibriumSet eq = profile_equilibria(src, c, equilibrium_tol);
  if (anchors.size() != eq.intervals.size()) {
    std::ostringstream os;
    os << "pinned profile: " << anchors.size() << " anchors for " << eq.intervals.size()
       << " equilibrium components";
    throw ConfigError(os.str());
  }
  return assemble(src, c, eq, anchors, grid, true);
}

double residual(const ErgodicProfile& psi, const SourceModel& src, double c) {
  const double n1 = psi.n - 1.0;
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < psi.size(); ++i) {
    const double r = psi.r[i];
    bool near_corner = false;
    for (double rc : psi.corner_radii)
      if (std::abs(r - rc) <= psi.dr * (1.0 + 1e-9)) near_corner = true;
    if (near_corner) continue;
    const double p = psi.dpsi[i];
    const double h = src.profile(r) - c;
    worst = std::max(worst, std::abs(-n1 / r * p - std::abs(p) - h));
  }
  return worst;
}

double growth_rate(const ErgodicProfile& psi) {
  const std::size_t N = psi.size();
  const std::size_t first = N - std::max<std::size_t>(2, N / 5);
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double m = static_cast<double>(N - first);
  for (std::size_t i = first; i < N; ++i) {
    sx += psi.r[i];
    sy += psi.psi[i];
    sxx += psi.r[i] * psi.r[i];
    sxy += psi.r[i] * psi.psi[i];
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

CornerReport corner_audit(const ErgodicProfile& psi, const SourceModel& src, double c,
                          double equilibrium_tol) {
  CornerReport rep;
  const double L = src.lipschitz_bound();
  const double thr = 10.0 * psi.dr * std::max(L, 1e-12);
  const double neg = -L * psi.dr - 1e-12;
  const double n1 = psi.n - 1.0;
  auto h = [&](double r) { return src.profile(r) - c; };

  EquilibriumSet eq;
  try {
    eq = profile_equilibria(src, c, equilibrium_tol);
  } catch (const NumericError&) {
  }
  // Region index for a radius: -1 inside (0, n-1), 0 before the first
  // component, k for the gap after component k-1, m after the last one.
  auto region = [&](double r) -> long {
    if (r < n1) return -1;
    long k = 0;
    for (const auto& iv : eq.intervals) {
      if (r < iv.lo) return k;
      if (r <= iv.hi) return -2;  // on the set
      ++k;
    }
    return k;
  };
  const long m = static_cast<long>(eq.intervals.size());
  std::vector<int> per_region(static_cast<std::size_t>(m + 1), 0);

  for (std::size_t i = 1; i < psi.size(); ++i) {
    const double jump = psi.dpsi[i] - psi.dpsi[i - 1];
    const double at = 0.5 * (psi.r[i - 1] + psi.r[i]);
    if (jump < -thr) {
      if (h(at) < neg) rep.corners_from_above.push_back(at);
    } else if (jump > thr) {
      rep.corners_from_below.push_back(at);
      const long k = region(at);
      const bool interior_gap = k > 0 && k < m;
      if (k >= 0 && interior_gap && ++per_region[static_cast<std::size_t>(k)] <= 1) continue;
      if (k == -2) continue;
      rep.extra_corners_from_below.push_back(at);
    }
  }
  for (std::size_t i = 1; i + 1 < psi.size(); ++i) {
    const double v = psi.psi[i];
    const bool peak = (v > psi.psi[i - 1] && v >= psi.psi[i + 1]) ||
                      (v >= psi.psi[i - 1] && v > psi.psi[i + 1]);
    if (peak && h(psi.r[i]) < neg) rep.local_maxima_in_negative_h.push_back(psi.r[i]);
  }
  return rep;
}

UniquenessResult uniqueness_check(const std::function<double(double)>& psi1,
                                  const std::function<double(double)>& psi2,
                                  const std::vector<double>& equilibrium_points, double lo,
                                  double hi, double spacing, double set_tol) {
  if (equilibrium_points.empty()) throw ConfigError("uniqueness_check: no equilibrium points");
  if (!(spacing > 0.0) || !(hi >= lo)) throw ConfigError("uniqueness_check: bad sampling range");
  UniquenessResult res;
  const double p0 = equilibrium_points.front();
  res.shift = psi1(p0) - psi2(p0);
  for (double p : equilibrium_points)
    res.gap_on_set = std::max(res.gap_on_set, std::abs(psi1(p) - psi2(p) - res.shift));
  if (res.gap_on_set > set_tol) {
    std::ostringstream os;
    os << "profiles disagree on the equilibrium set by " << res.gap_on_set
       << " after the shift; uniqueness does not apply";
    throw UniquenessError(os.str(), res.gap_on_set);
  }
  const auto m = static_cast<std::size_t>(std::floor((hi - lo) / spacing + 1e-9));
  for (std::size_t i = 0; i <= m; ++i) {
    const double x = std::min(hi, lo + spacing * static_cast<double>(i));
    res.max_difference = std::max(res.max_difference, std::abs(psi1(x) - psi2(x) - res.shift));
  }
  return res;
}

}  // namespace curveflow
