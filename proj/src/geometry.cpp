#include "curveflow/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <unordered_map>

namespace curveflow {

namespace {

double raw_v(Point2 x) {
  if (x.x <= 0.0 || x.norm() <= 1.0) return 0.0;
  const double y = std::clamp(x.y, -1.0, 1.0);
  return std::sqrt(1.0 - y * y) - x.x;
}

void check_theta(const std::function<double(double)>& theta) {
  if (theta && std::abs(theta(0.0)) > 1e-12)
    throw ConfigError("explicit_solution: reparametrization must fix 0");
}

}  // namespace

double explicit_solution(Point2 x, const StadiumSpec& spec,
                         const std::function<double(double)>& theta) {
  if (!spec.contains(x, 1e-9)) {
    std::ostringstream os;
    os << "explicit_solution: (" << x.x << ", " << x.y << ") is outside U";
    throw ConfigError(os.str());
  }
  check_theta(theta);
  const double v = raw_v(x);
  return theta ? theta(v) : v;
}

LevelSetField2D explicit_solution_field(const Grid2D& grid, const StadiumSpec& /*spec*/,
                                        const std::function<double(double)>& theta) {
  check_theta(theta);
  return LevelSetField2D::from_function(grid, [&](Point2 x) {
    const double v = raw_v(x);
    return theta ? theta(v) : v;
  });
}

double residual_on_U(const LevelSetField2D& v, const StadiumSpec& spec, double epsilon,
                     double margin_cells) {
  if (!(epsilon > 0.0)) throw ConfigError("residual_on_U: epsilon must be > 0");
  const Grid2D& g = v.grid;
  const double dx = g.dx;
  const double m = margin_cells * dx + 1e-9;
  const double e2 = epsilon * epsilon;
  // Side of the corner locus. The wide mixed stencil may poke slightly out of
  // U near the caps; it is used only while it stays in the strip |x2| < 1 and
  // on one side of the corner locus.
  auto side = [](Point2 x) { return x.x > 0.0 && x.norm() > 1.0; };
  double worst = 0.0;
  for (std::size_t j = 2; j + 2 < g.n; ++j) {
    for (std::size_t i = 2; i + 2 < g.n; ++i) {
      const Point2 x = g.point(i, j);
      if (1.0 - spec.segment_distance(x) <= m) continue;
      if (std::abs(x.x) <= m || std::abs(x.norm() - 1.0) <= m) continue;
      auto V = [&](int a, int b) { return v.at(i + a, j + b); };
      auto dxc = [&](int b) { return (V(1, b) - V(-1, b)) / (2 * dx); };
      auto dx4 = [&](int b) {
        return (-V(2, b) + 8 * V(1, b) - 8 * V(-1, b) + V(-2, b)) / (12 * dx);
      };
      const double ux = dx4(0);
      const double uy = (-V(0, 2) + 8 * V(0, 1) - 8 * V(0, -1) + V(0, -2)) / (12 * dx);
      const double uxx =
          (-V(2, 0) + 16 * V(1, 0) - 30 * V(0, 0) + 16 * V(-1, 0) - V(-2, 0)) / (12 * dx * dx);
      const double uyy =
          (-V(0, 2) + 16 * V(0, 1) - 30 * V(0, 0) + 16 * V(0, -1) - V(0, -2)) / (12 * dx * dx);
      bool wide = true;
      for (int a = -2; a <= 2 && wide; ++a)
        for (int b = -2; b <= 2 && wide; ++b) {
          const Point2 y = g.point(i + a, j + b);
          wide = std::abs(y.y) < 1.0 && side(y) == side(x);
        }
      const double uxy = wide ? (-dx4(2) + 8 * dx4(1) - 8 * dx4(-1) + dx4(-2)) / (12 * dx)
                              : (dxc(1) - dxc(-1)) / (2 * dx);
      const double g2 = ux * ux + uy * uy;
      const double curv =
          uxx + uyy - (uxx * ux * ux + 2 * uxy * ux * uy + uyy * uy * uy) / (g2 + e2);
      worst = std::max(worst, std::abs(curv + std::sqrt(g2 + e2)));
    }
  }
  return worst;
}

std::vector<LevelCurve> extract_level_curves(const LevelSetField2D& u, double level,
                                             const CellMask& mask) {
  const Grid2D& g = u.grid;
  const std::size_t n = g.n;
  auto hkey = [n](std::size_t i, std::size_t j) { return 2 * (j * n + i); };
  auto vkey = [n](std::size_t i, std::size_t j) { return 2 * (j * n + i) + 1; };
  std::unordered_map<std::size_t, Point2> where;
  std::unordered_map<std::size_t, std::vector<std::size_t>> touching;
  std::vector<std::pair<std::size_t, std::size_t>> segments;

  auto crossing = [&](std::size_t key, std::size_t i0, std::size_t j0, std::size_t i1,
                      std::size_t j1) {
    if (where.count(key)) return;
    const double a = u.at(i0, j0) - level;
    const double b = u.at(i1, j1) - level;
    const double w = a / (a - b);
    const Point2 p0 = g.point(i0, j0);
    const Point2 p1 = g.point(i1, j1);
    where[key] = p0 + w * (p1 - p0);
  };
  std::vector<char> pass;
  if (mask) {
    pass.resize(g.count());
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i) pass[g.index(i, j)] = mask(g.point(i, j));
  }

  for (std::size_t j = 0; j + 1 < n; ++j) {
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (mask && !(pass[g.index(i, j)] && pass[g.index(i + 1, j)] &&
                    pass[g.index(i, j + 1)] && pass[g.index(i + 1, j + 1)]))
        continue;
      const bool b0 = u.at(i, j) > level;
      const bool b1 = u.at(i + 1, j) > level;
      const bool b2 = u.at(i + 1, j + 1) > level;
      const bool b3 = u.at(i, j + 1) > level;
      const std::size_t bottom = hkey(i, j), right = vkey(i + 1, j), top = hkey(i, j + 1),
                        left = vkey(i, j);
      std::vector<std::size_t> cut;
      if (b0 != b1) { crossing(bottom, i, j, i + 1, j); cut.push_back(bottom); }
      if (b1 != b2) { crossing(right, i + 1, j, i + 1, j + 1); cut.push_back(right); }
      if (b2 != b3) { crossing(top, i, j + 1, i + 1, j + 1); cut.push_back(top); }
      if (b3 != b0) { crossing(left, i, j, i, j + 1); cut.push_back(left); }
      if (cut.size() == 2) {
        segments.emplace_back(cut[0], cut[1]);
      } else if (cut.size() == 4) {
        const double centre =
            0.25 * (u.at(i, j) + u.at(i + 1, j) + u.at(i + 1, j + 1) + u.at(i, j + 1));
        if ((centre > level) == b0) {
          segments.emplace_back(bottom, right);
          segments.emplace_back(top, left);
        } else {
          segments.emplace_back(left, bottom);
          segments.emplace_back(right, top);
        }
      }
    }
  }
  for (std::size_t s = 0; s < segments.size(); ++s) {
    touching[segments[s].first].push_back(s);
    touching[segments[s].second].push_back(s);
  }

  std::vector<char> used(segments.size(), 0);
  std::vector<LevelCurve> curves;
  auto walk = [&](std::size_t start_seg, std::size_t start_key) {
    LevelCurve c;
    c.level = level;
    std::size_t key = start_key;
    std::size_t seg = start_seg;
    c.points.push_back(where[key]);
    while (true) {
      used[seg] = 1;
      key = segments[seg].first == key ? segments[seg].second : segments[seg].first;
      if (key == start_key) {
        c.closed = true;
        break;
      }
      c.points.push_back(where[key]);
      std::size_t next = segments.size();
      for (std::size_t s : touching[key])
        if (!used[s]) next = s;
      if (next == segments.size()) break;
      seg = next;
    }
    curves.push_back(std::move(c));
  };
  // Open chains first (endpoints touch one segment), in deterministic order.
  std::vector<std::size_t> keys;
  for (const auto& kv : touching) keys.push_back(kv.first);
  std::sort(keys.begin(), keys.end());
  for (std::size_t key : keys) {
    const auto& t = touching[key];
    if (t.size() == 1 && !used[t[0]]) walk(t[0], key);
  }
  for (std::size_t s = 0; s < segments.size(); ++s)
    if (!used[s]) walk(s, segments[s].first);
  return curves;
}

double hausdorff(const std::vector<Point2>& a, const std::vector<Point2>& b) {
  if (a.empty() || b.empty()) return std::numeric_limits<double>::infinity();
  auto directed = [](const std::vector<Point2>& p, const std::vector<Point2>& q) {
    double worst = 0.0;
    for (const Point2& x : p) {
      double best = std::numeric_limits<double>::infinity();
      for (const Point2& y : q) {
        const double dx = x.x - y.x, dy = x.y - y.y;
        best = std::min(best, dx * dx + dy * dy);
      }
      worst = std::max(worst, best);
    }
    return std::sqrt(worst);
  };
  return std::max(directed(a, b), directed(b, a));
}

CircleFit circle_fit(const std::vector<Point2>& points) {
  if (points.size() < 8) throw NumericError("circle_fit: need at least 8 points");
  // Centre the data first; the fit is translation equivariant.
  double mx = 0.0, my = 0.0;
  for (const Point2& p : points) {
    mx += p.x;
    my += p.y;
  }
  mx /= points.size();
  my /= points.size();
  double sxx = 0, sxy = 0, syy = 0, sxz = 0, syz = 0, sz = 0;
  for (const Point2& p : points) {
    const double x = p.x - mx, y = p.y - my, z = x * x + y * y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
    sxz += x * z;
    syz += y * z;
    sz += z;
  }
  const double m = static_cast<double>(points.size());
  // Collinear data: the smaller eigenvalue of the scatter matrix vanishes.
  const double tr = sxx + syy;
  const double det = sxx * syy - sxy * sxy;
  if (!(tr > 0.0) || det <= 1e-10 * tr * tr)
    throw NumericError("circle_fit: degenerate (collinear) points");
  // With centred data the normal equations for x^2+y^2+Dx+Ey+F decouple:
  // [sxx sxy; sxy syy] (D, E) = -(sxz, syz), F = -(sz) / m.
  const double D = (-sxz * syy + syz * sxy) / det;
  const double E = (-syz * sxx + sxz * sxy) / det;
  const double F = -sz / m;
  CircleFit fit;
  fit.center = {mx - D / 2, my - E / 2};
  const double r2 = (D * D + E * E) / 4 - F;
  if (!(r2 > 0.0)) throw NumericError("circle_fit: degenerate fit");
  fit.radius = std::sqrt(r2);
  double ss = 0.0;
  for (const Point2& p : points) {
    const double e = distance(p, fit.center) - fit.radius;
    ss += e * e;
  }
  fit.rms = std::sqrt(ss / m);
  return fit;
}

FoliationReport foliation_check(const LevelSetField2D& u, const LevelSetField2D& v,
                                const StadiumSpec& spec, const std::vector<double>& levels) {
  const Grid2D& g = u.grid;
  const double dx = g.dx;
  FoliationReport rep;
  rep.levels = levels;

  // Outermost node rows inside U, x1 in (0, a].
  rep.boundary_monotone = true;
  std::size_t j_top = 0, j_bot = g.n - 1;
  for (std::size_t j = 0; j < g.n; ++j)
    if (std::abs(g.coord(j)) <= 1.0 + 1e-9) {
      j_bot = std::min(j_bot, j);
      j_top = std::max(j_top, j);
    }
  for (std::size_t j : {j_bot, j_top}) {
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < g.n; ++i) {
      const double x1 = g.coord(i);
      if (x1 <= 1e-12 || x1 > spec.a + 1e-9) continue;
      const double val = u.at(i, j);
      if (!(val < prev)) rep.boundary_monotone = false;
      prev = val;
    }
  }

  const double m = 2.0 * dx;
  // Level curves of v for x1 > 0 are unit semicircles inside U that end on
  // the lines x2 = +-1; clip them at |x2| = 1 - m.
  const CellMask mask = [&spec, m, dx](Point2 x) {
    return x.x > m && std::abs(x.y) <= 1.0 - m && spec.contains(x, 2.0 * dx);
  };
  auto gather = [](const std::vector<LevelCurve>& curves) {
    std::vector<Point2> pts;
    for (const auto& c : curves) pts.insert(pts.end(), c.points.begin(), c.points.end());
    return pts;
  };
  const double edge = 1.0 - m - 1.5 * dx;

  for (double level : levels) {
    const auto curves = extract_level_curves(u, level, mask);
    const auto pts = gather(curves);
    bool bad = pts.empty();
    for (const auto& c : curves) {
      if (c.closed) bad = true;
      else if (std::abs(c.points.front().y) < edge || std::abs(c.points.back().y) < edge)
        bad = true;
    }
    if (bad) rep.bad_exit_levels.push_back(level);
    if (pts.empty()) {
      rep.distance.push_back(std::numeric_limits<double>::infinity());
      rep.matched_level.push_back(0.0);
      rep.max_distance = std::numeric_limits<double>::infinity();
      continue;
    }
    double guess = 0.0;
    for (const Point2& p : pts) guess += v.sample(p);
    guess /= static_cast<double>(pts.size());
    double best = std::numeric_limits<double>::infinity(), best_level = guess;
    for (int k = -4; k <= 4; ++k) {
      const double lv = guess + 0.5 * dx * k;
      const auto vpts = gather(extract_level_curves(v, lv, mask));
      const double d = hausdorff(pts, vpts);
      if (d < best) {
        best = d;
        best_level = lv;
      }
    }
    rep.distance.push_back(best);
    rep.matched_level.push_back(best_level);
    rep.max_distance = std::max(rep.max_distance, best);
  }
  return rep;
}

double radial_front_radius(double r0, double T, int n, double h) {
  if (!(r0 > 0.0) || !(T >= 0.0) || !(h > 0.0)) throw ConfigError("radial_front_radius: bad input");
  const double n1 = n - 1.0;
  auto rhs = [n1](double r) { return 1.0 - n1 / r; };
  double r = r0, t = 0.0;
  while (t < T) {
    const double step = std::min(h, T - t);
    const double k1 = rhs(r);
    const double r2 = r + 0.5 * step * k1;
    if (r2 <= 0.0) return 0.0;
    const double k2 = rhs(r2);
    const double r3 = r + 0.5 * step * k2;
    if (r3 <= 0.0) return 0.0;
    const double k3 = rhs(r3);
    const double r4 = r + step * k3;
    if (r4 <= 0.0) return 0.0;
    const double k4 = rhs(r4);
    r += step / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    if (r <= 0.0) return 0.0;
    t += step;
  }
  return r;
}

double extinction_time(double r0, int n) {
  const double n1 = n - 1.0;
  if (!(r0 > 0.0) || !(r0 < n1)) throw ConfigError("extinction_time: need 0 < r0 < n-1");
  return -r0 - n1 * std::log(1.0 - r0 / n1);
}

FatteningReport fattening_probe(const FatteningSetup& s) {
  if (!(s.gap >= 0.0) || !(s.T >= 0.0) || !(s.dx > 0.0))
    throw ConfigError("fattening_probe: need gap >= 0, T >= 0, dx > 0");
  const double delta = s.delta > 0.0 ? s.delta : 4.0 * s.dx;
  const Grid2D g = Grid2D::make(s.L, s.dx);
  std::vector<Point2> centres;
  if (s.single) centres = {{0.0, 0.0}};
  else centres = {{-(1.0 + 0.5 * s.gap), 0.0}, {1.0 + 0.5 * s.gap, 0.0}};
  const auto u0 = LevelSetField2D::from_function(g, [&](Point2 x) {
    double best = -std::numeric_limits<double>::infinity();
    for (const Point2& c : centres) best = std::max(best, 1.0 - distance(x, c));
    return best;
  });
  auto slab = [&](const LevelSetField2D& u) {
    std::size_t k = 0;
    for (double v : u.values)
      if (std::abs(v) <= delta) ++k;
    return static_cast<double>(k) * s.dx * s.dx;
  };
  const LevelSetField2D u = evolve2d(u0, s.T, zero_source());
  FatteningReport rep;
  rep.area0 = slab(u0);
  rep.areaT = slab(u);
  rep.factor = rep.area0 > 0.0 ? rep.areaT / rep.area0 : 0.0;
  return rep;
}

StationarityReport stationarity_check(double r0, double T, double dx, double L) {
  if (!(r0 > 0.0) || !(T >= 0.0) || !(dx > 0.0)) throw ConfigError("stationarity_check: bad input");
  StationarityReport rep;
  rep.ode_radius = radial_front_radius(r0, T);
  if (L <= 0.0) L = dx * std::ceil((std::max(r0, rep.ode_radius) + 1.5) / dx);
  const Grid2D g = Grid2D::make(L, dx);
  const auto u0 = LevelSetField2D::from_function(g, [r0](Point2 x) { return r0 - x.norm(); });
  const LevelSetField2D u = evolve2d(u0, T, zero_source());
  std::vector<Point2> pts;
  for (const auto& c : extract_level_curves(u, 0.0))
    pts.insert(pts.end(), c.points.begin(), c.points.end());
  if (pts.empty()) {
    rep.extinct = true;
    rep.hausdorff_to_initial = r0;
    return rep;
  }
  std::vector<Point2> circle;
  const double pi = std::acos(-1.0);
  for (int k = 0; k < 720; ++k)
    circle.push_back({r0 * std::cos(2 * pi * k / 720), r0 * std::sin(2 * pi * k / 720)});
  rep.hausdorff_to_initial = hausdorff(pts, circle);
  if (pts.size() >= 8) rep.fitted_radius = circle_fit(pts).radius;
  return rep;
}

}  // namespace curveflow
