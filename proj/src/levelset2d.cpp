#include "curveflow/levelset2d.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "curveflow/parallel.hpp"
#include "curveflow/radial_hj.hpp"

namespace curveflow {

Grid2D Grid2D::make(double L, double dx) {
  if (!(L > 0.0) || !(dx > 0.0) || !(dx < L)) throw ConfigError("grid2d: need 0 < dx < L");
  Grid2D g;
  g.dx = dx;
  g.n = static_cast<std::size_t>(std::llround(2.0 * L / dx)) + 1;
  g.L = 0.5 * dx * static_cast<double>(g.n - 1);
  return g;
}

LevelSetField2D LevelSetField2D::from_function(const Grid2D& grid,
                                               const std::function<double(Point2)>& u0) {
  LevelSetField2D u;
  u.grid = grid;
  u.epsilon = grid.dx * grid.dx;
  u.values.resize(grid.count());
  for (std::size_t j = 0; j < grid.n; ++j)
    for (std::size_t i = 0; i < grid.n; ++i) u.values[grid.index(i, j)] = u0(grid.point(i, j));
  return u;
}

double LevelSetField2D::sample(Point2 x) const {
  const double last = static_cast<double>(grid.n - 1);
  const double fx = std::clamp((x.x + grid.L) / grid.dx, 0.0, last);
  const double fy = std::clamp((x.y + grid.L) / grid.dx, 0.0, last);
  const auto i = std::min(static_cast<std::size_t>(fx), grid.n - 2);
  const auto j = std::min(static_cast<std::size_t>(fy), grid.n - 2);
  const double wx = fx - static_cast<double>(i);
  const double wy = fy - static_cast<double>(j);
  return (1 - wx) * (1 - wy) * at(i, j) + wx * (1 - wy) * at(i + 1, j) +
         (1 - wx) * wy * at(i, j + 1) + wx * wy * at(i + 1, j + 1);
}

double StadiumSpec::segment_distance(Point2 x) const {
  const double px = std::clamp(x.x, -a, a);
  return std::hypot(x.x - px, x.y);
}

double StadiumSpec::distance(Point2 x) const {
  return std::max(0.0, segment_distance(x) - 1.0);
}

bool StadiumSpec::contains(Point2 x, double slack) const {
  return segment_distance(x) <= 1.0 + slack;
}

SourceModel stadium_source(const StadiumSpec& spec, double c, double width) {
  if (!(spec.a > 0.0)) throw ConfigError("stadium: need a > 0");
  if (!(width > 0.0) || !(c >= 0.0)) throw ConfigError("stadium: need width > 0, c >= 0");
  auto f = [spec, c, width](Point2 x) { return c * cubic_cutoff(spec.distance(x) / width); };
  return SourceModel::planar(spec.a + 1.0 + width, f, 1.5 * c / width, "stadium");
}

namespace {

struct Stencil {
  std::size_t c, e, w, n, s, ne, nw, se, sw;
};

inline Stencil stencil(const Grid2D& g, std::size_t i, std::size_t j) {
  const std::size_t ip = i + 1 < g.n ? i + 1 : i;
  const std::size_t im = i > 0 ? i - 1 : i;
  const std::size_t jp = j + 1 < g.n ? j + 1 : j;
  const std::size_t jm = j > 0 ? j - 1 : j;
  return {g.index(i, j),   g.index(ip, j),  g.index(im, j),  g.index(i, jp), g.index(i, jm),
          g.index(ip, jp), g.index(im, jp), g.index(ip, jm), g.index(im, jm)};
}

inline double curvature_at(const double* u, const Stencil& s, double dx, double eps2) {
  const double inv2 = 0.5 / dx;
  const double ux = (u[s.e] - u[s.w]) * inv2;
  const double uy = (u[s.n] - u[s.s]) * inv2;
  const double idx2 = 1.0 / (dx * dx);
  const double uxx = (u[s.e] - 2.0 * u[s.c] + u[s.w]) * idx2;
  const double uyy = (u[s.n] - 2.0 * u[s.c] + u[s.s]) * idx2;
  const double uxy = (u[s.ne] - u[s.nw] - u[s.se] + u[s.sw]) * 0.25 * idx2;
  const double g2 = ux * ux + uy * uy;
  const double tangential = uxx * uy * uy - 2.0 * ux * uy * uxy + uyy * ux * ux;
  // Where |Du| << eps the normal direction is lost; fall back to the Hessian
  // eigenvalue of smaller magnitude (the along-ridge second derivative).
  const double m = 0.5 * (uxx + uyy);
  const double half_diff = 0.5 * (uxx - uyy);
  const double q = std::sqrt(half_diff * half_diff + uxy * uxy);
  const double flat = m >= 0.0 ? m - q : m + q;
  return (tangential + eps2 * flat) / (g2 + eps2);
}

inline double driving_at(const double* u, const Stencil& s, double dx) {
  const double inv = 1.0 / dx;
  const double gx = std::max({(u[s.e] - u[s.c]) * inv, (u[s.w] - u[s.c]) * inv, 0.0});
  const double gy = std::max({(u[s.n] - u[s.c]) * inv, (u[s.s] - u[s.c]) * inv, 0.0});
  return std::sqrt(gx * gx + gy * gy);
}

template <class F>
std::vector<double> node_map(const LevelSetField2D& u, F&& op) {
  const Grid2D& g = u.grid;
  std::vector<double> out(g.count());
  const double* v = u.values.data();
  const auto n = static_cast<long>(g.n);
#pragma omp parallel for schedule(static) num_threads(thread_count())
  for (long j = 0; j < n; ++j)
    for (std::size_t i = 0; i < g.n; ++i) {
      const Stencil s = stencil(g, i, static_cast<std::size_t>(j));
      out[s.c] = op(v, s);
    }
  return out;
}

}  // namespace

std::vector<double> curvature_term(const LevelSetField2D& u, double epsilon) {
  if (!(epsilon > 0.0)) throw ConfigError("curvature_term: epsilon must be > 0");
  const double dx = u.grid.dx;
  const double e2 = epsilon * epsilon;
  return node_map(u, [=](const double* v, const Stencil& s) { return curvature_at(v, s, dx, e2); });
}

std::vector<double> driving_term(const LevelSetField2D& u) {
  const double dx = u.grid.dx;
  return node_map(u, [=](const double* v, const Stencil& s) { return driving_at(v, s, dx); });
}

std::vector<double> spatial_operator(const LevelSetField2D& u, double epsilon) {
  if (!(epsilon > 0.0)) throw ConfigError("spatial_operator: epsilon must be > 0");
  const double dx = u.grid.dx;
  const double e2 = epsilon * epsilon;
  return node_map(u, [=](const double* v, const Stencil& s) {
    return curvature_at(v, s, dx, e2) + driving_at(v, s, dx);
  });
}

double max_stable_dt2d(double dx) { return std::min(dx * dx / 8.0, dx / 2.0); }

LevelSetField2D step2d(const LevelSetField2D& u, double dt, const std::vector<double>& f_nodes,
                       double epsilon) {
  const double dt_max = max_stable_dt2d(u.grid.dx);
  if (!(dt > 0.0) || dt > dt_max * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "2d step: dt = " << dt << " violates CFL bound " << dt_max;
    throw NumericError(os.str());
  }
  if (f_nodes.size() != u.values.size()) throw ConfigError("2d step: source size mismatch");
  const std::vector<double> op = spatial_operator(u, epsilon);
  LevelSetField2D next = u;
  next.time = u.time + dt;
  next.epsilon = epsilon;
  for (std::size_t k = 0; k < op.size(); ++k)
    next.values[k] = u.values[k] + dt * (op[k] + f_nodes[k]);
  return next;
}

LevelSetField2D evolve2d(const LevelSetField2D& u0, double T, const SourceModel& src,
                         const Evolve2DOptions& opt, const Observer2D& observer) {
  if (!(T >= 0.0)) throw ConfigError("evolve2d: T must be >= 0");
  const Grid2D& g = u0.grid;
  const double eps = opt.epsilon > 0.0 ? opt.epsilon : g.dx * g.dx;
  if (!(opt.safety > 0.0) || opt.safety > 1.0) throw ConfigError("evolve2d: safety in (0, 1]");
  std::vector<double> f(g.count());
  for (std::size_t j = 0; j < g.n; ++j)
    for (std::size_t i = 0; i < g.n; ++i) f[g.index(i, j)] = src.at(g.point(i, j));

  LevelSetField2D u = u0;
  u.epsilon = eps;
  if (observer) observer(u);
  if (T == 0.0) return u;
  const double dt_cap = opt.safety * max_stable_dt2d(g.dx);
  const auto steps = static_cast<std::size_t>(std::ceil(T / dt_cap - 1e-12));
  const double dt = T / static_cast<double>(steps);
  const double t0 = u.time;
  for (std::size_t k = 0; k < steps; ++k) {
    u = step2d(u, dt, f, eps);
    u.time = t0 + dt * static_cast<double>(k + 1);
    if (observer) observer(u);
  }
  for (double v : u.values)
    if (!std::isfinite(v)) throw NumericError("evolve2d: non-finite value");
  return u;
}

double flatness_on_U(const LevelSetField2D& u, const StadiumSpec& spec, double c) {
  double worst = 0.0;
  const Grid2D& g = u.grid;
  for (std::size_t j = 0; j < g.n; ++j)
    for (std::size_t i = 0; i < g.n; ++i)
      if (spec.contains(g.point(i, j)))
        worst = std::max(worst, std::abs(u.at(i, j) - c * u.time));
  return worst;
}

bool ScaledLimitReport::strictly_decreasing() const {
  for (std::size_t k = 1; k < deviation.size(); ++k)
    for (std::size_t s = 0; s < samples.size(); ++s)
      if (!(deviation[k][s] < deviation[k - 1][s])) return false;
  return !deviation.empty();
}

ScaledLimitReport scaled_limit_check(const SourceModel& src, const std::vector<double>& lambdas,
                                     const std::vector<ScaledSample>& samples, double dr) {
  if (lambdas.empty() || samples.empty()) throw ConfigError("scaled_limit_check: empty input");
  const double c = asymptotic_speed(src).c;
  ScaledLimitReport rep;
  rep.lambdas = lambdas;
  rep.samples = samples;
  std::map<double, std::vector<std::size_t>> by_time;
  double x_max = 0.0;
  for (std::size_t s = 0; s < samples.size(); ++s) {
    if (!(samples[s].t > 0.0) || samples[s].x < 0.0)
      throw ConfigError("scaled_limit_check: need t > 0 and |x| >= 0");
    by_time[samples[s].t].push_back(s);
    x_max = std::max(x_max, samples[s].x);
  }
  const double t_max = by_time.rbegin()->first;
  for (double lambda : lambdas) {
    if (!(lambda > 0.0)) throw ConfigError("scaled_limit_check: lambda must be > 0");
    const double r_max = lambda * (x_max + 2.0 * t_max) + src.support_radius() + 2.0;
    const RadialGrid grid = RadialGrid::make(dr, r_max, dr);
    const RadialHJSolver solver(src, grid, -c);
    RadialField phi = RadialField::from_function(grid, [](double) { return 0.0; });
    std::vector<double> dev(samples.size(), 0.0);
    for (const auto& [t, idx] : by_time) {
      phi = solver.evolve(phi, lambda * t - phi.time);
      for (std::size_t s : idx) {
        const double x = samples[s].x;
        const double val = phi.sample(lambda * x) / lambda;
        dev[s] = std::abs(val - std::max(c * (t - x), 0.0));
      }
    }
    rep.deviation.push_back(dev);
  }
  return rep;
}

}  // namespace curveflow
