#include "curveflow/radial_hj.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "curveflow/parallel.hpp"

namespace curveflow {

RadialGrid RadialGrid::make(double dr, double r_max, std::optional<double> r_min) {
  if (!(dr > 0.0)) throw ConfigError("radial grid: dr must be > 0");
  const double lo = r_min.value_or(0.5 * dr);
  if (!(lo > 0.0)) throw ConfigError("radial grid: r_min must be > 0");
  if (!(r_max > lo)) throw ConfigError("radial grid: need r_max > r_min");
  RadialGrid g;
  g.r_min = lo;
  g.dr = dr;
  g.size = static_cast<std::size_t>(std::floor((r_max - lo) / dr + 1e-9)) + 1;
  g.r_max = g.node(g.size - 1);
  return g;
}

std::vector<double> RadialGrid::nodes() const {
  std::vector<double> r(size);
  for (std::size_t i = 0; i < size; ++i) r[i] = node(i);
  return r;
}

std::size_t RadialGrid::nearest(double r) const {
  const double x = std::round((r - r_min) / dr);
  if (x <= 0.0) return 0;
  return std::min(static_cast<std::size_t>(x), size - 1);
}

RadialField RadialField::from_function(const RadialGrid& grid,
                                       const std::function<double(double)>& u0) {
  RadialField f;
  f.grid = grid;
  f.values.resize(grid.size);
  for (std::size_t i = 0; i < grid.size; ++i) f.values[i] = u0(grid.node(i));
  return f;
}

double RadialField::sample(double r) const {
  const double x = (r - grid.r_min) / grid.dr;
  if (x <= 0.0) return values.front();
  const auto i = static_cast<std::size_t>(x);
  if (i + 1 >= values.size()) return values.back();
  const double w = x - static_cast<double>(i);
  return (1.0 - w) * values[i] + w * values[i + 1];
}

double RadialField::max_slope() const {
  double m = 0.0;
  for (std::size_t i = 1; i < values.size(); ++i)
    m = std::max(m, std::abs(values[i] - values[i - 1]) / grid.dr);
  return m;
}

double hamiltonian(double r, double p, const SourceModel& src) {
  if (!(r > 0.0)) throw ConfigError("hamiltonian: r must be > 0");
  const double n1 = src.dimension() - 1.0;
  return -n1 * p / r - std::abs(p) - src.profile(r);
}

RadialHJSolver::RadialHJSolver(SourceModel src, RadialGrid grid, double far_slope)
    : src_(std::move(src)), grid_(grid), far_slope_(far_slope) {
  if (src_.kind() != SourceKind::radial)
    throw ConfigError("radial solver needs a radial source");
  const double n1 = src_.dimension() - 1.0;
  f_.resize(grid_.size);
  b_plus_.resize(grid_.size);
  b_minus_.resize(grid_.size);
  for (std::size_t i = 0; i < grid_.size; ++i) {
    const double r = grid_.node(i);
    f_[i] = src_.profile(r);
    b_plus_[i] = n1 / r + 1.0;
    b_minus_[i] = n1 / r - 1.0;
  }
}

double RadialHJSolver::max_stable_dt() const {
  const double n1 = src_.dimension() - 1.0;
  return grid_.dr / std::max(1.0 + n1 / grid_.r_min, 2.0);
}

RadialField RadialHJSolver::step(const RadialField& phi, double dt) const {
  if (phi.values.size() != grid_.size) throw ConfigError("radial step: grid mismatch");
  const double dt_max = max_stable_dt();
  if (!(dt > 0.0) || dt > dt_max * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "radial step: dt = " << dt << " violates CFL bound " << dt_max;
    throw NumericError(os.str());
  }
  const std::size_t N = grid_.size;
  const double inv_dr = 1.0 / grid_.dr;
  const std::vector<double>& u = phi.values;
  RadialField next;
  next.grid = grid_;
  next.time = phi.time + dt;
  next.values.resize(N);
#pragma omp parallel for schedule(static) num_threads(thread_count())
  for (std::size_t i = 0; i < N; ++i) {
    const double dplus = i + 1 < N ? (u[i + 1] - u[i]) * inv_dr : far_slope_;
    const double dminus = i > 0 ? (u[i] - u[i - 1]) * inv_dr : 0.0;
    const double bp = b_plus_[i];
    const double bm = b_minus_[i];
    double ham = bp * std::max(dplus, 0.0);
    ham += bm > 0.0 ? bm * std::min(dplus, 0.0) : bm * std::min(dminus, 0.0);
    next.values[i] = u[i] + dt * (ham + f_[i]);
  }
  return next;
}

RadialField RadialHJSolver::evolve(RadialField phi, double T, const Observer& observer,
                                   double safety) const {
  if (!(T >= 0.0)) throw ConfigError("radial evolve: T must be >= 0");
  if (observer) observer(phi);
  if (T == 0.0) return phi;
  const double dt_cap = safety * max_stable_dt();
  const auto steps = static_cast<std::size_t>(std::ceil(T / dt_cap - 1e-12));
  const double dt = T / static_cast<double>(steps);
  const double t0 = phi.time;
  for (std::size_t k = 0; k < steps; ++k) {
    phi = step(phi, dt);
    phi.time = t0 + dt * static_cast<double>(k + 1);
    if (observer) observer(phi);
  }
  for (double v : phi.values)
    if (!std::isfinite(v)) throw NumericError("radial evolve: non-finite value");
  return phi;
}

RadialField step(const RadialField& phi, double dt, const SourceModel& src) {
  const double c = asymptotic_speed(src).c;
  return RadialHJSolver(src, phi.grid, -c).step(phi, dt);
}

EvolveReport evolve(const RadialField& phi0, double T, const SourceModel& src) {
  const double c = asymptotic_speed(src).c;
  RadialHJSolver solver(src, phi0.grid, -c);
  EvolveReport rep;
  rep.field = solver.evolve(phi0, T, [&](const RadialField& f) {
    rep.max_slope = std::max(rep.max_slope, f.max_slope());
    ++rep.steps;
  });
  rep.steps -= 1;
  return rep;
}

double control_oracle(double r, double t, const std::function<double(double)>& u0,
                      const SourceModel& src, const OracleOptions& opt) {
  if (!(r > 0.0)) throw ConfigError("control_oracle: r must be > 0");
  if (!(t >= 0.0) || !(opt.h > 0.0) || opt.controls < 2)
    throw ConfigError("control_oracle: need t >= 0, h > 0, controls >= 2");
  const double steps_real = t / opt.h;
  const auto m = static_cast<std::size_t>(std::llround(steps_real));
  if (std::abs(steps_real - static_cast<double>(m)) > 1e-9 * std::max(1.0, steps_real))
    throw ConfigError("control_oracle: t must be a multiple of h");
  if (m == 0) return u0(r);

  const double dr = opt.dr > 0.0 ? opt.dr : opt.h;
  const double r_max = opt.r_max > 0.0 ? opt.r_max
                                         : std::max(r, src.support_radius()) + 2.0 * t + 2.0;
  const auto N = static_cast<std::size_t>(std::ceil(r_max / dr));
  const double n1 = src.dimension() - 1.0;
  auto node = [dr](std::size_t j) { return dr * static_cast<double>(j + 1); };

  std::vector<double> V(N), W(N), fh(N);
  for (std::size_t j = 0; j < N; ++j) {
    V[j] = u0(node(j));
    fh[j] = opt.h * src.profile(node(j));
  }
  std::vector<double> controls(opt.controls);
  for (int k = 0; k < opt.controls; ++k)
    controls[k] = -1.0 + 2.0 * k / (opt.controls - 1);

  auto interp = [&](const std::vector<double>& F, double y) {
    const double x = y / dr - 1.0;
    if (x <= 0.0) return F.front();
    const auto i = static_cast<std::size_t>(x);
    if (i + 1 >= N) return F.back();
    const double w = x - static_cast<double>(i);
    const double a = F[i];
    const double b = F[i + 1];
    if (a == kNegInf || b == kNegInf) {
      // Interpolation never mixes an unreachable state into a finite value.
      if (w == 0.0) return a;
      if (w == 1.0) return b;
      return kNegInf;
    }
    return (1.0 - w) * a + w * b;
  };

  for (std::size_t k = 0; k < m; ++k) {
#pragma omp parallel for schedule(static) num_threads(thread_count())
    for (std::size_t j = 0; j < N; ++j) {
      const double x = node(j);
      double best = kNegInf;
      for (double a : controls) {
        const double y = x - opt.h * (a - n1 / x);
        if (!(y > 0.0)) continue;
        best = std::max(best, interp(V, y));
      }
      W[j] = best == kNegInf ? kNegInf : best + fh[j];
    }
    std::swap(V, W);
  }
  return interp(V, r);
}

}  // namespace curveflow
