#include "curveflow/source_model.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "curveflow/parallel.hpp"

namespace curveflow {

namespace {

constexpr double kMaxSamples = 1e7;

std::size_t sample_count(double lo, double hi, double spacing) {
  if (hi <= lo || spacing <= 0.0) return 1;
  return static_cast<std::size_t>(std::ceil((hi - lo) / spacing)) + 1;
}

}  // namespace

SourceModel SourceModel::radial(int n, double support_radius, Profile profile,
                                double lipschitz_bound, std::string name) {
  if (n < 2) throw ConfigError("source: dimension n must be >= 2");
  if (!(support_radius > 0.0)) throw ConfigError("source: R must be > 0");
  if (!(lipschitz_bound >= 0.0))
    throw ConfigError("source: lipschitz bound must be >= 0");
  if (!profile) throw ConfigError("source: empty profile");
  SourceModel s;
  s.kind_ = SourceKind::radial;
  s.n_ = n;
  s.support_radius_ = support_radius;
  s.lipschitz_ = lipschitz_bound;
  s.name_ = std::move(name);
  s.profile_ = std::move(profile);
  return s;
}

SourceModel SourceModel::planar(double support_radius, Field field,
                                double lipschitz_bound, std::string name) {
  if (!(support_radius > 0.0)) throw ConfigError("source: R must be > 0");
  if (!(lipschitz_bound >= 0.0))
    throw ConfigError("source: lipschitz bound must be >= 0");
  if (!field) throw ConfigError("source: empty field");
  SourceModel s;
  s.kind_ = SourceKind::planar;
  s.n_ = 2;
  s.support_radius_ = support_radius;
  s.lipschitz_ = lipschitz_bound;
  s.name_ = std::move(name);
  s.field_ = std::move(field);
  return s;
}

SourceModel SourceModel::from_table(int n, std::vector<double> r,
                                    std::vector<double> values,
                                    std::string name) {
  if (r.size() != values.size() || r.size() < 2)
    throw ConfigError("source table: need >= 2 (r, value) pairs of equal length");
  double lip = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (!(values[i] >= 0.0)) throw ConfigError("source table: negative value");
    if (i > 0) {
      if (!(r[i] > r[i - 1]))
        throw ConfigError("source table: radii must be strictly increasing");
      lip = std::max(lip, std::abs(values[i] - values[i - 1]) / (r[i] - r[i - 1]));
    }
  }
  if (values.back() != 0.0)
    throw ConfigError("source table: last value must be 0 (compact support)");
  if (r.front() > 0.0 && values.front() != 0.0) {
    r.insert(r.begin(), 0.0);
    values.insert(values.begin(), values.front());
  }
  std::size_t last_nonzero = 0;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i] > 0.0) last_nonzero = i;
  const double support = r[std::min(last_nonzero + 1, r.size() - 1)];
  auto profile = [r, values](double x) {
    if (x <= r.front()) return values.front();
    if (x >= r.back()) return 0.0;
    auto it = std::upper_bound(r.begin(), r.end(), x);
    const std::size_t j = static_cast<std::size_t>(it - r.begin());
    const double w = (x - r[j - 1]) / (r[j] - r[j - 1]);
    return (1.0 - w) * values[j - 1] + w * values[j];
  };
  return radial(n, std::max(support, 1e-12), profile, lip, std::move(name));
}

double SourceModel::profile(double r) const {
  if (kind_ != SourceKind::radial)
    throw ConfigError("source '" + name_ + "' is planar and has no radial profile");
  return profile_(r);
}

double SourceModel::at(Point2 x) const {
  if (kind_ == SourceKind::radial) return profile_(x.norm());
  return field_(x);
}

SourceModel SourceModel::scaled(double lambda) const {
  if (!(lambda > 0.0)) throw ConfigError("source: scale must be > 0");
  SourceModel s = *this;
  s.lipschitz_ *= lambda;
  if (kind_ == SourceKind::radial) {
    s.profile_ = [p = profile_, lambda](double r) { return lambda * p(r); };
  } else {
    s.field_ = [f = field_, lambda](Point2 x) { return lambda * f(x); };
  }
  return s;
}

void SourceModel::validate(double spacing) const {
  const double R = support_radius_;
  if (spacing <= 0.0) spacing = std::min(0.01, R / 200.0);
  const double slack = lipschitz_ * (1.0 + 1e-9) + 1e-9;
  auto fail = [&](const std::string& what, double where) {
    std::ostringstream os;
    os << "source '" << name_ << "': " << what << " near " << where;
    throw ConfigError(os.str());
  };
  if (kind_ == SourceKind::radial) {
    const std::size_t m = sample_count(0.0, R + 1.0, spacing);
    double prev = profile_(0.0);
    for (std::size_t i = 0; i < m; ++i) {
      const double r = i * spacing;
      const double v = profile_(r);
      if (!(v >= 0.0)) fail("negative or non-finite value", r);
      if (r >= R && v != 0.0) fail("nonzero value outside support", r);
      if (i > 0 && std::abs(v - prev) > slack * spacing) fail("Lipschitz bound exceeded", r);
      prev = v;
    }
    return;
  }
  const double L = R + 1.0;
  const std::size_t m = sample_count(-L, L, spacing);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 0; i < m; ++i) {
      const Point2 p{-L + i * spacing, -L + j * spacing};
      const double v = field_(p);
      if (!(v >= 0.0)) fail("negative or non-finite value", p.norm());
      if (p.norm() >= R && v != 0.0) fail("nonzero value outside support", p.norm());
      if (i > 0) {
        const double w = field_({p.x - spacing, p.y});
        if (std::abs(v - w) > slack * spacing) fail("Lipschitz bound exceeded", p.norm());
      }
      if (j > 0) {
        const double w = field_({p.x, p.y - spacing});
        if (std::abs(v - w) > slack * spacing) fail("Lipschitz bound exceeded", p.norm());
      }
    }
  }
}

SourceModel tent_source(double center, double height, double half_width, int n) {
  if (!(half_width > 0.0) || !(height >= 0.0) || center - half_width < 0.0)
    throw ConfigError("tent: need half_width > 0, height >= 0, center >= half_width");
  auto f = [=](double r) {
    return height * std::max(0.0, 1.0 - std::abs(r - center) / half_width);
  };
  std::ostringstream name;
  name << "tent@" << center;
  return SourceModel::radial(n, center + half_width, f, height / half_width, name.str());
}

SourceModel multi_tent_source(const std::vector<std::array<double, 3>>& tents, int n) {
  if (tents.empty()) throw ConfigError("multi_tent: no tents");
  double R = 0.0;
  double lip = 0.0;
  for (const auto& t : tents) {
    if (!(t[2] > 0.0) || !(t[1] >= 0.0) || t[0] - t[2] < 0.0)
      throw ConfigError("multi_tent: invalid tent");
    R = std::max(R, t[0] + t[2]);
    lip += t[1] / t[2];
  }
  auto f = [tents](double r) {
    double s = 0.0;
    for (const auto& t : tents) s += t[1] * std::max(0.0, 1.0 - std::abs(r - t[0]) / t[2]);
    return s;
  };
  return SourceModel::radial(n, R, f, lip, "multi_tent");
}

double cubic_cutoff(double s) {
  if (s <= 0.0) return 1.0;
  if (s >= 1.0) return 0.0;
  return 1.0 - s * s * (3.0 - 2.0 * s);
}

SourceModel smooth_bump_source(double center, double height, double half_width, int n) {
  if (!(half_width > 0.0) || !(height >= 0.0) || center - half_width < 0.0)
    throw ConfigError("bump: need half_width > 0, height >= 0, center >= half_width");
  auto f = [=](double r) { return height * cubic_cutoff(std::abs(r - center) / half_width); };
  // max |d/ds cubic_cutoff| = 1.5
  return SourceModel::radial(n, center + half_width, f, 1.5 * height / half_width, "bump");
}

SourceModel plateau_source(double lo, double hi, double value, double width, int n) {
  if (!(hi >= lo) || !(width > 0.0) || !(value >= 0.0) || lo < 0.0)
    throw ConfigError("plateau: need lo <= hi, width > 0, value >= 0");
  auto f = [=](double r) {
    if (r < lo) return value * cubic_cutoff((lo - r) / width);
    if (r <= hi) return value;
    return value * cubic_cutoff((r - hi) / width);
  };
  return SourceModel::radial(n, hi + width, f, 1.5 * value / width, "plateau");
}

SourceModel zero_source(int n) {
  return SourceModel::radial(n, 1.0, [](double) { return 0.0; }, 0.0, "zero");
}

SourceModel as_planar(const SourceModel& radial) {
  if (radial.kind() != SourceKind::radial || radial.dimension() != 2)
    throw ConfigError("as_planar: need a radial source with n = 2");
  return SourceModel::planar(
      radial.support_radius(), [radial](Point2 x) { return radial.profile(x.norm()); },
      radial.lipschitz_bound(), radial.name() + "/planar");
}

SpeedReport asymptotic_speed(const SourceModel& src, double tol) {
  const double L = src.lipschitz_bound();
  const double rmin = src.dimension() - 1.0;
  const double R = src.support_radius();
  SpeedReport rep;

  if (src.kind() == SourceKind::radial) {
    if (tol <= 0.0) tol = 1e-6;
    const double hi = std::max(R, rmin);
    double h = L > 0.0 ? tol / L : hi - rmin;
    if ((hi - rmin) / h > kMaxSamples) h = (hi - rmin) / kMaxSamples;
    const std::size_t m = sample_count(rmin, hi, h);
    std::vector<double> vals(m);
#pragma omp parallel for schedule(static) num_threads(thread_count())
    for (std::size_t i = 0; i < m; ++i) vals[i] = src.profile(std::min(rmin + i * h, hi));
    rep.c = *std::max_element(vals.begin(), vals.end());
    rep.tol = L > 0.0 ? 0.5 * L * h : 0.0;
    // One cluster per run of near-maximal samples; report its best sample.
    const double band = L * h + 1e-15;
    for (std::size_t i = 0; i < m;) {
      if (vals[i] < rep.c - band) {
        ++i;
        continue;
      }
      std::size_t best = i;
      while (i < m && vals[i] >= rep.c - band) {
        if (vals[i] > vals[best]) best = i;
        ++i;
      }
      rep.argmax_radii.push_back(std::min(rmin + best * h, hi));
    }
    // Golden-section refinement inside the bracketing cells; every accepted
    // value is still an attained value of f, so c stays a lower bound.
    for (double& r_star : rep.argmax_radii) {
      double a = std::max(rmin, r_star - h);
      double b = std::min(hi, r_star + h);
      const double g = 0.5 * (std::sqrt(5.0) - 1.0);
      for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, b); ++it) {
        const double x1 = b - g * (b - a);
        const double x2 = a + g * (b - a);
        if (src.profile(x1) >= src.profile(x2)) b = x2; else a = x1;
      }
      for (double x : {a, 0.5 * (a + b), b}) {
        const double v = src.profile(x);
        if (v > rep.c || (v == rep.c && std::abs(x - r_star) < h)) {
          if (v > rep.c) rep.c = v;
          r_star = x;
        }
      }
    }
    return rep;
  }

  if (tol <= 0.0) tol = 5e-3;
  double h = L > 0.0 ? tol / L : R;
  const double side = 2.0 * R;
  if ((side / h) * (side / h) > 4.0 * kMaxSamples) h = side / std::sqrt(4.0 * kMaxSamples);
  const std::size_t m = sample_count(-R, R, h);
  std::vector<double> row_max(m, kNegInf);
  std::vector<double> row_arg(m, 0.0);
#pragma omp parallel for schedule(static) num_threads(thread_count())
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 0; i < m; ++i) {
      const Point2 p{-R + i * h, -R + j * h};
      const double rr = p.norm();
      if (rr < rmin) continue;
      const double v = src.at(p);
      if (v > row_max[j]) {
        row_max[j] = v;
        row_arg[j] = rr;
      }
    }
  }
  std::size_t jbest = 0;
  for (std::size_t j = 1; j < m; ++j)
    if (row_max[j] > row_max[jbest]) jbest = j;
  rep.c = std::max(0.0, row_max[jbest]);
  rep.argmax_radii = {row_arg[jbest]};
  rep.tol = L * h * std::sqrt(0.5);
  return rep;
}

double EquilibriumSet::min() const {
  if (intervals.empty()) throw NumericError("equilibrium set is empty");
  return intervals.front().lo;
}

double EquilibriumSet::max() const {
  if (intervals.empty()) throw NumericError("equilibrium set is empty");
  return intervals.back().hi;
}

bool EquilibriumSet::contains(double r, double slack) const {
  for (const auto& iv : intervals)
    if (r >= iv.lo - slack && r <= iv.hi + slack) return true;
  return false;
}

EquilibriumSet equilibrium_set(const SourceModel& src, double c, double tol, double spacing) {
  if (!(tol >= 0.0)) throw ConfigError("equilibrium_set: tol must be >= 0");
  const double L = src.lipschitz_bound();
  const double rmin = src.dimension() - 1.0;
  const double hi = std::max(src.support_radius(), rmin);
  if (spacing <= 0.0) spacing = (L > 0.0 && tol > 0.0) ? tol / L : (hi - rmin) / 1000.0;
  if (spacing <= 0.0) spacing = 1.0;
  if ((hi - rmin) / spacing > kMaxSamples) spacing = (hi - rmin) / kMaxSamples;
  const std::size_t m = sample_count(rmin, hi, spacing);

  std::vector<char> hit(m, 0);
  auto radius = [&](std::size_t i) { return std::min(rmin + i * spacing, hi); };
  auto profile = [&](double r) {
    return src.kind() == SourceKind::radial ? src.profile(r) : src.at({r, 0.0});
  };
#pragma omp parallel for schedule(static) num_threads(thread_count())
  for (std::size_t i = 0; i < m; ++i) hit[i] = std::abs(profile(radius(i)) - c) <= tol;

  EquilibriumSet set;
  set.tol = tol;
  for (std::size_t i = 0; i < m;) {
    if (!hit[i]) {
      ++i;
      continue;
    }
    RadiusInterval iv{radius(i), radius(i)};
    while (i < m && hit[i]) iv.hi = radius(i++);
    set.intervals.push_back(iv);
  }
  if (set.intervals.empty()) {
    std::ostringstream os;
    os << "equilibrium set empty for c = " << c << " (tol " << tol
       << "): c is inconsistent with the source";
    throw NumericError(os.str());
  }
  // The source vanishes beyond R, so with c ~ 0 every larger radius qualifies.
  if (std::abs(c) <= tol && set.intervals.back().hi >= hi)
    set.intervals.back().hi = std::numeric_limits<double>::infinity();
  return set;
}

AngularEnvelopes angular_envelopes(const SourceModel& src, const std::vector<double>& r_samples,
                                   int angle_count) {
  if (angle_count < 4) throw ConfigError("angular_envelopes: need >= 4 angles");
  AngularEnvelopes env;
  env.r = r_samples;
  env.upper.assign(r_samples.size(), 0.0);
  env.lower.assign(r_samples.size(), 0.0);
  const double pi = std::acos(-1.0);
#pragma omp parallel for schedule(static) num_threads(thread_count())
  for (std::size_t k = 0; k < r_samples.size(); ++k) {
    const double r = r_samples[k];
    double hi = kNegInf;
    double lo = std::numeric_limits<double>::infinity();
    for (int a = 0; a < angle_count; ++a) {
      const double th = 2.0 * pi * a / angle_count;
      const double v = src.at({r * std::cos(th), r * std::sin(th)});
      hi = std::max(hi, v);
      lo = std::min(lo, v);
    }
    env.upper[k] = hi;
    env.lower[k] = lo;
  }
  env.c = r_samples.empty() ? 0.0 : *std::max_element(env.upper.begin(), env.upper.end());
  const double eps = 1e-12 * std::max(1.0, env.c);
  for (std::size_t k = 0; k < r_samples.size(); ++k) {
    if (env.upper[k] >= env.c - eps) env.upper_last_max = r_samples[k];
    if (env.lower[k] >= env.c - eps) env.lower_last_max = r_samples[k];
  }
  return env;
}

}  // namespace curveflow
