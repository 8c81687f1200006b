#pragma once

#include <array>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "curveflow/common.hpp"

namespace curveflow {

enum class SourceKind { radial, planar };

/// Nonnegative, Lipschitz, compactly supported source term.
///
/// A radial source is described by its profile f~(r) on [0, inf) and lives in
/// dimension n >= 2. A planar source is a function on R^2 (n = 2). Both kinds
/// can be evaluated at planar points; only radial sources have a profile.
class SourceModel {
 public:
  using Profile = std::function<double(double)>;
  using Field = std::function<double(Point2)>;

  static SourceModel radial(int n, double support_radius, Profile profile,
                            double lipschitz_bound, std::string name = "radial");
  static SourceModel planar(double support_radius, Field field,
                            double lipschitz_bound, std::string name = "planar");

  // Linear interpolation of (r, value) samples; zero beyond the last sample.
  static SourceModel from_table(int n, std::vector<double> r,
                                std::vector<double> values,
                                std::string name = "table");

  SourceKind kind() const { return kind_; }
  int dimension() const { return n_; }
  double support_radius() const { return support_radius_; }
  double lipschitz_bound() const { return lipschitz_; }
  const std::string& name() const { return name_; }

  /// Radial profile f~(r). Throws for planar sources.
  double profile(double r) const;
  /// f(x) for x in R^2.
  double at(Point2 x) const;

  SourceModel scaled(double lambda) const;

  /// Samples the invariants: f >= 0, f = 0 outside the support ball and
  /// difference quotients bounded by the Lipschitz bound (with 1e-9 slack).
  /// Throws ConfigError on violation.
  void validate(double spacing = 0.0) const;

 private:
  SourceModel() = default;

  SourceKind kind_ = SourceKind::radial;
  int n_ = 2;
  double support_radius_ = 0.0;
  double lipschitz_ = 0.0;
  std::string name_;
  Profile profile_;
  Field field_;
};

// Analytic presets.

/// height * max(0, 1 - |r - center| / half_width)
SourceModel tent_source(double center, double height = 1.0,
                        double half_width = 1.0, int n = 2);

/// Sum of tents, each given as (center, height, half_width).
SourceModel multi_tent_source(const std::vector<std::array<double, 3>>& tents,
                              int n = 2);

/// C^1 cubic cutoff: 1 on (-inf, 0], 1 - 3s^2 + 2s^3 on [0, 1], 0 after.
double cubic_cutoff(double s);

/// height * cubic_cutoff(|r - center| / half_width)
SourceModel smooth_bump_source(double center, double height = 1.0,
                               double half_width = 1.0, int n = 2);

/// Radial profile with a plateau: value on [lo, hi], cubic decay of the given
/// width on both sides.
SourceModel plateau_source(double lo, double hi, double value = 1.0,
                           double width = 0.5, int n = 2);

SourceModel zero_source(int n = 2);

/// A radial source viewed as a planar field f(x) = f~(|x|). Requires n = 2.
SourceModel as_planar(const SourceModel& radial);

// Speed and equilibrium set.

struct SpeedReport {
  double c = 0.0;
  std::vector<double> argmax_radii;
  double tol = 0.0;
};

/// c = max of f~ over r >= n-1, by sampling with spacing <= tol / L, so the
/// reported c is within tol of the true maximum. Planar sources are sampled on
/// the region |x| >= n-1 of the support disk. tol = 0 selects 1e-6 (radial)
/// or 5e-3 (planar).
SpeedReport asymptotic_speed(const SourceModel& src, double tol = 0.0);

struct RadiusInterval {
  double lo = 0.0;
  double hi = 0.0;
};

struct EquilibriumSet {
  std::vector<RadiusInterval> intervals;
  double tol = 0.0;

  bool empty() const { return intervals.empty(); }
  double min() const;  // r0
  double max() const;  // M
  bool contains(double r, double slack = 0.0) const;
};

/// {r >= n-1 : |f~(r) - c| <= tol}, sampled with the given spacing (0 selects
/// tol / L, capped at 1e7 samples) and merged into intervals. Throws
/// NumericError when nothing qualifies (c inconsistent with the source).
EquilibriumSet equilibrium_set(const SourceModel& src, double c, double tol,
                               double spacing = 0.0);

struct AngularEnvelopes {
  std::vector<double> r;
  std::vector<double> upper;  // max over angles
  std::vector<double> lower;  // min over angles
  double c = 0.0;
  double upper_last_max = 0.0;  // b: last sampled radius with upper == c
  double lower_last_max = 0.0;  // a: last sampled radius with lower == c
};

/// Angular max/min of a source on circles of the given radii. c is taken as
/// the maximum sampled value. The angle count should be a multiple of 4 so
/// that the coordinate axes are sampled.
AngularEnvelopes angular_envelopes(const SourceModel& src,
                                   const std::vector<double>& r_samples,
                                   int angle_count = 720);

}  // namespace curveflow
