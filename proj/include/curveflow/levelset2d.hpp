#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "curveflow/source_model.hpp"

namespace curveflow {

/// Square grid on [-L, L]^2 with spacing dx; node (i, j) sits at
/// (-L + i dx, -L + j dx) and is stored at j * n + i.
struct Grid2D {
  double L = 0.0;
  double dx = 0.0;
  std::size_t n = 0;

  static Grid2D make(double L, double dx);
  double coord(std::size_t i) const { return -L + dx * static_cast<double>(i); }
  Point2 point(std::size_t i, std::size_t j) const { return {coord(i), coord(j)}; }
  std::size_t index(std::size_t i, std::size_t j) const { return j * n + i; }
  std::size_t count() const { return n * n; }
};

struct LevelSetField2D {
  Grid2D grid;
  std::vector<double> values;
  double time = 0.0;
  double epsilon = 0.0;

  static LevelSetField2D from_function(const Grid2D& grid,
                                       const std::function<double(Point2)>& u0);
  double at(std::size_t i, std::size_t j) const { return values[grid.index(i, j)]; }
  /// Bilinear interpolation, clamped to the grid.
  double sample(Point2 x) const;
};

/// U = union of closed unit disks centered on [-a, a] x {0}.
struct StadiumSpec {
  double a = 1.0;

  double segment_distance(Point2 x) const;
  /// Distance to U (0 inside).
  double distance(Point2 x) const;
  bool contains(Point2 x, double slack = 0.0) const;
};

/// f = c * cubic_cutoff(dist(x, U) / width); Lipschitz bound 1.5 c / width.
SourceModel stadium_source(const StadiumSpec& spec, double c = 1.0, double width = 0.5);

/// Centered-difference (div(Du/|Du|_e)) |Du|_e with |Du|_e^2 = |Du|^2 + e^2,
/// written as [u_xx (u_y^2 + e^2) - 2 u_x u_y u_xy + u_yy (u_x^2 + e^2)] /
/// (|Du|^2 + e^2). Boundary nodes copy their inward neighbour.
std::vector<double> curvature_term(const LevelSetField2D& u, double epsilon);

/// Upwind |Du| for outward motion:
///   sqrt(max(D+x, -D-x, 0)^2 + max(D+y, -D-y, 0)^2).
std::vector<double> driving_term(const LevelSetField2D& u);

/// curvature_term + driving_term.
std::vector<double> spatial_operator(const LevelSetField2D& u, double epsilon);

/// min(dx^2 / 8, dx / 2).
double max_stable_dt2d(double dx);

struct Evolve2DOptions {
  double epsilon = 0.0;  // 0 selects dx^2
  double safety = 0.9;
};

/// One forward Euler step of u_t = spatial_operator + f with f sampled at the
/// nodes. Throws NumericError on CFL violation.
LevelSetField2D step2d(const LevelSetField2D& u, double dt, const std::vector<double>& f_nodes,
                       double epsilon);

using Observer2D = std::function<void(const LevelSetField2D&)>;

/// Integrates to u0.time + T with uniform steps of at most safety *
/// max_stable_dt2d. The observer sees every layer, including the first.
LevelSetField2D evolve2d(const LevelSetField2D& u0, double T, const SourceModel& src,
                         const Evolve2DOptions& opt = {}, const Observer2D& observer = {});

/// max over nodes in U of |u - c u.time|.
double flatness_on_U(const LevelSetField2D& u, const StadiumSpec& spec, double c);

struct ScaledSample {
  double x = 0.0;  // |x|
  double t = 0.0;
};

struct ScaledLimitReport {
  std::vector<double> lambdas;
  std::vector<ScaledSample> samples;
  std::vector<std::vector<double>> deviation;  // [lambda][sample]
  bool strictly_decreasing() const;
};

/// Evaluates |phi(lambda |x|, lambda t) / lambda - max{c (t - |x|), 0}| with
/// the radial solver (u0 = 0) for every lambda and sample.
ScaledLimitReport scaled_limit_check(const SourceModel& src, const std::vector<double>& lambdas,
                                     const std::vector<ScaledSample>& samples, double dr = 0.05);

}  // namespace curveflow
