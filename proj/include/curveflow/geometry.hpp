#pragma once

#include <functional>
#include <vector>

#include "curveflow/levelset2d.hpp"

namespace curveflow {

struct LevelCurve {
  double level = 0.0;
  std::vector<Point2> points;
  bool closed = false;
};

struct CircleFit {
  Point2 center;
  double radius = 0.0;
  double rms = 0.0;
};

/// Stationary solution on the stadium: v = 0 where x1 <= 0 or |x| <= 1, else
/// sqrt(1 - x2^2) - x1. The optional map theta must satisfy theta(0) = 0.
/// Throws ConfigError outside U (with a small slack for grid nodes).
double explicit_solution(Point2 x, const StadiumSpec& spec = {},
                         const std::function<double(double)>& theta = {});

/// Same formula evaluated on the whole grid (x2 clamped to [-1, 1] outside U).
LevelSetField2D explicit_solution_field(const Grid2D& grid, const StadiumSpec& spec = {},
                                        const std::function<double(double)>& theta = {});

/// max |(div(Dv/|Dv|_e) + 1) |Dv|_e| over nodes of U farther than
/// margin_cells * dx from the boundary of U and from the corner locus
/// {x1 = 0} u {|x| = 1}. Derivatives are fourth-order centered differences;
/// the mixed one drops to the compact second-order stencil when the wide one
/// would leave the strip |x2| < 1 or cross the corner locus.
double residual_on_U(const LevelSetField2D& v, const StadiumSpec& spec, double epsilon,
                     double margin_cells = 2.0);

using CellMask = std::function<bool(Point2)>;

/// Marching squares at the given level. A cell is used only when all four
/// corners pass the mask. Segments are chained into ordered polylines;
/// saddle cells are resolved by the cell-centre average.
std::vector<LevelCurve> extract_level_curves(const LevelSetField2D& u, double level,
                                             const CellMask& mask = {});

/// Symmetric Hausdorff distance between two point sets.
double hausdorff(const std::vector<Point2>& a, const std::vector<Point2>& b);

/// Kasa algebraic circle fit. Throws NumericError for fewer than 8 points or
/// (nearly) collinear input.
CircleFit circle_fit(const std::vector<Point2>& points);

struct FoliationReport {
  bool boundary_monotone = false;
  std::vector<double> levels;
  std::vector<double> distance;     // best Hausdorff distance per level
  std::vector<double> matched_level;
  std::vector<double> bad_exit_levels;
  double max_distance = 0.0;
  bool ok() const { return boundary_monotone && bad_exit_levels.empty(); }
};

/// For each (negative) level of u, extracts its curves in {x1 > 0} of U and
/// finds the level of v whose curves are closest in Hausdorff distance.
/// Boundary monotonicity (strict decrease in x1 > 0) is checked first on the
/// outermost node rows inside U; curves whose open ends do not sit near the
/// straight parts of the boundary are reported.
FoliationReport foliation_check(const LevelSetField2D& u, const LevelSetField2D& v,
                                const StadiumSpec& spec, const std::vector<double>& levels);

/// RK4 for circular fronts under V = kappa + 1: r' = 1 - (n-1)/r. Returns 0
/// once the radius reaches 0.
double radial_front_radius(double r0, double T, int n = 2, double h = 1e-4);

/// Time for a circle of radius r0 < n-1 to shrink to a point:
/// -r0 - (n-1) log(1 - r0 / (n-1)).
double extinction_time(double r0, int n = 2);

struct FatteningReport {
  double area0 = 0.0;
  double areaT = 0.0;
  double factor = 0.0;
};

struct FatteningSetup {
  double gap = 0.0;  // distance between the two unit circles (0 = tangent)
  double T = 0.2;
  double dx = 0.02;
  double delta = 0.0;  // 0 selects 4 dx
  double L = 3.0;
  bool single = false;  // one unit disk at the origin instead of two
};

/// Area of {|u| <= delta} before and after evolving the signed distance to
/// the union of the disks with f = 0.
FatteningReport fattening_probe(const FatteningSetup& setup);

struct StationarityReport {
  double hausdorff_to_initial = 0.0;
  double fitted_radius = 0.0;  // 0 when no zero level curve is left
  double ode_radius = 0.0;
  bool extinct = false;
};

/// Evolves u0 = r0 - |x| with f = 0 and compares the zero level curve with the
/// initial circle and with the ODE radius.
StationarityReport stationarity_check(double r0, double T, double dx, double L = 0.0);

}  // namespace curveflow
