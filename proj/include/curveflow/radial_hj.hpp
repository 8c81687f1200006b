#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "curveflow/source_model.hpp"

namespace curveflow {

/// Uniform grid on [r_min, r_max]; every node is strictly positive because the
/// radial equation is singular at r = 0.
struct RadialGrid {
  double r_min = 0.0;
  double r_max = 0.0;
  double dr = 0.0;
  std::size_t size = 0;

  /// r_min defaults to dr / 2. r_max is rounded to the last node.
  static RadialGrid make(double dr, double r_max, std::optional<double> r_min = {});

  double node(std::size_t i) const { return r_min + static_cast<double>(i) * dr; }
  std::vector<double> nodes() const;
  /// Index of the node closest to r (clamped).
  std::size_t nearest(double r) const;
};

struct RadialField {
  RadialGrid grid;
  std::vector<double> values;
  double time = 0.0;

  static RadialField from_function(const RadialGrid& grid,
                                   const std::function<double(double)>& u0);
  /// Linear interpolation; clamps outside [r_min, r_max].
  double sample(double r) const;
  /// Largest |difference quotient| between neighbouring nodes.
  double max_slope() const;
};

/// H(r, p) = -(n-1) p / r - |p| - f~(r). Concave in p.
double hamiltonian(double r, double p, const SourceModel& src);

/// Explicit monotone solver for phi_t = (n-1)/r phi_r + |phi_r| + f~(r).
///
/// The transport part is max over a in {-1, +1} of ((n-1)/r + a) phi_r. Each
/// branch is upwinded by the sign of its speed (Engquist-Osher splitting):
///   H^(D-, D+) = b+ max(D+, 0) + b- min(D, 0),   b+- = (n-1)/r +- 1,
/// where D = D- when b- <= 0 and D = D+ otherwise. The update is monotone for
/// dt <= dr / (1 + (n-1)/r_min). At r_min a missing left neighbour is treated
/// as a zero slope; at r_max the right ghost has slope far_slope (use -c).
class RadialHJSolver {
 public:
  RadialHJSolver(SourceModel src, RadialGrid grid, double far_slope);

  const RadialGrid& grid() const { return grid_; }
  const SourceModel& source() const { return src_; }
  double far_slope() const { return far_slope_; }
  double max_stable_dt() const;

  /// One forward Euler step. Throws NumericError on CFL violation.
  RadialField step(const RadialField& phi, double dt) const;

  using Observer = std::function<void(const RadialField&)>;
  /// Steps to time phi0.time + T with dt = safety * max_stable_dt (the last
  /// step is shortened to land on T). The observer sees every layer,
  /// including the initial one.
  RadialField evolve(RadialField phi0, double T, const Observer& observer = {},
                     double safety = 0.9) const;

 private:
  SourceModel src_;
  RadialGrid grid_;
  double far_slope_;
  std::vector<double> f_;       // f~ at nodes
  std::vector<double> b_plus_;  // (n-1)/r + 1
  std::vector<double> b_minus_; // (n-1)/r - 1
};

struct EvolveReport {
  RadialField field;
  double max_slope = 0.0;
  std::size_t steps = 0;
};

/// Free-function form: far-field slope is -c with c = asymptotic_speed(src).
RadialField step(const RadialField& phi, double dt, const SourceModel& src);
EvolveReport evolve(const RadialField& phi0, double T, const SourceModel& src);

struct OracleOptions {
  double h = 0.01;       // time step of the discrete curves
  int controls = 41;     // controls per step, uniform in [-1, 1]
  double dr = 0.0;       // state grid spacing (0 selects h)
  double r_max = 0.0;    // state grid extent (0 selects a safe default)
};

/// Independent oracle for the radial solution: maximizes
///   sum_k h f~(gamma_k) + u0(gamma_0)
/// over discrete curves gamma_{k+1} = gamma_k + h (a_k - (n-1)/gamma_k),
/// a_k in [-1, 1], gamma_k > 0, gamma_m = r, by backward value iteration on a
/// radius grid with linear interpolation. Requires t to be a multiple of h.
/// Returns -inf when no admissible curve reaches r.
double control_oracle(double r, double t, const std::function<double(double)>& u0,
                      const SourceModel& src, const OracleOptions& opt = {});

}  // namespace curveflow
