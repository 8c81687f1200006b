#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "curveflow/source_model.hpp"

namespace curveflow {

struct SpeedRange {
  double v_min = 0.0;
  double v_max = 0.0;
};

/// Admissible velocities at radius r: [-1 - (n-1)/r, 1 - (n-1)/r].
SpeedRange speed_range(double r, int n);

struct ReachGrid {
  double dr = 0.01;
  double r_max = 12.0;
};

/// d(r, s): best accumulated f~ - c along admissible curves that start at s
/// and end at r. Nodes are r_i = i dr; node 0 marks the excluded boundary
/// r = 0 and is never reachable. Unreachable entries hold -inf.
struct DistanceTable {
  int n = 2;
  double c = 0.0;
  double dr = 0.0;
  std::vector<double> r;
  std::vector<std::size_t> starts;             // node index of each start
  std::vector<std::size_t> equilibrium_nodes;  // grid-level equilibria
  std::vector<double> d;                       // d[start * size() + node]

  std::size_t size() const { return r.size(); }
  std::size_t node(double radius) const;  // nearest node, clamped to [1, N-1]
  /// d(r_node, s) for the start with the given index in `starts`.
  double at(std::size_t node, std::size_t start_index) const {
    return d[start_index * r.size() + node];
  }
  /// Index into `starts` of the given node; throws if it is not a start.
  std::size_t start_index(std::size_t node) const;
};

enum class StartSet { all_nodes, equilibria };

/// Label-correcting search from every start. Edges join neighbouring nodes;
/// an edge crosses its cell at the admissible speed that is best for the
/// cost (c - f~(mid)) dr / speed. Rightward edges exist only where
/// 1 - (n-1)/mid > 0. A start is always at distance 0 from itself.
/// Grid-level equilibria are the nodes r >= n-1 with f~ >= c - L dr / 2.
/// Throws NumericError when no grid node is an equilibrium.
DistanceTable compute_d(const SourceModel& src, double c, const ReachGrid& grid = {},
                        StartSet starts = StartSet::all_nodes);

/// v0(r) = max over starts rho of d(r, rho) + u0(rho), -inf entries skipped.
std::vector<double> compute_v0(const DistanceTable& table,
                               const std::function<double(double)>& u0);

struct ProfileResult {
  std::vector<double> r;
  std::vector<double> v0;
  std::vector<double> psi_inf;
  std::vector<double> argmax;  // maximizing equilibrium radius (smallest on ties)
  EquilibriumSet equilibria;
  DistanceTable table;

  double sample(double x) const;  // linear interpolation of psi_inf
};

/// psi_inf(r) = max over grid equilibria s of d(r, s) + v0(s).
ProfileResult compute_psi_inf(const SourceModel& src, const std::function<double(double)>& u0,
                              const ReachGrid& grid = {}, double c = -1.0);

struct EnvelopeData {
  std::vector<double> r;
  std::vector<double> w0_plus, w0_minus;
  std::vector<double> v0_plus, v0_minus;
  double mismatch_on_A = 0.0;
  bool matched_on_A = false;
};

/// Initial data u0(|x|) + phi(x): phi is replaced by its angular max/min on
/// each circle, then v0+- are formed from the (all-node) table.
EnvelopeData envelope_profiles(const std::function<double(double)>& u0,
                               const std::function<double(Point2)>& phi,
                               const DistanceTable& table, double tol = 1e-9,
                               int angle_count = 720);

}  // namespace curveflow
