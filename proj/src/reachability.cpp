#include "curveflow/reachability.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>
#include <utility>

#include "curveflow/parallel.hpp"

namespace curveflow {

SpeedRange speed_range(double r, int n) {
  if (!(r > 0.0)) throw ConfigError("speed_range: r must be > 0");
  const double drift = (n - 1.0) / r;
  return {-1.0 - drift, 1.0 - drift};
}

std::size_t DistanceTable::node(double radius) const {
  const double k = std::round(radius / dr);
  if (k <= 1.0) return 1;
  return std::min(static_cast<std::size_t>(k), r.size() - 1);
}

std::size_t DistanceTable::start_index(std::size_t node_index) const {
  auto it = std::lower_bound(starts.begin(), starts.end(), node_index);
  if (it == starts.end() || *it != node_index) {
    std::ostringstream os;
    os << "distance table: r = " << r.at(node_index) << " is not a start";
    throw ConfigError(os.str());
  }
  return static_cast<std::size_t>(it - starts.begin());
}

namespace {

// Single-source longest path over the cell graph. Gains are negative except
// where f~ > c inside (0, n-1), where only leftward edges exist; the graph has
// no positive cycle, so label correcting terminates.
void search(std::size_t start, const std::vector<double>& gain_right,
            const std::vector<double>& gain_left, double* out) {
  const std::size_t N = gain_right.size();
  std::fill(out, out + N, kNegInf);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item> queue;
  out[start] = 0.0;
  queue.push({0.0, start});
  while (!queue.empty()) {
    const auto [val, i] = queue.top();
    queue.pop();
    if (val < out[i]) continue;
    if (i + 1 < N && std::isfinite(gain_right[i])) {
      const double v = val + gain_right[i];
      if (v > out[i + 1]) {
        out[i + 1] = v;
        queue.push({v, i + 1});
      }
    }
    if (i >= 2) {
      const double v = val + gain_left[i];
      if (v > out[i - 1]) {
        out[i - 1] = v;
        queue.push({v, i - 1});
      }
    }
  }
  out[start] = std::max(out[start], 0.0);
}

}  // namespace

DistanceTable compute_d(const SourceModel& src, double c, const ReachGrid& grid,
                        StartSet start_set) {
  if (src.kind() != SourceKind::radial) throw ConfigError("compute_d needs a radial source");
  if (!(grid.dr > 0.0) || !(grid.r_max > 2.0 * grid.dr))
    throw ConfigError("compute_d: need 0 < 2 dr < r_max");
  DistanceTable t;
  t.n = src.dimension();
  t.c = c;
  t.dr = grid.dr;
  const auto N = static_cast<std::size_t>(std::floor(grid.r_max / grid.dr + 1e-9)) + 1;
  t.r.resize(N);
  for (std::size_t i = 0; i < N; ++i) t.r[i] = grid.dr * static_cast<double>(i);

  const double n1 = t.n - 1.0;
  const double L = src.lipschitz_bound();
  for (std::size_t i = 1; i < N; ++i)
    if (t.r[i] >= n1 - 1e-12 && src.profile(t.r[i]) >= c - 0.5 * L * grid.dr - 1e-12)
      t.equilibrium_nodes.push_back(i);
  if (t.equilibrium_nodes.empty()) {
    std::ostringstream os;
    os << "compute_d: no grid node is an equilibrium for c = " << c;
    throw NumericError(os.str());
  }

  std::vector<double> gain_right(N, kNegInf), gain_left(N, kNegInf);
  for (std::size_t i = 1; i < N; ++i) {
    if (i + 1 < N) {
      const double mid = t.r[i] + 0.5 * grid.dr;
      const auto sr = speed_range(mid, t.n);
      if (sr.v_max > 0.0) {
        const double h = std::min(src.profile(mid) - c, 0.0);
        gain_right[i] = h * grid.dr / sr.v_max;
      }
    }
    if (i >= 2) {
      const double mid = t.r[i] - 0.5 * grid.dr;
      const auto sr = speed_range(mid, t.n);
      double h = src.profile(mid) - c;
      if (mid >= n1) h = std::min(h, 0.0);
      // Losses: cross as fast as possible. Gains (only where the drift forces
      // leftward motion): cross as slowly as allowed.
      const double speed = (h > 0.0 && sr.v_max < 0.0) ? -sr.v_max : -sr.v_min;
      gain_left[i] = h * grid.dr / speed;
    }
  }

  if (start_set == StartSet::all_nodes) {
    for (std::size_t i = 1; i < N; ++i) t.starts.push_back(i);
  } else {
    t.starts = t.equilibrium_nodes;
  }
  const std::size_t S = t.starts.size();
  t.d.assign(S * N, kNegInf);
#pragma omp parallel for schedule(static) num_threads(thread_count())
  for (std::size_t k = 0; k < S; ++k) search(t.starts[k], gain_right, gain_left, &t.d[k * N]);
  return t;
}

std::vector<double> compute_v0(const DistanceTable& table,
                               const std::function<double(double)>& u0) {
  const std::size_t N = table.size();
  std::vector<double> u(table.starts.size());
  for (std::size_t k = 0; k < u.size(); ++k) u[k] = u0(table.r[table.starts[k]]);
  std::vector<double> v0(N, kNegInf);
#pragma omp parallel for schedule(static) num_threads(thread_count())
  for (std::size_t i = 0; i < N; ++i) {
    double best = kNegInf;
    for (std::size_t k = 0; k < u.size(); ++k) {
      const double d = table.at(i, k);
      if (d == kNegInf) continue;
      best = std::max(best, d + u[k]);
    }
    v0[i] = best;
  }
  return v0;
}

double ProfileResult::sample(double x) const {
  const double dr = r[1] - r[0];
  const double k = x / dr;
  if (k <= 1.0) return psi_inf[1];
  const auto i = static_cast<std::size_t>(k);
  if (i + 1 >= r.size()) return psi_inf.back();
  const double w = k - static_cast<double>(i);
  return (1.0 - w) * psi_inf[i] + w * psi_inf[i + 1];
}

ProfileResult compute_psi_inf(const SourceModel& src, const std::function<double(double)>& u0,
                              const ReachGrid& grid, double c) {
  if (c < 0.0) c = asymptotic_speed(src).c;
  ProfileResult res;
  res.equilibria = equilibrium_set(src, c, std::max(1e-6, 0.5 * src.lipschitz_bound() * grid.dr));
  res.table = compute_d(src, c, grid, StartSet::all_nodes);
  const DistanceTable& t = res.table;
  res.r = t.r;
  res.v0 = compute_v0(t, u0);
  const std::size_t N = t.size();
  res.psi_inf.assign(N, kNegInf);
  res.argmax.assign(N, 0.0);
  std::vector<std::size_t> eq_index;
  for (std::size_t s : t.equilibrium_nodes) eq_index.push_back(t.start_index(s));
  for (std::size_t i = 1; i < N; ++i) {
    for (std::size_t e = 0; e < eq_index.size(); ++e) {
      const double d = t.at(i, eq_index[e]);
      if (d == kNegInf) continue;
      const double v = d + res.v0[t.equilibrium_nodes[e]];
      if (v > res.psi_inf[i]) {  // strict: the smallest s wins ties
        res.psi_inf[i] = v;
        res.argmax[i] = t.r[t.equilibrium_nodes[e]];
      }
    }
  }
  res.psi_inf[0] = res.psi_inf[1];
  res.argmax[0] = res.argmax[1];
  return res;
}

EnvelopeData envelope_profiles(const std::function<double(double)>& u0,
                               const std::function<double(Point2)>& phi,
                               const DistanceTable& table, double tol, int angle_count) {
  if (table.starts.size() + 1 != table.size())
    throw ConfigError("envelope_profiles: the table needs every node as a start");
  const SourceModel phi_src = SourceModel::planar(
      1.0, [&phi](Point2 x) { return phi(x); }, 0.0, "phi");
  const AngularEnvelopes env = angular_envelopes(phi_src, table.r, angle_count);
  EnvelopeData out;
  out.r = table.r;
  const std::size_t N = table.size();
  out.w0_plus.resize(N);
  out.w0_minus.resize(N);
  for (std::size_t i = 0; i < N; ++i) {
    out.w0_plus[i] = u0(table.r[i]) + env.upper[i];
    out.w0_minus[i] = u0(table.r[i]) + env.lower[i];
  }
  auto lookup = [&table](const std::vector<double>& w) {
    return [&table, &w](double x) { return w[table.node(x)]; };
  };
  out.v0_plus = compute_v0(table, lookup(out.w0_plus));
  out.v0_minus = compute_v0(table, lookup(out.w0_minus));
  for (std::size_t s : table.equilibrium_nodes)
    out.mismatch_on_A = std::max(out.mismatch_on_A, std::abs(out.v0_plus[s] - out.v0_minus[s]));
  out.matched_on_A = out.mismatch_on_A <= tol;
  return out;
}

}  // namespace curveflow
