#pragma once

#include <functional>
#include <string>
#include <vector>

#include "curveflow/source_model.hpp"

namespace curveflow {

// Decomposition of (0, n-1) by the sign of h = f~ - c; radii >= n-1 are Outer.
enum class RegionTag { A, B, C, Outer };

// Which explicit formula produced dpsi at a node.
enum class Branch {
  Falling,  // dpsi = r h / (r - (n-1)) <= 0
  Rising,   // dpsi = -r h / (r + (n-1)) >= 0
  Flat,     // dpsi = 0
};

const char* to_string(RegionTag tag);

/// Radial solution psi of the stationary problem
///   -(n-1)/r psi_r - |psi_r| = h(r),  h = f~ - c,
/// sampled on nodes r_i = i dr, i = 0..N (the grid includes r = 0).
struct ErgodicProfile {
  int n = 2;
  double c = 0.0;
  double dr = 0.0;
  double r0 = 0.0;  // smallest equilibrium radius
  std::vector<double> r;
  std::vector<double> psi;
  std::vector<double> dpsi;
  std::vector<RegionTag> tag;
  std::vector<Branch> branch;
  std::vector<double> corner_radii;

  std::size_t size() const { return r.size(); }
  double sample(double x) const;
};

struct ProfileGrid {
  double dr = 0.01;
  double r_max = 30.0;
};

/// Explicit construction: psi(0) = 0, psi_r(0) = 0; on [n-1, inf) psi falls
/// after r0 and rises before it; on (0, n-1) the branch follows the A/B/C
/// decomposition. psi is obtained from dpsi by the trapezoid rule. When r0
/// equals n-1 the node at n-1 takes the limit (n-1) h'(n-1), with h' a
/// one-sided difference of spacing dr. Throws NumericError when the
/// equilibrium set is empty.
ErgodicProfile build_psi(const SourceModel& src, double c, const ProfileGrid& grid = {},
                         double equilibrium_tol = 1e-6);

/// Same equation, but psi is pinned to given values on the components of the
/// equilibrium set (one value per component, left to right). Between two
/// consecutive components the profile is the maximum of the falling branch
/// started at the left component and the rising branch ending at the right
/// one, which creates the single corner from below. Throws NumericError if
/// the data is not attainable (a branch overshoots the next anchor).
ErgodicProfile build_psi_pinned(const SourceModel& src, double c,
                                const std::vector<double>& anchors,
                                const ProfileGrid& grid = {},
                                double equilibrium_tol = 1e-6);

/// Equilibrium components used by the constructions above.
EquilibriumSet profile_equilibria(const SourceModel& src, double c, double equilibrium_tol);

/// max over interior nodes, away from corners (one cell), of
/// |-(n-1)/r dpsi - |dpsi| - h(r)| using the stored dpsi.
double residual(const ErgodicProfile& psi, const SourceModel& src, double c);

/// Least-squares slope of psi over the outer 20% of the grid.
double growth_rate(const ErgodicProfile& psi);

struct CornerReport {
  std::vector<double> corners_from_above;
  std::vector<double> corners_from_below;
  std::vector<double> local_maxima_in_negative_h;  // violations
  std::vector<double> extra_corners_from_below;    // violations
  bool ok() const {
    return corners_from_above.empty() && local_maxima_in_negative_h.empty() &&
           extra_corners_from_below.empty();
  }
};

/// Kinks are jumps of dpsi larger than 10 dr L between neighbouring nodes
/// (jump down: corner from above, jump up: corner from below). Checks that no
/// corner from above or strict local maximum of psi lies where h < -L dr, and
/// that each gap between consecutive equilibrium components holds at most
/// one corner from below.
CornerReport corner_audit(const ErgodicProfile& psi, const SourceModel& src, double c,
                          double equilibrium_tol = 1e-6);

/// Thrown when two profiles differ on the equilibrium set after the shift.
class UniquenessError : public NumericError {
 public:
  UniquenessError(const std::string& what, double gap) : NumericError(what), gap_(gap) {}
  double gap() const { return gap_; }

 private:
  double gap_;
};

struct UniquenessResult {
  double shift = 0.0;         // added to psi2
  double gap_on_set = 0.0;    // max |psi1 - psi2| on the equilibrium points
  double max_difference = 0.0;
};

/// Shifts psi2 to agree with psi1 at the first equilibrium point, checks that
/// they agree (within set_tol) at every sampled equilibrium point, then
/// returns sup |psi1 - psi2| over [lo, hi]. Profiles are compared through
/// their interpolants.
UniquenessResult uniqueness_check(const std::function<double(double)>& psi1,
                                  const std::function<double(double)>& psi2,
                                  const std::vector<double>& equilibrium_points, double lo,
                                  double hi, double spacing, double set_tol = 1e-6);

}  // namespace curveflow
