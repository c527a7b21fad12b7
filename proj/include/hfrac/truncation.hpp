#pragma once

#include "hfrac/grid.hpp"

namespace hfrac {

/// Geometric epsilon schedule for principal-value truncations.
struct TruncationSchedule {
  double eps0 = 1.0;
  double ratio = 0.5;
  double cauchy_tol = 1e-6;
  int max_refinements = 40;
};

/// Lattice truncation T^{alpha,eps} f along each vertical line: the sum of
/// (f(z, t + r) - f(z, t)) |r|^{-1-alpha} h over lattice offsets r with
/// eps < |r| <= half period. Offsets are kept sign-symmetric; requires
/// periodic mode and eps >= h_vert.
GridField truncated_tderiv_grid(const GridField& f, double alpha, double eps);

struct PointTruncation {
  double value = 0.0;
  double tail_bound = 0.0;      // NaN when ||f||_inf is unknown
  double error_estimate = 0.0;  // quadrature error estimate
};

/// Adaptive quadrature of int_{eps<|r|<r_max} (f(z,t+r)-f(z,t)) |r|^{-1-alpha} dr
/// along the vertical line through p, with panels split at +-eps, the kink
/// candidates r = -t, -2t and dyadic shells. The |r| > r_max tail is bounded
/// analytically from sup|f| when known.
PointTruncation truncated_tderiv_point(const CallableField& f, const HeisenbergPoint& p,
                                       double alpha, double eps, double r_max,
                                       double abs_tol = 1e-8);

struct PvStep {
  double eps = 0.0;
  double value = 0.0;  // truncation value (pointwise) or norm (grid)
  double diff = 0.0;   // change from the previous step
};

struct PvPointResult {
  double value = 0.0;
  bool converged = false;
  std::vector<PvStep> history;
  double tail_bound = 0.0;
};

/// Pointwise principal value via the epsilon schedule. Non-convergence is a
/// reported state, not an error.
PvPointResult pv_tderiv_point(const CallableField& f, const HeisenbergPoint& p, double alpha,
                              const TruncationSchedule& sched, double r_max,
                              double quad_tol = 1e-8);

struct PvGridResult {
  GridField limit;
  bool converged = false;
  std::vector<PvStep> history;  // value = L^p norm of the truncation, diff = Cauchy norm
};

/// Grid principal value: epsilon halvings down to the lattice floor, Cauchy
/// differences measured in L^norm_p.
PvGridResult pv_tderiv_grid(const GridField& f, double alpha, const TruncationSchedule& sched,
                            double norm_p = 2.0);

/// Bilinear pairing sum f_j g_j cellvolume (no conjugation).
Complex duality_pairing(const GridField& f, const GridField& g);

/// c(alpha) = int_R (1 - cos u) |u|^{-1-alpha} du, so that T^alpha =
/// -c(alpha) |T|^alpha on Schwartz-class lines. Adaptive quadrature with an
/// integration-by-parts tail; abs_tol controls the quadrature target.
double frac_pv_constant(double alpha, double abs_tol = 1e-10);

}  // namespace hfrac
