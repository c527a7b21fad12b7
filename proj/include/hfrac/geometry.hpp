#pragma once

#include <Eigen/Dense>

#include <functional>
#include <stdexcept>
#include <string>

namespace hfrac {

/// A point (x, y, t) of the Heisenberg group H^n, realised on R^{2n+1}.
/// x and y are the horizontal coordinate blocks, t the vertical coordinate.
struct HeisenbergPoint {
  Eigen::VectorXd x;
  Eigen::VectorXd y;
  double t = 0.0;

  HeisenbergPoint() = default;
  HeisenbergPoint(Eigen::VectorXd x_, Eigen::VectorXd y_, double t_);
  /// n = 1 convenience constructor.
  HeisenbergPoint(double x1, double y1, double t_);

  int n() const { return static_cast<int>(x.size()); }
  static HeisenbergPoint identity(int n);
  bool finite() const;
};

bool approx_equal(const HeisenbergPoint& a, const HeisenbergPoint& b, double tol = 0.0);

/// Group product of Eq. (x,y,t)*(x',y',t') with the symplectic t-correction.
HeisenbergPoint group_mul(const HeisenbergPoint& p, const HeisenbergPoint& q);
HeisenbergPoint group_inv(const HeisenbergPoint& p);
HeisenbergPoint dilate(double lambda, const HeisenbergPoint& p);

/// Koranyi gauge (|z|^4 + 16 t^2)^{1/4}.
double koranyi_norm(const HeisenbergPoint& p);
/// Left-invariant distance ||q^{-1} p||.
double koranyi_dist(const HeisenbergPoint& p, const HeisenbergPoint& q);

/// Identifies one of the left-invariant frame fields X_i, Y_i, T.
struct VectorFieldId {
  enum class Kind { X, Y, T };
  Kind kind = Kind::T;
  int index = 0;  // 1-based, ignored for T

  static VectorFieldId X(int i) { return {Kind::X, i}; }
  static VectorFieldId Y(int i) { return {Kind::Y, i}; }
  static VectorFieldId T() { return {Kind::T, 0}; }
};

/// Closed-form scalar function on H^n, used where grids cannot reach
/// (pointwise quadrature, extreme scales), plus optional analytic data.
struct CallableField {
  std::function<double(const HeisenbergPoint&)> eval;
  double support_radius = std::numeric_limits<double>::infinity();
  double sup_norm = std::numeric_limits<double>::quiet_NaN();  // NaN = unknown
  enum class Smoothness { Lipschitz, CInf };
  Smoothness smoothness = Smoothness::CInf;
  std::function<Eigen::VectorXd(const HeisenbergPoint&)> horizontal_gradient_oracle;
  /// t-values at which the profile t -> f(z, t) is not smooth, used to align
  /// quadrature panels (optional).
  std::function<std::vector<double>(const HeisenbergPoint&)> vertical_kinks;

  double operator()(const HeisenbergPoint& p) const { return eval(p); }
};

/// Central-difference application of a frame field to a callable, using the
/// coordinate formulas X_i = d/dx_i - (y_i/2) d/dt, Y_i = d/dy_i + (x_i/2) d/dt.
double apply_vector_field(const CallableField& f, VectorFieldId v, const HeisenbergPoint& p,
                          double h);
/// Step scaled by max(1, |p|_inf); see apply_vector_field.
double apply_vector_field(const CallableField& f, VectorFieldId v, const HeisenbergPoint& p);

/// (X_1 f, ..., X_n f, Y_1 f, ..., Y_n f) by central differences.
Eigen::VectorXd horizontal_gradient(const CallableField& f, const HeisenbergPoint& p, double h);
Eigen::VectorXd horizontal_gradient(const CallableField& f, const HeisenbergPoint& p);

inline constexpr double default_fd_step = 1e-5;

}  // namespace hfrac
