#include "hfrac/geometry.hpp"

#include <cmath>

namespace hfrac {

namespace {

void require_same_n(const HeisenbergPoint& p, const HeisenbergPoint& q, const char* op) {
  if (p.n() != q.n()) {
    throw std::invalid_argument(std::string(op) + ": dimension mismatch (n=" +
                                std::to_string(p.n()) + " vs n=" + std::to_string(q.n()) + ")");
  }
}

}  // namespace

HeisenbergPoint::HeisenbergPoint(Eigen::VectorXd x_, Eigen::VectorXd y_, double t_)
    : x(std::move(x_)), y(std::move(y_)), t(t_) {
  if (x.size() != y.size() || x.size() < 1) {
    throw std::invalid_argument("HeisenbergPoint: x and y must have equal size n >= 1");
  }
}

HeisenbergPoint::HeisenbergPoint(double x1, double y1, double t_) : t(t_) {
  x.resize(1);
  y.resize(1);
  x(0) = x1;
  y(0) = y1;
}

HeisenbergPoint HeisenbergPoint::identity(int n) {
  return HeisenbergPoint(Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n), 0.0);
}

bool HeisenbergPoint::finite() const {
  return x.allFinite() && y.allFinite() && std::isfinite(t);
}

bool approx_equal(const HeisenbergPoint& a, const HeisenbergPoint& b, double tol) {
  if (a.n() != b.n()) return false;
  return (a.x - b.x).lpNorm<Eigen::Infinity>() <= tol &&
         (a.y - b.y).lpNorm<Eigen::Infinity>() <= tol && std::abs(a.t - b.t) <= tol;
}

HeisenbergPoint group_mul(const HeisenbergPoint& p, const HeisenbergPoint& q) {
  require_same_n(p, q, "group_mul");
  HeisenbergPoint r;
  r.x = p.x + q.x;
  r.y = p.y + q.y;
  r.t = p.t + q.t + 0.5 * (p.x.dot(q.y) - p.y.dot(q.x));
  return r;
}

HeisenbergPoint group_inv(const HeisenbergPoint& p) {
  HeisenbergPoint r;
  r.x = -p.x;
  r.y = -p.y;
  r.t = -p.t;
  return r;
}

HeisenbergPoint dilate(double lambda, const HeisenbergPoint& p) {
  if (!(lambda > 0.0)) throw std::invalid_argument("dilate: lambda must be > 0");
  HeisenbergPoint r;
  r.x = lambda * p.x;
  r.y = lambda * p.y;
  r.t = lambda * lambda * p.t;
  return r;
}

double koranyi_norm(const HeisenbergPoint& p) {
  const double z2 = p.x.squaredNorm() + p.y.squaredNorm();
  return std::pow(z2 * z2 + 16.0 * p.t * p.t, 0.25);
}

double koranyi_dist(const HeisenbergPoint& p, const HeisenbergPoint& q) {
  require_same_n(p, q, "koranyi_dist");
  return koranyi_norm(group_mul(group_inv(q), p));
}

namespace {

double partial(const std::function<double(const HeisenbergPoint&)>& f, const HeisenbergPoint& p,
               int axis, double h) {
  // axis: 0..n-1 -> x_i, n..2n-1 -> y_i, 2n -> t
  HeisenbergPoint hi = p, lo = p;
  const int n = p.n();
  if (axis < n) {
    hi.x(axis) += h;
    lo.x(axis) -= h;
  } else if (axis < 2 * n) {
    hi.y(axis - n) += h;
    lo.y(axis - n) -= h;
  } else {
    hi.t += h;
    lo.t -= h;
  }
  const double a = f(hi), b = f(lo);
  if (!std::isfinite(a) || !std::isfinite(b)) {
    throw std::runtime_error("apply_vector_field: non-finite evaluation");
  }
  return (a - b) / (2.0 * h);
}

double scaled_step(const HeisenbergPoint& p) {
  double m = std::abs(p.t);
  m = std::max(m, p.x.lpNorm<Eigen::Infinity>());
  m = std::max(m, p.y.lpNorm<Eigen::Infinity>());
  return default_fd_step * std::max(1.0, m);
}

}  // namespace

double apply_vector_field(const CallableField& f, VectorFieldId v, const HeisenbergPoint& p,
                          double h) {
  if (!(h > 0.0) || h < 1e-8 || h > 1e-2) {
    throw std::invalid_argument("apply_vector_field: step h must lie in [1e-8, 1e-2]");
  }
  const int n = p.n();
  switch (v.kind) {
    case VectorFieldId::Kind::X: {
      if (v.index < 1 || v.index > n) throw std::invalid_argument("VectorFieldId: index out of range");
      const int i = v.index - 1;
      return partial(f.eval, p, i, h) - 0.5 * p.y(i) * partial(f.eval, p, 2 * n, h);
    }
    case VectorFieldId::Kind::Y: {
      if (v.index < 1 || v.index > n) throw std::invalid_argument("VectorFieldId: index out of range");
      const int i = v.index - 1;
      return partial(f.eval, p, n + i, h) + 0.5 * p.x(i) * partial(f.eval, p, 2 * n, h);
    }
    case VectorFieldId::Kind::T:
      return partial(f.eval, p, 2 * n, h);
  }
  throw std::logic_error("apply_vector_field: unreachable");
}

double apply_vector_field(const CallableField& f, VectorFieldId v, const HeisenbergPoint& p) {
  return apply_vector_field(f, v, p, scaled_step(p));
}

Eigen::VectorXd horizontal_gradient(const CallableField& f, const HeisenbergPoint& p, double h) {
  const int n = p.n();
  Eigen::VectorXd g(2 * n);
  for (int i = 1; i <= n; ++i) {
    g(i - 1) = apply_vector_field(f, VectorFieldId::X(i), p, h);
    g(n + i - 1) = apply_vector_field(f, VectorFieldId::Y(i), p, h);
  }
  return g;
}

Eigen::VectorXd horizontal_gradient(const CallableField& f, const HeisenbergPoint& p) {
  return horizontal_gradient(f, p, scaled_step(p));
}

}  // namespace hfrac
