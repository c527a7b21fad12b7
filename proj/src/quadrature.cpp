#include "hfrac/quadrature.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace hfrac {

namespace {

double tanh_sinh_raw(const std::function<double(double)>& g, double a, double b) {
  // boost's termination heuristic floors near sqrt(eps); its reported error
  // estimate is unreliable when the roundoff detector trips, so callers form
  // their own estimate by panel splitting.
  thread_local boost::math::quadrature::tanh_sinh<double> integrator;
  double err = 0.0, L1 = 0.0;
  std::size_t levels = 0;
  const double v = integrator.integrate(g, a, b, 1.5e-8, &err, &L1, &levels);
  if (!std::isfinite(v)) throw std::runtime_error("integrate_adaptive: non-finite integral");
  return v;
}

}  // namespace

QuadratureResult integrate_adaptive(const std::function<double(double)>& g, double a, double b,
                                    double /*tol*/) {
  if (!(b > a)) return {0.0, 0.0};
  // two- vs four-panel comparison; tanh_sinh's own estimate is unusable when
  // its roundoff detector trips early
  const double m = 0.5 * (a + b);
  const double halves = tanh_sinh_raw(g, a, m) + tanh_sinh_raw(g, m, b);
  const double q1 = 0.5 * (a + m), q3 = 0.5 * (m + b);
  const double quarters = tanh_sinh_raw(g, a, q1) + tanh_sinh_raw(g, q1, m) +
                          tanh_sinh_raw(g, m, q3) + tanh_sinh_raw(g, q3, b);
  return {quarters, std::abs(halves - quarters)};
}

QuadratureResult integrate_panels(const std::function<double(double)>& g,
                                  const std::vector<double>& breakpoints, double abs_tol) {
  QuadratureResult total;
  if (breakpoints.size() < 2) return total;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    if (!(breakpoints[i + 1] > breakpoints[i])) continue;
    auto r = integrate_adaptive(g, breakpoints[i], breakpoints[i + 1]);
    total.value += r.value;
    total.error_estimate += r.error_estimate;
  }
  if (!(total.error_estimate <= abs_tol) &&
      !(total.error_estimate <= 1e-10 * std::abs(total.value))) {
    char msg[128];
    std::snprintf(msg, sizeof(msg),
                  "integrate_panels: quadrature non-convergence (error estimate %.3e, tol %.3e)",
                  total.error_estimate, abs_tol);
    throw std::runtime_error(msg);
  }
  return total;
}

namespace {

// Golub-Welsch from monic three-term recurrence coefficients.
void golub_welsch(const Eigen::VectorXd& alpha, const Eigen::VectorXd& beta, double mu0,
                  std::vector<double>& nodes, std::vector<double>& weights) {
  const int n = static_cast<int>(alpha.size());
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    J(i, i) = alpha(i);
    if (i + 1 < n) {
      const double s = std::sqrt(beta(i + 1));
      J(i, i + 1) = s;
      J(i + 1, i) = s;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    nodes[i] = es.eigenvalues()(i);
    const double v0 = es.eigenvectors()(0, i);
    weights[i] = mu0 * v0 * v0;
  }
}

}  // namespace

void gauss_jacobi_01(double gamma, int n, std::vector<double>& nodes,
                     std::vector<double>& weights) {
  if (!(gamma > -1.0)) throw std::invalid_argument("gauss_jacobi_01: need gamma > -1");
  // Weight s^gamma on [0,1] as shifted Jacobi (a, b) = (0, gamma) on [-1,1].
  const double a = 0.0, b = gamma;
  Eigen::VectorXd alpha(n), beta(n);
  for (int k = 0; k < n; ++k) {
    const double s = 2.0 * k + a + b;
    if (k == 0) {
      alpha(k) = (b - a) / (a + b + 2.0);
      beta(k) = 0.0;
    } else if (k == 1) {
      alpha(k) = (b * b - a * a) / ((s + 2.0) * s);
      beta(k) = 4.0 * (1.0 + a) * (1.0 + b) / ((a + b + 2.0) * (a + b + 2.0) * (a + b + 3.0));
    } else {
      alpha(k) = (b * b - a * a) / ((s + 2.0) * s);
      const double kk = k;
      beta(k) = 4.0 * kk * (kk + a) * (kk + b) * (kk + a + b) / ((s + 1.0) * s * s * (s - 1.0));
    }
  }
  const double mu0 = std::pow(2.0, gamma + 1.0) / (gamma + 1.0);
  std::vector<double> xn, wn;
  golub_welsch(alpha, beta, mu0, xn, wn);
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    nodes[i] = 0.5 * (1.0 + xn[i]);
    weights[i] = wn[i] * std::pow(2.0, -gamma - 1.0);
  }
}

void gauss_legendre(double a, double b, int n, std::vector<double>& nodes,
                    std::vector<double>& weights) {
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n), beta(n);
  beta(0) = 0.0;
  for (int k = 1; k < n; ++k) {
    const double kk = k;
    beta(k) = kk * kk / (4.0 * kk * kk - 1.0);
  }
  std::vector<double> xn, wn;
  golub_welsch(alpha, beta, 2.0, xn, wn);
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    nodes[i] = 0.5 * (a + b) + 0.5 * (b - a) * xn[i];
    weights[i] = 0.5 * (b - a) * wn[i];
  }
}

}  // namespace hfrac
