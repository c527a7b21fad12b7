#pragma once

#include <functional>
#include <vector>

namespace hfrac {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
};

/// Adaptive tanh-sinh integration of g over [a, b]; handles endpoint
/// singularities. tol is boost's termination tolerance (error vs L1 scale).
QuadratureResult integrate_adaptive(const std::function<double(double)>& g, double a, double b,
                                    double tol = 1e-11);

/// Integrate g over the union of panels defined by the sorted breakpoints.
/// Throws when the accumulated error estimate exceeds abs_tol.
QuadratureResult integrate_panels(const std::function<double(double)>& g,
                                  const std::vector<double>& breakpoints, double abs_tol);

/// Nodes/weights for int_0^1 s^{gamma} f(s) ds ~ sum w_i f(s_i), gamma > -1
/// (Gauss-Jacobi via the Golub-Welsch tridiagonal).
void gauss_jacobi_01(double gamma, int n, std::vector<double>& nodes, std::vector<double>& weights);

/// Gauss-Legendre nodes/weights on [a, b].
void gauss_legendre(double a, double b, int n, std::vector<double>& nodes,
                    std::vector<double>& weights);

}  // namespace hfrac
