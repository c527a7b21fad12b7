#include "hfrac/lambda_ops.hpp"

#include <cmath>

namespace hfrac {

GridField lambda_op(const SubLaplacianOperator& L, const GridField& f, double alpha,
                    LambdaVariant variant) {
  if (!(alpha >= 0.0 && alpha <= 2.0)) {
    throw std::invalid_argument("lambda_op: alpha must lie in [0, 2]");
  }
  const auto absT = VerticalSymbol::abs_power(Complex(alpha, 0.0));
  const auto resolvent = one_plus_power_spectral(-alpha);
  if (variant == LambdaVariant::Lambda) {
    return operator_function(L, resolvent, vertical_multiplier(f, absT));
  }
  return vertical_multiplier(operator_function(L, resolvent, f), absT);
}

GridField horizontal_gradient_magnitude(const SubLaplacianOperator& L, const GridField& f) {
  GridField mag(f.spec);
  const int n2 = 2 * f.spec.n;
  std::vector<GridField> parts;
  parts.reserve(n2);
  for (int j = 1; j <= n2; ++j) parts.push_back(L.frame_derivative(f, j));
  for (std::size_t i = 0; i < mag.size(); ++i) {
    double s = 0.0;
    for (const auto& part : parts) s += std::norm(part.values[i]);
    mag.values[i] = Complex(std::sqrt(s), 0.0);
  }
  return mag;
}

double horizontal_sobolev_norm(const SubLaplacianOperator& L, const GridField& f, double p,
                               double alpha, SobolevFlavor flavor) {
  if (!(p > 1.0)) throw std::invalid_argument("horizontal_sobolev_norm: p must be > 1");
  switch (flavor) {
    case SobolevFlavor::Inhomogeneous:
      return lp_norm(f, p) + lp_norm(operator_function(L, power_spectral(0.5 * alpha), f), p);
    case SobolevFlavor::Homogeneous:
      return lp_norm(operator_function(L, power_spectral(0.5 * alpha), f), p);
    case SobolevFlavor::W1p:
      if (alpha != 1.0) {
        throw std::invalid_argument("horizontal_sobolev_norm: W1p flavor requires alpha = 1");
      }
      return lp_norm(f, p) + lp_norm(horizontal_gradient_magnitude(L, f), p);
  }
  throw std::logic_error("horizontal_sobolev_norm: unreachable");
}

}  // namespace hfrac
