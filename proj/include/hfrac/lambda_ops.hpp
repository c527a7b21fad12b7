#pragma once

#include "hfrac/sublaplacian.hpp"
#include "hfrac/vertical.hpp"

namespace hfrac {

enum class LambdaVariant { Lambda, LambdaStar };

/// Lambda_alpha = (1-Delta)^{-alpha} |T|^alpha and its formal adjoint
/// Lambda*_alpha = |T|^alpha (1-Delta)^{-alpha}. Guarded to alpha in [0, 2].
GridField lambda_op(const SubLaplacianOperator& L, const GridField& f, double alpha,
                    LambdaVariant variant);

enum class SobolevFlavor { Inhomogeneous, Homogeneous, W1p };

/// Horizontal Sobolev norms: ||f||_p + ||(-Delta)^{alpha/2} f||_p
/// (inhomogeneous), ||(-Delta)^{alpha/2} f||_p (homogeneous), or
/// ||f||_p + ||\grad_H f||_p via the frame stencil (W1p, alpha = 1 only).
double horizontal_sobolev_norm(const SubLaplacianOperator& L, const GridField& f, double p,
                               double alpha, SobolevFlavor flavor = SobolevFlavor::Inhomogeneous);

/// Pointwise Euclidean length of the stencil horizontal gradient.
GridField horizontal_gradient_magnitude(const SubLaplacianOperator& L, const GridField& f);

}  // namespace hfrac
