#pragma once

#include "hfrac/sublaplacian.hpp"

namespace hfrac {

/// A convolution kernel centered at the group identity.
struct KernelField {
  GridField field;
  double mass = 0.0;        // integral of the kernel over the box
  double tail_bound = 0.0;  // analytically bounded truncation remainder
  bool resolution_warning = false;
};

/// h_s = e^{-sA} applied to the unit-mass single-cell impulse at the identity.
/// Fatal if sqrt(s) is below the largest horizontal spacing; a warning flag is
/// set below twice the spacing.
KernelField heat_kernel(const SubLaplacianOperator& L, double s);

struct BesselQuadOptions {
  double s0 = 1e-4;
  double s_max = 40.0;
  double ratio = 1.25;   // geometric panel growth
  int jacobi_nodes = 8;  // endpoint-singularity panel [0, s0]
  int panel_nodes = 6;   // Gauss-Legendre nodes per geometric panel
};

/// Quadrature approximation of the Bessel symbol
/// (1/Gamma(alpha)) int_0^inf s^{alpha-1} e^{-s} e^{-s lambda} ds evaluated as
/// a function of lambda; shared by bessel_kernel_H and its tests.
std::function<double(double)> bessel_quadrature_symbol(double alpha, BesselQuadOptions opts = {});

/// B_alpha = (1/Gamma(alpha)) int s^{alpha-1} e^{-s} h_s ds via the s-quadrature
/// applied in the spectral calculus of A. Guarded to 0 < alpha <= 4.
KernelField bessel_kernel_H(const SubLaplacianOperator& L, double alpha,
                            BesselQuadOptions opts = {});

/// Group convolution (f * k)(x) = sum_y f(y) k(y^{-1} x) cellvol. On
/// group-aligned grids the displacement is an exact lattice point; otherwise
/// k is interpolated multilinearly. Throws when cells^2 exceeds the budget.
GridField group_convolve(const GridField& f, const KernelField& k,
                         std::size_t budget = 1000000000ull);

}  // namespace hfrac
