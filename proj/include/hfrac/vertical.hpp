#pragma once

#include "hfrac/grid.hpp"

namespace hfrac {

/// One-dimensional Fourier multiplier acting along vertical lines.
///
/// Symbols, with tau the physical frequency:
///   abs_power(alpha):   (2 pi |tau|)^alpha, alpha complex; value at tau = 0 is
///                       1 for alpha = 0 and 0 otherwise (the mean component is
///                       annihilated for Re alpha > 0 and for smoothing powers).
///   hilbert:            sgn(tau), 0 at tau = 0 (and at the unpaired Nyquist
///                       bin of even-length lines).
///   bessel(alpha):      (1 + 4 pi^2 tau^2)^{-alpha/2}.
///   one_plus_absT(beta): (1 + 4 pi^2 tau^2)^{beta/2}.
struct VerticalSymbol {
  enum class Kind { AbsPower, Hilbert, Bessel, OnePlusAbsT };
  Kind kind = Kind::Hilbert;
  Complex alpha{0.0, 0.0};

  static VerticalSymbol abs_power(Complex a) { return {Kind::AbsPower, a}; }
  static VerticalSymbol hilbert() { return {Kind::Hilbert, {}}; }
  static VerticalSymbol bessel(double a);
  static VerticalSymbol one_plus_absT(double b) { return {Kind::OnePlusAbsT, Complex(b, 0.0)}; }

  Complex value(double tau) const;
};

/// Per-line FFT, multiply by the symbol at grid frequencies, inverse FFT.
/// Rejects zero-extended grids (multipliers are defined spectrally).
GridField vertical_multiplier(const GridField& f, const VerticalSymbol& sym);

/// ||H(Hf) - f||_2 / ||f||_2 for mean-zero-per-line f. Throws if some line
/// mean exceeds 1e-10 relative to the field's sup norm.
double hilbert_involution_check(const GridField& f);

/// Vertical shift f(z, t) -> f(z, t + s). Periodic grids use band-limited
/// (spectral) interpolation; zero-extended grids use linear interpolation and
/// require |s| < half the box height.
GridField vertical_shift(const GridField& f, double s);

/// Per-line convolution with tap samples of a 1D kernel psi: taps are the
/// values psi(j h) for j = -(m-1)/2 .. (m-1)/2 (odd length m), and the sum is
/// scaled by the vertical spacing so it approximates the integral f *v psi.
GridField vertical_convolve(const GridField& f, std::span<const double> taps);

}  // namespace hfrac
