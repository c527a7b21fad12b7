#pragma once

#include "hfrac/vertical.hpp"

#include <cstdint>

namespace hfrac {

/// Geometric grid of vertical shifts s in +-[s_min, s_max] with a trapezoidal
/// rule in log|s|; both signs are always included.
struct SShiftGrid {
  double s_min = 0.0;
  double s_max = 0.0;
  int per_decade = 16;

  SShiftGrid() = default;
  SShiftGrid(double smin, double smax, int per_decade_ = 16);

  /// Default for a grid: s_min = vertical spacing, s_max = half box height.
  static SShiftGrid for_grid(const GridSpec& spec, int per_decade = 16);

  /// Positive shift magnitudes and their trapezoidal dlog weights.
  const std::vector<double>& magnitudes() const { return mags_; }
  const std::vector<double>& weights() const { return wts_; }

  SShiftGrid scaled(double factor) const;  // maps s -> factor * s

 private:
  std::vector<double> mags_, wts_;
};

/// ||f||_{V^p_alpha}: deconvolve the line Bessel smoothing spectrally and take
/// the L^p norm; equals (int ||f_z||_{p,alpha}^p dz)^{1/p} by construction.
double vertical_sobolev_norm(const GridField& f, double p, double alpha);

/// Besov seminorm of a single periodic line (both signs of s).
double besov_line(std::span<const Complex> samples, double spacing, double p, double q,
                  double alpha, const SShiftGrid& sgrid);

/// Line-wise Besov lift: (int ||f_z||_{Besov}^p dz)^{1/p}.
double besov_I(const GridField& f, double p, double q, double alpha, const SShiftGrid& sgrid);

/// Vertical-vs-horizontal seminorm: the inner integral runs over H^n first,
/// the q/p power is applied after, then the ds/|s| integral.
double vhp_seminorm(const GridField& f, double p, double q, double alpha, const SShiftGrid& sgrid);

/// Heisenberg Besov double integral via stratified Monte-Carlo over Koranyi
/// shells; returns the estimate and its standard error.
struct MonteCarloEstimate {
  double value = 0.0;
  double standard_error = 0.0;
  std::uint64_t samples = 0;
};
MonteCarloEstimate besov_heisenberg(const GridField& f, double p, double alpha,
                                    std::uint64_t budget, std::uint64_t seed);

}  // namespace hfrac
