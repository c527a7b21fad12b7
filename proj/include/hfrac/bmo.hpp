#pragma once

#include "hfrac/grid.hpp"

#include <cstdint>

namespace hfrac {

struct KoranyiBall {
  HeisenbergPoint center;
  double radius = 0.0;
};

/// Family of Koranyi balls for the BMO estimator: lattice centers times
/// dyadic radii 2^{-j}.
struct BallFamily {
  std::vector<KoranyiBall> balls;

  /// Centers on a per_axis^{2n+1} lattice inside [-span, span]^{2n} x
  /// [-span_t, span_t], radii 2^{-j} for j in [j_min, j_max].
  static BallFamily lattice(int n, double span, double span_t, int per_axis, int j_min, int j_max);

  /// Same, but drops balls that the grid cannot resolve with min_cells cells.
  static BallFamily lattice_for_grid(const GridSpec& spec, int per_axis, int j_min, int j_max,
                                     int min_cells = 32);
};

/// max over the family of the mean oscillation of f on the ball; membership by
/// Koranyi distance on cell centers. Throws on balls with fewer than
/// min_cells member cells.
double bmo_norm(const GridField& f, const BallFamily& balls, int min_cells = 32);

/// Callable variant: mean oscillation by Monte-Carlo over each ball with at
/// least min_samples accepted points.
double bmo_norm(const CallableField& f, const BallFamily& balls, int min_samples = 1024,
                std::uint64_t seed = 7u);

}  // namespace hfrac
