#pragma once

#include "hfrac/geometry.hpp"

#include <complex>
#include <span>
#include <vector>

namespace hfrac {

enum class BoundaryMode { Periodic, ZeroExtended };

struct AxisSpec {
  double a = 0.0;
  double b = 0.0;
  int count = 0;

  double length() const { return b - a; }
  double spacing() const { return (b - a) / count; }
  double center(int j) const { return a + (j + 0.5) * spacing(); }
};

/// Rectangular cell-centered box grid on H^n = R^{2n+1}.
/// Axis order: x_1..x_n, y_1..y_n, t. The vertical axis is last in the axis
/// list and fastest-varying in memory, so each vertical line is contiguous.
struct GridSpec {
  int n = 1;
  std::vector<AxisSpec> axes;  // size 2n+1
  BoundaryMode mode = BoundaryMode::Periodic;

  GridSpec() = default;
  GridSpec(int n_, std::vector<AxisSpec> axes_, BoundaryMode mode_);

  int num_axes() const { return 2 * n + 1; }
  const AxisSpec& vertical() const { return axes.back(); }
  std::size_t total_cells() const;
  std::size_t num_lines() const { return total_cells() / vertical().count; }
  double cell_volume() const;
  double box_volume() const;

  /// Flat index of a multi-index (vertical fastest).
  std::size_t flatten(std::span<const int> idx) const;
  void unflatten(std::size_t flat, std::span<int> idx) const;
  HeisenbergPoint point(std::span<const int> idx) const;
  HeisenbergPoint point(std::size_t flat) const;

  bool same_shape(const GridSpec& o) const;

  /// Uniform box helper: z axes on [-Lz, Lz], vertical on [-Lt, Lt].
  static GridSpec box(int n, double Lz, double Lt, int Nz, int Nt,
                      BoundaryMode mode = BoundaryMode::Periodic);
};

using Complex = std::complex<double>;

/// Scalar samples on a GridSpec, complex 64-bit per component.
struct GridField {
  GridSpec spec;
  std::vector<Complex> values;

  GridField() = default;
  explicit GridField(GridSpec s, Complex fill = Complex(0.0, 0.0));

  Complex& at(std::span<const int> idx) { return values[spec.flatten(idx)]; }
  Complex at(std::span<const int> idx) const { return values[spec.flatten(idx)]; }

  std::size_t size() const { return values.size(); }
  bool all_finite() const;

  /// Read-only contiguous view of the vertical line through the horizontal
  /// cell with flat line index `line` (0 <= line < num_lines()).
  std::span<const Complex> line(std::size_t line_index) const;
  std::span<Complex> line_mut(std::size_t line_index);
};

/// A non-owning view of one vertical line.
struct VerticalLineView {
  std::span<const Complex> samples;
  double spacing = 0.0;
  double a = 0.0, b = 0.0;
};

VerticalLineView vertical_line(const GridField& f, std::size_t line_index);

/// Pointwise evaluation at cell centers. Throws on non-finite values.
GridField sample(const CallableField& f, const GridSpec& spec);
GridField sample(const std::function<double(const HeisenbergPoint&)>& f, const GridSpec& spec);

/// Midpoint-rule L^p norm, p in [1, inf]; p = infinity() gives sup |f|.
double lp_norm(const GridField& f, double p);

// Field arithmetic (specs must match).
GridField operator+(const GridField& a, const GridField& b);
GridField operator-(const GridField& a, const GridField& b);
GridField operator*(Complex c, const GridField& a);
GridField operator*(double c, const GridField& a);

/// Reflection x -> x^{-1} (coordinate negation); exact on symmetric boxes.
GridField reflect(const GridField& f);

/// Fraction of |f| mass outside the central half of the box, per the
/// periodic-sampling convention for test functions.
double mass_fraction_outside_central_half(const GridField& f);

/// Linear interpolation of the samples at an arbitrary point (periodic wrap
/// or zero extension per spec.mode). The span form takes raw coordinates in
/// axis order (x_1..x_n, y_1..y_n, t) and is allocation-free.
double interpolate_real(const GridField& f, std::span<const double> coords);
double interpolate_real(const GridField& f, const HeisenbergPoint& p);

}  // namespace hfrac
