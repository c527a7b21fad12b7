#include "hfrac/grid.hpp"

#include <cmath>
#include <numeric>

namespace hfrac {

GridSpec::GridSpec(int n_, std::vector<AxisSpec> axes_, BoundaryMode mode_)
    : n(n_), axes(std::move(axes_)), mode(mode_) {
  if (n < 1) throw std::invalid_argument("GridSpec: n must be >= 1");
  if (static_cast<int>(axes.size()) != 2 * n + 1) {
    throw std::invalid_argument("GridSpec: expected 2n+1 axes");
  }
  for (const auto& ax : axes) {
    if (ax.count < 4) throw std::invalid_argument("GridSpec: axis count must be >= 4");
    if (!(ax.b > ax.a)) throw std::invalid_argument("GridSpec: axis needs b > a");
  }
}

std::size_t GridSpec::total_cells() const {
  std::size_t m = 1;
  for (const auto& ax : axes) m *= static_cast<std::size_t>(ax.count);
  return m;
}

double GridSpec::cell_volume() const {
  double v = 1.0;
  for (const auto& ax : axes) v *= ax.spacing();
  return v;
}

double GridSpec::box_volume() const {
  double v = 1.0;
  for (const auto& ax : axes) v *= ax.length();
  return v;
}

std::size_t GridSpec::flatten(std::span<const int> idx) const {
  std::size_t flat = 0;
  for (int k = 0; k < num_axes(); ++k) {
    flat = flat * axes[k].count + static_cast<std::size_t>(idx[k]);
  }
  return flat;
}

void GridSpec::unflatten(std::size_t flat, std::span<int> idx) const {
  for (int k = num_axes() - 1; k >= 0; --k) {
    idx[k] = static_cast<int>(flat % axes[k].count);
    flat /= axes[k].count;
  }
}

HeisenbergPoint GridSpec::point(std::span<const int> idx) const {
  HeisenbergPoint p = HeisenbergPoint::identity(n);
  for (int i = 0; i < n; ++i) p.x(i) = axes[i].center(idx[i]);
  for (int i = 0; i < n; ++i) p.y(i) = axes[n + i].center(idx[n + i]);
  p.t = axes[2 * n].center(idx[2 * n]);
  return p;
}

HeisenbergPoint GridSpec::point(std::size_t flat) const {
  std::vector<int> idx(num_axes());
  unflatten(flat, idx);
  return point(idx);
}

bool GridSpec::same_shape(const GridSpec& o) const {
  if (n != o.n || mode != o.mode) return false;
  for (int k = 0; k < num_axes(); ++k) {
    if (axes[k].count != o.axes[k].count || axes[k].a != o.axes[k].a || axes[k].b != o.axes[k].b)
      return false;
  }
  return true;
}

GridSpec GridSpec::box(int n, double Lz, double Lt, int Nz, int Nt, BoundaryMode mode) {
  std::vector<AxisSpec> axes(2 * n + 1);
  for (int k = 0; k < 2 * n; ++k) axes[k] = {-Lz, Lz, Nz};
  axes[2 * n] = {-Lt, Lt, Nt};
  return GridSpec(n, std::move(axes), mode);
}

GridField::GridField(GridSpec s, Complex fill) : spec(std::move(s)) {
  values.assign(spec.total_cells(), fill);
}

bool GridField::all_finite() const {
  for (const auto& v : values) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  }
  return true;
}

std::span<const Complex> GridField::line(std::size_t line_index) const {
  const std::size_t nt = spec.vertical().count;
  return {values.data() + line_index * nt, nt};
}

std::span<Complex> GridField::line_mut(std::size_t line_index) {
  const std::size_t nt = spec.vertical().count;
  return {values.data() + line_index * nt, nt};
}

VerticalLineView vertical_line(const GridField& f, std::size_t line_index) {
  const auto& v = f.spec.vertical();
  return {f.line(line_index), v.spacing(), v.a, v.b};
}

GridField sample(const std::function<double(const HeisenbergPoint&)>& f, const GridSpec& spec) {
  GridField out(spec);
  std::vector<int> idx(spec.num_axes(), 0);
  const std::size_t m = spec.total_cells();
  for (std::size_t flat = 0; flat < m; ++flat) {
    const double v = f(spec.point(idx));
    if (!std::isfinite(v)) throw std::runtime_error("sample: non-finite evaluation at a node");
    out.values[flat] = Complex(v, 0.0);
    // increment multi-index, vertical fastest
    for (int k = spec.num_axes() - 1; k >= 0; --k) {
      if (++idx[k] < spec.axes[k].count) break;
      idx[k] = 0;
    }
  }
  return out;
}

GridField sample(const CallableField& f, const GridSpec& spec) { return sample(f.eval, spec); }

double lp_norm(const GridField& f, double p) {
  if (std::isinf(p)) {
    double m = 0.0;
    for (const auto& v : f.values) m = std::max(m, std::abs(v));
    return m;
  }
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must satisfy p >= 1");
  double s = 0.0;
  if (p == 2.0) {
    for (const auto& v : f.values) s += std::norm(v);
  } else if (p == 1.0) {
    for (const auto& v : f.values) s += std::abs(v);
  } else {
    for (const auto& v : f.values) s += std::pow(std::abs(v), p);
  }
  return std::pow(s * f.spec.cell_volume(), 1.0 / p);
}

namespace {
void require_same_spec(const GridField& a, const GridField& b, const char* op) {
  if (!a.spec.same_shape(b.spec)) {
    throw std::invalid_argument(std::string(op) + ": grid spec mismatch");
  }
}
}  // namespace

GridField operator+(const GridField& a, const GridField& b) {
  require_same_spec(a, b, "operator+");
  GridField r = a;
  for (std::size_t i = 0; i < r.values.size(); ++i) r.values[i] += b.values[i];
  return r;
}

GridField operator-(const GridField& a, const GridField& b) {
  require_same_spec(a, b, "operator-");
  GridField r = a;
  for (std::size_t i = 0; i < r.values.size(); ++i) r.values[i] -= b.values[i];
  return r;
}

GridField operator*(Complex c, const GridField& a) {
  GridField r = a;
  for (auto& v : r.values) v *= c;
  return r;
}

GridField operator*(double c, const GridField& a) { return Complex(c, 0.0) * a; }

GridField reflect(const GridField& f) {
  GridField out(f.spec);
  const int na = f.spec.num_axes();
  std::vector<int> idx(na, 0), ridx(na);
  const std::size_t m = f.spec.total_cells();
  for (std::size_t flat = 0; flat < m; ++flat) {
    for (int k = 0; k < na; ++k) ridx[k] = f.spec.axes[k].count - 1 - idx[k];
    out.values[f.spec.flatten(ridx)] = f.values[flat];
    for (int k = na - 1; k >= 0; --k) {
      if (++idx[k] < f.spec.axes[k].count) break;
      idx[k] = 0;
    }
  }
  return out;
}

double mass_fraction_outside_central_half(const GridField& f) {
  const int na = f.spec.num_axes();
  std::vector<int> idx(na, 0);
  double inside = 0.0, total = 0.0;
  const std::size_t m = f.spec.total_cells();
  for (std::size_t flat = 0; flat < m; ++flat) {
    bool central = true;
    for (int k = 0; k < na; ++k) {
      const auto& ax = f.spec.axes[k];
      const double c = ax.center(idx[k]);
      const double mid = 0.5 * (ax.a + ax.b);
      if (std::abs(c - mid) > 0.25 * ax.length()) {
        central = false;
        break;
      }
    }
    const double w = std::abs(f.values[flat]);
    total += w;
    if (central) inside += w;
    for (int k = na - 1; k >= 0; --k) {
      if (++idx[k] < f.spec.axes[k].count) break;
      idx[k] = 0;
    }
  }
  return total > 0.0 ? (total - inside) / total : 0.0;
}

double interpolate_real(const GridField& f, std::span<const double> coords) {
  constexpr int kMaxAxes = 15;
  const int na = f.spec.num_axes();
  if (na > kMaxAxes) throw std::invalid_argument("interpolate_real: too many axes");
  int base[kMaxAxes];
  double frac[kMaxAxes];

  for (int k = 0; k < na; ++k) {
    const auto& ax = f.spec.axes[k];
    double u = (coords[k] - ax.a) / ax.spacing() - 0.5;  // cell-center coordinates
    if (f.spec.mode == BoundaryMode::Periodic) {
      u -= std::floor(u / ax.count) * ax.count;
      if (u >= ax.count) u -= ax.count;
    } else if (u < -1.0 || u > ax.count) {
      return 0.0;
    }
    const double fl = std::floor(u);
    base[k] = static_cast<int>(fl);
    frac[k] = u - fl;
  }

  double acc = 0.0;
  const int corners = 1 << na;
  int idx[kMaxAxes];
  for (int c = 0; c < corners; ++c) {
    double w = 1.0;
    bool valid = true;
    for (int k = 0; k < na; ++k) {
      const int off = (c >> k) & 1;
      w *= off ? frac[k] : 1.0 - frac[k];
      if (w == 0.0) {
        valid = false;
        break;
      }
      int j = base[k] + off;
      const int N = f.spec.axes[k].count;
      if (f.spec.mode == BoundaryMode::Periodic) {
        j = ((j % N) + N) % N;
      } else if (j < 0 || j >= N) {
        valid = false;
        break;
      }
      idx[k] = j;
    }
    if (valid) acc += w * f.values[f.spec.flatten({idx, static_cast<std::size_t>(na)})].real();
  }
  return acc;
}

double interpolate_real(const GridField& f, const HeisenbergPoint& p) {
  constexpr int kMaxAxes = 15;
  double coords[kMaxAxes];
  const int n = f.spec.n;
  for (int i = 0; i < n; ++i) coords[i] = p.x(i);
  for (int i = 0; i < n; ++i) coords[n + i] = p.y(i);
  coords[2 * n] = p.t;
  return interpolate_real(f, {coords, static_cast<std::size_t>(2 * n + 1)});
}

}  // namespace hfrac
