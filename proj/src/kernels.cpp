#include "hfrac/kernels.hpp"

#include "hfrac/quadrature.hpp"

#include <cmath>

namespace hfrac {

namespace {

double field_mass(const GridField& f) {
  double s = 0.0;
  for (const auto& v : f.values) s += v.real();
  return s * f.spec.cell_volume();
}

}  // namespace

KernelField heat_kernel(const SubLaplacianOperator& L, double s) {
  if (!(s > 0.0)) throw std::invalid_argument("heat_kernel: s must be > 0");
  const auto& spec = L.grid();
  double hmax = 0.0;
  for (int k = 0; k < 2 * spec.n; ++k) hmax = std::max(hmax, spec.axes[k].spacing());
  if (std::sqrt(s) < hmax) {
    throw std::invalid_argument("heat_kernel: grid does not resolve the diffusion width (sqrt(s) < spacing)");
  }
  KernelField out;
  out.resolution_warning = std::sqrt(s) < 2.0 * hmax;

  GridField impulse(spec);
  impulse.values[L.identity_cell()] = Complex(1.0 / spec.cell_volume(), 0.0);
  out.field = operator_function(L, heat_spectral(s), impulse);
  out.mass = field_mass(out.field);
  out.tail_bound = 0.0;
  return out;
}

std::function<double(double)> bessel_quadrature_symbol(double alpha, BesselQuadOptions opts) {
  if (!(alpha > 0.0 && alpha <= 4.0)) {
    throw std::invalid_argument("bessel_quadrature_symbol: alpha must lie in (0, 4]");
  }
  // nodes s_i and weights w_i approximating int_0^{s_max} s^{alpha-1} e^{-s} (.) ds
  std::vector<double> snodes, sweights;

  // [0, s0] with the s^{alpha-1} weight folded into Gauss-Jacobi
  {
    std::vector<double> u, w;
    gauss_jacobi_01(alpha - 1.0, opts.jacobi_nodes, u, w);
    const double scale = std::pow(opts.s0, alpha);  // s = s0 u, s^{a-1} ds = s0^a u^{a-1} du
    for (int i = 0; i < opts.jacobi_nodes; ++i) {
      snodes.push_back(opts.s0 * u[i]);
      sweights.push_back(scale * w[i] * std::exp(-opts.s0 * u[i]));
    }
  }
  // geometric panels [s0 r^j, s0 r^{j+1}] up to s_max
  for (double lo = opts.s0; lo < opts.s_max; lo *= opts.ratio) {
    const double hi = std::min(lo * opts.ratio, opts.s_max);
    std::vector<double> u, w;
    gauss_legendre(lo, hi, opts.panel_nodes, u, w);
    for (int i = 0; i < opts.panel_nodes; ++i) {
      snodes.push_back(u[i]);
      sweights.push_back(w[i] * std::pow(u[i], alpha - 1.0) * std::exp(-u[i]));
    }
  }
  const double gamma = std::tgamma(alpha);
  return [snodes, sweights, gamma](double lam) {
    double acc = 0.0;
    const double l = std::max(lam, 0.0);
    for (std::size_t i = 0; i < snodes.size(); ++i) acc += sweights[i] * std::exp(-snodes[i] * l);
    return acc / gamma;
  };
}

KernelField bessel_kernel_H(const SubLaplacianOperator& L, double alpha, BesselQuadOptions opts) {
  auto symbol = bessel_quadrature_symbol(alpha, opts);
  const auto& spec = L.grid();
  KernelField out;
  GridField impulse(spec);
  impulse.values[L.identity_cell()] = Complex(1.0 / spec.cell_volume(), 0.0);
  out.field = operator_function(L, symbol, impulse);
  out.mass = field_mass(out.field);
  // int_{s_max}^inf s^{alpha-1} e^{-s} ds / Gamma(alpha), crude upper bound
  const double sm = opts.s_max;
  out.tail_bound = 1.2 * std::pow(sm, alpha - 1.0) * std::exp(-sm) / std::tgamma(alpha);
  return out;
}

GridField group_convolve(const GridField& f, const KernelField& k, std::size_t budget) {
  if (!f.spec.same_shape(k.field.spec)) {
    throw std::invalid_argument("group_convolve: f and kernel must share a grid");
  }
  const auto& spec = f.spec;
  const std::size_t cells = spec.total_cells();
  if (cells * cells > budget) {
    throw std::invalid_argument("group_convolve: cost " + std::to_string(cells * cells) +
                                " exceeds the budget");
  }
  const double vol = spec.cell_volume();
  const int n = spec.n;
  const int na = spec.num_axes();
  GridField out(spec);

  if (is_group_aligned(spec)) {
    // integer lattice displacement: w = y^{-1} x with exact shear arithmetic
    const int Nt = spec.axes[2 * n].count;
    std::vector<long> q2(n);
    std::vector<int> half(na);
    const double ht = spec.axes[2 * n].spacing();
    for (int m = 0; m < n; ++m) {
      q2[m] = std::lround(spec.axes[m].spacing() * spec.axes[n + m].spacing() / (2.0 * ht));
    }
    for (int a = 0; a < na; ++a) half[a] = (spec.axes[a].count - 1) / 2;

    std::vector<int> xi(na, 0), yi(na, 0), wi(na, 0);
    for (std::size_t xf = 0; xf < cells; ++xf) {
      Complex acc(0.0, 0.0);
      std::fill(yi.begin(), yi.end(), 0);
      for (std::size_t yf = 0; yf < cells; ++yf) {
        // centered integer coordinates of x and y
        long tk = static_cast<long>(xi[2 * n] - half[2 * n]) - (yi[2 * n] - half[2 * n]);
        for (int m = 0; m < n; ++m) {
          const long cxx = xi[m] - half[m];
          const long cxy = xi[n + m] - half[n + m];
          const long cyx = yi[m] - half[m];
          const long cyy = yi[n + m] - half[n + m];
          // t-part of (-y) * x: (1/2)(y_y x_x - y_x x_y) in units of h_t via q2
          tk += q2[m] * (cyy * cxx - cyx * cxy);
          long dz = cxx - cyx;
          long dy = cxy - cyy;
          // reduce horizontal displacement into the box, shearing t per wrap
          const long Nx = spec.axes[m].count, Ny = spec.axes[n + m].count;
          while (dz > half[m]) {
            dz -= Nx;
            tk -= Nx * dy * q2[m];  // gamma_x^{-1} left-reduction: t -= L_x w_y / 2
          }
          while (dz < -half[m]) {
            dz += Nx;
            tk += Nx * dy * q2[m];
          }
          while (dy > half[n + m]) {
            dy -= Ny;
            tk += Ny * dz * q2[m];  // gamma_y^{-1}: t += L_y w_x / 2
          }
          while (dy < -half[n + m]) {
            dy += Ny;
            tk -= Ny * dz * q2[m];
          }
          wi[m] = static_cast<int>(dz + half[m]);
          wi[n + m] = static_cast<int>(dy + half[n + m]);
        }
        // centered t-coordinate tk maps to index tk + half, wrapped mod Nt
        wi[2 * n] = static_cast<int>((((tk + half[2 * n]) % Nt) + Nt) % Nt);
        acc += f.values[yf] * k.field.values[spec.flatten(wi)];
        for (int a = na - 1; a >= 0; --a) {
          if (++yi[a] < spec.axes[a].count) break;
          yi[a] = 0;
        }
      }
      out.values[xf] = acc * vol;
      for (int a = na - 1; a >= 0; --a) {
        if (++xi[a] < spec.axes[a].count) break;
        xi[a] = 0;
      }
    }
    return out;
  }

  // generic: group displacement evaluated in coordinates, kernel interpolated
  std::vector<double> coords(cells * na);
  {
    std::vector<int> idx(na, 0);
    for (std::size_t flat = 0; flat < cells; ++flat) {
      for (int a = 0; a < na; ++a) coords[flat * na + a] = spec.axes[a].center(idx[a]);
      for (int a = na - 1; a >= 0; --a) {
        if (++idx[a] < spec.axes[a].count) break;
        idx[a] = 0;
      }
    }
  }
  double w[15];
  for (std::size_t xf = 0; xf < cells; ++xf) {
    const double* cx = &coords[xf * na];
    Complex acc(0.0, 0.0);
    for (std::size_t yf = 0; yf < cells; ++yf) {
      const double* cy = &coords[yf * na];
      // w = y^{-1} x = (-y) * x
      double tpart = cx[2 * n] - cy[2 * n];
      for (int m = 0; m < n; ++m) {
        w[m] = cx[m] - cy[m];
        w[n + m] = cx[n + m] - cy[n + m];
        tpart += 0.5 * (cy[n + m] * cx[m] - cy[m] * cx[n + m]);
      }
      w[2 * n] = tpart;
      acc += f.values[yf] * interpolate_real(k.field, {w, static_cast<std::size_t>(na)});
    }
    out.values[xf] = acc * vol;
  }
  return out;
}

}  // namespace hfrac
