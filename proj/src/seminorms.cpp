#include "hfrac/seminorms.hpp"

#include "fft.hpp"

#include <cmath>
#include <random>

namespace hfrac {

SShiftGrid::SShiftGrid(double smin, double smax, int per_decade_) : s_min(smin), s_max(smax), per_decade(per_decade_) {
  if (!(smin > 0.0) || !(smax > smin)) {
    throw std::invalid_argument("SShiftGrid: need 0 < s_min < s_max");
  }
  if (per_decade < 2) throw std::invalid_argument("SShiftGrid: per_decade must be >= 2");
  const double span = std::log10(smax / smin);
  const int steps = std::max(1, static_cast<int>(std::ceil(span * per_decade)));
  const double dlog = std::log(smax / smin) / steps;
  mags_.resize(steps + 1);
  wts_.resize(steps + 1);
  for (int k = 0; k <= steps; ++k) {
    mags_[k] = smin * std::exp(k * dlog);
    wts_[k] = (k == 0 || k == steps) ? 0.5 * dlog : dlog;
  }
  mags_.back() = smax;
}

SShiftGrid SShiftGrid::for_grid(const GridSpec& spec, int per_decade) {
  const auto& v = spec.vertical();
  return SShiftGrid(v.spacing(), 0.5 * v.length(), per_decade);
}

SShiftGrid SShiftGrid::scaled(double factor) const {
  SShiftGrid g;
  g.s_min = s_min * factor;
  g.s_max = s_max * factor;
  g.per_decade = per_decade;
  g.mags_ = mags_;
  for (auto& m : g.mags_) m *= factor;
  g.wts_ = wts_;  // dlog weights are scale invariant
  return g;
}

double vertical_sobolev_norm(const GridField& f, double p, double alpha) {
  if (!(alpha >= 0.0)) throw std::invalid_argument("vertical_sobolev_norm: alpha must be >= 0");
  if (alpha == 0.0) return lp_norm(f, p);
  return lp_norm(vertical_multiplier(f, VerticalSymbol::one_plus_absT(alpha)), p);
}

namespace {

// || psi(.+s) - psi ||_p for one periodic line, spectral shift.
// `hat` holds the FFT of the line; scratch is reused.
double line_shift_diff_norm(std::span<const Complex> hat, std::span<const Complex> orig,
                            std::vector<Complex>& scratch, double s, double spacing, double L,
                            double p) {
  const int nt = static_cast<int>(hat.size());
  scratch.assign(hat.begin(), hat.end());
  for (int k = 0; k < nt; ++k) {
    const double tau = detail::bin_frequency(k, nt, L);
    Complex phase;
    if (nt % 2 == 0 && k == nt / 2) {
      phase = Complex(std::cos(2.0 * M_PI * tau * s), 0.0);
    } else {
      phase = std::polar(1.0, 2.0 * M_PI * tau * s);
    }
    scratch[k] *= phase;
  }
  detail::fft_inplace(scratch.data(), nt, +1);
  double acc = 0.0;
  if (p == 2.0) {
    for (int j = 0; j < nt; ++j) acc += std::norm(scratch[j] - orig[j]);
  } else if (p == 1.0) {
    for (int j = 0; j < nt; ++j) acc += std::abs(scratch[j] - orig[j]);
  } else {
    for (int j = 0; j < nt; ++j) acc += std::pow(std::abs(scratch[j] - orig[j]), p);
  }
  return std::pow(acc * spacing, 1.0 / p);
}

void check_pq_alpha(double p, double q, double alpha) {
  if (!(p >= 1.0) || !(q >= 1.0)) throw std::invalid_argument("seminorm: need p, q >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("seminorm: alpha must lie in (0,1)");
}

}  // namespace

double besov_line(std::span<const Complex> samples, double spacing, double p, double q,
                  double alpha, const SShiftGrid& sgrid) {
  check_pq_alpha(p, q, alpha);
  const int nt = static_cast<int>(samples.size());
  const double L = nt * spacing;
  std::vector<Complex> hat(samples.begin(), samples.end());
  detail::fft_inplace(hat.data(), nt, -1);
  std::vector<Complex> scratch;
  double acc = 0.0;
  for (std::size_t i = 0; i < sgrid.magnitudes().size(); ++i) {
    const double s = sgrid.magnitudes()[i];
    const double w = sgrid.weights()[i];
    for (double sgn : {1.0, -1.0}) {
      const double d = line_shift_diff_norm(hat, samples, scratch, sgn * s, spacing, L, p);
      acc += std::pow(d / std::pow(s, alpha), q) * w;
    }
  }
  return std::pow(acc, 1.0 / q);
}

double besov_I(const GridField& f, double p, double q, double alpha, const SShiftGrid& sgrid) {
  check_pq_alpha(p, q, alpha);
  if (f.spec.mode != BoundaryMode::Periodic) {
    throw std::invalid_argument("besov_I: requires a periodic grid");
  }
  const double horiz_measure = f.spec.cell_volume() / f.spec.vertical().spacing();
  double acc = 0.0;
  for (std::size_t l = 0; l < f.spec.num_lines(); ++l) {
    const double v = besov_line(f.line(l), f.spec.vertical().spacing(), p, q, alpha, sgrid);
    acc += std::pow(v, p) * horiz_measure;
  }
  return std::pow(acc, 1.0 / p);
}

double vhp_seminorm(const GridField& f, double p, double q, double alpha,
                    const SShiftGrid& sgrid) {
  check_pq_alpha(p, q, alpha);
  if (f.spec.mode != BoundaryMode::Periodic) {
    throw std::invalid_argument("vhp_seminorm: requires a periodic grid");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < sgrid.magnitudes().size(); ++i) {
    const double s = sgrid.magnitudes()[i];
    const double w = sgrid.weights()[i];
    for (double sgn : {1.0, -1.0}) {
      const GridField diff = vertical_shift(f, sgn * s) - f;
      const double G = lp_norm(diff, p);  // inner H^n integral, power 1/p
      acc += std::pow(G / std::pow(s, alpha), q) * w;
    }
  }
  return std::pow(acc, 1.0 / q);
}

MonteCarloEstimate besov_heisenberg(const GridField& f, double p, double alpha,
                                    std::uint64_t budget, std::uint64_t seed) {
  check_pq_alpha(p, p, alpha);
  const auto& spec = f.spec;
  const int n = spec.n;
  const double Q = 2.0 * n + 2.0;

  // shells of Koranyi radius R_max 2^{-j}; stop near the cell scale
  double R_max = 0.0;
  for (int k = 0; k < 2 * n; ++k) R_max = std::max(R_max, spec.axes[k].length() / 2.0);
  R_max = std::max(R_max, 2.0 * std::sqrt(spec.vertical().length() / 2.0));
  double h_min = spec.vertical().spacing();
  for (int k = 0; k < 2 * n; ++k) h_min = std::min(h_min, spec.axes[k].spacing());
  int shells = 1;
  while (R_max * std::pow(2.0, -shells) > 2.0 * h_min && shells < 24) ++shells;

  const std::uint64_t per_shell = budget / static_cast<std::uint64_t>(shells);
  if (per_shell < 64) {
    throw std::invalid_argument("besov_heisenberg: budget too small for the shell count");
  }

  double total = 0.0, var_total = 0.0;
  std::uint64_t used = 0;
  const int na = spec.num_axes();
  for (int j = 0; j < shells; ++j) {
    const double R = R_max * std::pow(2.0, -j);
    const double Rlo = 0.5 * R;
    std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ull * (j + 1));
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    // bounding box of the gauge ball of radius R around the identity
    const double zb = R, tb = 0.25 * R * R;
    double box_w = std::pow(2.0 * zb, 2.0 * n) * (2.0 * tb);
    double box_y = spec.box_volume();

    double sum = 0.0, sum2 = 0.0;
    double ycoords[15], wcoords[15], pcoords[15];
    for (std::uint64_t i = 0; i < per_shell; ++i, ++used) {
      for (int k2 = 0; k2 < na; ++k2) {
        const auto& ax = spec.axes[k2];
        ycoords[k2] = ax.a + u01(rng) * ax.length();
      }
      for (int k2 = 0; k2 < 2 * n; ++k2) wcoords[k2] = (2.0 * u01(rng) - 1.0) * zb;
      wcoords[2 * n] = (2.0 * u01(rng) - 1.0) * tb;
      double z2 = 0.0;
      for (int k2 = 0; k2 < 2 * n; ++k2) z2 += wcoords[k2] * wcoords[k2];
      const double gauge =
          std::pow(z2 * z2 + 16.0 * wcoords[2 * n] * wcoords[2 * n], 0.25);
      double x = 0.0;
      if (gauge > Rlo && gauge <= R) {
        // p = y * w
        double tpart = ycoords[2 * n] + wcoords[2 * n];
        for (int m = 0; m < n; ++m) {
          pcoords[m] = ycoords[m] + wcoords[m];
          pcoords[n + m] = ycoords[n + m] + wcoords[n + m];
          tpart += 0.5 * (ycoords[m] * wcoords[n + m] - ycoords[n + m] * wcoords[m]);
        }
        pcoords[2 * n] = tpart;
        const double fy = interpolate_real(f, {ycoords, static_cast<std::size_t>(na)});
        const double fp = interpolate_real(f, {pcoords, static_cast<std::size_t>(na)});
        x = box_y * box_w * std::pow(std::abs(fp - fy), p) * std::pow(gauge, -Q - alpha * p);
      }
      sum += x;
      sum2 += x * x;
    }
    const double mean = sum / per_shell;
    const double var = std::max(0.0, sum2 / per_shell - mean * mean) / per_shell;
    total += mean;
    var_total += var;
  }

  MonteCarloEstimate out;
  out.samples = used;
  const double se_integral = std::sqrt(var_total);
  if (total <= 0.0) {
    out.value = 0.0;
    out.standard_error = 0.0;
    return out;
  }
  out.value = std::pow(total, 1.0 / p);
  // delta method for the 1/p power
  out.standard_error = se_integral * out.value / (p * total);
  return out;
}

}  // namespace hfrac
