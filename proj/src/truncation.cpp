#include "hfrac/truncation.hpp"

#include "hfrac/quadrature.hpp"

#include "fft.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace hfrac {

std::vector<double> truncation_class_weights(int nt, double h, double alpha, double eps) {
  // For periodic data, f(t + r_m + jL) = f(t + r_m), so each offset residue
  // class m carries the full periodized kernel sum over its real-line images
  // (m + j nt) h. The |r| > eps window is an integer shell test so that
  // boundary images are classified consistently across classes.
  const long J = 128;
  const long m_eps = static_cast<long>(std::floor(eps / h * (1.0 + 1e-12)));
  std::vector<double> K(nt, 0.0);
  for (long m = 1; m < nt; ++m) {
    double acc = 0.0;
    for (long j = -J; j <= J; ++j) {
      const long q = std::labs(m + j * nt);
      if (q > m_eps) acc += std::pow(q * h, -1.0 - alpha);
    }
    // midpoint-integral tail of the image sum beyond |j| = J
    const double far = (J + 0.5) * nt * h;
    acc += (std::pow(far + m * h, -alpha) + std::pow(far - m * h, -alpha)) / (alpha * nt * h);
    K[m] = acc * h;
  }
  return K;
}

GridField truncated_tderiv_grid(const GridField& f, double alpha, double eps) {
  if (f.spec.mode != BoundaryMode::Periodic) {
    throw std::invalid_argument("truncated_tderiv_grid: requires a periodic grid");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("truncated_tderiv_grid: alpha must lie in (0,1)");
  }
  const int nt = f.spec.vertical().count;
  const double h = f.spec.vertical().spacing();
  if (eps < h * (1.0 - 1e-12)) {
    throw std::invalid_argument("truncated_tderiv_grid: eps below the grid spacing");
  }

  const auto K = truncation_class_weights(nt, h, alpha, eps);
  // symbol of sum_m K_m (S^m - I): vanishes identically at frequency zero
  std::vector<double> symbol(nt, 0.0);
  for (int k = 1; k < nt; ++k) {
    double acc = 0.0;
    for (int m = 1; m < nt; ++m) {
      const double s = std::sin(M_PI * k * m / static_cast<double>(nt));
      acc -= K[m] * 2.0 * s * s;  // cos(2 pi k m / nt) - 1
    }
    symbol[k] = acc;
  }

  GridField out = f;
  for (std::size_t l = 0; l < f.spec.num_lines(); ++l) {
    auto line = out.line_mut(l);
    detail::fft_inplace(line.data(), nt, -1);
    for (int k = 0; k < nt; ++k) line[k] *= symbol[k];
    detail::fft_inplace(line.data(), nt, +1);
  }
  return out;
}

namespace {

std::vector<double> side_breakpoints(double eps, double r_max, double t_scale) {
  std::set<double> pts{eps, r_max};
  for (double s = eps; s < r_max; s *= 2.0) pts.insert(s);
  if (t_scale > eps) {
    for (double s = t_scale; s < r_max; s *= 2.0) pts.insert(s);
    // half-scale shell below |t| resolves the approach to the kink
    if (0.5 * t_scale > eps) pts.insert(0.5 * t_scale);
    if (2.0 * t_scale < r_max) pts.insert(2.0 * t_scale);
  }
  std::vector<double> out;
  for (double v : pts) {
    if (v >= eps && v <= r_max) out.push_back(v);
  }
  return out;
}

}  // namespace

PointTruncation truncated_tderiv_point(const CallableField& f, const HeisenbergPoint& p,
                                       double alpha, double eps, double r_max, double abs_tol) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("truncated_tderiv_point: alpha must lie in (0,1)");
  }
  if (!(eps > 0.0) || !(r_max > eps)) {
    throw std::invalid_argument("truncated_tderiv_point: need 0 < eps < r_max");
  }
  const double f0 = f.eval(p);
  auto along = [&](double r) {
    HeisenbergPoint q = p;
    q.t = p.t + r;
    return f.eval(q);
  };
  auto integrand = [&](double r) { return (along(r) - f0) * std::pow(std::abs(r), -1.0 - alpha); };

  const double tsc = std::abs(p.t);
  PointTruncation res;

  // declared kinks of the line profile, mapped to r = s_kink - t
  std::vector<double> kink_r;
  if (f.vertical_kinks) {
    for (double s : f.vertical_kinks(p)) kink_r.push_back(s - p.t);
  }
  kink_r.push_back(-p.t);        // gauge-type profile center
  kink_r.push_back(-2.0 * p.t);  // sign change of the symmetric difference

  // positive side
  {
    std::set<double> mag;
    for (double v : side_breakpoints(eps, r_max, tsc)) mag.insert(v);
    for (double r : kink_r) {
      if (r > eps && r < r_max) mag.insert(r);
    }
    std::vector<double> pts(mag.begin(), mag.end());
    auto r = integrate_panels(integrand, pts, 0.5 * abs_tol);
    res.value += r.value;
    res.error_estimate += r.error_estimate;
  }
  // negative side
  {
    std::set<double> mag;
    for (double v : side_breakpoints(eps, r_max, tsc)) mag.insert(v);
    for (double r : kink_r) {
      if (-r > eps && -r < r_max) mag.insert(-r);
    }
    std::vector<double> pts;
    for (auto it = mag.rbegin(); it != mag.rend(); ++it) pts.push_back(-*it);
    auto r = integrate_panels(integrand, pts, 0.5 * abs_tol);
    res.value += r.value;
    res.error_estimate += r.error_estimate;
  }

  if (std::isfinite(f.sup_norm)) {
    res.tail_bound = 4.0 * f.sup_norm * std::pow(r_max, -alpha) / alpha;
  } else {
    res.tail_bound = std::numeric_limits<double>::quiet_NaN();
  }
  return res;
}

PvPointResult pv_tderiv_point(const CallableField& f, const HeisenbergPoint& p, double alpha,
                              const TruncationSchedule& sched, double r_max, double quad_tol) {
  PvPointResult out;
  double prev = 0.0;
  double eps = sched.eps0;
  for (int k = 0; k <= sched.max_refinements; ++k, eps *= sched.ratio) {
    auto tr = truncated_tderiv_point(f, p, alpha, eps, r_max, quad_tol);
    out.tail_bound = tr.tail_bound;
    PvStep step{eps, tr.value, k == 0 ? 0.0 : std::abs(tr.value - prev)};
    out.history.push_back(step);
    if (k > 0 && step.diff <= sched.cauchy_tol) {
      out.value = tr.value;
      out.converged = true;
      return out;
    }
    prev = tr.value;
  }
  out.value = prev;
  out.converged = false;
  return out;
}

PvGridResult pv_tderiv_grid(const GridField& f, double alpha, const TruncationSchedule& sched,
                            double norm_p) {
  const double h = f.spec.vertical().spacing();
  PvGridResult out;
  double eps = std::max(sched.eps0, h);
  GridField prev;
  bool have_prev = false;
  for (int k = 0; k <= sched.max_refinements; ++k) {
    GridField cur = truncated_tderiv_grid(f, alpha, eps);
    PvStep step{eps, lp_norm(cur, norm_p), 0.0};
    if (have_prev) {
      step.diff = lp_norm(cur - prev, norm_p);
      if (step.diff <= sched.cauchy_tol) {
        out.history.push_back(step);
        out.limit = std::move(cur);
        out.converged = true;
        return out;
      }
    }
    out.history.push_back(step);
    prev = std::move(cur);
    have_prev = true;
    const double next = eps * sched.ratio;
    if (next < h) break;  // lattice floor reached without meeting the tolerance
    eps = next;
  }
  out.limit = std::move(prev);
  out.converged = false;
  return out;
}

Complex duality_pairing(const GridField& f, const GridField& g) {
  if (!f.spec.same_shape(g.spec)) throw std::invalid_argument("duality_pairing: spec mismatch");
  Complex acc(0.0, 0.0);
  for (std::size_t i = 0; i < f.values.size(); ++i) acc += f.values[i] * g.values[i];
  return acc * f.spec.cell_volume();
}

double frac_pv_constant(double alpha, double abs_tol) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("frac_pv_constant: alpha must lie in (0,1)");
  }
  // (1 - cos u) u^{-1-alpha} written as u^{1-alpha} [2 sin^2(u/2) / u^2] so the
  // quadrature can probe arbitrarily close to 0 without hitting 0 * inf.
  auto g = [alpha](double u) {
    const double shape = u < 1e-8 ? 0.5 : 2.0 * std::pow(std::sin(0.5 * u), 2.0) / (u * u);
    return std::pow(u, 1.0 - alpha) * shape;
  };

  // [0, 1]: integrand ~ u^{1-alpha}/2, adaptive handles the weak endpoint.
  double total = integrate_adaptive(g, 0.0, 1.0, 0.1 * abs_tol).value;

  // [1, A] in half-period panels
  const double A = 2.0 * M_PI * 64.0;
  std::vector<double> pts{1.0};
  for (double s = M_PI; s < A; s += M_PI) {
    if (s > 1.0) pts.push_back(s);
  }
  pts.push_back(A);
  total += integrate_panels(g, pts, 0.25 * abs_tol).value;

  // tail: int_A^inf u^{-1-alpha} du - int_A^inf cos(u) u^{-1-alpha} du,
  // the oscillatory part by repeated integration by parts.
  const double s = 1.0 + alpha;
  total += std::pow(A, -alpha) / alpha;
  double coeff = 1.0;
  double sk = s;
  double osc = 0.0;
  for (int k = 0; k < 4; ++k) {
    osc += coeff * (-std::sin(A) * std::pow(A, -sk) + sk * std::cos(A) * std::pow(A, -sk - 1.0));
    coeff *= -sk * (sk + 1.0);
    sk += 2.0;
  }
  total -= osc;

  return 2.0 * total;
}

}  // namespace hfrac
