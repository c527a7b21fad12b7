#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hfrac/test_functions.hpp"
#include "hfrac/truncation.hpp"
#include "hfrac/vertical.hpp"

#include <cmath>
#include <random>

using namespace hfrac;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// closed form for the principal-value constant (test oracle):
// c(alpha) = 2 Gamma(1-alpha) cos(pi alpha / 2) / alpha
double pv_constant_closed_form(double alpha) {
  return 2.0 * std::tgamma(1.0 - alpha) * std::cos(0.5 * M_PI * alpha) / alpha;
}

// independent direct-sum oracle for the grid truncation: real-space sum over
// offset residue classes with independently accumulated periodized weights
GridField truncated_grid_direct(const GridField& f, double alpha, double eps) {
  const int nt = f.spec.vertical().count;
  const double h = f.spec.vertical().spacing();
  const long J = 128;
  const long m_eps = static_cast<long>(std::floor(eps / h * (1.0 + 1e-12)));
  std::vector<double> K(nt, 0.0);
  for (long m = 1; m < nt; ++m) {
    double acc = 0.0;
    for (long j = -J; j <= J; ++j) {
      const long q = std::labs(m + j * nt);
      if (q > m_eps) acc += std::pow(q * h, -1.0 - alpha);
    }
    const double far = (J + 0.5) * nt * h;
    acc += (std::pow(far + m * h, -alpha) + std::pow(far - m * h, -alpha)) / (alpha * nt * h);
    K[m] = acc * h;
  }
  GridField out(f.spec);
  for (std::size_t l = 0; l < f.spec.num_lines(); ++l) {
    auto src = f.line(l);
    auto dst = out.line_mut(l);
    for (int j = 0; j < nt; ++j) {
      Complex acc(0.0, 0.0);
      for (int m = 1; m < nt; ++m) {
        acc += (src[(j + m) % nt] - src[j]) * K[m];
      }
      dst[j] = acc;
    }
  }
  return out;
}

// closed-form truncated cosine integral
// I(alpha, tau0, eps, rmax) = int_{eps<|r|<rmax} (cos(2 pi tau0 r) - 1) |r|^{-1-alpha} dr,
// assembled from the Gamma-function value of the full line integral, a power
// series for the |r| < eps window and an integration-by-parts tail.
double truncated_cos_integral(double alpha, double tau0, double eps, double rmax) {
  const double b = 2.0 * M_PI * tau0;
  const double full = -pv_constant_closed_form(alpha) * std::pow(b, alpha);
  // window: 2 sum_k (-1)^k b^{2k} eps^{2k-alpha} / ((2k)! (2k-alpha))
  double window = 0.0, fact = 1.0;
  for (int k = 1; k <= 10; ++k) {
    fact *= (2.0 * k - 1.0) * (2.0 * k);
    const double sgn = (k % 2 == 1) ? -1.0 : 1.0;
    window += sgn * std::pow(b, 2.0 * k) * std::pow(eps, 2.0 * k - alpha) /
              (fact * (2.0 * k - alpha));
  }
  window *= 2.0;
  // tail: 2 [ int_rmax^inf cos(br) r^{-1-alpha} dr - rmax^{-alpha}/alpha ];
  // the oscillatory part by parts in u = b r
  const double A = b * rmax;
  const double s = 1.0 + alpha;
  double osc = 0.0, coeff = 1.0, sk = s;
  for (int k = 0; k < 4; ++k) {
    osc += coeff * (-std::sin(A) * std::pow(A, -sk) + sk * std::cos(A) * std::pow(A, -sk - 1.0));
    coeff *= -sk * (sk + 1.0);
    sk += 2.0;
  }
  const double tail = 2.0 * (std::pow(b, alpha) * osc - std::pow(rmax, -alpha) / alpha);
  return full - window - tail;
}

}  // namespace

TEST_CASE("multiplier eigenfunctions are exact at grid frequencies") {
  GridSpec spec = GridSpec::box(1, 2.0, 6.0, 6, 128);
  const double tau0 = 3.0 / 12.0;  // grid frequency k=3
  auto f = sample(
      [&](const HeisenbergPoint& p) {
        return std::exp(-p.x(0) * p.x(0) - p.y(0) * p.y(0)) * std::cos(2.0 * M_PI * tau0 * p.t);
      },
      spec);

  for (double alpha : {0.25, 0.5, 1.0}) {
    auto g = vertical_multiplier(f, VerticalSymbol::abs_power(Complex(alpha, 0.0)));
    const double factor = std::pow(2.0 * M_PI * tau0, alpha);
    CHECK(lp_norm(g - factor * f, 2.0) <= 1e-10 * lp_norm(f, 2.0) * factor);
  }

  // Hilbert: cos -> i sin
  auto h = vertical_multiplier(f, VerticalSymbol::hilbert());
  auto s = sample(
      [&](const HeisenbergPoint& p) {
        return std::exp(-p.x(0) * p.x(0) - p.y(0) * p.y(0)) * std::sin(2.0 * M_PI * tau0 * p.t);
      },
      spec);
  CHECK(lp_norm(h - Complex(0.0, 1.0) * s, 2.0) <= 1e-10 * lp_norm(f, 2.0));

  // bessel fixes constants
  GridField c(spec, Complex(2.5, 0.0));
  auto bc = vertical_multiplier(c, VerticalSymbol::bessel(0.7));
  CHECK(lp_norm(bc - c, kInf) <= 1e-12);

  // zero-extended grids are rejected
  GridSpec zspec = GridSpec::box(1, 2.0, 6.0, 4, 16, BoundaryMode::ZeroExtended);
  GridField zf(zspec, Complex(1.0, 0.0));
  CHECK_THROWS_AS(vertical_multiplier(zf, VerticalSymbol::hilbert()), std::invalid_argument);
}

TEST_CASE("Hilbert involution on mean-zero data") {
  GridSpec spec = GridSpec::box(1, 2.0, 6.0, 4, 128);
  auto f = sample([](const HeisenbergPoint& p) { return std::sin(2.0 * M_PI * p.t / 12.0); }, spec);
  CHECK(hilbert_involution_check(f) <= 1e-12);

  // random mean-zero trigonometric polynomial
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double a[5], b[5];
  for (int k = 0; k < 5; ++k) {
    a[k] = u(rng);
    b[k] = u(rng);
  }
  auto g = sample(
      [&](const HeisenbergPoint& p) {
        double acc = 0.0;
        for (int k = 1; k <= 5; ++k) {
          acc += a[k - 1] * std::cos(2.0 * M_PI * k * p.t / 12.0) +
                 b[k - 1] * std::sin(2.0 * M_PI * k * p.t / 12.0);
        }
        return acc * std::exp(-p.x(0) * p.x(0) - p.y(0) * p.y(0));
      },
      spec);
  CHECK(hilbert_involution_check(g) <= 1e-10);

  GridField c(spec, Complex(1.0, 0.0));
  CHECK_THROWS_AS(hilbert_involution_check(c), std::invalid_argument);
}

TEST_CASE("multiplier semigroup and inverse pairs") {
  GridSpec spec = GridSpec::box(1, 2.0, 6.0, 4, 128);
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double a[4], b[4];
  for (int k = 0; k < 4; ++k) {
    a[k] = u(rng);
    b[k] = u(rng);
  }
  auto f = sample(
      [&](const HeisenbergPoint& p) {
        double acc = 0.0;
        for (int k = 1; k <= 4; ++k) {
          acc += a[k - 1] * std::cos(2.0 * M_PI * k * p.t / 12.0) +
                 b[k - 1] * std::sin(2.0 * M_PI * k * p.t / 12.0);
        }
        return acc;
      },
      spec);

  // abs_power semigroup on mean-zero band-limited data
  auto lhs = vertical_multiplier(vertical_multiplier(f, VerticalSymbol::abs_power(Complex(0.3, 0))),
                                 VerticalSymbol::abs_power(Complex(0.45, 0)));
  auto rhs = vertical_multiplier(f, VerticalSymbol::abs_power(Complex(0.75, 0)));
  CHECK(lp_norm(lhs - rhs, 2.0) <= 1e-10 * lp_norm(rhs, 2.0));

  // bessel and one_plus_absT are exact inverses
  for (double beta : {0.5, 1.0, 1.7}) {
    auto roundtrip = vertical_multiplier(vertical_multiplier(f, VerticalSymbol::bessel(beta)),
                                         VerticalSymbol::one_plus_absT(beta));
    CHECK(lp_norm(roundtrip - f, 2.0) <= 1e-10 * lp_norm(f, 2.0));
  }

  // bessel contraction in L^1, L^2, L^inf
  auto g = sample(
      [](const HeisenbergPoint& p) {
        return std::exp(-p.x(0) * p.x(0) - p.y(0) * p.y(0) - 0.5 * p.t * p.t);
      },
      spec);
  auto bg = vertical_multiplier(g, VerticalSymbol::bessel(0.8));
  for (double p : {1.0, 2.0, kInf}) {
    CHECK(lp_norm(bg, p) <= lp_norm(g, p) * (1.0 + 1e-10));
  }
}

TEST_CASE("complex abs_power exponent") {
  GridSpec spec = GridSpec::box(1, 2.0, 6.0, 4, 64);
  const double tau0 = 2.0 / 12.0;
  auto f = sample([&](const HeisenbergPoint& p) { return std::cos(2.0 * M_PI * tau0 * p.t); }, spec);
  const Complex alpha(0.5, 0.3);
  auto g = vertical_multiplier(f, VerticalSymbol::abs_power(alpha));
  const Complex factor = std::exp(alpha * std::log(2.0 * M_PI * tau0));
  CHECK(lp_norm(g - factor * f, 2.0) <= 1e-10 * lp_norm(f, 2.0) * std::abs(factor));
}

TEST_CASE("grid truncation: FFT path equals the direct sum") {
  GridSpec spec = GridSpec::box(1, 2.0, 4.0, 4, 48);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  GridField f(spec);
  for (auto& v : f.values) v = Complex(u(rng), 0.0);
  const double h = spec.vertical().spacing();
  for (double alpha : {0.25, 0.5, 0.75}) {
    for (double eps : {h, 4.0 * h, 1.0}) {
      auto a = truncated_tderiv_grid(f, alpha, eps);
      auto b = truncated_grid_direct(f, alpha, eps);
      CHECK(lp_norm(a - b, kInf) <= 1e-10 * std::max(1.0, lp_norm(b, kInf)));
    }
  }
  CHECK_THROWS_AS(truncated_tderiv_grid(f, 0.5, 0.5 * h), std::invalid_argument);
}

TEST_CASE("grid truncation basics") {
  GridSpec spec = GridSpec::box(1, 2.0, 6.0, 4, 256);
  GridField c(spec, Complex(3.0, 0.0));
  // differences of a constant vanish identically in the real-space sum; the
  // spectral path reproduces that to roundoff
  auto tc_direct = truncated_grid_direct(c, 0.5, spec.vertical().spacing());
  CHECK(lp_norm(tc_direct, kInf) == 0.0);
  auto tc = truncated_tderiv_grid(c, 0.5, spec.vertical().spacing());
  CHECK(lp_norm(tc, kInf) <= 1e-13);

  // odd-in-t field at t = 0: integrand odd, value 0 (odd vertical count puts
  // a cell center at t = 0)
  GridSpec ospec = GridSpec::box(1, 2.0, 6.0, 4, 129);
  auto odd = sample([](const HeisenbergPoint& p) { return std::sin(2.0 * M_PI * p.t / 12.0); },
                    ospec);
  auto todd = truncated_tderiv_grid(odd, 0.5, 3.0 * ospec.vertical().spacing());
  const int zero_index = 64;  // center cell of 129
  for (std::size_t l = 0; l < ospec.num_lines(); ++l) {
    CHECK(std::abs(todd.line(l)[zero_index]) <= 1e-12);
  }
}

TEST_CASE("grid truncation converges to -c(alpha) |T|^alpha on cosines") {
  GridSpec spec = GridSpec::box(1, 2.0, 6.0, 4, 512);
  const double tau0 = 1.0 / 12.0;
  auto f = sample([&](const HeisenbergPoint& p) { return std::cos(2.0 * M_PI * tau0 * p.t); }, spec);
  const double alpha = 0.5;
  const double h = spec.vertical().spacing();
  auto t_eps = truncated_tderiv_grid(f, alpha, h);
  const double c_alpha = frac_pv_constant(alpha);
  CHECK(c_alpha == doctest::Approx(5.0133).epsilon(2e-4));
  auto spectral = vertical_multiplier(f, VerticalSymbol::abs_power(Complex(alpha, 0.0)));
  auto expect = Complex(-c_alpha, 0.0) * spectral;
  CHECK(lp_norm(t_eps - expect, 2.0) / lp_norm(expect, 2.0) <= 2e-2);
}

TEST_CASE("pv constant: quadrature vs closed form") {
  for (double alpha : {0.25, 0.5, 0.75}) {
    const double c = frac_pv_constant(alpha);
    CHECK(c > 0.0);
    CHECK(std::abs(c - pv_constant_closed_form(alpha)) <= 1e-8 * pv_constant_closed_form(alpha));
  }
  // cross-check against 2 sqrt(2 pi) at alpha = 1/2
  CHECK(frac_pv_constant(0.5) ==
        doctest::Approx(2.0 * std::sqrt(2.0 * M_PI)).epsilon(1e-10));
  // two quadrature tolerances agree
  CHECK(std::abs(frac_pv_constant(0.33, 1e-10) - frac_pv_constant(0.33, 1e-8)) <= 1e-8);
}

TEST_CASE("point truncation: constants and the capped-gauge closed form") {
  CallableField c{[](const HeisenbergPoint&) { return 7.0; }};
  c.sup_norm = 7.0;
  auto r0 = truncated_tderiv_point(c, HeisenbergPoint(0, 0, 0), 0.5, 1e-3, 10.0);
  CHECK(std::abs(r0.value) <= 1e-12);

  // f = min(||x||, 3) on the vertical line through 0: f(0, r) = min(2 sqrt|r|, 3);
  // closed form of the eps-truncation: 4 ln(9/(4 eps)) + 8 - 12/sqrt(r_max)
  auto f = build_callable(TestFunctionSpec::lipschitz_cap(3.0), 1);
  const double r_max = 100.0;
  for (double eps : {0.5, 0.125, 1e-3}) {
    auto r = truncated_tderiv_point(f, HeisenbergPoint::identity(1), 0.5, eps, r_max);
    const double oracle = 4.0 * std::log(9.0 / (4.0 * eps)) + 8.0 - 12.0 / std::sqrt(r_max);
    CHECK(r.value == doctest::Approx(oracle).epsilon(1e-7));
    CHECK(r.tail_bound == doctest::Approx(4.0 * 3.0 * std::pow(r_max, -0.5) / 0.5));
  }
}

TEST_CASE("point truncation matches the closed-form cosine oracle") {
  // vertical wave: f(z,t) = exp(-|z|^2) cos(2 pi tau0 t); along a line the
  // truncation equals w(z) cos(2 pi tau0 t) I(alpha, tau0, eps, rmax)
  const double tau0 = 0.5;
  auto f = build_callable(TestFunctionSpec::vertical_wave(1.0, tau0), 1);
  const HeisenbergPoint p(0.4, -0.2, 0.37);
  const double w = std::exp(-(p.x(0) * p.x(0) + p.y(0) * p.y(0)));
  const double rmax = 50.0;
  for (double alpha : {0.25, 0.5, 0.75}) {
    for (double eps : {0.25, 0.03125}) {
      auto r = truncated_tderiv_point(f, p, alpha, eps, rmax);
      const double oracle =
          w * std::cos(2.0 * M_PI * tau0 * p.t) * truncated_cos_integral(alpha, tau0, eps, rmax);
      CHECK(r.value == doctest::Approx(oracle).epsilon(1e-6));
    }
  }
}

TEST_CASE("pv at the origin of the capped gauge diverges logarithmically") {
  auto f = build_callable(TestFunctionSpec::lipschitz_cap(3.0), 1);
  TruncationSchedule sched;
  sched.eps0 = 0.5;
  sched.cauchy_tol = 1e-4;
  sched.max_refinements = 12;
  auto pv = pv_tderiv_point(f, HeisenbergPoint::identity(1), 0.5, sched, 100.0, 1e-8);
  CHECK(!pv.converged);
  // increments approach 4 ln 2 per halving
  const auto& h = pv.history;
  REQUIRE(h.size() >= 4);
  for (std::size_t i = 2; i < h.size(); ++i) {
    CHECK(h[i].diff == doctest::Approx(4.0 * std::log(2.0)).epsilon(1e-6));
    CHECK(h[i].value > h[i - 1].value);  // monotone growth
  }
}

TEST_CASE("pv on smooth data converges; grid limits match the spectral route") {
  // pointwise convergence on a smooth compactly supported line profile
  auto f = build_callable(TestFunctionSpec::bump_wave(0.5, 2.0, 2.0), 1);
  TruncationSchedule sched;
  sched.eps0 = 0.25;
  sched.cauchy_tol = 1e-5;
  auto pv = pv_tderiv_point(f, HeisenbergPoint(0.0, 0.0, 0.3), 0.5, sched, 50.0, 1e-9);
  CHECK(pv.converged);

  // grid route: the pv limit agrees with -c(alpha) |T|^alpha at 2% in L^2
  GridSpec spec = GridSpec::box(1, 2.0, 6.0, 4, 512);
  auto fg = sample(f, spec);
  TruncationSchedule gsched;
  gsched.eps0 = 1.0;
  gsched.cauchy_tol = 0.2;
  for (double alpha : {0.5}) {
    auto r = pv_tderiv_grid(fg, alpha, gsched, 2.0);
    CHECK(r.converged);
    const double c_a = frac_pv_constant(alpha);
    auto spectral = vertical_multiplier(fg, VerticalSymbol::abs_power(Complex(alpha, 0.0)));
    auto expect = Complex(-c_a, 0.0) * spectral;
    CHECK(lp_norm(r.limit - expect, 2.0) / lp_norm(expect, 2.0) <= 2e-2);
  }

  // zero field converges to zero instantly
  CallableField zero{[](const HeisenbergPoint&) { return 0.0; }};
  zero.sup_norm = 0.0;
  auto pz = pv_tderiv_point(zero, HeisenbergPoint::identity(1), 0.5, sched, 50.0);
  CHECK(pz.converged);
  CHECK(pz.value == 0.0);
}

TEST_CASE("pv on grids: Cauchy rate on smooth bumps") {
  GridSpec spec = GridSpec::box(1, 2.0, 6.0, 4, 512);
  auto f = sample(build_callable(TestFunctionSpec::bump_wave(0.5, 2.0, 2.0), 1), spec);
  TruncationSchedule sched;
  sched.eps0 = 1.5;
  sched.cauchy_tol = 1e-9;  // force the full ladder
  sched.max_refinements = 6;
  for (double alpha : {0.25, 0.5, 0.75}) {
    auto pv = pv_tderiv_grid(f, alpha, sched, kInf);
    REQUIRE(pv.history.size() >= 4);
    // fit the Cauchy rate ||T^{a,e} - T^{a,e/2}|| ~ e^{1-alpha}
    std::vector<double> xs, ys;
    for (std::size_t i = 1; i < pv.history.size(); ++i) {
      xs.push_back(std::log(pv.history[i].eps));
      ys.push_back(std::log(pv.history[i].diff));
    }
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      mx += xs[i];
      my += ys[i];
    }
    mx /= xs.size();
    my /= ys.size();
    double num = 0, den = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      num += (xs[i] - mx) * (ys[i] - my);
      den += (xs[i] - mx) * (xs[i] - mx);
    }
    const double rate = num / den;
    CHECK(rate >= 0.9 * (1.0 - alpha));
  }

  GridField z(spec);
  auto pz = pv_tderiv_grid(z, 0.5, sched, 2.0);
  for (const auto& step : pz.history) CHECK(step.value == 0.0);
}

TEST_CASE("Example 6.1 lower bound at extreme heights") {
  auto f = build_callable(TestFunctionSpec::lipschitz_cap(3.0), 1);
  TruncationSchedule sched;
  sched.eps0 = 1e-13;
  sched.cauchy_tol = 1e-3;
  sched.max_refinements = 40;
  const double t = 1e-12;
  auto pv = pv_tderiv_point(f, HeisenbergPoint(0.0, 0.0, t), 0.5, sched, 25.0, 1e-6);
  CHECK(pv.converged);
  const double bound = 0.5 * std::log((t + 1.0) / (4.0 * t)) - 10.0;
  CHECK(bound == doctest::Approx(3.1223).epsilon(1e-3));
  CHECK(std::abs(pv.value) >= bound);
}

TEST_CASE("duality pairing") {
  GridSpec spec = GridSpec::box(1, 2.0, 2.0, 6, 32);
  GridField z(spec);
  GridField ones(spec, Complex(1.0, 0.0));
  CHECK(std::abs(duality_pairing(ones, z)) == 0.0);
  CHECK(duality_pairing(ones, ones).real() == doctest::Approx(spec.box_volume()).epsilon(1e-12));

  // symmetry of the truncated kernel under the pairing
  auto f = sample(build_callable(TestFunctionSpec::bump_wave(0.5, 1.5, 0.8), 1), spec);
  auto g = sample(
      [](const HeisenbergPoint& p) {
        HeisenbergPoint q = p;
        q.t = p.t - 0.7;
        const double r2 = q.x(0) * q.x(0) + q.y(0) * q.y(0) + q.t * q.t;
        return r2 < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - r2)) : 0.0;
      },
      spec);
  for (double alpha : {0.25, 0.5, 0.75}) {
    auto tf = truncated_tderiv_grid(f, alpha, 2.0 * spec.vertical().spacing());
    auto tg = truncated_tderiv_grid(g, alpha, 2.0 * spec.vertical().spacing());
    const double defect = std::abs(duality_pairing(tf, g) - duality_pairing(f, tg));
    CHECK(defect <= 1e-8 * lp_norm(f, 2.0) * lp_norm(g, 2.0));
  }
}
