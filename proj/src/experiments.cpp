#include "hfrac/experiments.hpp"

#include "hfrac/bmo.hpp"
#include "hfrac/field_io.hpp"
#include "hfrac/kernels.hpp"
#include "hfrac/lambda_ops.hpp"
#include "hfrac/seminorms.hpp"
#include "hfrac/test_functions.hpp"
#include "hfrac/truncation.hpp"

#include "fft.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdarg>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

namespace hfrac {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double linear_fit_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= xs.size();
  my /= ys.size();
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    num += (xs[i] - mx) * (ys[i] - my);
    den += (xs[i] - mx) * (xs[i] - mx);
  }
  return num / den;
}

std::string param_str(const char* fmt, ...) {
  char buf[192];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof(buf), fmt, args);
  va_end(args);
  return buf;
}

// per-line, per-shift table of the line integrals int |f(z, t+s) - f(z, t)|^p dt,
// shared by the vhp and Besov assemblies so the inequality tests compare
// structurally identical quadratures
struct ShiftDiffTable {
  std::vector<double> vals;  // [line * (2 S) + shift_index], +s first then -s
  std::size_t lines = 0;
  std::size_t S = 0;

  ShiftDiffTable(const GridField& f, double p, const SShiftGrid& sgrid) {
    const int nt = f.spec.vertical().count;
    const double h = f.spec.vertical().spacing();
    const double L = nt * h;
    lines = f.spec.num_lines();
    S = sgrid.magnitudes().size();
    vals.assign(lines * 2 * S, 0.0);
    std::vector<Complex> hat(nt), scratch(nt);
    for (std::size_t l = 0; l < lines; ++l) {
      auto src = f.line(l);
      std::copy(src.begin(), src.end(), hat.begin());
      detail::fft_inplace(hat.data(), nt, -1);
      for (std::size_t si = 0; si < S; ++si) {
        for (int sign = 0; sign < 2; ++sign) {
          const double s = (sign == 0 ? 1.0 : -1.0) * sgrid.magnitudes()[si];
          std::copy(hat.begin(), hat.end(), scratch.begin());
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
            for (int j = 0; j < nt; ++j) acc += std::norm(scratch[j] - src[j]);
          } else if (p == 1.0) {
            for (int j = 0; j < nt; ++j) acc += std::abs(scratch[j] - src[j]);
          } else {
            for (int j = 0; j < nt; ++j) acc += std::pow(std::abs(scratch[j] - src[j]), p);
          }
          vals[(l * 2 + sign) * S + si] = acc * h;
        }
      }
    }
  }

  double at(std::size_t line, int sign, std::size_t si) const {
    return vals[(line * 2 + sign) * S + si];
  }
};

double vhp_from_table(const ShiftDiffTable& tbl, const GridField& f, double p, double q,
                      double alpha, const SShiftGrid& sgrid) {
  const double dz = f.spec.cell_volume() / f.spec.vertical().spacing();
  double acc = 0.0;
  for (std::size_t si = 0; si < tbl.S; ++si) {
    const double s = sgrid.magnitudes()[si];
    const double w = sgrid.weights()[si];
    for (int sign = 0; sign < 2; ++sign) {
      double inner = 0.0;
      for (std::size_t l = 0; l < tbl.lines; ++l) inner += tbl.at(l, sign, si) * dz;
      acc += std::pow(std::pow(inner, 1.0 / p) / std::pow(s, alpha), q) * w;
    }
  }
  return std::pow(acc, 1.0 / q);
}

double besov_I_from_table(const ShiftDiffTable& tbl, const GridField& f, double p, double q,
                          double alpha, const SShiftGrid& sgrid) {
  const double dz = f.spec.cell_volume() / f.spec.vertical().spacing();
  double acc = 0.0;
  for (std::size_t l = 0; l < tbl.lines; ++l) {
    double line_acc = 0.0;
    for (std::size_t si = 0; si < tbl.S; ++si) {
      const double s = sgrid.magnitudes()[si];
      const double w = sgrid.weights()[si];
      for (int sign = 0; sign < 2; ++sign) {
        line_acc += std::pow(std::pow(tbl.at(l, sign, si), 1.0 / p) / std::pow(s, alpha), q) * w;
      }
    }
    acc += std::pow(line_acc, p / q) * dz;
  }
  return std::pow(acc, 1.0 / p);
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

GridField sample_dilated(const CallableField& f, double r, const GridSpec& spec) {
  CallableField fr = f;
  fr.eval = [r, inner = f.eval](const HeisenbergPoint& p) { return inner(dilate(r, p)); };
  return sample(fr, spec);
}

}  // namespace

// ---------------------------------------------------------------- E1

ExperimentReport exp_embedding(const Config& cfg) {
  Timer timer;
  ExperimentReport rep;
  rep.id = "E1";

  const int nz = cfg.get_int("e1.nz", 16);
  const int nt = cfg.get_int("e1.nt", 64);
  const double Lz = cfg.get_double("e1.Lz", 6.0);
  const double Lt = cfg.get_double("e1.Lt", 6.0);
  const auto p_list = cfg.get_list("e1.p_list", {1.5, 2.0, 3.0});
  const auto alpha_list = cfg.get_list("e1.alpha_list", {0.25, 0.5, 0.75});
  const double drift_tol = cfg.get_double("e1.drift_tol", 0.20);
  const std::string baseline_path = cfg.get_string("e1.baseline", "");
  const double baseline_factor = cfg.get_double("e1.baseline_factor", 1.5);

  SubLaplacianOptions opts;
  opts.max_unknowns = cfg.get_u64("e1.max_unknowns", 140000);
  opts.lanczos_max_iters = cfg.get_int("e1.lanczos_iters", 220);
  opts.lanczos_tol = cfg.get_double("e1.lanczos_tol", 1e-6);

  nlohmann::json baseline;
  if (!baseline_path.empty()) {
    std::ifstream is(baseline_path);
    if (is) is >> baseline;
  }

  const GridSpec g1 = GridSpec::box(1, Lz, Lt, nz, nt);
  const GridSpec g2 = GridSpec::box(1, Lz, Lt, 2 * nz, 2 * nt);
  SubLaplacianOperator L1(g1, opts), L2(g2, opts);

  // zero field: both norms vanish, no ratio is formed
  {
    GridField z(g1);
    rep.info("zero_field", "vertical_norm", vertical_sobolev_norm(z, 2.0, 0.5));
    rep.info("zero_field", "horizontal_norm", horizontal_sobolev_norm(L1, z, 2.0, 1.0));
  }

  for (const auto& tf : standard_family()) {
    const auto callable = build_callable(tf, 1);
    double max_ratio[2] = {0.0, 0.0};
    int which = 0;
    for (const auto* Lp : {&L1, &L2}) {
      const auto& L = *Lp;
      auto f = sample(callable, L.grid());
      SpectralApplicator app(L, f);
      for (double alpha : alpha_list) {
        auto frac = app.apply(power_spectral(alpha));  // (-Delta)^{(2 alpha)/2}
        for (double p : p_list) {
          const double vertical = vertical_sobolev_norm(f, p, alpha);
          const double horizontal = lp_norm(f, p) + lp_norm(frac, p);
          const double ratio = vertical / horizontal;
          rep.check_finite(tf.name(), "ratio", ratio,
                           param_str("grid=%d p=%g alpha=%g", which, p, alpha));
          max_ratio[which] = std::max(max_ratio[which], ratio);
        }
      }
      ++which;
    }
    const double drift = std::abs(max_ratio[1] - max_ratio[0]) / max_ratio[0];
    rep.check_le(tf.name(), "refinement_drift", drift, drift_tol,
                 param_str("base=%.6g refined=%.6g", max_ratio[0], max_ratio[1]));
    if (baseline.contains(tf.name())) {
      rep.check_le(tf.name(), "ratio_vs_baseline", max_ratio[0],
                   baseline_factor * baseline[tf.name()].get<double>(), "");
    } else {
      rep.info(tf.name(), "max_ratio_base_grid", max_ratio[0]);
    }
  }

  // dilation sweep of a fixed bump on the base grid
  {
    const auto bump = TestFunctionSpec::bump_wave(1.0, 1.5, 1.0);
    const auto callable = build_callable(bump, 1);
    double base_ratio = 0.0;
    if (baseline.contains(bump.name())) base_ratio = baseline[bump.name()].get<double>();
    for (double r : {0.5, 1.0, 2.0}) {
      auto f = sample_dilated(callable, r, g1);
      SpectralApplicator app(L1, f);
      double worst = 0.0;
      for (double alpha : alpha_list) {
        auto frac = app.apply(power_spectral(alpha));
        for (double p : p_list) {
          const double ratio =
              vertical_sobolev_norm(f, p, alpha) / (lp_norm(f, p) + lp_norm(frac, p));
          worst = std::max(worst, ratio);
        }
      }
      if (base_ratio > 0.0) {
        rep.check_le("dilation_sweep", "ratio", worst, baseline_factor * base_ratio,
                     param_str("r=%g", r));
      } else {
        rep.info("dilation_sweep", "ratio", worst, param_str("r=%g", r));
      }
    }
  }

  rep.wall_seconds = timer.seconds();
  return rep;
}

// ---------------------------------------------------------------- E2

ExperimentReport exp_vhp(const Config& cfg) {
  Timer timer;
  ExperimentReport rep;
  rep.id = "E2";

  const int nz = cfg.get_int("e2.nz", 16);
  const int nt = cfg.get_int("e2.nt", 64);
  const double Lz = cfg.get_double("e2.Lz", 6.0);
  const double Lt = cfg.get_double("e2.Lt", 6.0);
  const auto p_list = cfg.get_list("e2.p_list", {1.5, 2.0});
  const auto q_list = cfg.get_list("e2.q_list", {2.0, 4.0});
  const auto alpha_list = cfg.get_list("e2.alpha_list", {0.25, 0.5, 0.75});
  const double drift_tol = cfg.get_double("e2.drift_tol", 0.20);

  SubLaplacianOptions opts;
  opts.max_unknowns = cfg.get_u64("e2.max_unknowns", 140000);
  opts.lanczos_max_iters = cfg.get_int("e2.lanczos_iters", 220);
  opts.lanczos_tol = cfg.get_double("e2.lanczos_tol", 1e-6);

  const GridSpec g1 = GridSpec::box(1, Lz, Lt, nz, nt);
  const GridSpec g2 = GridSpec::box(1, Lz, Lt, nz * 3 / 2, nt * 3 / 2);
  SubLaplacianOperator L1(g1, opts), L2(g2, opts);

  std::vector<TestFunctionSpec> family = {TestFunctionSpec::gaussian(0.5, 0.5),
                                          TestFunctionSpec::gaussian(1.0, 1.0),
                                          TestFunctionSpec::gaussian(0.5, 1.5),
                                          TestFunctionSpec::bump_wave(1.0, 2.0, 1.5)};

  // zero field: everything vanishes
  {
    GridField z(g1);
    SShiftGrid sg = SShiftGrid::for_grid(g1);
    rep.info("zero_field", "vhp", vhp_seminorm(z, 2.0, 2.0, 0.5, sg));
  }

  for (const auto& tf : family) {
    const auto callable = build_callable(tf, 1);
    double worst_drift = 0.0;
    std::map<std::string, double> ratio_base;
    int which = 0;
    for (const auto* Lp : {&L1, &L2}) {
      const auto& L = *Lp;
      auto f = sample(callable, L.grid());
      SShiftGrid sgrid = SShiftGrid::for_grid(L.grid());
      SpectralApplicator app(L, f);
      for (double alpha : alpha_list) {
        auto frac = app.apply(power_spectral(alpha));
        const double homog = lp_norm(frac, 2.0);
        for (double p : p_list) {
          ShiftDiffTable tbl(f, p, sgrid);
          const double vertical = vertical_sobolev_norm(f, p, alpha);
          const double horizontal = lp_norm(f, p) + lp_norm(frac, p);
          for (double q : q_list) {
            if (q < p || q < 2.0) continue;
            const double vhp = vhp_from_table(tbl, f, p, q, alpha, sgrid);
            const double r1 = vhp / vertical;
            const double r2 = vhp / horizontal;
            rep.check_finite(tf.name(), "vhp_over_vertical", r1,
                             param_str("grid=%d p=%g q=%g alpha=%g", which, p, q, alpha));
            rep.check_finite(tf.name(), "vhp_over_horizontal", r2,
                             param_str("grid=%d p=%g q=%g alpha=%g", which, p, q, alpha));
            if (p == 2.0) {
              rep.check_finite(tf.name(), "vhp_over_homogeneous", vhp / homog,
                               param_str("grid=%d q=%g alpha=%g", which, q, alpha));
            }
            const std::string key = param_str("p=%g q=%g alpha=%g", p, q, alpha);
            if (which == 0) {
              ratio_base[key] = r1;
            } else {
              worst_drift = std::max(worst_drift, std::abs(r1 - ratio_base[key]) /
                                                      std::max(1e-30, ratio_base[key]));
            }
          }
        }
      }
      ++which;
    }
    rep.check_le(tf.name(), "refinement_drift", worst_drift, drift_tol, "");
  }

  // dilation invariance of the homogeneous ratio: both sides scale by
  // r^{2 alpha - Q/p}, so the ratio on exactly mapped grids is invariant
  {
    const auto callable = build_callable(TestFunctionSpec::gaussian(1.0, 1.0), 1);
    const double p = 2.0, q = 2.0, alpha = 0.5;
    auto ratio_at = [&](double r) {
      GridSpec spec = GridSpec::box(1, r * Lz, r * r * Lt, nz, nt);
      SubLaplacianOperator L(spec, opts);
      auto f = sample(callable, spec);
      SShiftGrid sgrid = SShiftGrid::for_grid(spec);
      ShiftDiffTable tbl(f, p, sgrid);
      const double vhp = vhp_from_table(tbl, f, p, q, alpha, sgrid);
      const double homog = lp_norm(operator_function(L, power_spectral(alpha), f), p);
      return vhp / homog;
    };
    const double r1 = ratio_at(1.0);
    // dilations mild enough that the mapped gaussian stays box-supported at
    // r < 1 and lattice-resolved at r > 1
    for (double r : {0.8, 1.25}) {
      const double rr = ratio_at(r);
      rep.check_le("homogeneous_dilation", "ratio_change", std::abs(rr - r1) / r1, 0.05,
                   param_str("r=%g ratio=%.6g vs %.6g", r, rr, r1));
    }
  }

  rep.wall_seconds = timer.seconds();
  return rep;
}

// ---------------------------------------------------------------- E3

ExperimentReport exp_minkowski(const Config& cfg) {
  Timer timer;
  ExperimentReport rep;
  rep.id = "E3";

  const int nz = cfg.get_int("e3.nz", 12);
  const int nt = cfg.get_int("e3.nt", 96);
  const GridSpec spec = GridSpec::box(1, 6.0, 6.0, nz, nt);
  const SShiftGrid sgrid = SShiftGrid::for_grid(spec);
  const std::vector<double> ps = {1.0, 1.5, 2.0, 3.0, 4.0};
  const std::vector<double> qs = {1.0, 2.0, 3.0, 4.0};
  const std::vector<double> alphas = {0.25, 0.5, 0.75};
  const double tol = 1e-3;

  std::vector<std::pair<std::string, GridField>> fields;
  for (const auto& tf : {TestFunctionSpec::gaussian(1.0, 1.0), TestFunctionSpec::gaussian(0.5, 2.0),
                         TestFunctionSpec::bump_wave(1.0, 2.5, 2.0),
                         TestFunctionSpec::vertical_wave(1.0, 0.5)}) {
    fields.emplace_back(tf.name(), sample(build_callable(tf, 1), spec));
  }
  // randomized band-limited sweep, fixed seed
  std::mt19937_64 rng(cfg.get_u64("seed", 12345));
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int random_fields = cfg.get_int("e3.random_fields", 20);
  for (int i = 0; i < random_fields; ++i) {
    double az[3], bz[3], at[4], bt[4];
    for (auto& v : az) v = u(rng);
    for (auto& v : bz) v = u(rng);
    for (auto& v : at) v = u(rng);
    for (auto& v : bt) v = u(rng);
    auto f = sample(
        [&](const HeisenbergPoint& p) {
          double horiz = 1.0;
          for (int k = 0; k < 3; ++k) {
            horiz += az[k] * std::cos(2.0 * M_PI * (k + 1) * p.x(0) / 12.0) +
                     bz[k] * std::sin(2.0 * M_PI * (k + 1) * p.y(0) / 12.0);
          }
          double vert = 0.0;
          for (int k = 0; k < 4; ++k) {
            vert += at[k] * std::cos(2.0 * M_PI * (k + 1) * p.t / 12.0) +
                    bt[k] * std::sin(2.0 * M_PI * (k + 1) * p.t / 12.0);
          }
          return horiz * vert;
        },
        spec);
    fields.emplace_back(param_str("random_%02d", i), std::move(f));
  }

  int violations = 0;
  double worst_excess = 0.0;
  for (const auto& [name, f] : fields) {
    for (double p : ps) {
      ShiftDiffTable tbl(f, p, sgrid);
      for (double q : qs) {
        if (q < p) continue;
        for (double alpha : alphas) {
          const double lhs = vhp_from_table(tbl, f, p, q, alpha, sgrid);
          const double rhs = besov_I_from_table(tbl, f, p, q, alpha, sgrid);
          const double excess = lhs / rhs - 1.0;
          worst_excess = std::max(worst_excess, excess);
          if (!(lhs <= rhs * (1.0 + tol))) ++violations;
          if (p == q) {
            rep.check_le(name, "pq_equality_defect", std::abs(lhs - rhs),
                         1e-10 * std::max(lhs, rhs), param_str("p=q=%g alpha=%g", p, alpha));
          }
        }
      }
    }
  }
  rep.check_le("lattice", "violations", violations, 0.0, "");
  rep.info("lattice", "worst_excess_over_besov", worst_excess);

  // strict inequality spot check
  {
    const auto& f = fields[0].second;
    ShiftDiffTable tbl(f, 2.0, sgrid);
    const double lhs = vhp_from_table(tbl, f, 2.0, 4.0, 0.5, sgrid);
    const double rhs = besov_I_from_table(tbl, f, 2.0, 4.0, 0.5, sgrid);
    rep.check_le("gaussian_p2_q4", "vhp_minus_besov", lhs - rhs, 0.0, "strict expected");
  }

  rep.wall_seconds = timer.seconds();
  return rep;
}

// ---------------------------------------------------------------- E4

ExperimentReport exp_homogeneity(const Config& cfg) {
  Timer timer;
  ExperimentReport rep;
  rep.id = "E4";

  const double tol = 1e-6;
  auto run_case = [&](int n, double p, double q, double alpha, double r, int Nz, int Nt) {
    const auto phi = build_callable(TestFunctionSpec::gaussian(1.0, 1.0), n);
    const double Lz = 4.0, Lt = 4.0;
    SShiftGrid base(0.05, 2.0, 16);
    CallableField phir = phi;
    phir.eval = [r, inner = phi.eval](const HeisenbergPoint& pt) { return inner(dilate(r, pt)); };
    const GridSpec spec_base = GridSpec::box(n, Lz, Lt, Nz, Nt);
    const GridSpec spec_dil = GridSpec::box(n, r * Lz, r * r * Lt, Nz, Nt);
    const double lhs = vhp_seminorm(sample(phir, spec_base), p, q, alpha, base);
    const double rhs = vhp_seminorm(sample(phi, spec_dil), p, q, alpha, base.scaled(r * r));
    const double Q = 2.0 * n + 2.0;
    const double factor = std::pow(r, 2.0 * alpha - Q / p);
    const double defect = std::abs(lhs - factor * rhs) / (factor * rhs);
    rep.check_le(param_str("n%d_p%g_q%g_alpha%g", n, p, q, alpha), "homogeneity_defect", defect,
                 tol, param_str("r=%g factor=%.8g", r, factor));
  };

  // r = 1: identical pipelines
  run_case(1, 2.0, 2.0, 0.5, 1.0, 6, 64);
  // n = 1 sweep, exponent 2 alpha - Q/p with Q = 4
  for (double r : {0.5, 2.0, 4.0}) run_case(1, 2.0, 2.0, 0.5, r, 6, 64);
  run_case(1, 3.0, 4.0, 0.25, 2.0, 6, 64);
  run_case(1, 1.5, 2.0, 0.75, 2.0, 6, 64);
  // n = 2 spot check: Q = 6, factor 2^{1/2 - 2}
  run_case(2, 3.0, 3.0, 0.25, 2.0, 5, 32);

  // the exponent values themselves, as fixed-point checks
  rep.check_le("exponent_n1", "defect", std::abs(std::pow(2.0, 2.0 * 0.5 - 4.0 / 2.0) - 0.5), 0.0,
               "2^{2a-Q/p} = 1/2");
  rep.check_le("exponent_n2", "defect",
               std::abs(std::pow(2.0, 2.0 * 0.25 - 6.0 / 3.0) - std::pow(2.0, -1.5)), 0.0,
               "2^{1/2-2} = 2^{-3/2}");

  rep.wall_seconds = timer.seconds();
  return rep;
}

// ---------------------------------------------------------------- E5

ExperimentReport exp_example61(const Config& cfg) {
  Timer timer;
  ExperimentReport rep;
  rep.id = "E5";

  auto f = build_callable(TestFunctionSpec::lipschitz_cap(3.0), 1);
  const double r_max = cfg.get_double("e5.r_max", 25.0);
  const double quad_tol = cfg.get_double("e5.quad_tol", 1e-6);

  // (i) divergence at the origin with log-slope fitted over the history
  {
    TruncationSchedule sched;
    sched.eps0 = 0.5;
    sched.cauchy_tol = 1e-4;
    sched.max_refinements = 14;
    auto pv = pv_tderiv_point(f, HeisenbergPoint::identity(1), 0.5, sched, r_max, quad_tol);
    rep.check_le("origin", "converged", pv.converged ? 1.0 : 0.0, 0.0, "divergence expected");
    std::vector<double> xs, ys;
    bool monotone = true;
    for (std::size_t i = 1; i < pv.history.size(); ++i) {
      xs.push_back(std::log(1.0 / pv.history[i].eps));
      ys.push_back(pv.history[i].value);
      monotone = monotone && pv.history[i].value > pv.history[i - 1].value;
    }
    const double slope = linear_fit_slope(xs, ys);
    rep.check_ge("origin", "log_slope", slope, 1e-6, "value ~ 4 ln(1/eps)");
    rep.info("origin", "log_slope_value", slope, "closed form gives 4");
    rep.check_ge("origin", "monotone_growth", monotone ? 1.0 : 0.0, 1.0, "");
  }

  // (ii) paper lower bound on Omega samples at extreme heights
  for (double t : {1e-12, 1e-13, 1e-14}) {
    const double bound = std::max(0.5 * std::log((t + 1.0) / (4.0 * t)) - 10.0, 0.0);
    for (const auto& p : omega_points(1, t)) {
      TruncationSchedule sched;
      sched.eps0 = t;
      sched.cauchy_tol = 1e-3;
      sched.max_refinements = 40;
      auto pv = pv_tderiv_point(f, p, 0.5, sched, r_max, quad_tol);
      rep.check_ge(param_str("omega_t%.0e", t), "abs_value_vs_bound", std::abs(pv.value), bound,
                   param_str("|z|=%.3e bound=%.6g conv=%d", std::hypot(p.x(0), p.y(0)), bound,
                             pv.converged ? 1 : 0));
    }
  }
  // bound clamps to zero at moderate heights: trivially satisfied
  {
    const double t = 1e-3;
    const double bound = std::max(0.5 * std::log((t + 1.0) / (4.0 * t)) - 10.0, 0.0);
    rep.check_le("omega_clamp", "bound_at_t1e-3", bound, 0.0, "max{.,0} clamp");
  }

  // (iii) log-slope of |T^{1/2} f(0, t)| against ln(1/t)
  {
    std::vector<double> xs, ys;
    for (double t : {1e-14, 3.162e-13, 1e-11, 3.162e-10, 1e-8}) {
      HeisenbergPoint p = HeisenbergPoint::identity(1);
      p.t = t;
      TruncationSchedule sched;
      sched.eps0 = t;
      sched.cauchy_tol = 1e-3;
      sched.max_refinements = 40;
      auto pv = pv_tderiv_point(f, p, 0.5, sched, r_max, quad_tol);
      xs.push_back(std::log(1.0 / t));
      ys.push_back(std::abs(pv.value));
    }
    const double slope = linear_fit_slope(xs, ys);
    rep.check_ge("axis_scan", "log_slope", slope, 0.45, "");
    rep.info("axis_scan", "log_slope_value", slope, "leading behavior ~ 2 ln(1/t)");
  }

  rep.wall_seconds = timer.seconds();
  return rep;
}

// ---------------------------------------------------------------- E6

ExperimentReport exp_bmo_lipschitz(const Config& cfg) {
  Timer timer;
  ExperimentReport rep;
  rep.id = "E6";

  const int nz = cfg.get_int("e6.nz", 20);
  const int nt = cfg.get_int("e6.nt", 128);
  const GridSpec spec = GridSpec::box(1, 6.0, 6.0, nz, nt);

  // constant f: T^{1/2} annihilates constants, BMO is zero
  {
    GridField c(spec, Complex(5.0, 0.0));
    auto tc = truncated_tderiv_grid(c, 0.5, 2.0 * spec.vertical().spacing());
    auto fam = BallFamily::lattice_for_grid(spec, 3, -1, 1);
    rep.check_le("constant", "bmo", bmo_norm(tc, fam), 1e-12, "");
  }

  for (double R : {1.0, 3.0}) {
    auto cap = build_callable(TestFunctionSpec::lipschitz_cap(R), 1);
    auto fg = sample(cap, spec);
    auto approx = truncated_tderiv_grid(fg, 0.5, 2.0 * spec.vertical().spacing());
    auto fam = BallFamily::lattice_for_grid(spec, 3, -1, 1);
    auto fam_fine = BallFamily::lattice_for_grid(spec, 5, -1, 2);
    const double lip = 1.0;  // gradient of the gauge has unit horizontal norm
    const double r1 = bmo_norm(approx, fam) / lip;
    const double r2 = bmo_norm(approx, fam_fine) / lip;
    rep.check_finite(param_str("cap_R%g", R), "bmo_over_lip", r1, "");
    rep.check_le(param_str("cap_R%g", R), "ball_refinement_factor",
                 std::max(r1, r2) / std::min(r1, r2), 2.0,
                 param_str("coarse=%.6g fine=%.6g", r1, r2));
  }

  // dilation invariance of the ratio: compute on exactly mapped grids
  {
    auto cap = build_callable(TestFunctionSpec::lipschitz_cap(1.0), 1);
    auto ratio_at = [&](double r) {
      GridSpec s = GridSpec::box(1, r * 6.0, r * r * 6.0, nz, nt);
      CallableField capr = cap;
      capr.eval = [r, inner = cap.eval](const HeisenbergPoint& p) {
        return inner(dilate(1.0 / r, p)) * r;  // f_r = r f(delta_{1/r} .), Lip = 1
      };
      auto fg = sample(capr, s);
      auto approx = truncated_tderiv_grid(fg, 0.5, 2.0 * s.vertical().spacing());
      BallFamily fam;
      for (const auto& b : BallFamily::lattice_for_grid(GridSpec::box(1, 6.0, 6.0, nz, nt), 3, -1, 1).balls) {
        fam.balls.push_back({dilate(r, b.center), r * b.radius});
      }
      return bmo_norm(approx, fam);
    };
    const double r1 = ratio_at(1.0);
    const double r2 = ratio_at(2.0);
    rep.check_le("dilation", "ratio_change", std::abs(r2 - r1) / r1, 0.10,
                 param_str("r=2: %.6g vs %.6g", r2, r1));
  }

  // unboundedness: Omega samples of T^{1/2} of the R = 1 cap exceed 12
  {
    auto cap = build_callable(TestFunctionSpec::lipschitz_cap(1.0), 1);
    double best = 0.0;
    const double t = 1e-14;
    for (const auto& p : omega_points(1, t)) {
      TruncationSchedule sched;
      sched.eps0 = t;
      sched.cauchy_tol = 1e-3;
      sched.max_refinements = 40;
      auto pv = pv_tderiv_point(cap, p, 0.5, sched, 25.0, 1e-6);
      best = std::max(best, std::abs(pv.value));
    }
    rep.check_ge("omega_sup", "max_abs_value", best, 12.0, "t = 1e-14");
  }

  rep.wall_seconds = timer.seconds();
  return rep;
}

// ---------------------------------------------------------------- E7

ExperimentReport exp_truncation(const Config& cfg) {
  Timer timer;
  ExperimentReport rep;
  rep.id = "E7";

  const int nz = cfg.get_int("e7.nz", 16);
  const int nt = cfg.get_int("e7.nt", 1024);
  const GridSpec spec = GridSpec::box(1, 6.0, 6.0, nz, nt);
  const GridSpec spec2 = GridSpec::box(1, 6.0, 6.0, nz, 2 * nt);
  const std::vector<double> alphas = cfg.get_list("e7.alpha_list", {0.25, 0.5, 0.75});

  std::vector<TestFunctionSpec> family = {TestFunctionSpec::bump_wave(0.5, 2.5, 2.0),
                                          TestFunctionSpec::bump_wave(1.0, 2.5, 2.0),
                                          TestFunctionSpec::gaussian(1.0, 1.0)};

  // zero field: all differences vanish identically
  {
    GridField z(spec);
    auto t1 = truncated_tderiv_grid(z, 0.5, 1.0);
    auto t2 = truncated_tderiv_grid(z, 0.5, 0.5);
    rep.check_le("zero_field", "difference", lp_norm(t1 - t2, 2.0), 0.0, "");
  }

  for (const auto& tf : family) {
    const auto callable = build_callable(tf, 1);
    for (double alpha : alphas) {
      // Cauchy rate on the base grid
      auto f = sample(callable, spec);
      const double h = spec.vertical().spacing();
      std::vector<double> xs, ys;
      GridField prev = truncated_tderiv_grid(f, alpha, 1.5);
      double eps = 1.5;
      for (int k = 0; k < 6; ++k) {
        const double next = eps * 0.5;
        if (next < h) break;
        GridField cur = truncated_tderiv_grid(f, alpha, next);
        xs.push_back(std::log(next));
        ys.push_back(std::log(lp_norm(cur - prev, 2.0)));
        prev = std::move(cur);
        eps = next;
      }
      const double rate = linear_fit_slope(xs, ys);
      rep.check_ge(tf.name(), "cauchy_rate", rate, 0.9 * (1.0 - alpha),
                   param_str("alpha=%g expected~%g", alpha, 1.0 - alpha));

      // two-route agreement at base and doubled vertical resolution
      const double c_a = frac_pv_constant(alpha);
      double defects[2];
      int which = 0;
      for (const auto* sp : {&spec, &spec2}) {
        auto ff = sample(callable, *sp);
        auto limit = truncated_tderiv_grid(ff, alpha, sp->vertical().spacing());
        auto spectral = vertical_multiplier(ff, VerticalSymbol::abs_power(Complex(alpha, 0.0)));
        auto expect = Complex(-c_a, 0.0) * spectral;
        defects[which] = lp_norm(limit - expect, 2.0) / lp_norm(expect, 2.0);
        ++which;
      }
      rep.check_le(tf.name(), "two_route_base", defects[0], 0.02, param_str("alpha=%g", alpha));
      rep.check_le(tf.name(), "two_route_refined", defects[1], 0.01, param_str("alpha=%g", alpha));
    }
  }

  rep.wall_seconds = timer.seconds();
  return rep;
}

// ---------------------------------------------------------------- E8

ExperimentReport exp_adjoint(const Config& cfg) {
  Timer timer;
  ExperimentReport rep;
  rep.id = "E8";

  const GridSpec spec = GridSpec::box(1, 6.0, 6.0, cfg.get_int("e8.nz", 12),
                                      cfg.get_int("e8.nt", 64));

  auto bump_at = [&](double zc, double tc, double rz, double rt) {
    return sample(
        [=](const HeisenbergPoint& p) {
          const double uz =
              ((p.x(0) - zc) * (p.x(0) - zc) + p.y(0) * p.y(0)) / (rz * rz);
          const double ut = (p.t - tc) * (p.t - tc) / (rt * rt);
          if (uz >= 1.0 || ut >= 1.0) return 0.0;
          return std::exp(2.0 - 1.0 / (1.0 - uz) - 1.0 / (1.0 - ut));
        },
        spec);
  };

  auto f_center = bump_at(0.0, 0.0, 2.0, 1.5);
  auto g_disjoint = bump_at(2.5, 2.5, 1.5, 1.2);
  auto g_overlap = bump_at(0.8, 0.7, 2.0, 1.5);

  const double eps = 2.0 * spec.vertical().spacing();

  // phi = f: defect identically zero by symmetry of the pairing
  {
    auto tf = truncated_tderiv_grid(f_center, 0.5, eps);
    const double defect =
        std::abs(duality_pairing(f_center, tf).real() - duality_pairing(tf, f_center).real());
    rep.check_le("identity_pair", "defect", defect, 0.0, "");
  }

  for (double alpha : {0.25, 0.5, 0.75}) {
    for (const auto& [name, g] : {std::pair<std::string, const GridField&>{"disjoint", g_disjoint},
                                  {"overlap", g_overlap}}) {
      auto tf = truncated_tderiv_grid(f_center, alpha, eps);
      auto tg = truncated_tderiv_grid(g, alpha, eps);
      const double defect =
          std::abs(duality_pairing(g, tf).real() - duality_pairing(f_center, tg).real());
      const double scale = lp_norm(f_center, 2.0) * lp_norm(g, 2.0);
      rep.check_le(name, "t_deriv_pairing_defect", defect, 1e-6 * scale,
                   param_str("alpha=%g", alpha));
    }
  }

  // Lambda / Lambda* adjointness on an aligned grid
  {
    auto aspec = aligned_kernel_spec(1, 6.0, 11);
    SubLaplacianOperator L(aspec);
    auto phi = sample(build_callable(TestFunctionSpec::bump_wave(0.5, 2.0, 1.5), 1), aspec);
    auto psi = sample(build_callable(TestFunctionSpec::gaussian(1.0, 2.0), 1), aspec);
    for (double alpha : {0.25, 0.5, 0.75}) {
      auto lphi = lambda_op(L, phi, alpha, LambdaVariant::Lambda);
      auto lspsi = lambda_op(L, psi, alpha, LambdaVariant::LambdaStar);
      const double defect =
          std::abs(duality_pairing(lphi, psi).real() - duality_pairing(phi, lspsi).real());
      const double scale = lp_norm(phi, 2.0) * lp_norm(psi, 2.0);
      rep.check_le("lambda_pair", "adjoint_defect", defect, 1e-6 * scale,
                   param_str("alpha=%g", alpha));
    }
  }

  rep.wall_seconds = timer.seconds();
  return rep;
}

// ---------------------------------------------------------------- E9

ExperimentReport exp_kernels(const Config& cfg) {
  Timer timer;
  ExperimentReport rep;
  rep.id = "E9";

  const int nz = cfg.get_int("e9.nz", 17);
  auto spec = aligned_kernel_spec(1, 6.0, nz);
  SubLaplacianOperator L(spec);
  const double s = cfg.get_double("e9.heat_s", 0.5);

  auto h = heat_kernel(L, s);
  rep.check_le("heat", "mass_defect", std::abs(h.mass - 1.0), 1e-3, param_str("s=%g", s));
  rep.check_le("heat", "inversion_asymmetry", lp_norm(reflect(h.field) - h.field, kInf), 1e-6, "");
  double min_val = 0.0;
  for (const auto& v : h.field.values) min_val = std::min(min_val, v.real());
  rep.check_ge("heat", "min_value", min_val, -1e-6, "");
  if (h.resolution_warning) rep.note("heat kernel: sqrt(s) below twice the spacing (heuristic)");

  for (double alpha : {0.5, 1.0}) {
    auto B = bessel_kernel_H(L, alpha);
    rep.check_le(param_str("bessel_a%g", alpha), "mass_defect", std::abs(B.mass - 1.0), 1e-2, "");
    rep.check_le(param_str("bessel_a%g", alpha), "inversion_asymmetry",
                 lp_norm(reflect(B.field) - B.field, kInf), 1e-6, "");
    double bmin = 0.0;
    for (const auto& v : B.field.values) bmin = std::min(bmin, v.real());
    rep.check_ge(param_str("bessel_a%g", alpha), "min_value", bmin, -1e-6, "");
    rep.info(param_str("bessel_a%g", alpha), "tail_bound", B.tail_bound);
  }

  // heat scaling on exactly dilated grids
  {
    const double r = std::sqrt(2.0);
    GridSpec specB = spec;
    for (int k = 0; k < 2; ++k) {
      specB.axes[k].a *= r;
      specB.axes[k].b *= r;
    }
    specB.axes[2].a *= r * r;
    specB.axes[2].b *= r * r;
    SubLaplacianOperator LB(specB);
    auto hB = heat_kernel(LB, r * r * s);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < h.field.size(); ++i) {
      const double lhs = hB.field.values[i].real();
      const double rhs = std::pow(r, -4.0) * h.field.values[i].real();
      num += (lhs - rhs) * (lhs - rhs);
      den += rhs * rhs;
    }
    rep.check_le("heat_scaling", "relative_defect", std::sqrt(num / den), 0.05,
                 param_str("r=sqrt(2), Q=4"));
  }

  // semigroup and inverse-pair identities through the matrix calculus
  {
    auto aspec = aligned_kernel_spec(1, 6.0, 13);
    SubLaplacianOperator LD(aspec);
    auto f = sample(build_callable(TestFunctionSpec::gaussian(1.0, 1.0), 1), aspec);
    auto two = operator_function(LD, heat_spectral(0.6),
                                 operator_function(LD, heat_spectral(0.7), f));
    auto one = operator_function(LD, heat_spectral(1.3), f);
    rep.check_le("heat_semigroup", "defect", lp_norm(two - one, 2.0) / lp_norm(f, 2.0), 1e-9, "");

    auto round_trip = operator_function(LD, one_plus_power_spectral(0.7),
                                        operator_function(LD, one_plus_power_spectral(-0.7), f));
    rep.check_le("inverse_pair", "defect", lp_norm(round_trip - f, 2.0) / lp_norm(f, 2.0), 1e-8,
                 "");

    // B_alpha * B_beta = B_{alpha+beta} in the shared eigenbasis
    auto ab = operator_function(LD, bessel_quadrature_symbol(0.5),
                                operator_function(LD, bessel_quadrature_symbol(0.7), f));
    auto prod = operator_function(
        LD,
        [](double lam) {
          return bessel_quadrature_symbol(0.5)(lam) * bessel_quadrature_symbol(0.7)(lam);
        },
        f);
    rep.check_le("bessel_semigroup", "defect", lp_norm(ab - prod, 2.0) / lp_norm(f, 2.0), 1e-10,
                 "");

    // convolution with h_s realizes e^{-sA} on the aligned lattice
    auto hk = heat_kernel(LD, 1.0);
    auto via_conv = group_convolve(f, hk);
    auto via_op = operator_function(LD, heat_spectral(1.0), f);
    rep.check_le("conv_vs_operator", "defect", lp_norm(via_conv - via_op, 2.0) / lp_norm(f, 2.0),
                 1e-10, "aligned lattice");

    // impulse kernel reproduces the field; constants pick up the mass
    KernelField impulse;
    impulse.field = GridField(aspec);
    impulse.field.values[LD.identity_cell()] = Complex(1.0 / aspec.cell_volume(), 0.0);
    impulse.mass = 1.0;
    rep.check_le("conv_impulse", "defect",
                 lp_norm(group_convolve(f, impulse) - f, kInf) / lp_norm(f, kInf), 1e-6, "");
    GridField c(aspec, Complex(2.0, 0.0));
    rep.check_le("conv_constant", "defect",
                 lp_norm(group_convolve(c, hk) - hk.mass * c, kInf), 1e-3, "");

    // two-path heat associativity through convolutions
    auto h1 = heat_kernel(LD, 1.0), h2 = heat_kernel(LD, 1.5), h12 = heat_kernel(LD, 2.5);
    auto twoc = group_convolve(group_convolve(f, h1), h2);
    auto onec = group_convolve(f, h12);
    rep.check_le("conv_associativity", "defect", lp_norm(twoc - onec, 2.0) / lp_norm(onec, 2.0),
                 0.02, "");
  }

  // kernel route vs matrix route on generic grids
  {
    auto defect_at = [&](int gz, int gt) {
      GridSpec gspec = GridSpec::box(1, 6.0, 4.0, gz, gt);
      SubLaplacianOptions opts;
      opts.dense_cap = 3000;
      SubLaplacianOperator LG(gspec, opts);
      auto f = sample(build_callable(TestFunctionSpec::gaussian(0.8, 1.2), 1), gspec);
      auto B = bessel_kernel_H(LG, 1.0);
      auto via_conv = group_convolve(f, B);
      auto via_op = operator_function(LG, one_plus_power_spectral(-1.0), f);
      return lp_norm(via_conv - via_op, 2.0) / lp_norm(via_op, 2.0);
    };
    const double coarse = defect_at(11, 25);
    const double fine = defect_at(15, 35);
    rep.check_le("kernel_vs_matrix", "coarse_defect", coarse, 0.05, "(11,11,25)");
    rep.check_le("kernel_vs_matrix", "fine_defect", fine, 0.05, "(15,15,35)");
    // non-degradation above the consistency floor (the routes agree to ~1e-3)
    rep.check_le("kernel_vs_matrix", "refinement_trend", fine, std::max(1.05 * coarse, 2e-3),
                 param_str("coarse=%.3e fine=%.3e", coarse, fine));
  }

  rep.wall_seconds = timer.seconds();
  return rep;
}

// ---------------------------------------------------------------- driver

const std::vector<std::string>& experiment_ids() {
  static const std::vector<std::string> ids = {"E1", "E2", "E3", "E4", "E5",
                                               "E6", "E7", "E8", "E9"};
  return ids;
}

ExperimentReport run_experiment(const std::string& id, const Config& cfg) {
  if (id == "E1") return exp_embedding(cfg);
  if (id == "E2") return exp_vhp(cfg);
  if (id == "E3") return exp_minkowski(cfg);
  if (id == "E4") return exp_homogeneity(cfg);
  if (id == "E5") return exp_example61(cfg);
  if (id == "E6") return exp_bmo_lipschitz(cfg);
  if (id == "E7") return exp_truncation(cfg);
  if (id == "E8") return exp_adjoint(cfg);
  if (id == "E9") return exp_kernels(cfg);
  throw std::invalid_argument("unknown experiment id: " + id);
}

RunAllResult run_all(const Config& cfg, const std::vector<std::string>& which,
                     const std::string& out_dir) {
  RunAllResult result;
  const auto& ids = which.empty() ? experiment_ids() : which;
  std::filesystem::create_directories(out_dir);
  for (const auto& id : ids) {
    ExperimentReport rep = run_experiment(id, cfg);
    write_cases_csv(rep, out_dir + "/" + id + "_cases.csv");
    result.pass = result.pass && rep.pass;
    result.reports.push_back(std::move(rep));
  }
  write_summary_json(result.reports, cfg, out_dir + "/summary.json");
  return result;
}

}  // namespace hfrac
