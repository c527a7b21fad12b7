#include <CLI11.hpp>

#include <json.hpp>

#include "hfrac/experiments.hpp"
#include "hfrac/field_io.hpp"
#include "hfrac/kernels.hpp"
#include "hfrac/test_functions.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

namespace {

int cmd_run(const std::string& config_path, const std::vector<std::string>& experiments,
            const std::string& out_dir) {
  hfrac::Config cfg;
  if (!config_path.empty()) cfg = hfrac::Config::parse_file(config_path);
  auto result = hfrac::run_all(cfg, experiments, out_dir);
  for (const auto& rep : result.reports) {
    std::printf("%-3s %-4s  %6.1f s  %4zu cases  %d failures\n", rep.id.c_str(),
                rep.pass ? "pass" : "FAIL", rep.wall_seconds, rep.cases.size(), rep.failures());
    for (const auto& c : rep.cases) {
      if (!c.pass) {
        std::printf("    FAIL %s/%s = %.8g vs %.8g (%s) [%s]\n", c.case_id.c_str(),
                    c.metric.c_str(), c.value, c.threshold, c.comparator.c_str(),
                    c.params.c_str());
      }
    }
  }
  std::printf("summary: %s  (%s/summary.json)\n", result.pass ? "pass" : "FAIL", out_dir.c_str());
  return result.pass ? 0 : 1;
}

int cmd_kernels_build(int nz, double s, double alpha, const std::string& out_dir) {
  auto spec = hfrac::aligned_kernel_spec(1, 6.0, nz);
  hfrac::SubLaplacianOperator L(spec);
  std::filesystem::create_directories(out_dir);

  auto h = hfrac::heat_kernel(L, s);
  hfrac::save_field(h.field, out_dir + "/heat.hfld");
  auto B = hfrac::bessel_kernel_H(L, alpha);
  hfrac::save_field(B.field, out_dir + "/bessel.hfld");

  nlohmann::json meta;
  meta["grid"] = {{"nz", nz}, {"nt", spec.vertical().count},
                  {"Lt", 0.5 * spec.vertical().length()}, {"aligned", L.aligned()}};
  meta["heat"] = {{"s", s},
                  {"mass", h.mass},
                  {"resolution_warning", h.resolution_warning},
                  {"inversion_asymmetry",
                   hfrac::lp_norm(hfrac::reflect(h.field) - h.field,
                                  std::numeric_limits<double>::infinity())}};
  meta["bessel"] = {{"alpha", alpha},
                    {"mass", B.mass},
                    {"tail_bound", B.tail_bound},
                    {"inversion_asymmetry",
                     hfrac::lp_norm(hfrac::reflect(B.field) - B.field,
                                    std::numeric_limits<double>::infinity())}};
  std::ofstream os(out_dir + "/kernels.json");
  os << meta.dump(2) << '\n';
  std::printf("wrote %s/{heat.hfld, bessel.hfld, kernels.json}\n", out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hfrac: fractional vertical/horizontal calculus on the Heisenberg group"};
  app.require_subcommand(1);

  // run
  std::string config_path, out_dir = "out";
  std::vector<std::string> experiments;
  auto* run = app.add_subcommand("run", "run verification experiments");
  run->add_option("--config", config_path, "flat key = value configuration file");
  run->add_option("--experiment", experiments, "subset of E1..E9 (default: all)");
  run->add_option("--out", out_dir, "output directory for summary.json and CSVs");

  // field
  auto* field = app.add_subcommand("field", "sample and convert field files");
  field->require_subcommand(1);
  std::string family = "gaussian", out_path = "field.hfld";
  double pa = 1.0, pb = 1.0, tau0 = 1.0, capR = 1.0;
  int nz = 16, nt = 64;
  double Lz = 6.0, Lt = 6.0;
  auto* fsample = field->add_subcommand("sample", "sample a test function to an HFLD1 file");
  fsample->add_option("--family", family, "gaussian|bump_wave|lipschitz_cap|vertical_wave");
  fsample->add_option("--a", pa);
  fsample->add_option("--b", pb);
  fsample->add_option("--tau0", tau0);
  fsample->add_option("--R", capR);
  fsample->add_option("--nz", nz);
  fsample->add_option("--nt", nt);
  fsample->add_option("--Lz", Lz);
  fsample->add_option("--Lt", Lt);
  fsample->add_option("--out", out_path)->required();
  std::string in_path, csv_path;
  auto* fconvert = field->add_subcommand("convert", "dump an HFLD1 file to CSV");
  fconvert->add_option("--in", in_path)->required();
  fconvert->add_option("--csv", csv_path)->required();
  std::string info_path;
  auto* finfo = field->add_subcommand("info", "print the header of an HFLD1 file");
  finfo->add_option("--in", info_path)->required();

  // kernels
  auto* kernels = app.add_subcommand("kernels", "build and inspect kernels");
  kernels->require_subcommand(1);
  int knz = 17;
  double ks = 0.5, kalpha = 1.0;
  std::string kout = "kernels_out";
  auto* kbuild = kernels->add_subcommand("build", "heat and Bessel kernels on an aligned grid");
  kbuild->add_option("--nz", knz, "horizontal cells per axis (odd)");
  kbuild->add_option("--s", ks, "heat time");
  kbuild->add_option("--alpha", kalpha, "Bessel index");
  kbuild->add_option("--out", kout, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, experiments, out_dir);
    if (kbuild->parsed()) return cmd_kernels_build(knz, ks, kalpha, kout);
    if (fsample->parsed()) {
      hfrac::TestFunctionSpec spec;
      if (family == "gaussian") {
        spec = hfrac::TestFunctionSpec::gaussian(pa, pb);
      } else if (family == "bump_wave") {
        spec = hfrac::TestFunctionSpec::bump_wave(tau0);
      } else if (family == "lipschitz_cap") {
        spec = hfrac::TestFunctionSpec::lipschitz_cap(capR);
      } else if (family == "vertical_wave") {
        spec = hfrac::TestFunctionSpec::vertical_wave(pa, tau0);
      } else {
        std::fprintf(stderr, "unknown family %s\n", family.c_str());
        return 2;
      }
      auto grid = hfrac::GridSpec::box(1, Lz, Lt, nz, nt);
      auto f = hfrac::sample(hfrac::build_callable(spec, 1), grid);
      hfrac::save_field(f, out_path);
      std::printf("wrote %s (%zu samples)\n", out_path.c_str(), f.size());
    } else if (fconvert->parsed()) {
      auto f = hfrac::load_field(in_path);
      std::FILE* os = std::fopen(csv_path.c_str(), "w");
      if (!os) throw std::runtime_error("cannot open " + csv_path);
      std::fprintf(os, "index,re,im\n");
      for (std::size_t i = 0; i < f.size(); ++i) {
        std::fprintf(os, "%zu,%.17g,%.17g\n", i, f.values[i].real(), f.values[i].imag());
      }
      std::fclose(os);
      std::printf("wrote %s\n", csv_path.c_str());
    } else if (finfo->parsed()) {
      auto f = hfrac::load_field(info_path);
      std::printf("n=%d mode=%c axes:", f.spec.n,
                  f.spec.mode == hfrac::BoundaryMode::Periodic ? 'P' : 'Z');
      for (const auto& ax : f.spec.axes) {
        std::printf(" [%g,%g]x%d", ax.a, ax.b, ax.count);
      }
      std::printf(" samples=%zu\n", f.size());
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
