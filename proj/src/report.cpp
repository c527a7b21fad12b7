#include "hfrac/report.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>

namespace hfrac {

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void ExperimentReport::check_le(const std::string& case_id, const std::string& metric,
                                double value, double threshold, const std::string& params) {
  const bool ok = std::isfinite(value) && value <= threshold;
  cases.push_back({case_id, metric, value, threshold, "le", ok, params});
  pass = pass && ok;
}

void ExperimentReport::check_ge(const std::string& case_id, const std::string& metric,
                                double value, double threshold, const std::string& params) {
  const bool ok = std::isfinite(value) && value >= threshold;
  cases.push_back({case_id, metric, value, threshold, "ge", ok, params});
  pass = pass && ok;
}

void ExperimentReport::check_finite(const std::string& case_id, const std::string& metric,
                                    double value, const std::string& params) {
  const bool ok = std::isfinite(value);
  cases.push_back({case_id, metric, value, 0.0, "finite", ok, params});
  pass = pass && ok;
}

void ExperimentReport::info(const std::string& case_id, const std::string& metric, double value,
                            const std::string& params) {
  cases.push_back({case_id, metric, value, 0.0, "info", true, params});
}

int ExperimentReport::failures() const {
  int n = 0;
  for (const auto& c : cases) n += c.pass ? 0 : 1;
  return n;
}

void write_cases_csv(const ExperimentReport& rep, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_cases_csv: cannot open " + path);
  os << "experiment,case_id,metric,value,threshold,comparator,pass,params\n";
  for (const auto& c : rep.cases) {
    os << rep.id << ',' << c.case_id << ',' << c.metric << ',' << format_g17(c.value) << ','
       << format_g17(c.threshold) << ',' << c.comparator << ',' << (c.pass ? 1 : 0) << ",\""
       << c.params << "\"\n";
  }
}

void write_summary_json(const std::vector<ExperimentReport>& reports, const Config& config,
                        const std::string& path) {
  nlohmann::json j;
  j["config"] = nlohmann::json::object();
  for (const auto& [k, v] : config.entries()) j["config"][k] = v;
  bool overall = true;
  j["experiments"] = nlohmann::json::object();
  for (const auto& r : reports) {
    nlohmann::json e;
    e["status"] = r.pass ? "pass" : "fail";
    e["wall_seconds"] = r.wall_seconds;
    e["cases"] = r.cases.size();
    e["failures"] = r.failures();
    double worst = 0.0;
    std::string worst_metric;
    for (const auto& c : r.cases) {
      if (c.comparator == "le" && c.threshold > 0.0 && std::isfinite(c.value)) {
        const double rel = c.value / c.threshold;
        if (rel > worst) {
          worst = rel;
          worst_metric = c.case_id + "/" + c.metric;
        }
      }
    }
    if (!worst_metric.empty()) {
      e["worst_defect_fraction_of_threshold"] = worst;
      e["worst_defect_case"] = worst_metric;
    }
    if (!r.notes.empty()) e["notes"] = r.notes;
    j["experiments"][r.id] = std::move(e);
    overall = overall && r.pass;
  }
  j["overall_pass"] = overall;
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_summary_json: cannot open " + path);
  os << j.dump(2) << '\n';
}

}  // namespace hfrac
