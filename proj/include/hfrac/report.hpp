#pragma once

#include "hfrac/config.hpp"

#include <string>
#include <vector>

namespace hfrac {

/// One checked quantity of one experiment case. comparator is one of
/// "le", "ge", "finite", "info" (info rows never fail).
struct CaseRow {
  std::string case_id;
  std::string metric;
  double value = 0.0;
  double threshold = 0.0;
  std::string comparator;
  bool pass = true;
  std::string params;
};

struct ExperimentReport {
  std::string id;
  bool pass = true;
  double wall_seconds = 0.0;
  std::vector<CaseRow> cases;
  std::vector<std::string> notes;  // informational diagnostics

  void check_le(const std::string& case_id, const std::string& metric, double value,
                double threshold, const std::string& params = "");
  void check_ge(const std::string& case_id, const std::string& metric, double value,
                double threshold, const std::string& params = "");
  void check_finite(const std::string& case_id, const std::string& metric, double value,
                    const std::string& params = "");
  void info(const std::string& case_id, const std::string& metric, double value,
            const std::string& params = "");
  void note(const std::string& text) { notes.push_back(text); }

  int failures() const;
};

std::string format_g17(double v);

/// Fixed CSV schema: experiment,case_id,metric,value,threshold,comparator,pass,params
void write_cases_csv(const ExperimentReport& rep, const std::string& path);

/// summary.json with per-experiment status, worst defects and timings.
void write_summary_json(const std::vector<ExperimentReport>& reports, const Config& config,
                        const std::string& path);

}  // namespace hfrac
