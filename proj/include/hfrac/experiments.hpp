#pragma once

#include "hfrac/config.hpp"
#include "hfrac/report.hpp"

#include <functional>
#include <string>
#include <vector>

namespace hfrac {

// Verification experiments. Each takes the flat configuration (all keys have
// documented defaults) and returns a structured report; thresholds follow the
// acceptance criteria and are pinned in code.
ExperimentReport exp_embedding(const Config& cfg);       // E1
ExperimentReport exp_vhp(const Config& cfg);             // E2
ExperimentReport exp_minkowski(const Config& cfg);       // E3
ExperimentReport exp_homogeneity(const Config& cfg);     // E4
ExperimentReport exp_example61(const Config& cfg);       // E5
ExperimentReport exp_bmo_lipschitz(const Config& cfg);   // E6
ExperimentReport exp_truncation(const Config& cfg);      // E7
ExperimentReport exp_adjoint(const Config& cfg);         // E8
ExperimentReport exp_kernels(const Config& cfg);         // E9

const std::vector<std::string>& experiment_ids();
ExperimentReport run_experiment(const std::string& id, const Config& cfg);

struct RunAllResult {
  std::vector<ExperimentReport> reports;
  bool pass = true;
};

/// Runs the selected experiments (all when `which` is empty), writes
/// out_dir/summary.json and out_dir/<ID>_cases.csv.
RunAllResult run_all(const Config& cfg, const std::vector<std::string>& which,
                     const std::string& out_dir);

}  // namespace hfrac
