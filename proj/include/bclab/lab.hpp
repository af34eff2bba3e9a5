#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "bclab/analysis.hpp"

namespace bclab {

/// Error in a config file or CLI usage; maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tolerance failure in a scenario; maps to exit code 1.
struct ExperimentConfig {
  std::string scenario;
  int n = 256;
  double length = 2.0;
  double t_final = 1.0;
  double dt = 0.0;                 // 0 picks h / 2
  double potential_scalar = 0.0;   // constant real scalar potential c
  BumpShape bump_shape = BumpShape::sin4;
  double bump_start = 0.05;
  double bump_end = 0.95;
  double bump_amplitude = 1.0;
  unsigned long long seed = 20260814ULL;
  std::string output_dir = "out";
  bool allow_guard_violation = false;
  /// Per-scenario tolerance overrides, keyed by measurement name.
  std::map<std::string, double> tolerance_overrides;

  static ExperimentConfig parse_file(const std::filesystem::path& path);
  static ExperimentConfig parse_string(const std::string& text);
  void validate() const;
  /// Output root after applying the LAB_OUTPUT_ROOT override.
  std::filesystem::path resolved_output_dir() const;
};

struct ScenarioInfo {
  std::string name;
  std::string claim;  // the verified identity or bound, in formula form
};

std::vector<ScenarioInfo> list_scenarios();

struct ScenarioResult {
  std::string name;
  bool pass = false;
  std::string report_json;                // serialized scenario report
  std::vector<std::string> csv_names;     // trace files written next to it
};

/// Run one scenario, write <scenario>.json plus CSV traces under the output
/// root, and return the outcome.  Throws ConfigError for unusable configs.
ScenarioResult run_scenario(const ExperimentConfig& config);

/// Run the scenario at several grid sizes and fit the refinement order.
struct ConvergenceResult {
  std::string scenario;
  std::vector<int> sizes;
  std::vector<double> errors;
  std::vector<double> orders;  // pairwise log2 ratios
  bool exact = false;          // residual at rounding level, no order fit
  bool pass = false;
  std::string report_json;
};

ConvergenceResult convergence_study(const std::string& scenario,
                                    const std::vector<int>& sizes,
                                    ExperimentConfig config);

/// Write the run manifest (timestamps, config echo, per-scenario outcomes).
void write_manifest(const std::filesystem::path& out_root,
                    const ExperimentConfig& config,
                    const std::vector<ScenarioResult>& results,
                    const std::string& started_at,
                    const std::string& finished_at);

std::string iso_timestamp_utc();

}  // namespace bclab
