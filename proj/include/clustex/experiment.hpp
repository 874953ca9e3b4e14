#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace clustex {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Experiment driver configuration. Flags and `key = value` config files bind
// to the same field names; flags override the file.
struct ExperimentConfig {
  std::string experiment;  // theorem1 | compound-poisson | remark1 | remark2 | oracle
  std::string law = "geometric:0.5";
  std::string construction = "finite-mean";  // finite-mean | censored
  std::int64_t n = 100000;
  double rho = 0.0;     // cluster-rate schedule (default when nothing else set)
  double lambda = 0.0;  // tail-rate schedule
  double level = 0.0;   // fixed level
  std::int64_t reps = 1;
  std::uint64_t seed = 1;
  std::int64_t runs_gap = 1;
  std::int64_t block_len = 0;  // 0: ceil(sqrt(n))
  std::int64_t windows = 50;
  std::string out;  // output directory; empty writes nothing
  int threads = 0;  // 0: hardware default
  std::string dump_path;  // optional CSV dump of the first X values

  void validate() const;  // throws ConfigError naming the offending key
};

// Parses a flat `key = value` file ('#' comments); unknown keys throw.
void apply_config_file(ExperimentConfig& cfg, const std::string& path);

struct CheckResult {
  std::string name;
  double observed = 0.0;
  double bound = 0.0;
  std::string comparison;  // "<", "<=", ">", ">="
  bool pass = false;
};

struct ExperimentReport {
  bool pass = false;
  std::vector<CheckResult> checks;
  std::string report_json;  // serialized document, also written to out/
};

// Runs the configured experiment; deterministic for fixed (config, seed).
// Writes report.json plus the experiment's CSVs when out is set.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

}  // namespace clustex
