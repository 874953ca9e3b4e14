#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "clustex/pathgen.hpp"

namespace clustex {

// Level selection. ClusterRate targets ~rho exceeding cycles per path
// (u = ln(n / (mean_cycle * rho))); TailRate solves n P(X_0 > u) = lambda
// against the exact marginal; FixedLevel passes u through.
struct LevelSchedule {
  enum class Mode { ClusterRate, TailRate, FixedLevel };
  Mode mode = Mode::ClusterRate;
  double value = 50.0;

  static LevelSchedule cluster_rate(double rho) { return {Mode::ClusterRate, rho}; }
  static LevelSchedule tail_rate(double lambda) { return {Mode::TailRate, lambda}; }
  static LevelSchedule fixed(double u) { return {Mode::FixedLevel, u}; }
};

double resolve_level(const LevelSchedule& schedule, std::int64_t n,
                     const SequenceModel& model);

enum class ExtractMethod { Cycle, Runs };

struct ClusterRecord {
  std::int64_t start = 0;
  std::int64_t size = 0;
  double level = 0.0;
  ExtractMethod method = ExtractMethod::Cycle;
  int runs_gap = 0;      // for the runs method
  bool delayed = false;  // cycle method: the first (stationary-delay) cycle
};

// One record per complete cycle with height > u. The delayed first cycle is
// included (flagged) when it lies fully inside [0, n); estimators of the
// cluster law drop it along with the incomplete final cycle.
std::vector<ClusterRecord> clusters_by_cycle(const RegenerativePath& path, double u);

// Observational declustering: exceedances more than `gap` apart start a new
// cluster; size is the number of exceedances in the run.
std::vector<ClusterRecord> clusters_by_runs(XStream& xs, double u, int gap);
std::vector<ClusterRecord> clusters_by_runs(const RegenerativePath& path, double u,
                                            int gap);

// Streaming cycle-cluster scan for horizons too large to materialize.
struct CycleScan {
  std::int64_t complete_cycles = 0;    // cycles fully inside [0, n)
  std::int64_t clusters = 0;           // exceeding complete cycles with k >= 2
  std::int64_t delayed_exceeding = 0;  // first cycle exceeded (flagged records)
  double max_height = 0.0;             // over cycles intersecting [0, n)
};

CycleScan scan_cycle_clusters(CycleSource& src, std::int64_t n, double u,
                              const std::function<void(const ClusterRecord&)>& sink);

struct CountProcess {
  std::int64_t windows = 0;
  std::int64_t horizon = 0;
  double level = 0.0;
  std::vector<std::int64_t> counts;

  std::int64_t total() const;
};

// N_n over the partition of scaled time [0, 1] into `windows` equal windows;
// index k lands in window floor(k * windows / n).
CountProcess count_process(XStream& xs, double u, std::int64_t windows);

// Same counts computed from the cycle structure (exceedances of a cycle are
// its whole index range while its height exceeds u).
CountProcess count_process_from_cycles(CycleSource& src, std::int64_t n, double u,
                                       std::int64_t windows);

}  // namespace clustex
