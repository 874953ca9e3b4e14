#include "clustex/exceed.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "clustex/oracle.hpp"

namespace clustex {

double resolve_level(const LevelSchedule& schedule, std::int64_t n,
                     const SequenceModel& model) {
  if (n < 2) throw std::invalid_argument("resolve_level: horizon must be >= 2");
  switch (schedule.mode) {
    case LevelSchedule::Mode::ClusterRate: {
      const double rho = schedule.value;
      if (!(rho > 0)) throw std::invalid_argument("resolve_level: rho must be > 0");
      const double u =
          std::log(static_cast<double>(n) / (model.mean_cycle() * rho));
      if (!(u > 0))
        throw std::invalid_argument(
            "resolve_level: horizon too small for the requested cluster rate");
      return u;
    }
    case LevelSchedule::Mode::TailRate: {
      const double lambda = schedule.value;
      if (!(lambda > 0)) throw std::invalid_argument("resolve_level: lambda must be > 0");
      const double target = lambda / static_cast<double>(n);
      if (target >= 1.0)
        throw std::invalid_argument(
            "resolve_level: horizon too small for the requested tail rate");
      if (model.construction == Construction::FiniteMean) {
        // Marginal of X is exactly Exp(1).
        return std::log(static_cast<double>(n) / lambda);
      }
      const StationaryMarginal marg(*model.cycle_law);
      return marg.quantile_tail(target);
    }
    case LevelSchedule::Mode::FixedLevel: {
      if (!(schedule.value > 0))
        throw std::invalid_argument("resolve_level: fixed level must be > 0");
      return schedule.value;
    }
  }
  throw std::invalid_argument("resolve_level: bad mode");
}

std::vector<ClusterRecord> clusters_by_cycle(const RegenerativePath& path, double u) {
  if (!(u > 0)) throw std::invalid_argument("clusters_by_cycle: level must be > 0");
  std::vector<ClusterRecord> out;
  std::int64_t start = 0;
  for (std::size_t i = 0; i < path.cycles(); ++i) {
    const std::int64_t end = path.csum[i];
    if (end > path.horizon) break;  // incomplete final cycle
    if (path.height[i] > u)
      out.push_back({start, path.len[i], u, ExtractMethod::Cycle, 0, i == 0});
    start = end;
  }
  return out;
}

namespace {

class RunsCollector {
 public:
  RunsCollector(double u, int gap) : u_(u), gap_(gap) {
    if (gap < 1) throw std::invalid_argument("clusters_by_runs: gap must be >= 1");
    if (!(u > 0)) throw std::invalid_argument("clusters_by_runs: level must be > 0");
  }

  void feed(std::int64_t k, double x) {
    if (x <= u_) return;
    if (count_ > 0 && k - last_ > gap_) flush();
    if (count_ == 0) start_ = k;
    ++count_;
    last_ = k;
  }

  std::vector<ClusterRecord> finish() {
    if (count_ > 0) flush();
    return std::move(out_);
  }

 private:
  void flush() {
    out_.push_back({start_, count_, u_, ExtractMethod::Runs, gap_, false});
    count_ = 0;
  }

  double u_;
  int gap_;
  std::int64_t start_ = 0;
  std::int64_t last_ = 0;
  std::int64_t count_ = 0;
  std::vector<ClusterRecord> out_;
};

}  // namespace

std::vector<ClusterRecord> clusters_by_runs(XStream& xs, double u, int gap) {
  RunsCollector rc(u, gap);
  XSample s;
  while (xs.next(s)) rc.feed(s.k, s.x);
  return rc.finish();
}

std::vector<ClusterRecord> clusters_by_runs(const RegenerativePath& path, double u,
                                            int gap) {
  RunsCollector rc(u, gap);
  std::int64_t start = 0;
  for (std::size_t i = 0; i < path.cycles(); ++i) {
    const std::int64_t end = std::min(path.csum[i], path.horizon);
    if (path.height[i] > u)
      for (std::int64_t k = start; k < end; ++k) rc.feed(k, path.height[i]);
    start = end;
    if (start >= path.horizon) break;
  }
  return rc.finish();
}

CycleScan scan_cycle_clusters(CycleSource& src, std::int64_t n, double u,
                              const std::function<void(const ClusterRecord&)>& sink) {
  if (!(u > 0)) throw std::invalid_argument("scan_cycle_clusters: level must be > 0");
  CycleScan scan;
  std::int64_t s = 0;
  for (std::int64_t k = 1; s < n; ++k) {
    const Cycle c = src.next();
    const std::int64_t end = s + c.len;
    scan.max_height = std::max(scan.max_height, c.height);
    if (end > n) break;  // incomplete final cycle
    scan.complete_cycles++;
    if (c.height > u) {
      const bool delayed = k == 1;
      if (delayed)
        scan.delayed_exceeding++;
      else
        scan.clusters++;
      if (sink) sink({s, c.len, u, ExtractMethod::Cycle, 0, delayed});
    }
    s = end;
  }
  return scan;
}

std::int64_t CountProcess::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
}

CountProcess count_process(XStream& xs, double u, std::int64_t windows) {
  if (windows < 1) throw std::invalid_argument("count_process: windows must be >= 1");
  CountProcess cp{windows, xs.horizon(), u,
                  std::vector<std::int64_t>(static_cast<std::size_t>(windows), 0)};
  XSample s;
  while (xs.next(s)) {
    if (s.x > u) cp.counts[static_cast<std::size_t>(s.k * windows / cp.horizon)]++;
  }
  return cp;
}

CountProcess count_process_from_cycles(CycleSource& src, std::int64_t n, double u,
                                       std::int64_t windows) {
  if (windows < 1) throw std::invalid_argument("count_process: windows must be >= 1");
  if (n < 1) throw std::invalid_argument("count_process: horizon must be >= 1");
  CountProcess cp{windows, n, u,
                  std::vector<std::int64_t>(static_cast<std::size_t>(windows), 0)};
  std::int64_t s = 0;
  while (s < n) {
    const Cycle c = src.next();
    const std::int64_t end = std::min(s + c.len, n);
    if (c.height > u)
      for (std::int64_t k = s; k < end; ++k)
        cp.counts[static_cast<std::size_t>(k * windows / n)]++;
    s += c.len;
  }
  return cp;
}

}  // namespace clustex
