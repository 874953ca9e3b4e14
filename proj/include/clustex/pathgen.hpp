#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "clustex/laws.hpp"
#include "clustex/rng.hpp"

namespace clustex {

enum class Construction { FiniteMean, Censored };

const char* to_string(Construction c);
Construction construction_from_string(const std::string& s);

// A cluster law together with the chosen construction. Immutable; shared
// across replication workers.
struct SequenceModel {
  Construction construction;
  ClusterLaw law;
  std::optional<CensoredCycleLaw> cycle_law;  // engaged iff censored

  static SequenceModel finite_mean(ClusterLaw g);
  static SequenceModel censored(ClusterLaw g);

  // Mean cycle length: mu for the finite-mean construction, nu for the
  // censored one.
  double mean_cycle() const;
};

struct Cycle {
  std::int64_t len;
  double height;
};

class CycleSource {
 public:
  virtual ~CycleSource() = default;
  virtual Cycle next() = 0;
};

// Delayed first cycle followed by i.i.d. cycles, per the construction:
//   finite-mean: tau_1 ~ tail(j)/mu, later tau ~ G; heights i.i.d. Exp(1)
//   censored:    (tau_1, Y_1) = (excess, height) of the initial vector,
//                later (tau, Y) = (zeta ^ ceil(Y), Y)
// Per cycle the RNG order is fixed: length-related draws first, then height.
class ModelCycles final : public CycleSource {
 public:
  ModelCycles(const SequenceModel& model, Rng rng) : model_(&model), rng_(rng) {}
  Cycle next() override;

 private:
  const SequenceModel* model_;
  Rng rng_;
  bool first_ = true;
};

// Materialized realization over [0, horizon): cycle lengths, heights, and
// partial sums S_k (csum[k] = tau_1 + ... + tau_{k+1}).
struct RegenerativePath {
  Construction construction;
  std::int64_t horizon = 0;
  std::vector<std::int64_t> len;
  std::vector<double> height;
  std::vector<std::int64_t> csum;

  std::size_t cycles() const { return len.size(); }
  // X_k = height of the cycle covering k.
  double x_at(std::int64_t k) const;
  // Index (0-based) of the cycle covering k.
  std::size_t cycle_covering(std::int64_t k) const;
};

RegenerativePath build_path(const SequenceModel& model, std::int64_t n, Rng rng);

struct XSample {
  std::int64_t k;
  double x;
  std::int64_t cycle;  // 1-based cycle index
};

// Streaming view of X_0..X_{n-1}; O(1) memory beyond the current cycle and
// identical to build_path for the same seed.
class XStream {
 public:
  XStream(const SequenceModel& model, std::int64_t n, Rng rng)
      : gen_(model, rng), n_(n) {}

  std::int64_t horizon() const { return n_; }

  bool next(XSample& out) {
    if (k_ >= n_) return false;
    while (k_ >= cycle_end_) {
      const Cycle c = gen_.next();
      cycle_end_ += c.len;
      height_ = c.height;
      ++cycle_;
    }
    out = {k_, height_, cycle_};
    ++k_;
    return true;
  }

 private:
  ModelCycles gen_;
  std::int64_t n_;
  std::int64_t k_ = 0;
  std::int64_t cycle_end_ = 0;
  std::int64_t cycle_ = 0;
  double height_ = 0.0;
};

}  // namespace clustex
