#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "clustex/rng.hpp"

namespace clustex {

// Descriptor grammar: delta:k | geometric:p | zeta:s | custom:<path>
// Custom files hold one "k probability" pair per line, ascending k.
struct LawDescriptor {
  enum class Family { Delta, Geometric, Zeta, Custom };
  Family family = Family::Delta;
  double param = 1.0;
  std::vector<std::pair<std::int64_t, double>> table;  // custom entries only
  std::string text;                                    // canonical form

  static LawDescriptor parse(const std::string& text);
};

// Cluster-size law G = {g_k}_{k>=1}. Builtin families carry exact analytic
// tails so high-order tail values stay exact; custom laws are finite tables.
// Immutable after construction; samplers hold no state beyond the caller's
// RNG stream, so a law can be shared freely across threads.
class ClusterLaw {
 public:
  static ClusterLaw make(const LawDescriptor& d);
  static ClusterLaw delta(std::int64_t k);
  static ClusterLaw geometric(double p);
  static ClusterLaw zeta(double s);
  static ClusterLaw custom(std::vector<std::pair<std::int64_t, double>> entries);

  double pmf(std::int64_t k) const;   // g_k
  double tail(std::int64_t m) const;  // sum_{i>=m} g_i
  double partial_mean(std::int64_t m) const;  // E(zeta ^ m) = sum_{k<=m} tail(k)
  double tail_of_tails(std::int64_t m) const;  // sum_{j>=m} tail(j); finite mean only

  double mean() const { return mean_; }  // +infinity for heavy builtin tails
  bool finite_mean() const { return finite_mean_; }
  std::int64_t support_gcd() const { return gcd_; }
  bool aperiodic() const { return gcd_ == 1; }
  std::int64_t table_size() const { return static_cast<std::int64_t>(pmf_.size()); }
  const std::string& descriptor() const { return text_; }

  // Smallest k with P(zeta <= k) > u. Values beyond the precomputed table are
  // resolved against the analytic tail, so arbitrarily large draws stay exact
  // in distribution (saturating at 2^62, far beyond any horizon).
  std::int64_t quantile(double u) const;
  std::int64_t sample(Rng& rng) const { return quantile(rng.next_double()); }

  // Stationary delay P(tau_1 = j) = tail(j)/mean; requires a finite mean.
  std::int64_t delay_quantile(double u) const;
  std::int64_t sample_stationary_delay(Rng& rng) const;

 private:
  ClusterLaw() = default;
  void finalize();
  double delay_tail(std::int64_t m) const;  // sum_{j>=m} tail(j) / mean

  LawDescriptor::Family family_ = LawDescriptor::Family::Delta;
  double param_ = 1.0;
  std::string text_;
  std::vector<double> pmf_;       // g_1..g_K
  std::vector<double> tail_;      // tail(1)..tail(K+1)
  std::vector<double> cum_;       // P(zeta <= k), k = 1..K
  std::vector<double> pm_prefix_; // E(zeta ^ m), m = 1..K
  std::vector<double> delay_cum_; // P(tau_1 <= j), j = 1..K (finite mean only)
  double mean_ = 1.0;
  bool finite_mean_ = true;
  std::int64_t gcd_ = 1;
};

// Initial state (defect, excess, height) of the stationary censored chain:
// P(defect=i, excess=j) = p_{i+j}/nu and height | (i, j) follows the
// conditional height law of a cycle of length i+j.
struct InitialVector {
  std::int64_t defect;  // >= 0
  std::int64_t excess;  // tau_1 >= 1
  double height;        // Y_1 > 0
};

// Cycle law of tau = zeta ^ ceil(Y), Y ~ Exp(1) independent of zeta ~ G.
// Closed forms:
//   p_j      = tail(j) (e^{-(j-1)} - e^{-j}) + g_j e^{-j}
//   P(tau>=m) = tail(m) e^{-(m-1)}
//   nu       = sum_m tail(m) e^{-(m-1)}  <= 1/(1 - e^{-1})
class CensoredCycleLaw {
 public:
  explicit CensoredCycleLaw(ClusterLaw base);

  const ClusterLaw& base() const { return base_; }
  double cycle_pmf(std::int64_t j) const;
  double cycle_tail(std::int64_t m) const;
  double mean_cycle() const { return nu_; }

  // Draws (zeta, Y) independently and censors: returns (zeta ^ ceil(Y), Y).
  std::pair<std::int64_t, double> sample_cycle(Rng& rng) const;

  // Y | tau = j: mixture of Exp(1) truncated to (j-1, j] and j + Exp(1),
  // with weights tail(j)(e^{-(j-1)}-e^{-j})/p_j and g_j e^{-j}/p_j.
  double sample_height_given_len(std::int64_t j, Rng& rng) const;

  // Excess alone: P(chi = j) = P(tau >= j)/nu.
  std::int64_t sample_stationary_delay(Rng& rng) const;

  // Two-stage draw: total m = defect+excess with size-biased pmf m p_m / nu,
  // split uniformly over the m admissible (defect, excess) pairs, then the
  // height from the conditional law of a length-m cycle.
  InitialVector sample_initial(Rng& rng) const;

 private:
  ClusterLaw base_;
  double nu_ = 1.0;
  std::vector<double> delay_cum_;     // P(chi <= j)
  std::vector<double> sizebias_cum_;  // P(defect + excess <= m)
};

}  // namespace clustex
