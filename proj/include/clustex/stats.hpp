#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "clustex/exceed.hpp"
#include "clustex/laws.hpp"
#include "clustex/pathgen.hpp"

namespace clustex {

// Normalized size frequencies with binomial standard errors. Merging partial
// tallies is associative, so replications can aggregate in any order.
class EmpiricalPmf {
 public:
  void add(std::int64_t size, std::int64_t count = 1);
  void merge(const EmpiricalPmf& other);

  std::int64_t total() const { return total_; }
  std::int64_t count(std::int64_t size) const;
  double prob(std::int64_t size) const;
  double se(std::int64_t size) const;
  std::int64_t max_size() const;
  const std::map<std::int64_t, std::int64_t>& counts() const { return counts_; }

  static EmpiricalPmf from_sizes(const std::vector<std::int64_t>& sizes);
  static EmpiricalPmf from_clusters(const std::vector<ClusterRecord>& clusters);

 private:
  std::map<std::int64_t, std::int64_t> counts_;
  std::int64_t total_ = 0;
};

// Half-L1 distance, with the law's analytic tail counted beyond the
// empirical support.
double tv_distance(const EmpiricalPmf& p, const ClusterLaw& g);
double tv_distance(const EmpiricalPmf& p, const EmpiricalPmf& q);

// Upper regularized incomplete gamma Q(a, x) and the chi-square tail.
double gamma_q(double a, double x);
double chi_square_pvalue(double statistic, int dof);

struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
  int cells = 0;
  bool degenerate = false;  // fewer than 2 cells after merging; reported as pass
};

// Pearson goodness of fit against G with tail cells merged so every expected
// count reaches min_expected. Throws when the sample is empty.
ChiSquareResult chi_square_gof(const EmpiricalPmf& p, const ClusterLaw& g,
                               double min_expected = 5.0);

// Two-sided asymptotic Kolmogorov tail Q(lambda) = 2 sum (-1)^{j-1} e^{-2j^2 lambda^2}
double kolmogorov_tail(double lambda);
double ks_asymptotic_pvalue(double d, std::size_t n);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
};

KsResult ks_test_cdf(std::vector<double> samples,
                     const std::function<double(double)>& cdf);

// Gaps scaled by their sample mean against Exp(1); needs at least min_gaps.
KsResult ks_exponential_gaps(std::vector<double> gaps, std::size_t min_gaps = 50);

// Sample variance / sample mean; needs >= 30 values and a positive mean.
double dispersion_index(const std::vector<std::int64_t>& counts);

// Pooled block bookkeeping for the extremal-index estimator. Only counts and
// sums, so merging is associative and order-independent.
struct BlockTally {
  std::int64_t blocks = 0;       // complete blocks scanned
  std::int64_t hit = 0;          // blocks containing an exceedance
  std::int64_t exceedances = 0;  // exceedances inside complete blocks
  std::int64_t horizon = 0;      // indices covered by complete blocks

  void merge(const BlockTally& other);
};

// Walks cycles over [0, blocks*b) and tallies exceedances of u and the blocks
// they touch; also reports the running maximum of X over [0, n).
struct BlockScan {
  BlockTally tally;
  double max_height = 0.0;
};

BlockScan scan_blocks(CycleSource& src, std::int64_t n, double u, std::int64_t b);

enum class IndexMethod { Blocks, Maxima };

struct ExtremalIndexEstimate {
  double theta = 0.0;
  IndexMethod method = IndexMethod::Blocks;
  std::int64_t block_len = 0;
  double level = 0.0;
  std::int64_t replications = 0;
  double q_hat = 0.0;
};

// theta = ln(1 - hit/blocks) / (b ln(1 - q)), clamped to [0, 1.05]. Throws
// when no exceedance was seen or every block was hit.
ExtremalIndexEstimate extremal_index_blocks(const BlockTally& tally, std::int64_t b,
                                            double u, std::int64_t replications);

struct MaximaCheck {
  double empirical = 0.0;  // P(M_n <= u_n) across replications
  double predicted = 0.0;  // e^{-theta lambda}
  double std_error = 0.0;  // binomial
  std::int64_t replications = 0;
};

MaximaCheck maxima_check(std::int64_t below, std::int64_t replications, double theta,
                         double lambda);

}  // namespace clustex
