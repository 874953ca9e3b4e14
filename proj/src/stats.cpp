#include "clustex/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace clustex {

void EmpiricalPmf::add(std::int64_t size, std::int64_t count) {
  if (size < 1) throw std::invalid_argument("EmpiricalPmf: sizes must be >= 1");
  if (count < 1) return;
  counts_[size] += count;
  total_ += count;
}

void EmpiricalPmf::merge(const EmpiricalPmf& other) {
  for (const auto& [size, count] : other.counts_) add(size, count);
}

std::int64_t EmpiricalPmf::count(std::int64_t size) const {
  const auto it = counts_.find(size);
  return it == counts_.end() ? 0 : it->second;
}

double EmpiricalPmf::prob(std::int64_t size) const {
  if (total_ == 0) throw std::invalid_argument("EmpiricalPmf: empty");
  return static_cast<double>(count(size)) / static_cast<double>(total_);
}

double EmpiricalPmf::se(std::int64_t size) const {
  const double p = prob(size);
  return std::sqrt(p * (1.0 - p) / static_cast<double>(total_));
}

std::int64_t EmpiricalPmf::max_size() const {
  return counts_.empty() ? 0 : counts_.rbegin()->first;
}

EmpiricalPmf EmpiricalPmf::from_sizes(const std::vector<std::int64_t>& sizes) {
  if (sizes.empty()) throw std::invalid_argument("EmpiricalPmf: no sizes");
  EmpiricalPmf p;
  for (const std::int64_t s : sizes) p.add(s);
  return p;
}

EmpiricalPmf EmpiricalPmf::from_clusters(const std::vector<ClusterRecord>& clusters) {
  if (clusters.empty()) throw std::invalid_argument("EmpiricalPmf: no clusters");
  EmpiricalPmf p;
  for (const auto& c : clusters) p.add(c.size);
  return p;
}

double tv_distance(const EmpiricalPmf& p, const ClusterLaw& g) {
  if (p.total() == 0) throw std::invalid_argument("tv_distance: empty pmf");
  const std::int64_t jmax = p.max_size();
  double sum = 0.0;
  for (std::int64_t j = 1; j <= jmax; ++j)
    sum += std::abs(p.prob(j) - g.pmf(j));
  sum += g.tail(jmax + 1);  // empirical mass is zero beyond jmax
  return 0.5 * sum;
}

double tv_distance(const EmpiricalPmf& p, const EmpiricalPmf& q) {
  if (p.total() == 0 || q.total() == 0)
    throw std::invalid_argument("tv_distance: empty pmf");
  double sum = 0.0;
  auto ip = p.counts().begin();
  auto iq = q.counts().begin();
  while (ip != p.counts().end() || iq != q.counts().end()) {
    if (iq == q.counts().end() || (ip != p.counts().end() && ip->first < iq->first)) {
      sum += p.prob(ip->first);
      ++ip;
    } else if (ip == p.counts().end() || iq->first < ip->first) {
      sum += q.prob(iq->first);
      ++iq;
    } else {
      sum += std::abs(p.prob(ip->first) - q.prob(iq->first));
      ++ip;
      ++iq;
    }
  }
  return 0.5 * sum;
}

namespace {

constexpr int kGammaMaxIter = 600;
constexpr double kGammaEps = 3e-15;

// Lower regularized incomplete gamma by series (x < a + 1).
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < kGammaMaxIter; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * kGammaEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper regularized incomplete gamma by continued fraction (x >= a + 1).
double gamma_q_cf(double a, double x) {
  const double kFpMin = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / kFpMin;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kGammaMaxIter; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kFpMin) d = kFpMin;
    c = b + an / c;
    if (std::abs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kGammaEps) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double gamma_q(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_q: bad arguments");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_cf(a, x);
}

double chi_square_pvalue(double statistic, int dof) {
  if (dof < 1) throw std::invalid_argument("chi_square_pvalue: dof must be >= 1");
  if (statistic <= 0.0) return 1.0;
  return gamma_q(0.5 * dof, 0.5 * statistic);
}

ChiSquareResult chi_square_gof(const EmpiricalPmf& p, const ClusterLaw& g,
                               double min_expected) {
  const std::int64_t n = p.total();
  if (n == 0) throw std::invalid_argument("chi_square_gof: empty sample");

  // Walk sizes upward merging cells until each expected count reaches
  // min_expected; everything from the first size whose expected tail falls
  // below min_expected becomes the final tail cell.
  struct Cell {
    double observed;
    double expected;
  };
  std::vector<Cell> cells;
  double acc_obs = 0.0, acc_exp = 0.0;
  std::int64_t j = 1;
  for (; j <= 100000; ++j) {
    const double tail_exp = static_cast<double>(n) * g.tail(j);
    if (tail_exp < min_expected || g.tail(j) <= 0.0) break;
    acc_obs += static_cast<double>(p.count(j));
    acc_exp += static_cast<double>(n) * g.pmf(j);
    const double rest = static_cast<double>(n) * g.tail(j + 1);
    if (acc_exp >= min_expected && rest >= min_expected) {
      cells.push_back({acc_obs, acc_exp});
      acc_obs = acc_exp = 0.0;
    }
  }
  // Tail cell: remaining observed mass at sizes >= j plus the expected tail.
  double tail_obs = acc_obs, tail_exp = acc_exp;
  for (const auto& [size, count] : p.counts())
    if (size >= j) tail_obs += static_cast<double>(count);
  tail_exp += static_cast<double>(n) * g.tail(j);
  if (tail_obs > 0.0 || tail_exp > 0.0) {
    if (!cells.empty() && tail_exp < min_expected) {
      cells.back().observed += tail_obs;
      cells.back().expected += tail_exp;
    } else if (tail_exp > 0.0) {
      cells.push_back({tail_obs, tail_exp});
    }
  }

  ChiSquareResult r;
  r.cells = static_cast<int>(cells.size());
  if (cells.size() < 2) {
    r.degenerate = true;
    return r;  // statistic 0, p 1: a single cell carries no fit information
  }
  for (const auto& c : cells)
    r.statistic += (c.observed - c.expected) * (c.observed - c.expected) / c.expected;
  r.dof = static_cast<int>(cells.size()) - 1;
  r.p_value = chi_square_pvalue(r.statistic, r.dof);
  return r;
}

double kolmogorov_tail(double lambda) {
  if (lambda <= 0.04) return 1.0;
  double sum = 0.0;
  for (int j = 1; j <= 200; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += (j % 2 == 1) ? term : -term;
    if (term < 1e-18) break;
  }
  return std::min(1.0, std::max(0.0, 2.0 * sum));
}

double ks_asymptotic_pvalue(double d, std::size_t n) {
  const double sn = std::sqrt(static_cast<double>(n));
  return kolmogorov_tail((sn + 0.12 + 0.11 / sn) * d);
}

KsResult ks_test_cdf(std::vector<double> samples,
                     const std::function<double(double)>& cdf) {
  if (samples.empty()) throw std::invalid_argument("ks_test_cdf: empty sample");
  std::sort(samples.begin(), samples.end());
  const auto n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max(d, (static_cast<double>(i) + 1.0) / n - f);
    d = std::max(d, f - static_cast<double>(i) / n);
  }
  return {d, ks_asymptotic_pvalue(d, samples.size()), samples.size()};
}

KsResult ks_exponential_gaps(std::vector<double> gaps, std::size_t min_gaps) {
  if (gaps.size() < min_gaps)
    throw std::invalid_argument("ks_exponential_gaps: need at least " +
                                std::to_string(min_gaps) + " gaps, got " +
                                std::to_string(gaps.size()));
  double mean = 0.0;
  for (const double g : gaps) mean += g;
  mean /= static_cast<double>(gaps.size());
  if (!(mean > 0.0)) throw std::invalid_argument("ks_exponential_gaps: zero mean");
  for (double& g : gaps) g /= mean;
  return ks_test_cdf(std::move(gaps), [](double t) { return -std::expm1(-t); });
}

double dispersion_index(const std::vector<std::int64_t>& counts) {
  if (counts.size() < 30)
    throw std::invalid_argument("dispersion_index: need at least 30 counts");
  const auto n = static_cast<double>(counts.size());
  double sum = 0.0;
  for (const std::int64_t c : counts) sum += static_cast<double>(c);
  const double mean = sum / n;
  if (!(mean > 0.0)) throw std::invalid_argument("dispersion_index: zero mean");
  double ss = 0.0;
  for (const std::int64_t c : counts) {
    const double d = static_cast<double>(c) - mean;
    ss += d * d;
  }
  return ss / (n - 1.0) / mean;
}

void BlockTally::merge(const BlockTally& other) {
  blocks += other.blocks;
  hit += other.hit;
  exceedances += other.exceedances;
  horizon += other.horizon;
}

BlockScan scan_blocks(CycleSource& src, std::int64_t n, double u, std::int64_t b) {
  if (b < 1 || b > n) throw std::invalid_argument("scan_blocks: need 1 <= b <= n");
  if (!(u > 0)) throw std::invalid_argument("scan_blocks: level must be > 0");
  BlockScan scan;
  const std::int64_t blocks = n / b;
  const std::int64_t n_eff = blocks * b;
  scan.tally.blocks = blocks;
  scan.tally.horizon = n_eff;
  std::int64_t s = 0;
  std::int64_t last_hit = -1;
  while (s < n) {
    const Cycle c = src.next();
    const std::int64_t end = s + c.len;
    scan.max_height = std::max(scan.max_height, c.height);
    if (c.height > u && s < n_eff) {
      const std::int64_t hi = std::min(end, n_eff);
      scan.tally.exceedances += hi - s;
      std::int64_t blo = s / b;
      const std::int64_t bhi = (hi - 1) / b;
      if (blo <= last_hit) blo = last_hit + 1;
      if (bhi >= blo) {
        scan.tally.hit += bhi - blo + 1;
        last_hit = bhi;
      }
    }
    s = end;
  }
  return scan;
}

ExtremalIndexEstimate extremal_index_blocks(const BlockTally& tally, std::int64_t b,
                                            double u, std::int64_t replications) {
  if (tally.exceedances == 0)
    throw std::invalid_argument(
        "extremal_index_blocks: no exceedances (level too high for horizon)");
  if (tally.hit >= tally.blocks)
    throw std::invalid_argument(
        "extremal_index_blocks: every block exceeds (level too low)");
  const double q =
      static_cast<double>(tally.exceedances) / static_cast<double>(tally.horizon);
  const double frac =
      static_cast<double>(tally.hit) / static_cast<double>(tally.blocks);
  double theta = std::log1p(-frac) / (static_cast<double>(b) * std::log1p(-q));
  theta = std::min(1.05, std::max(0.0, theta));
  return {theta, IndexMethod::Blocks, b, u, replications, q};
}

MaximaCheck maxima_check(std::int64_t below, std::int64_t replications, double theta,
                         double lambda) {
  if (replications < 1) throw std::invalid_argument("maxima_check: no replications");
  const double emp = static_cast<double>(below) / static_cast<double>(replications);
  const double pred = std::exp(-theta * lambda);
  const double se = std::sqrt(emp * (1.0 - emp) / static_cast<double>(replications));
  return {emp, pred, se, replications};
}

}  // namespace clustex
