#include "clustex/laws.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "clustex/zetafn.hpp"

namespace clustex {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::int64_t kMaxTable = 4096;
constexpr std::int64_t kMaxCustomSupport = 1000000;

double to_number(const std::string& text, const std::string& what) {
  std::size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(text, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("law descriptor: bad " + what + " '" + text + "'");
  }
  if (pos != text.size())
    throw std::invalid_argument("law descriptor: bad " + what + " '" + text + "'");
  return v;
}

// Smallest k with cdf[k-1] > u; cdf is strictly below 1 at the end for
// analytic-tail families, in which case the caller resolves the overflow.
std::int64_t invert_table(const std::vector<double>& cdf, double u) {
  auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  if (it == cdf.end()) return 0;  // beyond table
  return static_cast<std::int64_t>(it - cdf.begin()) + 1;
}

}  // namespace

LawDescriptor LawDescriptor::parse(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos || colon + 1 == text.size())
    throw std::invalid_argument("law descriptor '" + text +
                                "': expected family:parameter");
  const std::string family = text.substr(0, colon);
  const std::string arg = text.substr(colon + 1);

  LawDescriptor d;
  d.text = text;
  if (family == "delta") {
    d.family = Family::Delta;
    d.param = to_number(arg, "delta index");
  } else if (family == "geometric") {
    d.family = Family::Geometric;
    d.param = to_number(arg, "geometric parameter");
  } else if (family == "zeta") {
    d.family = Family::Zeta;
    d.param = to_number(arg, "zeta exponent");
  } else if (family == "custom") {
    d.family = Family::Custom;
    std::ifstream in(arg);
    if (!in) throw std::invalid_argument("custom law: cannot open '" + arg + "'");
    std::string line;
    std::int64_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      std::istringstream row(line);
      std::int64_t k;
      double mass;
      if (!(row >> k)) continue;  // blank line
      if (!(row >> mass))
        throw std::invalid_argument("custom law '" + arg + "' line " +
                                    std::to_string(lineno) + ": expected 'k probability'");
      d.table.emplace_back(k, mass);
    }
    if (d.table.empty())
      throw std::invalid_argument("custom law '" + arg + "': no entries");
  } else {
    throw std::invalid_argument("law descriptor '" + text + "': unknown family '" +
                                family + "'");
  }
  return d;
}

ClusterLaw ClusterLaw::make(const LawDescriptor& d) {
  switch (d.family) {
    case LawDescriptor::Family::Delta: {
      const double k = d.param;
      if (k < 1 || k != std::floor(k) || k > kMaxCustomSupport)
        throw std::invalid_argument("delta law: index must be a positive integer");
      return delta(static_cast<std::int64_t>(k));
    }
    case LawDescriptor::Family::Geometric:
      return geometric(d.param);
    case LawDescriptor::Family::Zeta:
      return zeta(d.param);
    case LawDescriptor::Family::Custom:
      return custom(d.table);
  }
  throw std::invalid_argument("law descriptor: unknown family");
}

ClusterLaw ClusterLaw::delta(std::int64_t k) {
  if (k < 1) throw std::invalid_argument("delta law: index must be >= 1");
  ClusterLaw law;
  law.family_ = LawDescriptor::Family::Delta;
  law.param_ = static_cast<double>(k);
  law.text_ = "delta:" + std::to_string(k);
  law.pmf_.assign(static_cast<std::size_t>(k), 0.0);
  law.pmf_.back() = 1.0;
  law.mean_ = static_cast<double>(k);
  law.finite_mean_ = true;
  law.finalize();
  return law;
}

ClusterLaw ClusterLaw::geometric(double p) {
  if (!(p > 0.0) || p > 1.0)
    throw std::invalid_argument("geometric law: parameter must be in (0, 1]");
  ClusterLaw law;
  law.family_ = LawDescriptor::Family::Geometric;
  law.param_ = p;
  {
    std::ostringstream t;
    t << "geometric:" << p;
    law.text_ = t.str();
  }
  std::int64_t K = 1;
  while (K < kMaxTable && std::pow(1.0 - p, static_cast<double>(K)) > 1e-18) ++K;
  law.pmf_.resize(static_cast<std::size_t>(K));
  for (std::int64_t k = 1; k <= K; ++k)
    law.pmf_[static_cast<std::size_t>(k - 1)] =
        p * std::pow(1.0 - p, static_cast<double>(k - 1));
  law.mean_ = 1.0 / p;
  law.finite_mean_ = true;
  law.finalize();
  return law;
}

ClusterLaw ClusterLaw::zeta(double s) {
  if (!(s > 1.0)) throw std::invalid_argument("zeta law: exponent must be > 1");
  ClusterLaw law;
  law.family_ = LawDescriptor::Family::Zeta;
  law.param_ = s;
  {
    std::ostringstream t;
    t << "zeta:" << s;
    law.text_ = t.str();
  }
  const double z = zetafn::riemann_zeta(s);
  law.pmf_.resize(kMaxTable);
  for (std::int64_t k = 1; k <= kMaxTable; ++k)
    law.pmf_[static_cast<std::size_t>(k - 1)] =
        std::pow(static_cast<double>(k), -s) / z;
  // Finiteness of the mean is declared analytically for the family.
  law.finite_mean_ = s > 2.0;
  law.mean_ = law.finite_mean_ ? zetafn::riemann_zeta(s - 1.0) / z : kInf;
  law.finalize();
  return law;
}

ClusterLaw ClusterLaw::custom(std::vector<std::pair<std::int64_t, double>> entries) {
  if (entries.empty()) throw std::invalid_argument("custom law: empty support");
  std::int64_t prev = 0;
  std::int64_t max_k = 0;
  double total = 0.0;
  for (const auto& [k, mass] : entries) {
    if (k < 1) throw std::invalid_argument("custom law: support must start at 1");
    if (k <= prev) throw std::invalid_argument("custom law: entries must have ascending k");
    if (k > kMaxCustomSupport) throw std::invalid_argument("custom law: support too large");
    if (mass < 0.0) throw std::invalid_argument("custom law: negative mass at k=" +
                                                std::to_string(k));
    prev = k;
    max_k = k;
    total += mass;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument("custom law: masses sum to " + std::to_string(total) +
                                ", not 1 within 1e-9");
  ClusterLaw law;
  law.family_ = LawDescriptor::Family::Custom;
  law.text_ = "custom";
  if (total <= 0.0) throw std::invalid_argument("custom law: no positive mass");
  law.pmf_.assign(static_cast<std::size_t>(max_k), 0.0);
  for (const auto& [k, mass] : entries)
    law.pmf_[static_cast<std::size_t>(k - 1)] = mass / total;
  double mean = 0.0;
  for (std::int64_t k = 1; k <= max_k; ++k)
    mean += static_cast<double>(k) * law.pmf_[static_cast<std::size_t>(k - 1)];
  law.mean_ = mean;
  law.finite_mean_ = true;
  law.finalize();
  if (law.gcd_ != 1)
    throw std::invalid_argument("custom law: gcd of support is " +
                                std::to_string(law.gcd_) +
                                ", need aperiodic support (gcd 1)");
  return law;
}

void ClusterLaw::finalize() {
  const std::int64_t K = table_size();
  tail_.assign(static_cast<std::size_t>(K) + 1, 0.0);
  // tail(K+1) from the analytic family tail; exact 0 for finite support.
  tail_[static_cast<std::size_t>(K)] = [&] {
    switch (family_) {
      case LawDescriptor::Family::Geometric:
        return std::pow(1.0 - param_, static_cast<double>(K));
      case LawDescriptor::Family::Zeta:
        return zetafn::tail_sum(param_, K + 1) / zetafn::riemann_zeta(param_);
      default:
        return 0.0;
    }
  }();
  for (std::int64_t k = K; k >= 1; --k)
    tail_[static_cast<std::size_t>(k - 1)] =
        tail_[static_cast<std::size_t>(k)] + pmf_[static_cast<std::size_t>(k - 1)];

  cum_.resize(static_cast<std::size_t>(K));
  pm_prefix_.resize(static_cast<std::size_t>(K));
  double pm = 0.0;
  for (std::int64_t k = 1; k <= K; ++k) {
    cum_[static_cast<std::size_t>(k - 1)] = 1.0 - tail_[static_cast<std::size_t>(k)];
    pm += tail_[static_cast<std::size_t>(k - 1)];
    pm_prefix_[static_cast<std::size_t>(k - 1)] = pm;
  }

  // Geometric and zeta supports contain k = 1, so only the tabulated part of
  // delta/custom laws can be periodic.
  std::int64_t gcd = 0;
  if (family_ == LawDescriptor::Family::Geometric ||
      family_ == LawDescriptor::Family::Zeta) {
    gcd = 1;
  } else {
    for (std::int64_t k = 1; k <= K && gcd != 1; ++k)
      if (pmf_[static_cast<std::size_t>(k - 1)] > 0.0) gcd = std::gcd(gcd, k);
  }
  gcd_ = gcd == 0 ? 1 : gcd;

  if (finite_mean_) {
    delay_cum_.resize(static_cast<std::size_t>(K));
    for (std::int64_t j = 1; j <= K; ++j)
      delay_cum_[static_cast<std::size_t>(j - 1)] =
          pm_prefix_[static_cast<std::size_t>(j - 1)] / mean_;
  }
}

double ClusterLaw::pmf(std::int64_t k) const {
  if (k < 1) return 0.0;
  if (k <= table_size()) return pmf_[static_cast<std::size_t>(k - 1)];
  switch (family_) {
    case LawDescriptor::Family::Geometric:
      return param_ * std::pow(1.0 - param_, static_cast<double>(k - 1));
    case LawDescriptor::Family::Zeta:
      return std::pow(static_cast<double>(k), -param_) / zetafn::riemann_zeta(param_);
    default:
      return 0.0;
  }
}

double ClusterLaw::tail(std::int64_t m) const {
  if (m < 1) m = 1;
  if (m <= table_size() + 1) return tail_[static_cast<std::size_t>(m - 1)];
  switch (family_) {
    case LawDescriptor::Family::Geometric:
      return std::pow(1.0 - param_, static_cast<double>(m - 1));
    case LawDescriptor::Family::Zeta:
      return zetafn::tail_sum(param_, m) / zetafn::riemann_zeta(param_);
    default:
      return 0.0;
  }
}

double ClusterLaw::partial_mean(std::int64_t m) const {
  if (m < 1) return 0.0;
  const std::int64_t K = table_size();
  if (m <= K) return pm_prefix_[static_cast<std::size_t>(m - 1)];
  double pm = pm_prefix_[static_cast<std::size_t>(K - 1)];
  for (std::int64_t k = K + 1; k <= m; ++k) pm += tail(k);
  return pm;
}

double ClusterLaw::tail_of_tails(std::int64_t m) const {
  if (!finite_mean_)
    throw std::invalid_argument("tail_of_tails: law has infinite mean");
  if (m < 1) m = 1;
  switch (family_) {
    case LawDescriptor::Family::Geometric:
      return std::pow(1.0 - param_, static_cast<double>(m - 1)) / param_;
    case LawDescriptor::Family::Zeta: {
      // sum_{j>=m} tail(j) = sum_{k>=m} k g_k - (m-1) tail(m)
      const double z = zetafn::riemann_zeta(param_);
      return zetafn::tail_sum(param_ - 1.0, m) / z -
             static_cast<double>(m - 1) * tail(m);
    }
    default: {
      double s = 0.0;
      for (std::int64_t j = m; j <= table_size(); ++j) s += tail(j);
      return s;
    }
  }
}

namespace {

// Values this large are never resolved by a horizon (or a censoring height),
// so saturating keeps the inverse transform exact in distribution for every
// event an experiment can observe.
constexpr std::int64_t kSampleCap = std::int64_t{1} << 62;

}  // namespace

std::int64_t ClusterLaw::quantile(double u) const {
  if (const std::int64_t k = invert_table(cum_, u); k > 0) return k;
  // Beyond the table: find the smallest k with tail(k+1) < 1-u against the
  // analytic tail (doubling bracket, then bisection).
  const double w = 1.0 - u;
  std::int64_t lo = table_size();  // tail(lo+1) >= w
  std::int64_t hi = lo * 2;
  while (tail(hi + 1) >= w) {
    lo = hi;
    if (hi >= kSampleCap) return kSampleCap;
    hi = hi > kSampleCap / 2 ? kSampleCap : hi * 2;
  }
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (tail(mid + 1) >= w)
      lo = mid;
    else
      hi = mid;
  }
  return hi;
}

double ClusterLaw::delay_tail(std::int64_t m) const { return tail_of_tails(m) / mean_; }

std::int64_t ClusterLaw::delay_quantile(double u) const {
  if (!finite_mean_)
    throw std::invalid_argument(
        "delay law: finite-mean construction requires a finite-mean law, got " + text_);
  if (const std::int64_t j = invert_table(delay_cum_, u); j > 0) return j;
  // Finite support: the cumulative table ends within an ulp of 1.
  if (tail(table_size() + 1) <= 0.0) return table_size();
  const double w = 1.0 - u;
  std::int64_t lo = table_size();
  std::int64_t hi = lo * 2;
  while (delay_tail(hi + 1) >= w) {
    lo = hi;
    if (hi >= kSampleCap) return kSampleCap;
    hi = hi > kSampleCap / 2 ? kSampleCap : hi * 2;
  }
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (delay_tail(mid + 1) >= w)
      lo = mid;
    else
      hi = mid;
  }
  return hi;
}

std::int64_t ClusterLaw::sample_stationary_delay(Rng& rng) const {
  return delay_quantile(rng.next_double());
}

CensoredCycleLaw::CensoredCycleLaw(ClusterLaw base) : base_(std::move(base)) {
  // nu = sum_m tail(m) e^{-(m-1)}; the factor e^{-(m-1)} caps the horizon.
  double nu = 0.0;
  std::vector<double> cycle_tails;  // P(tau >= m), m = 1..
  for (std::int64_t m = 1;; ++m) {
    const double t = base_.tail(m) * std::exp(-static_cast<double>(m - 1));
    if (t < 1e-19 && m > 1) break;
    cycle_tails.push_back(t);
    nu += t;
    if (m > 2000) break;
  }
  nu_ = nu;

  const std::int64_t M = static_cast<std::int64_t>(cycle_tails.size());
  delay_cum_.resize(static_cast<std::size_t>(M));
  double suffix = 0.0;  // sum_{m>j} P(tau >= m)
  for (std::int64_t j = M; j >= 1; --j) {
    delay_cum_[static_cast<std::size_t>(j - 1)] = 1.0 - suffix / nu_;
    suffix += cycle_tails[static_cast<std::size_t>(j - 1)];
  }

  sizebias_cum_.resize(static_cast<std::size_t>(M));
  double acc = 0.0;
  for (std::int64_t m = 1; m <= M; ++m) {
    acc += static_cast<double>(m) * cycle_pmf(m) / nu_;
    sizebias_cum_[static_cast<std::size_t>(m - 1)] = acc;
  }
}

double CensoredCycleLaw::cycle_pmf(std::int64_t j) const {
  if (j < 1) return 0.0;
  const double e1j = std::exp(-static_cast<double>(j - 1));
  const double einv = std::exp(-1.0);
  return e1j * (base_.tail(j) * (1.0 - einv) + base_.pmf(j) * einv);
}

double CensoredCycleLaw::cycle_tail(std::int64_t m) const {
  if (m < 1) m = 1;
  return base_.tail(m) * std::exp(-static_cast<double>(m - 1));
}

std::pair<std::int64_t, double> CensoredCycleLaw::sample_cycle(Rng& rng) const {
  const std::int64_t zeta = base_.sample(rng);
  const double y = rng.exp1();
  const auto ceil_y = static_cast<std::int64_t>(std::ceil(y));
  return {std::min(zeta, ceil_y), y};
}

double CensoredCycleLaw::sample_height_given_len(std::int64_t j, Rng& rng) const {
  if (j < 1 || cycle_pmf(j) <= 0.0)
    throw std::invalid_argument("sample_height_given_len: tau = " + std::to_string(j) +
                                " is unreachable under " + base_.descriptor());
  const double einv = std::exp(-1.0);
  const double a = base_.tail(j) * (1.0 - einv);
  const double b = base_.pmf(j) * einv;
  const double w_trunc = a / (a + b);
  if (rng.next_double() < w_trunc) {
    // Exp(1) restricted to (j-1, j]; by memorylessness (j-1) + (Exp(1) | <= 1).
    const double u = rng.next_double();
    return static_cast<double>(j - 1) - std::log1p(-(1.0 - u) * (1.0 - einv));
  }
  return static_cast<double>(j) + rng.exp1();
}

std::int64_t CensoredCycleLaw::sample_stationary_delay(Rng& rng) const {
  const double u = rng.next_double();
  if (const std::int64_t j = invert_table(delay_cum_, u); j > 0) return j;
  return static_cast<std::int64_t>(delay_cum_.size());
}

InitialVector CensoredCycleLaw::sample_initial(Rng& rng) const {
  const double u = rng.next_double();
  std::int64_t total = invert_table(sizebias_cum_, u);
  if (total == 0) total = static_cast<std::int64_t>(sizebias_cum_.size());
  auto defect = static_cast<std::int64_t>(rng.next_double() * static_cast<double>(total));
  if (defect >= total) defect = total - 1;
  const std::int64_t excess = total - defect;
  return {defect, excess, sample_height_given_len(total, rng)};
}

}  // namespace clustex
