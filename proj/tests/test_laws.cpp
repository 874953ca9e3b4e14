#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <vector>

#include "clustex/laws.hpp"
#include "clustex/oracle.hpp"
#include "clustex/rng.hpp"
#include "clustex/zetafn.hpp"

using namespace clustex;

namespace {

constexpr double kEInv = 0.36787944117144233;

double tv_to_exact(const std::map<std::int64_t, std::int64_t>& counts,
                   std::int64_t total, const ClusterLaw& g) {
  double tv = 0.0;
  std::int64_t jmax = 0;
  for (const auto& [k, c] : counts) jmax = std::max(jmax, k);
  for (std::int64_t j = 1; j <= jmax; ++j) {
    const auto it = counts.find(j);
    const double p = it == counts.end()
                         ? 0.0
                         : static_cast<double>(it->second) / static_cast<double>(total);
    tv += std::abs(p - g.pmf(j));
  }
  return 0.5 * (tv + g.tail(jmax + 1));
}

}  // namespace

TEST_SUITE_BEGIN("laws");

TEST_CASE("zeta function matches reference constants") {
  CHECK(zetafn::riemann_zeta(2.0) == doctest::Approx(1.6449340668482264).epsilon(1e-14));
  CHECK(zetafn::riemann_zeta(4.0) == doctest::Approx(1.0823232337111382).epsilon(1e-14));
  CHECK(zetafn::riemann_zeta(3.0) == doctest::Approx(1.2020569031595943).epsilon(1e-14));
  CHECK(zetafn::riemann_zeta(1.5) == doctest::Approx(2.6123753486854883).epsilon(1e-14));
  // Tail sum bracketed by brute-force partial sums plus integral bounds.
  const double brute = [] {
    double s = 0.0;
    for (std::int64_t k = 400000; k >= 7; --k)
      s += std::pow(static_cast<double>(k), -1.5);
    return s;
  }();
  const double lo = brute + 2.0 / std::sqrt(400001.0);
  const double hi = brute + 2.0 / std::sqrt(400000.0);
  const double t = zetafn::tail_sum(1.5, 7);
  CHECK(t >= lo - 1e-12);
  CHECK(t <= hi + 1e-12);
}

TEST_CASE("descriptor parsing") {
  CHECK(LawDescriptor::parse("delta:3").family == LawDescriptor::Family::Delta);
  CHECK(LawDescriptor::parse("geometric:0.5").param == doctest::Approx(0.5));
  CHECK(LawDescriptor::parse("zeta:1.5").param == doctest::Approx(1.5));
  CHECK_THROWS_AS(LawDescriptor::parse("delta"), std::invalid_argument);
  CHECK_THROWS_AS(LawDescriptor::parse("weird:1"), std::invalid_argument);
  CHECK_THROWS_AS(LawDescriptor::parse("geometric:abc"), std::invalid_argument);
  CHECK_THROWS_AS(LawDescriptor::parse("custom:/no/such/file"), std::invalid_argument);

  const auto path = std::filesystem::temp_directory_path() / "clustex_custom_law.txt";
  {
    std::ofstream f(path);
    f << "# two-point law\n1 0.5\n5 0.5\n";
  }
  const auto d = LawDescriptor::parse("custom:" + path.string());
  REQUIRE(d.table.size() == 2);
  const ClusterLaw law = ClusterLaw::make(d);
  CHECK(law.pmf(1) == doctest::Approx(0.5));
  CHECK(law.pmf(5) == doctest::Approx(0.5));
  CHECK(law.mean() == doctest::Approx(3.0));
}

TEST_CASE("delta laws") {
  const ClusterLaw d1 = ClusterLaw::delta(1);
  CHECK(d1.pmf(1) == 1.0);
  CHECK(d1.mean() == 1.0);
  CHECK(d1.tail(1) == 1.0);
  CHECK(d1.tail(2) == 0.0);
  CHECK(d1.aperiodic());

  // delta(k>1) is periodic; the builtin stays constructible (its censored
  // cycle law is aperiodic regardless) and reports the gcd.
  const ClusterLaw d3 = ClusterLaw::delta(3);
  CHECK(d3.support_gcd() == 3);
  CHECK_FALSE(d3.aperiodic());
  Rng rng(1);
  for (int i = 0; i < 100; ++i) CHECK(d3.sample(rng) == 3);
}

TEST_CASE("geometric pmf, tail and mean against summation oracles") {
  const ClusterLaw g = ClusterLaw::geometric(0.5);
  for (std::int64_t k = 1; k <= 20; ++k)
    CHECK(g.pmf(k) ==
          doctest::Approx(std::pow(2.0, -static_cast<double>(k))).epsilon(1e-14));
  double mean = 0.0, tail3 = 0.0;
  for (std::int64_t k = 200; k >= 1; --k) {
    mean += static_cast<double>(k) * std::pow(2.0, -static_cast<double>(k));
    if (k >= 3) tail3 += std::pow(2.0, -static_cast<double>(k));
  }
  CHECK(g.mean() == doctest::Approx(mean).epsilon(1e-12));
  CHECK(g.tail(3) == doctest::Approx(tail3).epsilon(1e-12));
  CHECK(g.tail(3) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("zeta law: infinite mean flag and exact tails") {
  const ClusterLaw z = ClusterLaw::zeta(1.5);
  CHECK_FALSE(z.finite_mean());
  CHECK(std::isinf(z.mean()));
  CHECK(z.tail(2) ==
        doctest::Approx(1.0 - 1.0 / zetafn::riemann_zeta(1.5)).epsilon(1e-13));
  const ClusterLaw z3 = ClusterLaw::zeta(3.0);
  CHECK(z3.finite_mean());
  CHECK(z3.mean() == doctest::Approx(zetafn::riemann_zeta(2.0) /
                                     zetafn::riemann_zeta(3.0))
                         .epsilon(1e-13));
}

TEST_CASE("custom law validation") {
  CHECK_THROWS_AS(ClusterLaw::custom({}), std::invalid_argument);
  CHECK_THROWS_AS(ClusterLaw::custom({{1, -0.1}, {2, 1.1}}), std::invalid_argument);
  CHECK_THROWS_AS(ClusterLaw::custom({{1, 0.5}, {2, 0.4}}), std::invalid_argument);
  CHECK_THROWS_AS(ClusterLaw::custom({{2, 0.5}, {4, 0.5}}), std::invalid_argument);
  CHECK_THROWS_AS(ClusterLaw::custom({{0, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(ClusterLaw::custom({{2, 0.5}, {1, 0.5}}), std::invalid_argument);
  // In-tolerance deviation is renormalized.
  const ClusterLaw ok = ClusterLaw::custom({{1, 0.5 + 2e-10}, {2, 0.5}});
  CHECK(ok.tail(1) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("sampling: geometric empirical pmf within TV 0.005 of 2^-k") {
  const ClusterLaw g = ClusterLaw::geometric(0.5);
  Rng rng(7);
  std::map<std::int64_t, std::int64_t> counts;
  const std::int64_t n = 1000000;
  for (std::int64_t i = 0; i < n; ++i) counts[g.sample(rng)]++;
  CHECK(tv_to_exact(counts, n, g) < 0.005);
}

TEST_CASE("sampling: zeta heavy tail reaches beyond the table exactly") {
  const ClusterLaw z = ClusterLaw::zeta(1.5);
  Rng rng(11);
  const std::int64_t n = 1000000;
  std::int64_t over100 = 0, over_table = 0;
  for (std::int64_t i = 0; i < n; ++i) {
    const std::int64_t v = z.sample(rng);
    if (v > 100) ++over100;
    if (v > z.table_size()) ++over_table;
  }
  const double p = z.tail(101);
  const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
  CHECK(std::abs(static_cast<double>(over100) / static_cast<double>(n) - p) < 3.0 * se);
  CHECK(over_table > 0);
  const double pt = z.tail(z.table_size() + 1);
  const double set = std::sqrt(pt * (1.0 - pt) / static_cast<double>(n));
  CHECK(std::abs(static_cast<double>(over_table) / static_cast<double>(n) - pt) <
        4.0 * set);
}

TEST_CASE("tail identities hold for every family") {
  const std::vector<ClusterLaw> laws = {
      ClusterLaw::delta(1), ClusterLaw::delta(3), ClusterLaw::geometric(0.5),
      ClusterLaw::custom({{1, 0.5}, {5, 0.5}}), ClusterLaw::zeta(1.5)};
  for (const ClusterLaw& g : laws) {
    CHECK(g.tail(1) == doctest::Approx(1.0).epsilon(1e-14));
    double mass = g.tail(101);
    for (std::int64_t m = 100; m >= 1; --m) {
      CHECK(g.tail(m) >= g.tail(m + 1));
      CHECK(g.tail(m) - g.tail(m + 1) == doctest::Approx(g.pmf(m)).epsilon(1e-11));
      mass += g.pmf(m);
    }
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));  // table + analytic tail
  }
}

TEST_CASE("quantile: tail inversion, including u within one ulp of 1") {
  const ClusterLaw z = ClusterLaw::zeta(1.5);
  // Smallest k with cdf > u means tail(k+1) < 1-u <= tail(k).
  for (const double u : {0.1, 0.5, 0.99, 1.0 - 1e-6, 1.0 - 1e-9}) {
    const std::int64_t k = z.quantile(u);
    CHECK(z.tail(k + 1) < 1.0 - u);
    CHECK(z.tail(k) >= 1.0 - u);
  }
  // The heavy tail puts the exact preimage of u = 1 - 1e-12 beyond int64;
  // the draw saturates (and terminates) instead of overflowing the bracket.
  CHECK(z.quantile(1.0 - 1e-12) == (std::int64_t{1} << 62));
  CHECK(z.quantile(1.0 - 0x1.0p-53) == (std::int64_t{1} << 62));
  // A barely-finite-mean law has delay draws beyond int64 with visible
  // probability; they saturate the same way.
  const ClusterLaw z21 = ClusterLaw::zeta(2.1);
  CHECK(z21.delay_quantile(1.0 - 1e-12) == (std::int64_t{1} << 62));
  const std::int64_t j = z21.delay_quantile(0.999);
  CHECK(j > z21.table_size());
}

TEST_CASE("censored cycle law: closed forms") {
  const CensoredCycleLaw d1{ClusterLaw::delta(1)};
  CHECK(d1.cycle_pmf(1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(d1.mean_cycle() == doctest::Approx(1.0).epsilon(1e-12));

  const CensoredCycleLaw c{ClusterLaw::custom({{1, 0.5}, {2, 0.5}})};
  CHECK(c.cycle_pmf(1) == doctest::Approx(1.0 - 0.5 * kEInv).epsilon(1e-14));

  // Geometric censored cycle tails are geometric with ratio 1/(2e), so nu has
  // the independent closed form 1/(1 - e^{-1}/2).
  const CensoredCycleLaw g{ClusterLaw::geometric(0.5)};
  CHECK(g.mean_cycle() == doctest::Approx(1.0 / (1.0 - kEInv / 2.0)).epsilon(1e-13));
  for (std::int64_t m = 1; m <= 30; ++m)
    CHECK(g.cycle_tail(m) == doctest::Approx(std::pow(2.0, -(m - 1.0)) *
                                             std::exp(-(m - 1.0)))
                                 .epsilon(1e-12));

  const CensoredCycleLaw z{ClusterLaw::zeta(1.5)};
  for (const double nu : {d1.mean_cycle(), c.mean_cycle(), g.mean_cycle(),
                          z.mean_cycle()})
    CHECK(nu <= 1.0 / (1.0 - kEInv) + 1e-12);
}

TEST_CASE("sample_cycle: censoring identity tau <= ceil(y)") {
  const CensoredCycleLaw z{ClusterLaw::zeta(1.5)};
  Rng rng(3);
  for (int i = 0; i < 100000; ++i) {
    const auto [tau, y] = z.sample_cycle(rng);
    CHECK(tau >= 1);
    CHECK(tau <= static_cast<std::int64_t>(std::ceil(y)));
  }
  const CensoredCycleLaw d1{ClusterLaw::delta(1)};
  Rng rng2(4);
  for (int i = 0; i < 1000; ++i) CHECK(d1.sample_cycle(rng2).first == 1);
}

TEST_CASE("sample_cycle: geometric tau pmf within TV 0.005 of p_j") {
  const CensoredCycleLaw law{ClusterLaw::geometric(0.5)};
  Rng rng(5);
  std::map<std::int64_t, std::int64_t> counts;
  const std::int64_t n = 1000000;
  for (std::int64_t i = 0; i < n; ++i) counts[law.sample_cycle(rng).first]++;
  double tv = 0.0;
  for (std::int64_t j = 1; j <= 60; ++j) {
    const auto it = counts.find(j);
    const double p = it == counts.end()
                         ? 0.0
                         : static_cast<double>(it->second) / static_cast<double>(n);
    tv += std::abs(p - law.cycle_pmf(j));
  }
  CHECK(0.5 * tv < 0.005);
}

TEST_CASE("height given length: support and mean against quadrature") {
  const CensoredCycleLaw law{ClusterLaw::geometric(0.5)};
  Rng rng(9);
  for (const std::int64_t j : {1, 2, 5, 11}) {
    for (int i = 0; i < 20000; ++i) {
      const double v = law.sample_height_given_len(j, rng);
      CHECK(v > static_cast<double>(j - 1));
    }
  }
  const double mean = quad_height_mean(law, 2);
  const double second = quad_height_second_moment(law, 2);
  const double sd = std::sqrt(second - mean * mean);
  const std::int64_t n = 1000000;
  double acc = 0.0;
  for (std::int64_t i = 0; i < n; ++i) acc += law.sample_height_given_len(2, rng);
  const double emp = acc / static_cast<double>(n);
  CHECK(std::abs(emp - mean) < 3.0 * sd / std::sqrt(static_cast<double>(n)));

  const CensoredCycleLaw d1{ClusterLaw::delta(1)};
  CHECK_THROWS_AS(d1.sample_height_given_len(2, rng), std::invalid_argument);
}

TEST_CASE("height given length: delta(1) reassembles Exp(1)") {
  const CensoredCycleLaw law{ClusterLaw::delta(1)};
  Rng rng(13);
  const std::int64_t n = 200000;
  std::vector<double> xs(static_cast<std::size_t>(n));
  for (auto& x : xs) x = law.sample_height_given_len(1, rng);
  std::sort(xs.begin(), xs.end());
  double d = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    const double f = -std::expm1(-xs[static_cast<std::size_t>(i)]);
    d = std::max(d,
                 std::abs(f - (static_cast<double>(i) + 0.5) / static_cast<double>(n)));
  }
  CHECK(d < 0.005);
}

TEST_CASE("stationary delay, finite mean") {
  const ClusterLaw d1 = ClusterLaw::delta(1);
  Rng rng(17);
  for (int i = 0; i < 100; ++i) CHECK(d1.sample_stationary_delay(rng) == 1);

  // Geometric: P(tau_1 = j) = tail(j)/mu = 2^{-j}.
  const ClusterLaw g = ClusterLaw::geometric(0.5);
  std::map<std::int64_t, std::int64_t> counts;
  const std::int64_t n = 1000000;
  for (std::int64_t i = 0; i < n; ++i) counts[g.sample_stationary_delay(rng)]++;
  double tv = 0.0;
  for (std::int64_t j = 1; j <= 40; ++j) {
    const auto it = counts.find(j);
    const double p = it == counts.end()
                         ? 0.0
                         : static_cast<double>(it->second) / static_cast<double>(n);
    tv += std::abs(p - std::pow(2.0, -static_cast<double>(j)));
  }
  CHECK(0.5 * tv < 0.005);

  const ClusterLaw z = ClusterLaw::zeta(1.5);
  CHECK_THROWS_AS(z.sample_stationary_delay(rng), std::invalid_argument);
}

TEST_CASE("initial vector: delta(1) collapses to (0, 1, Exp(1))") {
  const CensoredCycleLaw law{ClusterLaw::delta(1)};
  Rng rng(19);
  for (int i = 0; i < 1000; ++i) {
    const InitialVector iv = law.sample_initial(rng);
    CHECK(iv.defect == 0);
    CHECK(iv.excess == 1);
    CHECK(iv.height > 0.0);
  }
}

TEST_CASE("initial vector: joint law p_{i+j}/nu and excess marginal") {
  const CensoredCycleLaw law{ClusterLaw::geometric(0.5)};
  const double nu = law.mean_cycle();
  Rng rng(23);
  const std::int64_t n = 1000000;
  std::map<std::pair<std::int64_t, std::int64_t>, std::int64_t> joint;
  std::map<std::int64_t, std::int64_t> excess;
  for (std::int64_t i = 0; i < n; ++i) {
    const InitialVector iv = law.sample_initial(rng);
    joint[{iv.defect, iv.excess}]++;
    excess[iv.excess]++;
    CHECK(iv.defect >= 0);
    CHECK(iv.excess >= 1);
    CHECK(iv.height > static_cast<double>(iv.defect + iv.excess - 1));
  }
  double tv_joint = 0.0;
  for (std::int64_t i = 0; i <= 25; ++i) {
    for (std::int64_t j = 1; j <= 25; ++j) {
      const auto it = joint.find({i, j});
      const double p = it == joint.end()
                           ? 0.0
                           : static_cast<double>(it->second) / static_cast<double>(n);
      tv_joint += std::abs(p - law.cycle_pmf(i + j) / nu);
    }
  }
  CHECK(0.5 * tv_joint < 0.005);

  // Excess marginal equals the stationary delay law: P(chi = j) = cycle_tail(j)/nu.
  double tv_excess = 0.0;
  for (std::int64_t j = 1; j <= 40; ++j) {
    const auto it = excess.find(j);
    const double p = it == excess.end()
                         ? 0.0
                         : static_cast<double>(it->second) / static_cast<double>(n);
    tv_excess += std::abs(p - law.cycle_tail(j) / nu);
  }
  CHECK(0.5 * tv_excess < 0.005);

  // Size-biased totals are normalized: sum_m m p_m = nu.
  double acc = 0.0;
  for (std::int64_t m = 1; m <= 200; ++m)
    acc += static_cast<double>(m) * law.cycle_pmf(m);
  CHECK(acc == doctest::Approx(nu).epsilon(1e-12));
}

TEST_SUITE_END();
