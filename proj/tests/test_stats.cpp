#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <vector>

#include "clustex/exceed.hpp"
#include "clustex/laws.hpp"
#include "clustex/parallel.hpp"
#include "clustex/pathgen.hpp"
#include "clustex/rng.hpp"
#include "clustex/stats.hpp"

using namespace clustex;

namespace {

std::int64_t sample_poisson(double mean, Rng& rng) {
  const double limit = std::exp(-mean);
  std::int64_t k = 0;
  double prod = rng.next_double();
  while (prod > limit) {
    ++k;
    prod *= rng.next_double();
  }
  return k;
}

EmpiricalPmf random_pmf(Rng& rng) {
  EmpiricalPmf p;
  const int support = 1 + static_cast<int>(rng.next_double() * 6);
  for (int k = 1; k <= support; ++k)
    p.add(k, 1 + static_cast<std::int64_t>(rng.next_double() * 50));
  return p;
}

}  // namespace

TEST_SUITE_BEGIN("stats");

TEST_CASE("empirical pmf bookkeeping") {
  EmpiricalPmf p = EmpiricalPmf::from_sizes({1, 1, 1});
  CHECK(p.prob(1) == 1.0);
  CHECK(p.total() == 3);

  EmpiricalPmf q = EmpiricalPmf::from_sizes({1, 2, 1, 2});
  CHECK(q.prob(1) == 0.5);
  CHECK(q.prob(2) == 0.5);
  CHECK(q.max_size() == 2);

  EmpiricalPmf merged;
  merged.merge(p);
  merged.merge(q);
  CHECK(merged.total() == 7);
  CHECK(merged.count(1) == 5);

  CHECK_THROWS_AS(EmpiricalPmf::from_sizes({}), std::invalid_argument);
  CHECK_THROWS_AS((void)EmpiricalPmf{}.prob(1), std::invalid_argument);
}

TEST_CASE("tv distance: exact spot values") {
  EmpiricalPmf exact;
  exact.add(2, 1000);
  CHECK(tv_distance(exact, ClusterLaw::delta(2)) == 0.0);

  EmpiricalPmf one;
  one.add(1, 7);
  CHECK(tv_distance(one, ClusterLaw::delta(2)) == doctest::Approx(1.0));

  EmpiricalPmf mix;
  mix.add(1, 3);
  mix.add(2, 1);
  CHECK(tv_distance(mix, ClusterLaw::geometric(0.5)) == doctest::Approx(0.25));
}

TEST_CASE("tv distance is a metric on represented pmfs") {
  Rng rng(53);
  for (int trial = 0; trial < 40; ++trial) {
    const EmpiricalPmf a = random_pmf(rng);
    const EmpiricalPmf b = random_pmf(rng);
    const EmpiricalPmf c = random_pmf(rng);
    const double ab = tv_distance(a, b);
    const double ba = tv_distance(b, a);
    const double ac = tv_distance(a, c);
    const double cb = tv_distance(c, b);
    CHECK(ab == doctest::Approx(ba).epsilon(1e-14));
    CHECK(tv_distance(a, a) == 0.0);
    CHECK(ab <= ac + cb + 1e-14);
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0);
  }
}

TEST_CASE("chi-square p-values match reference data") {
  // Reference values from standard chi-square tables.
  CHECK(chi_square_pvalue(28.32, 23) == doctest::Approx(0.203922).epsilon(1e-4));
  CHECK(chi_square_pvalue(12.63, 7) == doctest::Approx(0.0816532).epsilon(1e-4));
  CHECK(chi_square_pvalue(14.067, 7) == doctest::Approx(0.05).epsilon(1e-3));
  CHECK(chi_square_pvalue(6.635, 1) == doctest::Approx(0.01).epsilon(1e-3));
  CHECK(chi_square_pvalue(10.828, 1) == doctest::Approx(0.001).epsilon(1e-2));
  CHECK(chi_square_pvalue(0.0, 5) == 1.0);
  CHECK_THROWS_AS(gamma_q(-1.0, 1.0), std::invalid_argument);
}

TEST_CASE("chi-square goodness of fit: exact and degenerate cases") {
  // Perfect fit on a two-point law: statistic 0, p-value 1.
  const ClusterLaw two = ClusterLaw::custom({{1, 0.5}, {2, 0.5}});
  EmpiricalPmf perfect;
  perfect.add(1, 500);
  perfect.add(2, 500);
  const ChiSquareResult fit = chi_square_gof(perfect, two);
  CHECK(fit.statistic == doctest::Approx(0.0));
  CHECK(fit.p_value == doctest::Approx(1.0));
  CHECK_FALSE(fit.degenerate);

  // delta(1) against delta(1) collapses to a single cell: degenerate pass.
  EmpiricalPmf ones;
  ones.add(1, 100);
  const ChiSquareResult deg = chi_square_gof(ones, ClusterLaw::delta(1));
  CHECK(deg.degenerate);
  CHECK(deg.p_value == 1.0);

  CHECK_THROWS_AS(chi_square_gof(EmpiricalPmf{}, two), std::invalid_argument);
}

TEST_CASE("chi-square null calibration: p > 0.001 in at least 99% of runs") {
  const ClusterLaw g = ClusterLaw::geometric(0.5);
  const int runs = 200;
  int ok = 0;
  Rng rng(59);
  for (int r = 0; r < runs; ++r) {
    EmpiricalPmf p;
    for (int i = 0; i < 10000; ++i) p.add(g.sample(rng));
    const ChiSquareResult res = chi_square_gof(p, g);
    if (res.degenerate || res.p_value > 0.001) ++ok;
  }
  CHECK(ok >= 198);
}

TEST_CASE("kolmogorov tail constants") {
  // Classical two-sided asymptotic critical values.
  CHECK(kolmogorov_tail(1.22385) == doctest::Approx(0.10).epsilon(1e-3));
  CHECK(kolmogorov_tail(1.35810) == doctest::Approx(0.05).epsilon(1e-3));
  CHECK(kolmogorov_tail(1.62762) == doctest::Approx(0.01).epsilon(1e-3));
  CHECK(kolmogorov_tail(1.94947) == doctest::Approx(0.001).epsilon(2e-2));
  CHECK(kolmogorov_tail(0.01) == 1.0);
}

TEST_CASE("ks against exponential gaps: null calibration and a degenerate reject") {
  Rng rng(61);
  const int runs = 1000;
  int ok = 0;
  for (int r = 0; r < runs; ++r) {
    std::vector<double> gaps(200);
    for (auto& g : gaps) g = rng.exp1();
    if (ks_exponential_gaps(gaps).p_value > 0.001) ++ok;
  }
  CHECK(ok >= 999);

  std::vector<double> constant(200, 1.0);
  CHECK(ks_exponential_gaps(constant).p_value < 1e-6);

  std::vector<double> few(10, 1.0);
  CHECK_THROWS_AS(ks_exponential_gaps(few), std::invalid_argument);
}

TEST_CASE("dispersion index") {
  const std::vector<std::int64_t> constant(50, 4);
  CHECK(dispersion_index(constant) == 0.0);

  Rng rng(67);
  std::vector<std::int64_t> pois(10000);
  for (auto& c : pois) c = sample_poisson(5.0, rng);
  const double d = dispersion_index(pois);
  CHECK(d > 0.94);
  CHECK(d < 1.06);

  CHECK_THROWS_AS(dispersion_index(std::vector<std::int64_t>(10, 1)),
                  std::invalid_argument);
  CHECK_THROWS_AS(dispersion_index(std::vector<std::int64_t>(50, 0)),
                  std::invalid_argument);
}

TEST_CASE("sampling error of the empirical cluster pmf scales like sqrt(S/N)") {
  // Pipeline property: pooled cluster sizes from the finite-mean chain follow
  // G exactly, so the empirical pmf should sit within 3 sqrt(S/N) of G in TV
  // (S = sizes with expected count >= 1) in at least 95% of seeded runs.
  const SequenceModel m = SequenceModel::finite_mean(ClusterLaw::geometric(0.5));
  const double u = 2.0;
  int ok = 0;
  const int runs = 40;
  for (int r = 0; r < runs; ++r) {
    ModelCycles cyc(m, replication_rng(83, static_cast<std::uint64_t>(r)));
    EmpiricalPmf pmf;
    scan_cycle_clusters(cyc, 16000, u, [&](const ClusterRecord& rec) {
      if (!rec.delayed) pmf.add(rec.size);
    });
    REQUIRE(pmf.total() > 500);
    const auto n = static_cast<double>(pmf.total());
    double support = 0;
    for (std::int64_t j = 1; m.law.pmf(j) * n >= 1.0; ++j) ++support;
    if (tv_distance(pmf, m.law) < 3.0 * std::sqrt(support / n)) ++ok;
  }
  CHECK(ok >= runs * 95 / 100);
}

TEST_CASE("blocks estimator: i.i.d. input concentrates near 1") {
  const SequenceModel m = SequenceModel::finite_mean(ClusterLaw::delta(1));
  const std::int64_t n = 1000000;
  const double u = std::log(static_cast<double>(n));  // lambda = 1
  const std::int64_t b = 1000;
  BlockTally tally;
  for (std::uint64_t r = 0; r < 20; ++r) {
    ModelCycles cyc(m, replication_rng(71, r));
    tally.merge(scan_blocks(cyc, n, u, b).tally);
  }
  const ExtremalIndexEstimate est = extremal_index_blocks(tally, b, u, 20);
  CHECK(est.theta > 0.9);
  CHECK(est.theta < 1.1);
}

TEST_CASE("blocks estimator: tally merge is order-independent and errors bite") {
  BlockTally a{100, 10, 25, 100000};
  BlockTally b{50, 3, 8, 50000};
  BlockTally ab = a;
  ab.merge(b);
  BlockTally ba = b;
  ba.merge(a);
  CHECK(ab.blocks == ba.blocks);
  CHECK(ab.hit == ba.hit);
  CHECK(ab.exceedances == ba.exceedances);
  CHECK(ab.horizon == ba.horizon);
  CHECK(extremal_index_blocks(ab, 1000, 9.0, 2).theta ==
        doctest::Approx(extremal_index_blocks(ba, 1000, 9.0, 2).theta));

  BlockTally none{100, 0, 0, 100000};
  CHECK_THROWS_AS(extremal_index_blocks(none, 1000, 9.0, 1), std::invalid_argument);
  BlockTally all{100, 100, 99000, 100000};
  CHECK_THROWS_AS(extremal_index_blocks(all, 1000, 0.1, 1), std::invalid_argument);
}

TEST_CASE("maxima check") {
  const MaximaCheck sure = maxima_check(1000, 1000, 1.0, 0.0);
  CHECK(sure.empirical == 1.0);
  CHECK(sure.predicted == 1.0);

  // i.i.d. Exp(1): P(M_n <= ln n) -> e^{-1}.
  const SequenceModel m = SequenceModel::finite_mean(ClusterLaw::delta(1));
  const std::int64_t n = 10000;
  const double u = std::log(static_cast<double>(n));
  const std::int64_t reps = 2000;
  std::vector<std::uint8_t> below(static_cast<std::size_t>(reps), 0);
  parallel_reps(reps, 2, [&](std::int64_t r) {
    ModelCycles cyc(m, replication_rng(73, static_cast<std::uint64_t>(r)));
    below[static_cast<std::size_t>(r)] =
        scan_blocks(cyc, n, u, 100).max_height <= u ? 1 : 0;
  });
  std::int64_t count = 0;
  for (const auto v : below) count += v;
  const MaximaCheck mc = maxima_check(count, reps, 1.0, 1.0);
  CHECK(std::abs(mc.empirical - std::exp(-1.0)) < 3.0 * mc.std_error + 0.01);
}

TEST_SUITE_END();
