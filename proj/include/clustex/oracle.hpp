#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "clustex/laws.hpp"

namespace clustex {

// ---------------------------------------------------------------------------
// Quadrature. The integrands are e^{-v} times step functions, so each unit
// interval (m-1, m] is smooth; pieces are integrated by adaptive Gauss-
// Legendre and summed. Absolute accuracy better than 1e-12.
// ---------------------------------------------------------------------------

// Integral of f over [a, b] for f smooth on [a, b].
double gauss_adaptive(const std::function<double(double)>& f, double a, double b,
                      double abs_tol = 1e-14, int max_depth = 24);

// p_j = P(zeta ^ ceil(Y) = j) by numeric quadrature of g_j(v) e^{-v}.
double quad_p_j(const ClusterLaw& g, std::int64_t j);

// nu = E tau by quadrature of E(zeta ^ ceil(v)) e^{-v}.
double quad_nu(const ClusterLaw& g);

// Integral of the conditional height density of Y | tau = j (should be 1).
double quad_height_density_norm(const CensoredCycleLaw& law, std::int64_t j);

// Mean of Y | tau = j by quadrature (and the second moment, for tests).
double quad_height_mean(const CensoredCycleLaw& law, std::int64_t j);
double quad_height_second_moment(const CensoredCycleLaw& law, std::int64_t j);

// sum_j p_j * density(Y | tau = j)(v) recovers e^{-v}; returns the maximum
// absolute pointwise error over a grid on (0, vmax].
double height_mixture_marginal_error(const CensoredCycleLaw& law, double vmax);

// ---------------------------------------------------------------------------
// Lattice pmfs with certified tails, and renewal masses.
// ---------------------------------------------------------------------------

struct LatticePmf {
  std::vector<double> mass;  // mass[i] = P(X = i + 1); support starts at 1
  double tail_bound = 0.0;   // certified bound on P(X > mass.size())

  void validate() const;  // nonnegative, table + tail accounts for all mass
  LatticePmf convolve(const LatticePmf& other, std::size_t cap) const;

  static LatticePmf cluster_steps(const ClusterLaw& g, std::int64_t k);
  static LatticePmf finite_mean_delay(const ClusterLaw& g, std::int64_t k);
  static LatticePmf censored_steps(const CensoredCycleLaw& law, std::int64_t k);
  static LatticePmf censored_delay(const CensoredCycleLaw& law, std::int64_t k);
};

// U(k) = sum_{r>=1} P(S_r = k) for k = 1..kmax (index 0 unused). When a delay
// law is given, S_1 follows it and later steps follow `step`; the stationary
// delay makes U flat at 1/mean exactly.
std::vector<double> renewal_mass(const LatticePmf& step, const LatticePmf* delay,
                                 std::int64_t kmax);

// ---------------------------------------------------------------------------
// The stationary marginal of X under the censored construction:
//   P(X in dv) = E(zeta ^ ceil(v)) e^{-v} / nu dv.
// ---------------------------------------------------------------------------

class StationaryMarginal {
 public:
  explicit StationaryMarginal(const CensoredCycleLaw& law);

  double density(double v) const;
  double cdf(double v) const;
  double tail(double v) const;  // computed without cancellation
  // u with tail(u) = t, for t in (0, 1); used by tail-rate level schedules.
  double quantile_tail(double t) const;

 private:
  double nu_;
  std::vector<double> emin_;        // E(zeta ^ m), m = 1..M
  std::vector<double> tail_at_int_; // P(X > m), m = 0..M
};

// ---------------------------------------------------------------------------
// Stationarity identity: for l, j >= 1 and any v-interval B,
//   P(Y_{eta(l)} in B, S_{eta(l)} - l = j) = P(Y_1 in B, tau_1 = j).
// The left side is assembled from the initial law plus renewal masses; the
// right side is the direct initial-law integral. Both reduce to closed-form
// per-bin integrals; the renewal masses come from the convolution DP.
// ---------------------------------------------------------------------------

struct StationarityReport {
  double max_abs_error = 0.0;
  int worst_l = 0;
  int worst_j = 0;
  double worst_lhs = 0.0;
  double worst_rhs = 0.0;
};

StationarityReport stationarity_identity(const CensoredCycleLaw& law, int lmax,
                                         int jmax, int bins, int vmax);

// ---------------------------------------------------------------------------
// Conditional cluster-size law at level u (censored construction):
//   P(xi = j | xi > 0) = e^u Int_u^inf g_j(v) e^{-v} dv
// Piecewise closed form; equals g_j for j <= u and is within
// tail(floor(u) + 1) of g_j uniformly in j.
// ---------------------------------------------------------------------------

double conditional_cluster_pmf(const CensoredCycleLaw& law, double u, std::int64_t j);
double conditional_cluster_sup_distance(const CensoredCycleLaw& law, double u);
double conditional_cluster_sup_bound(const CensoredCycleLaw& law, double u);
double conditional_cluster_total(const CensoredCycleLaw& law, double u,
                                 std::int64_t jmax);

// ---------------------------------------------------------------------------
// The oracle battery: every closed-form identity checked against an
// independent numeric route, one row per (check, parameter).
// ---------------------------------------------------------------------------

struct OracleRow {
  std::string check;
  std::string param;
  double lhs = 0.0;
  double rhs = 0.0;
  double abs_error = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

std::vector<OracleRow> run_oracle_battery(const ClusterLaw& g);

}  // namespace clustex
