#include "clustex/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace clustex {

namespace {

constexpr double kEInv = 0.36787944117144233;  // e^{-1}

// 10-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr double kGlNode[5] = {0.1488743389816312, 0.4333953941292472,
                               0.6794095682990244, 0.8650633666889845,
                               0.9739065285171717};
constexpr double kGlWeight[5] = {0.2955242247147529, 0.2692667193099963,
                                 0.2190863625159820, 0.1494513491505806,
                                 0.0666713443086881};

double gauss10(const std::function<double(double)>& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < 5; ++i) {
    s += kGlWeight[i] * (f(mid + half * kGlNode[i]) + f(mid - half * kGlNode[i]));
  }
  return s * half;
}

double gauss_adaptive_impl(const std::function<double(double)>& f, double a, double b,
                           double whole, double abs_tol, int depth) {
  const double mid = 0.5 * (a + b);
  const double left = gauss10(f, a, mid);
  const double right = gauss10(f, mid, b);
  if (depth <= 0 || std::abs(left + right - whole) <= abs_tol) return left + right;
  return gauss_adaptive_impl(f, a, mid, left, abs_tol * 0.5, depth - 1) +
         gauss_adaptive_impl(f, mid, b, right, abs_tol * 0.5, depth - 1);
}

// g_j(v) = P(zeta ^ ceil(v) = j) evaluated pointwise.
double g_j_of_v(const ClusterLaw& g, std::int64_t j, double v) {
  const auto c = static_cast<std::int64_t>(std::ceil(v));
  if (j > c) return 0.0;
  if (j == c) return g.tail(j);
  return g.pmf(j);
}

}  // namespace

double gauss_adaptive(const std::function<double(double)>& f, double a, double b,
                      double abs_tol, int max_depth) {
  if (!(b > a)) return 0.0;
  return gauss_adaptive_impl(f, a, b, gauss10(f, a, b), abs_tol, max_depth);
}

double quad_p_j(const ClusterLaw& g, std::int64_t j) {
  if (j < 1) throw std::invalid_argument("quad_p_j: j must be >= 1");
  // Integrand is zero below v = j - 1 and decays like e^{-v}; 50 extra unit
  // pieces leave a remainder below 1e-21 in absolute terms.
  double total = 0.0;
  for (std::int64_t m = j; m <= j + 50; ++m) {
    const auto f = [&](double v) { return g_j_of_v(g, j, v) * std::exp(-v); };
    total += gauss_adaptive(f, static_cast<double>(m - 1), static_cast<double>(m));
  }
  return total;
}

double quad_nu(const ClusterLaw& g) {
  double total = 0.0;
  for (std::int64_t m = 1; m <= 60; ++m) {
    const auto f = [&](double v) {
      return g.partial_mean(static_cast<std::int64_t>(std::ceil(v))) * std::exp(-v);
    };
    total += gauss_adaptive(f, static_cast<double>(m - 1), static_cast<double>(m));
  }
  return total;
}

namespace {

double quad_height_moment(const CensoredCycleLaw& law, std::int64_t j, int power) {
  const double pj = law.cycle_pmf(j);
  if (pj <= 0.0)
    throw std::invalid_argument("height moment: tau = " + std::to_string(j) +
                                " unreachable");
  double total = 0.0;
  for (std::int64_t m = j; m <= j + 60; ++m) {
    const auto f = [&](double v) {
      return std::pow(v, power) * g_j_of_v(law.base(), j, v) * std::exp(-v) / pj;
    };
    total += gauss_adaptive(f, static_cast<double>(m - 1), static_cast<double>(m));
  }
  return total;
}

}  // namespace

double quad_height_density_norm(const CensoredCycleLaw& law, std::int64_t j) {
  return quad_height_moment(law, j, 0);
}

double quad_height_mean(const CensoredCycleLaw& law, std::int64_t j) {
  return quad_height_moment(law, j, 1);
}

double quad_height_second_moment(const CensoredCycleLaw& law, std::int64_t j) {
  return quad_height_moment(law, j, 2);
}

double height_mixture_marginal_error(const CensoredCycleLaw& law, double vmax) {
  double worst = 0.0;
  for (double v = 0.05; v <= vmax; v += 0.1) {
    const auto c = static_cast<std::int64_t>(std::ceil(v));
    double mix = 0.0;
    for (std::int64_t j = 1; j <= c; ++j) {
      const double pj = law.cycle_pmf(j);
      if (pj <= 0.0) continue;
      mix += pj * (g_j_of_v(law.base(), j, v) * std::exp(-v) / pj);
    }
    worst = std::max(worst, std::abs(mix - std::exp(-v)));
  }
  return worst;
}

void LatticePmf::validate() const {
  double sum = 0.0;
  for (const double m : mass) {
    if (m < 0.0) throw std::invalid_argument("LatticePmf: negative mass");
    sum += m;
  }
  if (tail_bound < 0.0) throw std::invalid_argument("LatticePmf: negative tail bound");
  if (sum + tail_bound < 1.0 - 1e-12 || sum > 1.0 + 1e-12)
    throw std::invalid_argument("LatticePmf: mass + tail bound does not account for 1");
}

LatticePmf LatticePmf::convolve(const LatticePmf& other, std::size_t cap) const {
  LatticePmf out;
  out.mass.assign(cap, 0.0);
  double dropped = 0.0;
  for (std::size_t i = 0; i < mass.size(); ++i) {
    if (mass[i] == 0.0) continue;
    for (std::size_t j = 0; j < other.mass.size(); ++j) {
      const std::size_t v = i + j + 2;  // values are (i+1) + (j+1)
      const double m = mass[i] * other.mass[j];
      if (v <= cap)
        out.mass[v - 1] += m;
      else
        dropped += m;
    }
  }
  out.tail_bound = tail_bound + other.tail_bound + dropped;
  return out;
}

LatticePmf LatticePmf::cluster_steps(const ClusterLaw& g, std::int64_t k) {
  LatticePmf p;
  p.mass.resize(static_cast<std::size_t>(k));
  for (std::int64_t j = 1; j <= k; ++j)
    p.mass[static_cast<std::size_t>(j - 1)] = g.pmf(j);
  p.tail_bound = g.tail(k + 1);
  return p;
}

LatticePmf LatticePmf::finite_mean_delay(const ClusterLaw& g, std::int64_t k) {
  LatticePmf p;
  p.mass.resize(static_cast<std::size_t>(k));
  for (std::int64_t j = 1; j <= k; ++j)
    p.mass[static_cast<std::size_t>(j - 1)] = g.tail(j) / g.mean();
  p.tail_bound = g.tail_of_tails(k + 1) / g.mean();
  return p;
}

LatticePmf LatticePmf::censored_steps(const CensoredCycleLaw& law, std::int64_t k) {
  LatticePmf p;
  p.mass.resize(static_cast<std::size_t>(k));
  for (std::int64_t j = 1; j <= k; ++j)
    p.mass[static_cast<std::size_t>(j - 1)] = law.cycle_pmf(j);
  p.tail_bound = law.cycle_tail(k + 1);
  return p;
}

LatticePmf LatticePmf::censored_delay(const CensoredCycleLaw& law, std::int64_t k) {
  LatticePmf p;
  p.mass.resize(static_cast<std::size_t>(k));
  const double nu = law.mean_cycle();
  for (std::int64_t j = 1; j <= k; ++j)
    p.mass[static_cast<std::size_t>(j - 1)] = law.cycle_tail(j) / nu;
  double beyond = 0.0;
  for (std::int64_t m = k + 1; m <= k + 3000; ++m) {
    const double t = law.cycle_tail(m);
    beyond += t;
    if (t < 1e-20) break;
  }
  p.tail_bound = beyond / nu;
  return p;
}

std::vector<double> renewal_mass(const LatticePmf& step, const LatticePmf* delay,
                                 std::int64_t kmax) {
  step.validate();
  if (delay) delay->validate();
  if (static_cast<std::int64_t>(step.mass.size()) < kmax ||
      (delay && static_cast<std::int64_t>(delay->mass.size()) < kmax))
    throw std::invalid_argument("renewal_mass: pmf tables shorter than kmax");
  const std::vector<double>& first = delay ? delay->mass : step.mass;
  std::vector<double> u(static_cast<std::size_t>(kmax) + 1, 0.0);
  for (std::int64_t k = 1; k <= kmax; ++k) {
    double acc = first[static_cast<std::size_t>(k - 1)];
    for (std::int64_t m = 1; m < k; ++m)
      acc += u[static_cast<std::size_t>(m)] * step.mass[static_cast<std::size_t>(k - m - 1)];
    u[static_cast<std::size_t>(k)] = acc;
  }
  return u;
}

StationaryMarginal::StationaryMarginal(const CensoredCycleLaw& law)
    : nu_(law.mean_cycle()) {
  constexpr std::int64_t kM = 800;  // e^{-v} underflows well before v = 800
  emin_.resize(kM);
  double pm = 0.0;
  for (std::int64_t m = 1; m <= kM; ++m) {
    pm += law.base().tail(m);
    emin_[static_cast<std::size_t>(m - 1)] = pm;
  }
  tail_at_int_.assign(kM + 1, 0.0);
  for (std::int64_t m = kM - 1; m >= 0; --m) {
    const double delta =
        std::exp(-static_cast<double>(m)) - std::exp(-static_cast<double>(m + 1));
    tail_at_int_[static_cast<std::size_t>(m)] =
        tail_at_int_[static_cast<std::size_t>(m + 1)] +
        emin_[static_cast<std::size_t>(m)] * delta / nu_;
  }
}

double StationaryMarginal::density(double v) const {
  if (v <= 0.0) return 0.0;
  const auto c = static_cast<std::int64_t>(std::ceil(v));
  if (c > static_cast<std::int64_t>(emin_.size())) return 0.0;
  return emin_[static_cast<std::size_t>(c - 1)] * std::exp(-v) / nu_;
}

double StationaryMarginal::tail(double v) const {
  if (v <= 0.0) return 1.0;
  const auto c = static_cast<std::int64_t>(std::ceil(v));
  if (c > static_cast<std::int64_t>(emin_.size())) return 0.0;
  const double part = emin_[static_cast<std::size_t>(c - 1)] *
                      (std::exp(-v) - std::exp(-static_cast<double>(c))) / nu_;
  return tail_at_int_[static_cast<std::size_t>(c)] + part;
}

double StationaryMarginal::cdf(double v) const { return 1.0 - tail(v); }

double StationaryMarginal::quantile_tail(double t) const {
  if (!(t > 0.0) || !(t < 1.0))
    throw std::invalid_argument("quantile_tail: target must be in (0, 1)");
  double lo = 0.0, hi = 760.0;
  for (int it = 0; it < 200 && hi - lo > 1e-13 * (1.0 + hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (tail(mid) > t)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

StationarityReport stationarity_identity(const CensoredCycleLaw& law, int lmax,
                                         int jmax, int bins, int vmax) {
  if (lmax < 1 || jmax < 1 || bins < 1 || vmax < 1 || bins % vmax != 0)
    throw std::invalid_argument("stationarity_identity: bins must be a multiple of vmax");
  const int per_unit = bins / vmax;
  const double w = static_cast<double>(vmax) / bins;
  const ClusterLaw& g = law.base();
  const double nu = law.mean_cycle();

  const LatticePmf steps = LatticePmf::censored_steps(law, lmax);
  const LatticePmf delay = LatticePmf::censored_delay(law, lmax);
  const std::vector<double> u = renewal_mass(steps, &delay, lmax);

  // Per-bin factor: int_a^b e^{-v} dv = e^{-a} (1 - e^{-w}).
  const double one_minus_ew = -std::expm1(-w);

  StationarityReport rep;
  for (int l = 1; l <= lmax; ++l) {
    for (int j = 1; j <= jmax; ++j) {
      for (int bin = 0; bin < bins; ++bin) {
        const double a = bin * w;
        const std::int64_t c = bin / per_unit + 1;  // bin lies inside (c-1, c]
        const double eab = std::exp(-a) * one_minus_ew;

        // Bin integral of g_m(v) e^{-v} for the m needed below.
        const auto bin_integral = [&](std::int64_t m) {
          if (m > c) return 0.0;
          if (m == c) return g.tail(c) * eab;
          return g.pmf(m) * eab;
        };

        double lhs = c >= l + j ? g.tail(l + j) / nu * eab : 0.0;
        for (int i = 0; i <= l - 1; ++i)
          lhs += u[static_cast<std::size_t>(l - i)] * bin_integral(i + j);
        const double rhs = c >= j ? g.tail(j) / nu * eab : 0.0;

        const double err = std::abs(lhs - rhs);
        if (err > rep.max_abs_error) {
          rep.max_abs_error = err;
          rep.worst_l = l;
          rep.worst_j = j;
          rep.worst_lhs = lhs;
          rep.worst_rhs = rhs;
        }
      }
    }
  }
  return rep;
}

double conditional_cluster_pmf(const CensoredCycleLaw& law, double u, std::int64_t j) {
  if (!(u > 0.0)) throw std::invalid_argument("conditional_cluster_pmf: u must be > 0");
  if (j < 1) throw std::invalid_argument("conditional_cluster_pmf: j must be >= 1");
  const ClusterLaw& g = law.base();
  const double dj = static_cast<double>(j);
  if (dj <= u) return g.pmf(j);
  if (dj - 1.0 >= u) {
    // e^u p_j, evaluated with the exponent folded in to avoid overflow.
    return std::exp(u - (dj - 1.0)) * (g.tail(j) * (1.0 - kEInv) + g.pmf(j) * kEInv);
  }
  const double e = std::exp(-(dj - u));
  return g.tail(j) * (1.0 - e) + g.pmf(j) * e;
}

double conditional_cluster_sup_distance(const CensoredCycleLaw& law, double u) {
  const auto first = static_cast<std::int64_t>(std::floor(u)) + 1;
  double sup = 0.0;
  for (std::int64_t j = first; j <= first + 80; ++j) {
    const double cond = conditional_cluster_pmf(law, u, j);
    const double gj = law.base().pmf(j);
    sup = std::max(sup, std::abs(cond - gj));
    if (cond < 1e-18 && gj < 1e-18) break;
  }
  return sup;
}

double conditional_cluster_sup_bound(const CensoredCycleLaw& law, double u) {
  return law.base().tail(static_cast<std::int64_t>(std::floor(u)) + 1);
}

double conditional_cluster_total(const CensoredCycleLaw& law, double u,
                                 std::int64_t jmax) {
  double total = 0.0;
  for (std::int64_t j = 1; j <= jmax; ++j)
    total += conditional_cluster_pmf(law, u, j);
  return total;
}

namespace {

void push_row(std::vector<OracleRow>& rows, std::string check, std::string param,
              double lhs, double rhs, double tol) {
  const double err = std::abs(lhs - rhs);
  rows.push_back({std::move(check), std::move(param), lhs, rhs, err, tol, err <= tol});
}

void push_upper_bound_row(std::vector<OracleRow>& rows, std::string check,
                          std::string param, double lhs, double bound) {
  const double excess = std::max(0.0, lhs - bound);
  rows.push_back(
      {std::move(check), std::move(param), lhs, bound, excess, 1e-12, excess <= 1e-12});
}

}  // namespace

std::vector<OracleRow> run_oracle_battery(const ClusterLaw& g) {
  std::vector<OracleRow> rows;
  const CensoredCycleLaw law(g);
  const double nu = law.mean_cycle();

  for (std::int64_t j = 1; j <= 50; ++j)
    push_row(rows, "p_closed_vs_quad", "j=" + std::to_string(j), law.cycle_pmf(j),
             quad_p_j(g, j), 1e-10);

  double p_total = 0.0;
  for (std::int64_t j = 1; j <= 400; ++j) p_total += law.cycle_pmf(j);
  p_total += law.cycle_tail(401);
  push_row(rows, "p_total", "", p_total, 1.0, 1e-10);

  push_row(rows, "nu_closed_vs_quad", "", nu, quad_nu(g), 1e-10);
  push_upper_bound_row(rows, "nu_upper_bound", "", nu, 1.0 / (1.0 - kEInv));

  for (std::int64_t j = 1; j <= 20; ++j) {
    const double pj = law.cycle_pmf(j);
    if (pj <= 0.0) continue;
    push_row(rows, "height_mixture_norm", "j=" + std::to_string(j),
             quad_height_density_norm(law, j), 1.0, 1e-10);
    // Mass of the truncated-exponential component of Y | tau = j against its
    // closed-form mixture weight.
    const double e1j = std::exp(-static_cast<double>(j - 1));
    const double weight = g.tail(j) * e1j * (1.0 - kEInv) / pj;
    const double quad = gauss_adaptive(
        [&](double v) { return g_j_of_v(g, j, v) * std::exp(-v) / pj; },
        static_cast<double>(j - 1), static_cast<double>(j));
    push_row(rows, "height_mixture_trunc_weight", "j=" + std::to_string(j), weight,
             quad, 1e-10);
  }
  push_row(rows, "height_mixture_marginal", "v<=30",
           height_mixture_marginal_error(law, 30.0), 0.0, 1e-10);

  {
    const StationaryMarginal marg(law);
    double norm = 0.0;
    for (std::int64_t m = 1; m <= 60; ++m)
      norm += gauss_adaptive([&](double v) { return marg.density(v); },
                             static_cast<double>(m - 1), static_cast<double>(m));
    norm += marg.tail(60.0);
    push_row(rows, "marginal_norm", "", norm, 1.0, 1e-10);
  }

  {
    const StationarityReport rep = stationarity_identity(law, 20, 10, 300, 30);
    push_row(rows, "stationarity_identity",
             "l<=20,j<=10,worst_l=" + std::to_string(rep.worst_l) +
                 ",worst_j=" + std::to_string(rep.worst_j),
             rep.worst_lhs, rep.worst_rhs, 1e-8);
  }

  {
    const LatticePmf steps = LatticePmf::censored_steps(law, 200);
    const LatticePmf delay = LatticePmf::censored_delay(law, 200);
    const std::vector<double> u = renewal_mass(steps, &delay, 200);
    double worst = 0.0;
    for (std::int64_t k = 1; k <= 200; ++k)
      worst = std::max(worst, std::abs(u[static_cast<std::size_t>(k)] - 1.0 / nu));
    push_row(rows, "renewal_delayed_censored_max", "k<=200", worst, 0.0, 1e-9);

    const LatticePmf steps300 = LatticePmf::censored_steps(law, 300);
    const std::vector<double> u0 = renewal_mass(steps300, nullptr, 300);
    push_row(rows, "renewal_convergence_undelayed", "k=300", u0[300], 1.0 / nu, 1e-6);
  }

  if (g.finite_mean()) {
    const LatticePmf steps = LatticePmf::cluster_steps(g, 200);
    const LatticePmf delay = LatticePmf::finite_mean_delay(g, 200);
    const std::vector<double> u = renewal_mass(steps, &delay, 200);
    double worst = 0.0;
    for (std::int64_t k = 1; k <= 200; ++k)
      worst = std::max(worst, std::abs(u[static_cast<std::size_t>(k)] - 1.0 / g.mean()));
    push_row(rows, "renewal_delayed_finite_max", "k<=200", worst, 0.0, 1e-9);
  }

  {
    const double u = 10.0;
    push_row(rows, "cond_total", "u=10",
             conditional_cluster_total(law, u, 200), 1.0, 1e-10);
    push_upper_bound_row(rows, "cond_sup_le_tail_bound", "u=10",
                         conditional_cluster_sup_distance(law, u),
                         conditional_cluster_sup_bound(law, u));
    for (std::int64_t j = 1; j <= 20; ++j) {
      double quad = 0.0;
      double lo = u;
      for (std::int64_t m = static_cast<std::int64_t>(std::ceil(u)); m <= 60; ++m) {
        const double hi = static_cast<double>(m);
        if (hi > lo) {
          quad += gauss_adaptive(
              [&](double v) { return g_j_of_v(g, j, v) * std::exp(u - v); }, lo, hi);
        }
        lo = hi;
      }
      push_row(rows, "cond_closed_vs_quad", "u=10,j=" + std::to_string(j),
               conditional_cluster_pmf(law, u, j), quad, 1e-10);
    }
  }

  return rows;
}

}  // namespace clustex
