#include "clustex/zetafn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace clustex::zetafn {

namespace {

// Euler-Maclaurin remainder starting at integer m (use m >= 24):
//   sum_{k>=m} k^{-s} = m^{1-s}/(s-1) + m^{-s}/2 + B2/2! s m^{-s-1} - ...
double em_from(double s, double m) {
  const double ms = std::pow(m, -s);
  double r = m * ms / (s - 1.0);  // integral term
  r += 0.5 * ms;
  const double m1 = ms / m;
  r += s * m1 / 12.0;
  const double m3 = m1 / (m * m);
  r -= s * (s + 1) * (s + 2) * m3 / 720.0;
  const double m5 = m3 / (m * m);
  r += s * (s + 1) * (s + 2) * (s + 3) * (s + 4) * m5 / 30240.0;
  const double m7 = m5 / (m * m);
  r -= s * (s + 1) * (s + 2) * (s + 3) * (s + 4) * (s + 5) * (s + 6) * m7 / 1209600.0;
  return r;
}

}  // namespace

double tail_sum(double s, std::int64_t m) {
  if (s <= 1.0) throw std::invalid_argument("zetafn::tail_sum: requires s > 1");
  if (m < 1) m = 1;
  const std::int64_t start = std::max<std::int64_t>(m, 24);
  double head = 0.0;
  for (std::int64_t k = start - 1; k >= m; --k) head += std::pow(static_cast<double>(k), -s);
  return head + em_from(s, static_cast<double>(start));
}

double riemann_zeta(double s) { return tail_sum(s, 1); }

}  // namespace clustex::zetafn
