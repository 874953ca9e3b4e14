#pragma once

#include <cstdint>

namespace clustex::zetafn {

// Sum_{k>=m} k^{-s} for s > 1, by direct summation of the head plus an
// Euler-Maclaurin remainder. Absolute accuracy ~1e-14 relative.
double tail_sum(double s, std::int64_t m);

// Riemann zeta on (1, inf).
double riemann_zeta(double s);

}  // namespace clustex::zetafn
