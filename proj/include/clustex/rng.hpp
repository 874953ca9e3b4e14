#pragma once

#include <cmath>
#include <cstdint>

namespace clustex {

// splitmix64 finalizer; also the replication-stream mixing function.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// xoshiro256++ seeded through splitmix64. Self-contained so that streams are
// reproducible bit-for-bit independently of the standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& w : s_) {
      x += 0x9e3779b97f4a7c15ULL;
      std::uint64_t z = x;
      z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
      z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
      w = z ^ (z >> 31);
    }
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // uniform on [0, 1) with 53-bit resolution
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // strictly positive unit-mean exponential
  double exp1() {
    double u;
    do {
      u = next_double();
    } while (u == 0.0);
    return -std::log(u);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t s_[4];
};

// Derived stream for replication `rep` under a base seed. Documented mixing:
// h(seed, rep) = mix64(seed) ^ mix64(golden_ratio * (rep + 1)), so replication
// streams depend only on (seed, rep) and can run in any order.
inline Rng replication_rng(std::uint64_t base_seed, std::uint64_t rep) {
  return Rng(mix64(base_seed) ^ mix64(0x9e3779b97f4a7c15ULL * (rep + 1)));
}

}  // namespace clustex
