#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace sqlconf {

// FNV-1a, 64-bit. Stable across platforms; used for feature hashing and for
// deriving per-item random streams.
inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Deterministic stream of uniforms keyed by (seed, key, stream label).
// Independent of call order and thread schedule.
class KeyedRng {
 public:
  KeyedRng(std::uint64_t seed, std::string_view key, std::string_view label)
      : state_(splitmix64(seed ^ fnv1a64(key) ^ (fnv1a64(label) << 1))) {}

  std::uint64_t next_u64() {
    state_ = splitmix64(state_);
    return state_;
  }

  // Uniform in [0, 1).
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, n).
  std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

  // Box-Muller normal draw.
  double next_normal(double mean, double stddev) {
    double u1 = next_double();
    double u2 = next_double();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    double z = std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * 3.14159265358979323846 * u2);
    return mean + stddev * z;
  }

 private:
  std::uint64_t state_;
};

}  // namespace sqlconf
