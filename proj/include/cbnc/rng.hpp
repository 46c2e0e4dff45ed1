#pragma once

#include <cstdint>
#include <string_view>

#include "cbnc/digest.hpp"

namespace cbnc {

// splitmix64, used for seeding and for stateless per-key draws.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic stream generator (xoshiro256++). One instance per named
// substream so that, e.g., mobility draws are unaffected by how many coding
// draws a strategy makes.
class RngStream {
 public:
  RngStream() : RngStream(0) {}
  explicit RngStream(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& w : s_) w = splitmix64(sm);
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

  // Uniform in [0, bound). Modulo bias is below 2^-32 for bound <= 2^32,
  // negligible at the trial counts used here.
  std::uint64_t next_below(std::uint64_t bound) { return next_u64() % bound; }

  double next_double() {  // uniform in [0, 1)
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double next_double(double lo, double hi) { return lo + (hi - lo) * next_double(); }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t s_[4];
};

inline std::uint64_t hash_str64(std::string_view s, std::uint64_t seed = 0) {
  return Fnv64().u64(seed).str(s).final();
}

// Named substream: same (seed, name, index) always yields the same stream.
inline RngStream substream(std::uint64_t seed, std::string_view name, std::uint64_t index = 0) {
  std::uint64_t mix = seed ^ hash_str64(name, 0x5bd1e995u);
  mix ^= 0x2545f4914f6cdd1dULL * (index + 1);
  return RngStream(mix);
}

// Stateless decision draw for per-edge loss: the k-th transmission on a given
// (sender, receiver) edge sees the same fate for every strategy sharing a seed.
inline double edge_draw(std::uint64_t seed, std::string_view name, std::uint64_t a,
                        std::uint64_t b, std::uint64_t k) {
  std::uint64_t st = seed ^ hash_str64(name, 0x9747b28c);
  st ^= a * 0xff51afd7ed558ccdULL;
  st ^= b * 0xc4ceb9fe1a85ec53ULL;
  st ^= k * 0x9e3779b97f4a7c15ULL;
  std::uint64_t v = splitmix64(st);
  return static_cast<double>(v >> 11) * 0x1.0p-53;
}

}  // namespace cbnc
