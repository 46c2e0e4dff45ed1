#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "cbnc/common.hpp"

namespace cbnc {

// FNV-1a 64 with a post-mix. Not cryptographic; the simulated adversary
// corrupts content, it does not search for collisions.
class Fnv64 {
 public:
  Fnv64& bytes(const void* data, std::size_t len) {
    auto p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      h_ ^= p[i];
      h_ *= 0x100000001b3ULL;
    }
    return *this;
  }
  Fnv64& str(std::string_view s) { return bytes(s.data(), s.size()); }
  Fnv64& u64(std::uint64_t v) { return bytes(&v, sizeof v); }
  Fnv64& symbols(std::span<const Symbol> v) { return bytes(v.data(), v.size_bytes()); }

  Digest final() const {
    std::uint64_t z = h_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

inline Digest digest_bytes(const void* data, std::size_t len) {
  return Fnv64().bytes(data, len).final();
}

inline Digest digest_bytes(const std::vector<std::uint8_t>& v) {
  return digest_bytes(v.data(), v.size());
}

}  // namespace cbnc
