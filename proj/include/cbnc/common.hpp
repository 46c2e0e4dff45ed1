#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace cbnc {

// Symbols are field elements; uint16_t covers GF(2^8) and prime fields up to 65521.
using Symbol = std::uint16_t;

// Node identifiers are small integers assigned per scenario. -1 means "none".
using NodeId = std::int32_t;
inline constexpr NodeId kNoNode = -1;

// Simulated time in integer nanoseconds so that event ordering and trace
// output are exact and reproducible.
using SimTime = std::int64_t;
inline constexpr SimTime kSecond = 1'000'000'000;

inline SimTime seconds_to_sim(double s) { return static_cast<SimTime>(s * 1e9 + 0.5); }
inline double sim_to_seconds(SimTime t) { return static_cast<double>(t) / 1e9; }

// 64-bit content digests; see digest.hpp.
using Digest = std::uint64_t;

struct ZeroInverse : std::domain_error {
  ZeroInverse() : std::domain_error("inverse of zero field element") {}
};
struct EmptyFile : std::invalid_argument {
  EmptyFile() : std::invalid_argument("cannot segment an empty file") {}
};
struct DimensionMismatch : std::invalid_argument {
  explicit DimensionMismatch(const std::string& what) : std::invalid_argument(what) {}
};
struct GenerationMismatch : std::invalid_argument {
  GenerationMismatch() : std::invalid_argument("block belongs to a different generation") {}
};
struct RankDeficient : std::logic_error {
  RankDeficient() : std::logic_error("decode requires full rank") {}
};
struct NotAuthorized : std::logic_error {
  explicit NotAuthorized(const std::string& what) : std::logic_error(what) {}
};
struct SenderBusy : std::logic_error {
  SenderBusy() : std::logic_error("sender already has an outstanding transmission") {}
};
struct ConfigInvalid : std::invalid_argument {
  explicit ConfigInvalid(const std::string& what) : std::invalid_argument(what) {}
};
struct InsufficientSeeds : std::invalid_argument {
  explicit InsufficientSeeds(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace cbnc
