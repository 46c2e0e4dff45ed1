#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cbnc/common.hpp"
#include "cbnc/rng.hpp"

namespace cbnc::naming {

// Content names render as "fileName/blockID" when a block id is present.
struct ContentName {
  std::string file;
  std::optional<std::uint64_t> block;

  std::string render() const {
    return block ? file + "/" + std::to_string(*block) : file;
  }
  bool operator==(const ContentName&) const = default;
  auto operator<=>(const ContentName&) const = default;
};

// Double-hashing bloom filter: h_i = h1 + i*h2 over the salted name hash.
// No false negatives; false-positive rate set by bits/hashes.
class BloomFilter {
 public:
  BloomFilter() = default;
  BloomFilter(std::size_t bit_count, std::uint32_t hash_count, std::uint64_t salt)
      : bits_((bit_count + 63) / 64, 0), bit_count_(bit_count), hash_count_(hash_count),
        salt_(salt) {}

  void insert(const ContentName& name);
  bool contains(const ContentName& name) const;
  bool empty() const;

  std::size_t bit_count() const { return bit_count_; }
  std::uint32_t hash_count() const { return hash_count_; }
  std::uint64_t salt() const { return salt_; }
  const std::vector<std::uint64_t>& words() const { return bits_; }

  // Wire encoding: hash count, salt (big-endian), then the bit array in
  // big-endian bit order.
  std::size_t wire_bytes() const { return bit_count_ / 8 + 1 + 8; }
  std::vector<std::uint8_t> encode() const;

  bool operator==(const BloomFilter&) const = default;

 private:
  std::vector<std::uint64_t> bits_;
  std::size_t bit_count_ = 0;
  std::uint32_t hash_count_ = 0;
  std::uint64_t salt_ = 0;
};

// Periodic cache summary: full files (decodable, digest-verified) and block
// level names the owner can serve. Coded content is requested per file, so
// the summary also advertises decoder rank per file.
struct CacheSummaryView {
  NodeId owner = kNoNode;
  BloomFilter full_files;
  BloomFilter partial_blocks;
  std::map<std::string, std::size_t> file_rank;
  SimTime as_of = 0;

  std::size_t wire_bytes() const {
    const std::size_t per_file = file_rank.size() * (8 + 2);
    return full_files.wire_bytes() + partial_blocks.wire_bytes() + per_file + 8;
  }
};

}  // namespace cbnc::naming
