#include "cbnc/naming.hpp"

namespace cbnc::naming {

namespace {
struct Probe {
  std::uint64_t h1, h2;
};

Probe probes_for(const ContentName& name, std::uint64_t salt) {
  const std::string rendered = name.render();
  const std::uint64_t h1 = hash_str64(rendered, salt);
  std::uint64_t h2 = hash_str64(rendered, salt ^ 0x6a09e667f3bcc909ULL);
  h2 |= 1;  // odd step so all probes differ
  return {h1, h2};
}
}  // namespace

void BloomFilter::insert(const ContentName& name) {
  const auto [h1, h2] = probes_for(name, salt_);
  for (std::uint32_t i = 0; i < hash_count_; ++i) {
    const std::uint64_t bit = (h1 + i * h2) % bit_count_;
    bits_[bit >> 6] |= 1ULL << (bit & 63);
  }
}

bool BloomFilter::contains(const ContentName& name) const {
  if (bit_count_ == 0) return false;
  const auto [h1, h2] = probes_for(name, salt_);
  for (std::uint32_t i = 0; i < hash_count_; ++i) {
    const std::uint64_t bit = (h1 + i * h2) % bit_count_;
    if (!(bits_[bit >> 6] & (1ULL << (bit & 63)))) return false;
  }
  return true;
}

bool BloomFilter::empty() const {
  for (std::uint64_t w : bits_)
    if (w) return false;
  return true;
}

std::vector<std::uint8_t> BloomFilter::encode() const {
  std::vector<std::uint8_t> out;
  out.reserve(wire_bytes());
  out.push_back(std::uint8_t(hash_count_));
  for (int shift = 56; shift >= 0; shift -= 8)
    out.push_back(std::uint8_t((salt_ >> shift) & 0xff));
  for (std::size_t byte = 0; byte < bit_count_ / 8; ++byte) {
    std::uint8_t v = 0;
    for (int bit = 0; bit < 8; ++bit) {
      const std::size_t index = byte * 8 + bit;
      const bool set = (bits_[index >> 6] >> (index & 63)) & 1;
      if (set) v |= std::uint8_t(0x80u >> bit);  // big-endian bit order
    }
    out.push_back(v);
  }
  return out;
}

}  // namespace cbnc::naming
