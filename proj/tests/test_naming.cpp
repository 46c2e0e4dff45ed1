#include <cmath>

#include "cbnc/naming.hpp"
#include "doctest.h"

using namespace cbnc;
using namespace cbnc::naming;

TEST_CASE("content name rendering") {
  CHECK(ContentName{"report.pdf", std::nullopt}.render() == "report.pdf");
  CHECK(ContentName{"report.pdf", 17}.render() == "report.pdf/17");
}

TEST_CASE("bloom filter has no false negatives") {
  BloomFilter filter(1024, 4, 0xabcd);
  std::vector<ContentName> names;
  for (int i = 0; i < 1000; ++i)
    names.push_back({"file" + std::to_string(i), std::uint64_t(i * 31)});
  for (const auto& n : names) filter.insert(n);
  for (const auto& n : names) CHECK(filter.contains(n));
}

TEST_CASE("empty filter contains nothing") {
  BloomFilter filter(1024, 4, 7);
  CHECK(filter.empty());
  CHECK_FALSE(filter.contains({"anything", std::nullopt}));
  CHECK_FALSE(filter.contains({"x", 12}));
}

TEST_CASE("identical insert sequences give identical bit arrays") {
  BloomFilter a(1024, 4, 99), b(1024, 4, 99);
  for (int i = 0; i < 200; ++i) {
    a.insert({"n" + std::to_string(i), std::nullopt});
    b.insert({"n" + std::to_string(i), std::nullopt});
  }
  CHECK(a == b);
  BloomFilter c(1024, 4, 100);  // different salt, different bits
  c.insert({"n0", std::nullopt});
  BloomFilter d(1024, 4, 99);
  d.insert({"n0", std::nullopt});
  CHECK_FALSE(c == d);
}

TEST_CASE("false positive rate is near the analytic estimate") {
  const std::size_t bits = 1024;
  const std::uint32_t k = 4;
  BloomFilter filter(bits, k, 0x1234);
  const int inserted = 100;
  for (int i = 0; i < inserted; ++i) filter.insert({"present" + std::to_string(i), std::nullopt});

  int false_positives = 0;
  const int probes = 10000;
  for (int i = 0; i < probes; ++i)
    if (filter.contains({"absent" + std::to_string(i), std::nullopt})) ++false_positives;

  const double expected =
      std::pow(1.0 - std::exp(-double(k) * inserted / double(bits)), double(k));
  const double observed = double(false_positives) / probes;
  CHECK(observed <= expected * 1.5 + 1e-4);
  CHECK(observed >= expected * 0.5 - 1e-4);
}

TEST_CASE("wire size accounting") {
  BloomFilter filter(1024, 4, 1);
  CHECK(filter.wire_bytes() == 128 + 1 + 8);
}

TEST_CASE("wire encoding layout: k, salt, then bits in big-endian bit order") {
  BloomFilter filter(64, 3, 0x0102030405060708ULL);
  auto bytes = filter.encode();
  REQUIRE(bytes.size() == filter.wire_bytes());
  CHECK(bytes[0] == 3);
  for (int i = 0; i < 8; ++i) CHECK(bytes[1 + i] == i + 1);  // big-endian salt
  for (std::size_t i = 9; i < bytes.size(); ++i) CHECK(bytes[i] == 0);

  filter.insert({"x", std::nullopt});
  auto set_bytes = filter.encode();
  int set_bits = 0;
  for (std::size_t i = 9; i < set_bytes.size(); ++i)
    for (int b = 0; b < 8; ++b)
      if (set_bytes[i] & (0x80u >> b)) ++set_bits;
  CHECK(set_bits >= 1);
  CHECK(set_bits <= 3);

  // bit 0 of the array maps to the most significant bit of the first byte
  BloomFilter probe(64, 1, 0);
  for (std::uint64_t salt = 0;; ++salt) {
    BloomFilter f(64, 1, salt);
    f.insert({"y", std::nullopt});
    if (f.words()[0] == 1) {  // found a salt hashing "y" to bit 0
      CHECK(f.encode()[9] == 0x80);
      break;
    }
    REQUIRE(salt < 10000);
  }
}
