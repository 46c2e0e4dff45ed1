#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "cbnc/common.hpp"

namespace cbnc {

enum class FieldKind { BinaryExtension8, Prime };

struct FieldSpec {
  FieldKind kind = FieldKind::BinaryExtension8;
  std::uint32_t order = 256;  // q: 256 for GF(2^8), p for prime fields

  static FieldSpec gf256() { return {FieldKind::BinaryExtension8, 256}; }
  static FieldSpec prime(std::uint32_t p);  // validates primality, 2 <= p <= 65521

  bool operator==(const FieldSpec&) const = default;
  std::string name() const;                       // "gf256" or "prime:<p>"
  static FieldSpec parse(const std::string& s);   // inverse of name(); ConfigInvalid on error
};

// Field arithmetic over canonical representatives in [0, q).
//
// GF(2^8) uses the reduction polynomial x^8+x^4+x^3+x+1 (0x11b) with
// 256-entry log/antilog tables built at construction; a flat 64 KiB product
// table is derived from them for the bulk row kernels. Prime fields use
// modular arithmetic with inverses by exponentiation.
class Field {
 public:
  explicit Field(FieldSpec spec);

  const FieldSpec& spec() const { return spec_; }
  std::uint32_t order() const { return spec_.order; }
  bool is_gf256() const { return spec_.kind == FieldKind::BinaryExtension8; }

  Symbol add(Symbol a, Symbol b) const {
    return is_gf256() ? Symbol(a ^ b) : Symbol((a + b) % spec_.order);
  }
  Symbol sub(Symbol a, Symbol b) const {
    return is_gf256() ? Symbol(a ^ b) : Symbol((a + spec_.order - b) % spec_.order);
  }
  Symbol neg(Symbol a) const { return sub(0, a); }

  Symbol mul(Symbol a, Symbol b) const {
    if (is_gf256()) {
      if (a == 0 || b == 0) return 0;
      return alog_[log_[a] + log_[b]];
    }
    return Symbol((std::uint32_t(a) * b) % spec_.order);
  }

  Symbol inv(Symbol a) const;  // throws ZeroInverse for a == 0
  Symbol div(Symbol a, Symbol b) const { return mul(a, inv(b)); }
  Symbol pow(Symbol a, std::uint64_t e) const;

  // Flat 256x256 product table, GF(2^8) only; row c holds mul(c, x) for all x.
  const std::uint8_t* mul_table() const { return mul_flat_.get(); }

 private:
  FieldSpec spec_;
  std::array<std::uint16_t, 256> log_{};   // log_[a] for a != 0
  std::array<Symbol, 512> alog_{};         // doubled so mul skips the mod 255
  std::unique_ptr<std::uint8_t[]> mul_flat_;
};

bool is_prime(std::uint32_t n);

}  // namespace cbnc
