#include "cbnc/field.hpp"

namespace cbnc {

bool is_prime(std::uint32_t n) {
  if (n < 2) return false;
  for (std::uint32_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

FieldSpec FieldSpec::prime(std::uint32_t p) {
  if (p < 2 || p > 65521 || !is_prime(p))
    throw ConfigInvalid("field: prime order must be a prime in [2, 65521], got " +
                        std::to_string(p));
  return {FieldKind::Prime, p};
}

std::string FieldSpec::name() const {
  return kind == FieldKind::BinaryExtension8 ? "gf256" : "prime:" + std::to_string(order);
}

FieldSpec FieldSpec::parse(const std::string& s) {
  if (s == "gf256") return gf256();
  if (s.rfind("prime:", 0) == 0) {
    std::uint32_t p = 0;
    try {
      p = static_cast<std::uint32_t>(std::stoul(s.substr(6)));
    } catch (const std::exception&) {
      throw ConfigInvalid("field: cannot parse prime order in '" + s + "'");
    }
    return prime(p);
  }
  throw ConfigInvalid("field: expected 'gf256' or 'prime:<p>', got '" + s + "'");
}

namespace {
constexpr std::uint32_t kPoly = 0x11b;  // x^8+x^4+x^3+x+1
constexpr std::uint8_t kGenerator = 0x03;

std::uint8_t gf256_raw_mul(std::uint8_t a, std::uint8_t b) {
  std::uint32_t p = 0, x = a;
  while (b) {
    if (b & 1) p ^= x;
    x <<= 1;
    if (x & 0x100) x ^= kPoly;
    b >>= 1;
  }
  return static_cast<std::uint8_t>(p);
}
}  // namespace

Field::Field(FieldSpec spec) : spec_(spec) {
  if (spec_.kind == FieldKind::Prime) {
    if (!is_prime(spec_.order) || spec_.order < 2 || spec_.order > 65521)
      throw ConfigInvalid("invalid prime field order " + std::to_string(spec_.order));
    return;
  }
  if (spec_.order != 256) throw ConfigInvalid("binary extension field must have order 256");

  // log/antilog by walking powers of the generator.
  std::uint8_t v = 1;
  for (int i = 0; i < 255; ++i) {
    alog_[i] = v;
    log_[v] = static_cast<std::uint16_t>(i);
    v = gf256_raw_mul(v, kGenerator);
  }
  for (int i = 255; i < 512; ++i) alog_[i] = alog_[i - 255];

  mul_flat_ = std::make_unique<std::uint8_t[]>(256 * 256);
  for (int a = 0; a < 256; ++a)
    for (int b = 0; b < 256; ++b)
      mul_flat_[a * 256 + b] =
          (a == 0 || b == 0) ? 0 : static_cast<std::uint8_t>(alog_[log_[a] + log_[b]]);
}

Symbol Field::inv(Symbol a) const {
  if (a == 0) throw ZeroInverse();
  if (is_gf256()) return alog_[255 - log_[a]];
  return pow(a, spec_.order - 2);
}

Symbol Field::pow(Symbol a, std::uint64_t e) const {
  Symbol result = 1, base = a;
  while (e) {
    if (e & 1) result = mul(result, base);
    base = mul(base, base);
    e >>= 1;
  }
  return result;
}

}  // namespace cbnc
