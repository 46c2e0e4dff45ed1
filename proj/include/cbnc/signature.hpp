#pragma once

#include <cstdint>

#include "cbnc/common.hpp"

namespace cbnc {

// Simulated signature: a keyed tag over a digest. Stands in for public-key
// signatures; the scenario key ring plays the role of the PKI.
struct Signature {
  NodeId signer = kNoNode;
  Digest over = 0;         // digest of the signed bytes
  std::uint64_t tag = 0;   // keyed authentication code

  bool present() const { return signer != kNoNode; }
  bool operator==(const Signature&) const = default;
};

// origin: publisher signature over the whole-file digest, carried by every
// block. block: signature by the most recent authorized coder over this
// block's bytes; absent for blocks recoded by unauthorized nodes.
struct SignatureChain {
  Signature origin;
  Signature block;

  bool operator==(const SignatureChain&) const = default;
};

}  // namespace cbnc
