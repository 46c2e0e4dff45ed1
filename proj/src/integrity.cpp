#include "cbnc/integrity.hpp"

#include <algorithm>

#include "cbnc/digest.hpp"

namespace cbnc::integrity {

std::uint64_t KeyRing::key_of(NodeId node) const {
  std::uint64_t st = seed_ ^ 0x7d0c45c2a3f95b11ULL ^ (std::uint64_t(std::uint32_t(node)) << 17);
  return splitmix64(st);
}

Digest block_digest(const rlnc::CodedBlock& block) {
  Fnv64 h;
  h.str(block.gen.file_id)
      .u64(block.gen.block_count)
      .u64(block.gen.symbols_per_block)
      .u64(block.block_id)
      .symbols(block.coefficients)
      .symbols(block.payload);
  return h.final();
}

std::uint64_t make_tag(std::uint64_t key, Digest over) {
  return Fnv64().u64(key).u64(over).u64(key).final();
}

rlnc::CodedBlock sign_block(rlnc::CodedBlock block, NodeId signer, const KeyRing& keys,
                            const SignAuthority& authority) {
  if (!authority.is_publisher && !authority.full_rank_origin_verified)
    throw NotAuthorized("only the publisher or a verified full cache may sign blocks");
  Signature sig;
  sig.signer = signer;
  sig.over = block_digest(block);
  sig.tag = make_tag(keys.key_of(signer), sig.over);
  block.provenance.block = sig;
  return block;
}

bool verify_block(const rlnc::CodedBlock& block, const KeyRing& keys) {
  const Signature& sig = block.provenance.block;
  if (!sig.present()) return false;
  const Digest actual = block_digest(block);
  return sig.over == actual && sig.tag == make_tag(keys.key_of(sig.signer), actual);
}

Signature sign_origin(Digest file_digest, NodeId publisher, const KeyRing& keys) {
  Signature sig;
  sig.signer = publisher;
  sig.over = file_digest;
  sig.tag = make_tag(keys.key_of(publisher), file_digest);
  return sig;
}

bool verify_origin(const Signature& origin, Digest file_digest, const KeyRing& keys) {
  if (!origin.present()) return false;
  return origin.over == file_digest &&
         origin.tag == make_tag(keys.key_of(origin.signer), file_digest);
}

rlnc::CodedBlock tamper(const Field& field, rlnc::CodedBlock block, const AttackConfig& config,
                        RngStream& rng) {
  if (rng.next_double() >= config.rate) return block;
  if (config.mode == AttackMode::CorruptCoefficients) {
    for (auto& c : block.coefficients) c = static_cast<Symbol>(rng.next_below(field.order()));
  } else {
    if (!block.payload.empty()) {
      const std::size_t at = rng.next_below(block.payload.size());
      const Symbol delta = static_cast<Symbol>(1 + rng.next_below(field.order() - 1));
      block.payload[at] = field.add(block.payload[at], delta);
    }
  }
  return block;
}

std::optional<IsolationResult> isolate_polluter(const Field& field, const rlnc::Generation& gen,
                                                std::vector<SoloCandidate> caches,
                                                const CacheFetch& fetch, const KeyRing& keys,
                                                Blacklist& blacklist, bool check_signatures) {
  std::sort(caches.begin(), caches.end(),
            [](const SoloCandidate& a, const SoloCandidate& b) { return a.id < b.id; });

  IsolationResult result;
  for (const SoloCandidate& cache : caches) {
    ++result.solo_rounds;

    // Fresh solo stream: up to 4m blocks before giving up on full rank.
    const std::size_t budget = 4 * gen.block_count;
    rlnc::DecoderState solo(rlnc::ref_of(gen), &field);
    bool bad_signature = false;
    std::size_t delivered = 0;
    while (solo.rank() < gen.block_count && delivered < budget) {
      auto batch = fetch(cache.id, gen.block_count);
      if (batch.empty()) break;
      for (auto& block : batch) {
        ++delivered;
        if (check_signatures && !verify_block(block, keys)) {
          bad_signature = true;
          break;
        }
        solo.absorb(block, cache.id);
        if (solo.full()) break;
      }
      if (bad_signature) break;
    }

    if (bad_signature) {
      result.polluter = cache.id;
      result.reason = BlacklistReason::DigestMismatch;
      blacklist.add(cache.id, result.reason);
      return result;
    }
    if (!solo.full()) {
      if (cache.claims_full && delivered >= budget) {
        result.polluter = cache.id;
        result.reason = BlacklistReason::Undecodable;
        blacklist.add(cache.id, result.reason);
        return result;
      }
      continue;  // partial cache, inconclusive
    }
    const auto bytes = solo.decode(gen);
    if (digest_bytes(bytes.data(), bytes.size()) != gen.file_digest) {
      result.polluter = cache.id;
      result.reason = BlacklistReason::DigestMismatch;
      blacklist.add(cache.id, result.reason);
      return result;
    }
  }
  return std::nullopt;
}

}  // namespace cbnc::integrity
