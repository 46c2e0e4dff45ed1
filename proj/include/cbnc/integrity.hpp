#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "cbnc/rlnc.hpp"
#include "cbnc/signature.hpp"

namespace cbnc::integrity {

// Per-scenario key material. Verification recomputes the keyed tag, playing
// the role a PKI would; key strength itself is out of model.
class KeyRing {
 public:
  std::uint64_t key_of(NodeId node) const;  // deterministic per (seed, node)
  explicit KeyRing(std::uint64_t scenario_seed) : seed_(scenario_seed) {}

 private:
  std::uint64_t seed_;
};

Digest block_digest(const rlnc::CodedBlock& block);

std::uint64_t make_tag(std::uint64_t key, Digest over);

// Authorization evidence the caller must hold: publishers always sign their
// own encodings; other nodes only after reaching full rank and verifying the
// origin signature.
struct SignAuthority {
  bool is_publisher = false;
  bool full_rank_origin_verified = false;
};

// Sets the block signature; throws NotAuthorized for partial caches.
rlnc::CodedBlock sign_block(rlnc::CodedBlock block, NodeId signer, const KeyRing& keys,
                            const SignAuthority& authority);

bool verify_block(const rlnc::CodedBlock& block, const KeyRing& keys);

Signature sign_origin(Digest file_digest, NodeId publisher, const KeyRing& keys);
bool verify_origin(const Signature& origin, Digest file_digest, const KeyRing& keys);

enum class BlacklistReason { Undecodable, DigestMismatch };

// Once a node is entered it is never again accepted as a block source.
class Blacklist {
 public:
  void add(NodeId node, BlacklistReason reason) { entries_.emplace(node, reason); }
  bool banned(NodeId node) const { return entries_.count(node) > 0; }
  std::size_t size() const { return entries_.size(); }
  const std::map<NodeId, BlacklistReason>& entries() const { return entries_; }

 private:
  std::map<NodeId, BlacklistReason> entries_;
};

enum class AttackMode { CorruptCoefficients, CorruptPayload };

struct AttackConfig {
  NodeId attacker = kNoNode;
  AttackMode mode = AttackMode::CorruptPayload;
  double rate = 1.0;  // fraction of forwarded blocks tampered, (0,1]
};

// Applies the configured corruption with probability config.rate. Corrupt
// coefficients: the coefficient vector is replaced with a fresh random one,
// leaving the payload inconsistent. Corrupt payload: a payload symbol is
// shifted by a nonzero delta. The stale block signature no longer matches in
// either mode.
rlnc::CodedBlock tamper(const Field& field, rlnc::CodedBlock block, const AttackConfig& config,
                        RngStream& rng);

// One cache the isolation procedure may solo-download from. claims_full
// distinguishes a cache advertising a decodable copy from a partial cache,
// for which an incomplete solo stream proves nothing.
struct SoloCandidate {
  NodeId id = kNoNode;
  bool claims_full = true;
};

using CacheFetch =
    std::function<std::vector<rlnc::CodedBlock>(NodeId cache, std::size_t count)>;

struct IsolationResult {
  NodeId polluter = kNoNode;
  BlacklistReason reason = BlacklistReason::DigestMismatch;
  std::size_t solo_rounds = 0;  // caches tried
};

// Downloads a fresh solo stream from each candidate cache in ascending id
// order and accuses the first whose stream carries an invalid signature,
// decodes to the wrong digest, or (for a cache claiming a full copy) cannot
// reach full rank. nullopt when every solo stream checks out; the accused
// cache is added to the receiver's blacklist.
std::optional<IsolationResult> isolate_polluter(const Field& field, const rlnc::Generation& gen,
                                                std::vector<SoloCandidate> caches,
                                                const CacheFetch& fetch, const KeyRing& keys,
                                                Blacklist& blacklist,
                                                bool check_signatures = true);

}  // namespace cbnc::integrity
