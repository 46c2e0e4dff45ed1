#include "cbnc/strategy.hpp"

#include "cbnc/digest.hpp"

namespace cbnc::proto {

namespace {

// Verbatim forwarding pick. With a known target: first stored block the
// target is not known to hold. Without one (pure broadcast): forward blocks
// as they were received, and cycle the cache once nothing new is pending.
const rlnc::CodedBlock* pick_stored(Node& node, FileState& fs, const std::string& file,
                                    std::optional<NodeId> target) {
  if (fs.stored.empty()) return nullptr;
  if (target) {
    for (const auto& b : fs.stored)
      if (!node.peer_has(*target, {file, b.block_id})) return &b;
    return nullptr;
  }
  while (!fs.fwd_coded.empty()) {
    const std::uint64_t id = fs.fwd_coded.front();
    fs.fwd_coded.pop_front();
    for (const auto& b : fs.stored)
      if (b.block_id == id) return &b;
  }
  return &fs.stored[fs.rr_cursor++ % fs.stored.size()];
}

rlnc::CodedBlock fresh_signed(Node& node, FileState& fs) {
  auto block = rlnc::encode_random(*node.field, fs.sources, rlnc::ref_of(fs.manifest->gen),
                                   node.coding_rng);
  block.provenance.origin = fs.manifest->origin;
  integrity::SignAuthority authority;
  authority.is_publisher = fs.is_publisher;
  authority.full_rank_origin_verified = fs.decoded && fs.origin_verified;
  return integrity::sign_block(std::move(block), node.id, *node.keys, authority);
}

void maybe_attack_coded(Node& node, rlnc::CodedBlock& block) {
  if (!node.attack || node.attack->attacker != node.id) return;
  auto tampered = integrity::tamper(*node.field, block, *node.attack, node.attack_rng);
  if (tampered.coefficients != block.coefficients || tampered.payload != block.payload) {
    block = std::move(tampered);
    if (node.trace) node.trace("tamper", "dig=" + hex64(integrity::block_digest(block)));
  }
}

void maybe_attack_plain(Node& node, PlainBlock& block) {
  if (!node.attack || node.attack->attacker != node.id) return;
  if (node.attack_rng.next_double() >= node.attack->rate) return;
  if (block.symbols.empty()) return;
  const std::size_t at = node.attack_rng.next_below(block.symbols.size());
  const Symbol delta = Symbol(1 + node.attack_rng.next_below(node.field->order() - 1));
  block.symbols[at] = node.field->add(block.symbols[at], delta);
  if (node.trace)
    node.trace("tamper", "file=" + block.file + " index=" + std::to_string(block.index));
}

}  // namespace

bool servable(const Node& node, const std::string& file) {
  auto it = node.files.find(file);
  if (it == node.files.end()) return false;
  const FileState& fs = it->second;
  switch (node.strategy) {
    case StrategyKind::NoCoding:
      return !fs.raw.empty();
    case StrategyKind::SourceOnly:
      return fs.is_publisher || !fs.stored.empty();
    case StrategyKind::FullCache:
      return (fs.decoded && fs.origin_verified) || !fs.stored.empty();
    case StrategyKind::Unrestricted:
      return fs.is_publisher || !fs.stored.empty();
  }
  return false;
}

std::vector<DataMsg> produce_at_source(Node& node, const std::string& file, std::size_t count) {
  auto* fs = node.file_state(file);
  if (!fs || !fs->is_publisher)
    throw NotAuthorized("produce_at_source: node does not publish this file");
  std::vector<DataMsg> out;
  if (node.strategy == StrategyKind::NoCoding) {
    for (const auto& [index, block] : fs->raw) out.push_back({kNoNode, block});
    return out;
  }
  for (std::size_t i = 0; i < count; ++i) out.push_back({kNoNode, fresh_signed(node, *fs)});
  return out;
}

std::optional<DataMsg> serve_block(Node& node, const std::string& file,
                                   std::optional<NodeId> target) {
  auto* fs = node.file_state(file);
  if (!fs) return std::nullopt;
  DataMsg out;
  out.target = target.value_or(kNoNode);

  switch (node.strategy) {
    case StrategyKind::NoCoding: {
      if (fs->raw.empty()) return std::nullopt;
      const PlainBlock* pick = nullptr;
      if (target) {
        for (const auto& [index, block] : fs->raw)
          if (!node.peer_has(*target, {file, index})) {
            pick = &block;
            break;
          }
      } else if (fs->is_publisher) {
        // the source cycles its blocks; broadcast triplication does the rest
        auto it = fs->raw.begin();
        std::advance(it, node.serve_cursor_raw++ % fs->raw.size());
        pick = &it->second;
      } else {
        while (!fs->fwd_raw.empty() && !pick) {
          const std::uint32_t index = fs->fwd_raw.front();
          fs->fwd_raw.pop_front();
          auto it = fs->raw.find(index);
          if (it != fs->raw.end()) pick = &it->second;
        }
        if (!pick) {
          auto it = fs->raw.begin();
          std::advance(it, fs->rr_cursor++ % fs->raw.size());
          pick = &it->second;
        }
      }
      if (!pick) return std::nullopt;
      PlainBlock block = *pick;
      maybe_attack_plain(node, block);
      out.block = std::move(block);
      return out;
    }

    case StrategyKind::SourceOnly: {
      rlnc::CodedBlock block;
      if (fs->is_publisher) {
        block = fresh_signed(node, *fs);
      } else {
        const auto* pick = pick_stored(node, *fs, file, target);
        if (!pick) return std::nullopt;
        block = *pick;  // forwarded verbatim, publisher signature untouched
      }
      maybe_attack_coded(node, block);
      out.block = std::move(block);
      return out;
    }

    case StrategyKind::FullCache: {
      rlnc::CodedBlock block;
      if (fs->decoded && fs->origin_verified) {
        // reassembled and verified: every transmission is a fresh recode
        // over the recovered sources, signed by this cache
        block = fresh_signed(node, *fs);
      } else {
        const auto* pick = pick_stored(node, *fs, file, target);
        if (!pick) return std::nullopt;
        block = *pick;
      }
      maybe_attack_coded(node, block);
      out.block = std::move(block);
      return out;
    }

    case StrategyKind::Unrestricted: {
      rlnc::CodedBlock block;
      if (fs->is_publisher) {
        block = fresh_signed(node, *fs);
      } else if (fs->stored.size() >= node.cfg->accumulation_threshold) {
        // accumulate-and-mix: recode the entire holdings, no signature
        block = rlnc::recode(*node.field, fs->stored, node.coding_rng);
        block.provenance.origin = fs->manifest->origin;
        block.provenance.block = {};
      } else {
        const auto* pick = pick_stored(node, *fs, file, target);
        if (!pick) return std::nullopt;
        block = *pick;
      }
      maybe_attack_coded(node, block);
      out.block = std::move(block);
      return out;
    }
  }
  return std::nullopt;
}

ReceiveVerdict verify_incoming(Node& node, const DataMsg& data, NodeId sender) {
  if (node.blacklist.banned(sender)) return ReceiveVerdict::Drop;
  const bool coded = std::holds_alternative<rlnc::CodedBlock>(data.block);

  if (node.strategy == StrategyKind::NoCoding) {
    if (coded) return ReceiveVerdict::Drop;
    const auto& block = std::get<PlainBlock>(data.block);
    const auto* manifest = node.manifest_of(block.file);
    if (!manifest || block.index >= manifest->block_digests.size())
      return ReceiveVerdict::Drop;
    std::vector<std::uint8_t> bytes;
    bytes.reserve(block.symbols.size());
    for (Symbol s : block.symbols) bytes.push_back(std::uint8_t(s & 0xff));
    return digest_bytes(bytes.data(), bytes.size()) == manifest->block_digests[block.index]
               ? ReceiveVerdict::AcceptAbsorb
               : ReceiveVerdict::Drop;
  }

  if (!coded) return ReceiveVerdict::Drop;
  const auto& block = std::get<rlnc::CodedBlock>(data.block);

  switch (node.strategy) {
    case StrategyKind::Unrestricted:
      return ReceiveVerdict::AcceptAbsorb;  // the modeled vulnerability
    case StrategyKind::SourceOnly: {
      const auto* manifest = node.manifest_of(block.gen.file_id);
      if (!manifest) return ReceiveVerdict::Drop;
      if (block.provenance.block.signer != manifest->publisher) return ReceiveVerdict::Drop;
      if (node.blacklist.banned(block.provenance.block.signer)) return ReceiveVerdict::Drop;
      return integrity::verify_block(block, *node.keys) ? ReceiveVerdict::AcceptAbsorb
                                                        : ReceiveVerdict::Drop;
    }
    case StrategyKind::FullCache: {
      if (!block.provenance.block.present()) return ReceiveVerdict::Drop;
      if (node.blacklist.banned(block.provenance.block.signer)) return ReceiveVerdict::Drop;
      return integrity::verify_block(block, *node.keys) ? ReceiveVerdict::AcceptAbsorb
                                                        : ReceiveVerdict::Drop;
    }
    default:
      return ReceiveVerdict::Drop;
  }
}

}  // namespace cbnc::proto
