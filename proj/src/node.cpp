#include "cbnc/node.hpp"

#include <algorithm>

#include "cbnc/digest.hpp"
#include "cbnc/strategy.hpp"

namespace cbnc::proto {

namespace {
std::string offer_key(const naming::ContentName& name, NodeId target) {
  return name.render() + "@" + std::to_string(target);
}
std::string file_target_key(const std::string& file, NodeId target) {
  return file + "@" + std::to_string(target);
}
char hexdigit(unsigned v) { return v < 10 ? char('0' + v) : char('a' + v - 10); }
}  // namespace

std::string hex64(std::uint64_t v) {
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[i] = hexdigit(unsigned(v & 0xf));
    v >>= 4;
  }
  return s;
}

Node::Node(NodeId node_id, Role node_role, const ScenarioConfig& scenario, const Field& fld,
           const integrity::KeyRing& keyring)
    : id(node_id),
      role(node_role),
      strategy(scenario.strategy_of(node_id)),
      cfg(&scenario),
      field(&fld),
      keys(&keyring),
      coding_rng(substream(scenario.seed, "coding", std::uint64_t(std::uint32_t(node_id)))),
      serve_rng(substream(scenario.seed, "serve", std::uint64_t(std::uint32_t(node_id)))),
      attack_rng(substream(scenario.seed, "attack", std::uint64_t(std::uint32_t(node_id)))),
      bloom_salt(scenario.seed ^ 0x626c6f6f6dULL) {
  if (scenario.attack && scenario.attack->attacker == node_id) attack = scenario.attack;
}

void Node::install_file(const FileManifest& manifest,
                        const std::vector<rlnc::SourceVector>* sources) {
  FileState fs;
  fs.manifest = &manifest;
  fs.decoder = rlnc::DecoderState(rlnc::ref_of(manifest.gen), field);
  if (sources) {  // publisher holds the original
    fs.is_publisher = true;
    fs.sources = *sources;
    fs.origin_verified = true;
    fs.decoded = true;
    fs.decoded_at = 0;
    if (strategy == StrategyKind::NoCoding)
      for (const auto& sv : *sources)
        fs.raw[std::uint32_t(sv.index)] =
            PlainBlock{manifest.gen.file_id, std::uint32_t(sv.index), sv.symbols};
  }
  files.emplace(manifest.gen.file_id, std::move(fs));
}

void Node::want(const std::string& file) { own_interests.insert(file); }

bool Node::wants_satisfied() const {
  for (const auto& f : own_interests) {
    auto it = files.find(f);
    if (it == files.end() || !it->second.decoded) return false;
  }
  return true;
}

FileState* Node::file_state(const std::string& file) {
  auto it = files.find(file);
  return it == files.end() ? nullptr : &it->second;
}

const FileManifest* Node::manifest_of(const std::string& file) const {
  auto it = files.find(file);
  return it == files.end() ? nullptr : it->second.manifest;
}

bool Node::peer_has(NodeId peer, const naming::ContentName& name) const {
  auto it = facts.find(peer);
  if (it == facts.end()) return false;
  if (it->second.has_names.count(name.render())) return true;
  return false;
}

bool Node::peer_complete(NodeId peer, const std::string& file) const {
  auto it = facts.find(peer);
  if (it == facts.end()) return false;
  if (it->second.complete_files.count(file)) return true;
  auto rank = it->second.rank.find(file);
  if (rank != it->second.rank.end()) {
    const auto* manifest = manifest_of(file);
    if (manifest && rank->second >= manifest->gen.block_count) return true;
  }
  return false;
}

void Node::note_peer_has(NodeId peer, const naming::ContentName& name) {
  facts[peer].has_names.insert(name.render());
}

void Node::note_peer_rank_bump(NodeId peer, const std::string& file) {
  const auto* manifest = manifest_of(file);
  if (!manifest) return;
  auto& rank = facts[peer].rank[file];
  rank = std::min(manifest->gen.block_count, rank + 1);
}

naming::CacheSummaryView Node::summarize(SimTime now) const {
  naming::CacheSummaryView view;
  view.owner = id;
  view.as_of = now;
  view.full_files = naming::BloomFilter(cfg->bloom_bits, cfg->bloom_hashes, bloom_salt);
  view.partial_blocks = naming::BloomFilter(cfg->bloom_bits, cfg->bloom_hashes, bloom_salt);
  for (const auto& [file, fs] : files) {
    std::size_t rank = 0;
    if (fs.decoded) {
      view.full_files.insert({file, std::nullopt});
      rank = fs.manifest->gen.block_count;
    } else {
      rank = strategy == StrategyKind::NoCoding ? fs.raw.size() : fs.decoder.rank();
    }
    if (rank > 0) view.file_rank[file] = rank;
    if (strategy == StrategyKind::NoCoding) {
      for (const auto& [index, _] : fs.raw) view.partial_blocks.insert({file, index});
    } else {
      for (const auto& b : fs.stored) view.partial_blocks.insert({file, b.block_id});
    }
  }
  return view;
}

std::vector<Message> Node::relayed_interests(SimTime now) {
  std::vector<Message> out;
  const SimTime fresh_window = seconds_to_sim(3 * cfg->interest_period_s);
  // group relayable files by outgoing ttl
  std::map<int, std::vector<std::string>> by_ttl;
  for (auto it = heard_interest.begin(); it != heard_interest.end();) {
    const auto& [file, entry] = *it;
    if (now - entry.second > fresh_window) {
      it = heard_interest.erase(it);
      continue;
    }
    if (entry.first >= 1) by_ttl[entry.first - 1].push_back(file);
    ++it;
  }
  for (const auto& [ttl, names] : by_ttl) {
    naming::BloomFilter filter(cfg->bloom_bits, cfg->bloom_hashes, bloom_salt);
    for (const auto& f : names) filter.insert({f, std::nullopt});
    out.push_back({id, InterestMsg{std::move(filter), ttl}});
  }
  return out;
}

std::vector<Message> Node::on_timer(TimerKind kind, SimTime now) {
  std::vector<Message> out;
  switch (kind) {
    case TimerKind::Interest: {
      naming::BloomFilter filter(cfg->bloom_bits, cfg->bloom_hashes, bloom_salt);
      for (const auto& f : own_interests) {
        auto* fs = file_state(f);
        if (fs && !fs->decoded) filter.insert({f, std::nullopt});
      }
      out.push_back({id, InterestMsg{std::move(filter), cfg->interest_ttl}});
      for (auto& m : relayed_interests(now)) out.push_back(std::move(m));
      break;
    }
    case TimerKind::Request: {
      // every file this node is willing to receive now: own incomplete wants
      // plus proxy pulls for content neighbors asked about
      naming::BloomFilter filter(cfg->bloom_bits, cfg->bloom_hashes, bloom_salt);
      bool any = false;
      const SimTime crumb_window = seconds_to_sim(5 * cfg->request_period_s);
      for (auto& [file, fs] : files) {
        if (fs.decoded) continue;
        bool willing = own_interests.count(file) > 0;
        if (!willing && cfg->promiscuous) {
          if (heard_interest.count(file)) willing = true;
          auto c = crumbs.find(file);
          if (c != crumbs.end())
            for (const auto& [_, at] : c->second)
              if (now - at <= crumb_window) willing = true;
        }
        if (willing) {
          filter.insert({file, std::nullopt});
          any = true;
        }
      }
      if (any) out.push_back({id, RequestMsg{std::move(filter)}});
      break;
    }
    case TimerKind::Summary:
      out.push_back({id, SummaryMsg{summarize(now)}});
      break;
    case TimerKind::ServeTick: {
      // pure-broadcast opportunity: one block, rotating across servable files
      std::vector<std::string> ready;
      for (const auto& [file, _] : files)
        if (servable(*this, file)) ready.push_back(file);
      if (ready.empty()) break;
      const std::string& file = ready[serve_cursor++ % ready.size()];
      if (auto data = serve_block(*this, file, std::nullopt))
        out.push_back({id, std::move(*data)});
      break;
    }
  }
  return out;
}

void Node::handle_interest(const InterestMsg& m, NodeId sender, SimTime now) {
  for (const auto& [file, fs] : files) {
    if (!m.names.contains({file, std::nullopt})) continue;
    crumbs[file][sender] = now;
    auto it = heard_interest.find(file);
    if (it == heard_interest.end() || it->second.first < m.ttl)
      heard_interest[file] = {m.ttl, now};
    else
      it->second.second = now;
  }
}

void Node::handle_request(const RequestMsg& m, NodeId sender, SimTime now,
                          std::vector<Message>& out) {
  for (const auto& [file, fs] : files) {
    if (!m.names.contains({file, std::nullopt})) continue;
    crumbs[file][sender] = now;
    // blacklist gates inbound data only; a blacklisted requester is still served
    if (cfg->handshake && servable(*this, file) && !peer_complete(sender, file))
      enqueue_offer(file, sender);
  }
  start_next_offer(now, out);
}

void Node::handle_summary(const SummaryMsg& m, NodeId sender, SimTime now) {
  PeerFacts& pf = facts[sender];
  pf.summary_as_of = now;
  for (const auto& [file, rank] : m.view.file_rank) pf.rank[file] = rank;
  for (const auto& [file, _] : files)
    if (m.view.full_files.contains({file, std::nullopt})) pf.complete_files.insert(file);
}

void Node::handle_rtsb(const RtsbMsg& m, NodeId sender, SimTime now,
                       std::vector<Message>& out) {
  RtsbReplyMsg reply;
  reply.name = m.name;
  reply.target = sender;

  auto* fs = file_state(m.name.file);
  const std::string rendered = m.name.render();
  bool already_have = false;
  if (fs && m.name.block) {
    if (strategy == StrategyKind::NoCoding)
      already_have = fs->raw.count(std::uint32_t(*m.name.block)) > 0;
    else
      already_have = fs->seen_ids.count(*m.name.block) > 0;
  }
  auto inflight = inbound.find(rendered);
  const bool busy = inflight != inbound.end() && inflight->second.deadline > now &&
                    inflight->second.from != sender;

  if (already_have) {
    reply.accept = false;
    reply.code = RejectCode::BlockAlreadyReceived;
  } else if (!fs || fs->decoded) {
    reply.accept = false;
    reply.code = RejectCode::FileAlreadyReceived;
  } else if (busy) {
    reply.accept = false;
    reply.code = RejectCode::BeingSentByOther;
  } else {
    reply.accept = true;
    inbound[rendered] = {sender, now + seconds_to_sim(cfg->handshake_timeout_s)};
    if (arm_timeout) arm_timeout("i:" + rendered, sender, inbound[rendered].deadline);
  }
  out.push_back({id, std::move(reply)});
}

void Node::handle_rtsb_reply(const RtsbReplyMsg& m, NodeId sender, SimTime now,
                             std::vector<Message>& out) {
  const std::string key = offer_key(m.name, sender);
  auto it = outbound.find(key);
  if (it == outbound.end()) return;  // stale reply
  if (m.accept) {
    OutboundHandshake& hs = it->second;
    hs.waiting_ack = true;
    hs.data_sends = 1;
    hs.deadline = now + seconds_to_sim(cfg->handshake_timeout_s);
    if (arm_timeout) arm_timeout("o:" + key, sender, hs.deadline);
    out.push_back({id, hs.data});
    return;
  }
  switch (m.code) {
    case RejectCode::BlockAlreadyReceived:
      note_peer_has(sender, m.name);
      break;
    case RejectCode::FileAlreadyReceived:
      facts[sender].complete_files.insert(m.name.file);
      break;
    case RejectCode::BeingSentByOther:
      break;
  }
  outbound.erase(it);
  start_next_offer(now, out);
}

void Node::handle_ack(const AckMsg& m, NodeId sender, SimTime now) {
  const std::string key = offer_key(m.name, sender);
  auto it = outbound.find(key);
  if (it != outbound.end()) outbound.erase(it);
  note_peer_has(sender, m.name);
  if (m.name.block && strategy != StrategyKind::NoCoding)
    note_peer_rank_bump(sender, m.name.file);
  // keep streaming while the target still lacks content
  if (!peer_complete(sender, m.name.file) && servable(*this, m.name.file))
    enqueue_offer(m.name.file, sender);
  (void)now;
}

std::vector<Message> Node::on_message(const Message& msg, SimTime now) {
  std::vector<Message> out;
  if (msg.sender == id) return out;

  if (std::holds_alternative<InterestMsg>(msg.body)) {
    handle_interest(std::get<InterestMsg>(msg.body), msg.sender, now);
  } else if (std::holds_alternative<RequestMsg>(msg.body)) {
    handle_request(std::get<RequestMsg>(msg.body), msg.sender, now, out);
  } else if (std::holds_alternative<SummaryMsg>(msg.body)) {
    handle_summary(std::get<SummaryMsg>(msg.body), msg.sender, now);
  } else if (std::holds_alternative<RtsbMsg>(msg.body)) {
    const auto& m = std::get<RtsbMsg>(msg.body);
    if (m.target == id) handle_rtsb(m, msg.sender, now, out);
  } else if (std::holds_alternative<RtsbReplyMsg>(msg.body)) {
    const auto& m = std::get<RtsbReplyMsg>(msg.body);
    if (m.target == id) {
      handle_rtsb_reply(m, msg.sender, now, out);
    } else {
      // overheard replies update what we believe the replier holds
      if (!m.accept && m.code == RejectCode::FileAlreadyReceived)
        facts[msg.sender].complete_files.insert(m.name.file);
      if (!m.accept && m.code == RejectCode::BlockAlreadyReceived)
        note_peer_has(msg.sender, m.name);
    }
  } else if (std::holds_alternative<DataMsg>(msg.body)) {
    const auto& data = std::get<DataMsg>(msg.body);
    note_peer_has(msg.sender, name_of(data));
    const bool addressed = data.target == id || data.target == kNoNode;
    if (addressed)
      process_data(data, msg.sender, now, data.target == id, out);
    else if (cfg->promiscuous)
      process_data(data, msg.sender, now, false, out);
  } else if (std::holds_alternative<AckMsg>(msg.body)) {
    const auto& m = std::get<AckMsg>(msg.body);
    if (m.to == id) {
      handle_ack(m, msg.sender, now);
      start_next_offer(now, out);
    } else {
      // the acker now holds the named block; cancel any not-yet-accepted
      // offer of the same name toward it
      note_peer_has(msg.sender, m.name);
      if (m.name.block && strategy != StrategyKind::NoCoding)
        note_peer_rank_bump(msg.sender, m.name.file);
      const std::string key = offer_key(m.name, msg.sender);
      auto it = outbound.find(key);
      if (it != outbound.end() && !it->second.waiting_ack) {
        if (trace) trace("suppress", "name=" + m.name.render());
        outbound.erase(it);
        start_next_offer(now, out);
      }
    }
  }
  return out;
}

void Node::process_data(const DataMsg& data, NodeId sender, SimTime now, bool addressed,
                        std::vector<Message>& out) {
  const naming::ContentName name = name_of(data);
  auto* fs = file_state(name.file);
  if (!fs) return;

  const ReceiveVerdict verdict = verify_incoming(*this, data, sender);
  if (verdict == ReceiveVerdict::Drop) {
    ++verify_drops;
    if (trace) {
      std::string detail = "file=" + name.file;
      if (std::holds_alternative<rlnc::CodedBlock>(data.block))
        detail += " dig=" + hex64(integrity::block_digest(std::get<rlnc::CodedBlock>(data.block)));
      trace("vdrop", detail);
    }
    return;
  }

  bool was_innovative = false;
  if (std::holds_alternative<rlnc::CodedBlock>(data.block)) {
    const auto& block = std::get<rlnc::CodedBlock>(data.block);
    fs->seen_ids.insert(block.block_id);
    ++absorbed;
    rlnc::Verdict v = rlnc::Verdict::Redundant;
    if (!fs->decoded) {
      v = fs->decoder.absorb(block, sender);
      if (v == rlnc::Verdict::Innovative) {
        ++innovative;
        fs->stored.push_back(block);
        fs->fwd_coded.push_back(block.block_id);
        was_innovative = true;
      }
    }
    if (trace)
      trace("absorb", "file=" + name.file + " dig=" + hex64(integrity::block_digest(block)) +
                          " verdict=" +
                          (v == rlnc::Verdict::Innovative ? "innovative" : "redundant") +
                          " rank=" + std::to_string(fs->decoder.rank()));
  } else {
    const auto& block = std::get<PlainBlock>(data.block);
    ++absorbed;
    if (!fs->raw.count(block.index)) {
      fs->raw[block.index] = block;
      fs->fwd_raw.push_back(block.index);
      ++innovative;
      was_innovative = true;
    }
    if (trace)
      trace("absorb", "file=" + name.file + " index=" + std::to_string(block.index) +
                          " verdict=" + (was_innovative ? "innovative" : "redundant") +
                          " held=" + std::to_string(fs->raw.size()));
  }

  if (addressed && cfg->handshake) out.push_back({id, AckMsg{name, sender}});

  try_decode(name.file, *fs, now);

  // breadcrumb return path: offer onward to whoever asked for this file
  if (cfg->handshake && was_innovative) {
    auto c = crumbs.find(name.file);
    if (c != crumbs.end()) {
      const SimTime crumb_window = seconds_to_sim(5 * cfg->request_period_s);
      for (const auto& [requester, at] : c->second) {
        if (requester == sender || requester == id) continue;
        if (now - at > crumb_window) continue;
        if (!peer_complete(requester, name.file) && servable(*this, name.file))
          enqueue_offer(name.file, requester);
      }
    }
    start_next_offer(now, out);
  }
}

void Node::try_decode(const std::string& file, FileState& fs, SimTime now) {
  if (fs.decoded) return;
  const auto& gen = fs.manifest->gen;
  if (strategy == StrategyKind::NoCoding) {
    if (fs.raw.size() < gen.block_count) return;
    std::vector<std::uint8_t> bytes;
    bytes.reserve(gen.block_count * gen.symbols_per_block);
    for (const auto& [_, block] : fs.raw)
      for (Symbol s : block.symbols) bytes.push_back(std::uint8_t(s & 0xff));
    bytes.resize(gen.original_length);
    if (digest_bytes(bytes.data(), bytes.size()) == gen.file_digest) {
      fs.decoded = true;
      fs.decoded_at = now;
      if (trace) trace("decode", "file=" + file + " status=ok");
    }
    return;
  }
  if (!fs.decoder.full()) return;
  const auto bytes = fs.decoder.decode(gen);
  if (digest_bytes(bytes.data(), bytes.size()) == gen.file_digest) {
    fs.decoded = true;
    fs.decoded_at = now;
    fs.origin_verified = integrity::verify_origin(fs.manifest->origin, gen.file_digest, *keys);
    fs.sources = fs.decoder.recovered_sources();
    if (trace) trace("decode", "file=" + file + " status=ok");
    return;
  }
  // pollution detected: digest mismatch at full rank
  polluted = true;
  if (trace) trace("decode", "file=" + file + " status=mismatch");
  if (on_digest_failure) on_digest_failure(*this, file, now);
  fs.decoder.reset();
  fs.stored.clear();
  fs.seen_ids.clear();
}

void Node::enqueue_offer(const std::string& file, NodeId target) {
  const std::string key = file_target_key(file, target);
  if (queued_offers.count(key)) return;
  // an offer for this file/target already mid-handshake?
  for (const auto& [_, hs] : outbound)
    if (hs.target == target && hs.name.file == file) return;
  queued_offers.insert(key);
  offer_queue.emplace_back(file, target);
}

void Node::start_next_offer(SimTime now, std::vector<Message>& out) {
  if (!cfg->handshake) return;
  while (!offer_queue.empty() && outbound.empty()) {
    auto [file, target] = offer_queue.front();
    offer_queue.pop_front();
    queued_offers.erase(file_target_key(file, target));
    if (peer_complete(target, file) || !servable(*this, file)) continue;
    auto data = serve_block(*this, file, target);
    if (!data) continue;
    data->target = target;
    const naming::ContentName name = name_of(*data);
    if (peer_has(target, name)) continue;
    const std::string key = offer_key(name, target);
    OutboundHandshake hs;
    hs.name = name;
    hs.target = target;
    hs.data = std::move(*data);
    hs.waiting_ack = false;
    hs.deadline = now + seconds_to_sim(cfg->handshake_timeout_s);
    outbound.emplace(key, std::move(hs));
    if (arm_timeout) arm_timeout("o:" + key, target, now + seconds_to_sim(cfg->handshake_timeout_s));
    out.push_back({id, RtsbMsg{name, target}});
  }
}

std::vector<Message> Node::on_handshake_timeout(const std::string& key, NodeId peer,
                                                SimTime now) {
  std::vector<Message> out;
  if (key.rfind("i:", 0) == 0) {
    auto it = inbound.find(key.substr(2));
    if (it != inbound.end() && it->second.deadline <= now) inbound.erase(it);
    return out;
  }
  const std::string okey = key.substr(2);
  auto it = outbound.find(okey);
  if (it == outbound.end() || it->second.deadline > now) return out;
  OutboundHandshake& hs = it->second;
  if (hs.waiting_ack && hs.data_sends < 2) {
    // one resend, then the entry expires
    ++hs.data_sends;
    hs.deadline = now + seconds_to_sim(cfg->handshake_timeout_s);
    if (arm_timeout) arm_timeout("o:" + okey, peer, hs.deadline);
    out.push_back({id, hs.data});
    return out;
  }
  outbound.erase(it);
  start_next_offer(now, out);
  return out;
}

}  // namespace cbnc::proto
