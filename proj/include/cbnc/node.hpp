#pragma once

#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cbnc/integrity.hpp"
#include "cbnc/message.hpp"
#include "cbnc/scenario.hpp"

namespace cbnc::proto {

std::string hex64(std::uint64_t v);

// File metadata every participant holds up front (the content catalog): name,
// generation shape, per-raw-block digests, and the publisher's origin
// signature.
struct FileManifest {
  rlnc::Generation gen;
  std::vector<Digest> block_digests;
  Signature origin;
  NodeId publisher = kNoNode;
};

struct FileState {
  const FileManifest* manifest = nullptr;
  bool is_publisher = false;
  bool origin_verified = false;
  std::vector<rlnc::SourceVector> sources;  // publisher, or recovered at full rank
  rlnc::DecoderState decoder;
  std::vector<rlnc::CodedBlock> stored;  // innovative-at-receipt blocks kept for serving
  std::set<std::uint64_t> seen_ids;
  std::map<std::uint32_t, PlainBlock> raw;
  bool decoded = false;
  SimTime decoded_at = -1;

  // verbatim forwarding: freshly received blocks go out first, then the
  // cache is cycled for loss recovery
  std::deque<std::uint64_t> fwd_coded;  // block ids pending forward
  std::deque<std::uint32_t> fwd_raw;    // raw indices pending forward
  std::size_t rr_cursor = 0;
};

enum class Role { Publisher, Relay, Receiver };

enum class TimerKind { Interest, Request, Summary, ServeTick };

// What a node believes about a peer, learned from summaries and overheard
// control traffic.
struct PeerFacts {
  std::set<std::string> has_names;           // rendered content names
  std::map<std::string, std::size_t> rank;   // per-file rank estimate
  std::set<std::string> complete_files;
  SimTime summary_as_of = -1;
};

struct OutboundHandshake {
  naming::ContentName name;
  NodeId target = kNoNode;
  DataMsg data;
  bool waiting_ack = false;  // false: waiting for the rtsb reply
  SimTime deadline = 0;
  int data_sends = 0;
};

struct InboundHandshake {
  NodeId from = kNoNode;
  SimTime deadline = 0;
};

// Per-node protocol state machine. The engine owns the instances, delivers
// events in timestamp order, and broadcasts whatever a handler returns.
class Node {
 public:
  Node(NodeId id, Role role, const ScenarioConfig& cfg, const Field& field,
       const integrity::KeyRing& keys);

  void install_file(const FileManifest& manifest, const std::vector<rlnc::SourceVector>* sources);
  void want(const std::string& file);
  bool wants_satisfied() const;

  std::vector<Message> on_timer(TimerKind kind, SimTime now);
  std::vector<Message> on_message(const Message& msg, SimTime now);
  std::vector<Message> on_handshake_timeout(const std::string& rendered_name, NodeId peer,
                                            SimTime now);

  naming::CacheSummaryView summarize(SimTime now) const;

  // identity / wiring
  NodeId id = kNoNode;
  Role role = Role::Receiver;
  StrategyKind strategy = StrategyKind::FullCache;
  const ScenarioConfig* cfg = nullptr;
  const Field* field = nullptr;
  const integrity::KeyRing* keys = nullptr;
  std::optional<integrity::AttackConfig> attack;  // set when this node is the attacker

  RngStream coding_rng, serve_rng, attack_rng;
  std::uint64_t bloom_salt = 0;

  // state
  std::map<std::string, FileState> files;
  std::set<std::string> own_interests;
  std::map<NodeId, PeerFacts> facts;
  std::map<std::string, std::map<NodeId, SimTime>> crumbs;  // file -> requester -> heard at
  std::map<std::string, std::pair<int, SimTime>> heard_interest;  // file -> (ttl, at)
  std::map<std::string, OutboundHandshake> outbound;  // key: name@target
  std::map<std::string, InboundHandshake> inbound;    // key: rendered name
  std::deque<std::pair<std::string, NodeId>> offer_queue;
  std::set<std::string> queued_offers;  // dedup key: file@target
  integrity::Blacklist blacklist;

  // counters for metrics / assertions
  std::size_t absorbed = 0;
  std::size_t innovative = 0;
  std::size_t verify_drops = 0;
  bool polluted = false;
  NodeId accused = kNoNode;
  std::size_t serve_cursor = 0;      // file rotation for broadcast serve ticks
  std::size_t serve_cursor_raw = 0;  // publisher raw-block cycling (no-coding)

  // engine hooks
  std::function<void(const char* event, const std::string& detail)> trace;
  std::function<void(Node&, const std::string& file, SimTime now)> on_digest_failure;
  std::function<void(const std::string& key, NodeId peer, SimTime deadline)> arm_timeout;

  // helpers shared with the strategy layer
  FileState* file_state(const std::string& file);
  const FileManifest* manifest_of(const std::string& file) const;
  bool peer_has(NodeId peer, const naming::ContentName& name) const;
  bool peer_complete(NodeId peer, const std::string& file) const;
  void note_peer_has(NodeId peer, const naming::ContentName& name);
  void note_peer_rank_bump(NodeId peer, const std::string& file);
  void process_data(const DataMsg& data, NodeId sender, SimTime now, bool addressed,
                    std::vector<Message>& out);

 private:
  void handle_interest(const InterestMsg& m, NodeId sender, SimTime now);
  void handle_request(const RequestMsg& m, NodeId sender, SimTime now,
                      std::vector<Message>& out);
  void handle_summary(const SummaryMsg& m, NodeId sender, SimTime now);
  void handle_rtsb(const RtsbMsg& m, NodeId sender, SimTime now, std::vector<Message>& out);
  void handle_rtsb_reply(const RtsbReplyMsg& m, NodeId sender, SimTime now,
                         std::vector<Message>& out);
  void handle_ack(const AckMsg& m, NodeId sender, SimTime now);

  void enqueue_offer(const std::string& file, NodeId target);
  void start_next_offer(SimTime now, std::vector<Message>& out);
  void after_decode(FileState& fs, SimTime now);
  void try_decode(const std::string& file, FileState& fs, SimTime now);

  std::vector<Message> relayed_interests(SimTime now);
};

}  // namespace cbnc::proto
