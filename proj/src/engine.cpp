#include "cbnc/engine.hpp"

#include <algorithm>
#include <cstdio>
#include <deque>
#include <map>
#include <memory>
#include <queue>
#include <set>
#include <sstream>

#include "cbnc/digest.hpp"
#include "cbnc/node.hpp"
#include "cbnc/strategy.hpp"
#include "cbnc/topology.hpp"

namespace cbnc::sim {

using proto::DataMsg;
using proto::Message;
using proto::Node;
using proto::Role;
using proto::TimerKind;

namespace {

struct Event {
  SimTime t = 0;
  std::uint64_t seq = 0;
  enum Kind { Timer, TxEnd, Deliver, HsTimeout } kind = Timer;
  NodeId node = kNoNode;
  TimerKind timer = TimerKind::Interest;
  Message msg;
  std::uint64_t reception = 0;  // Deliver: reception record id, 0 after delay
  bool delayed = false;         // went through the verification-delay stage
  std::string hs_key;
  NodeId hs_peer = kNoNode;
};

struct EventAfter {
  bool operator()(const Event& a, const Event& b) const {
    if (a.t != b.t) return a.t > b.t;
    return a.seq > b.seq;
  }
};

struct Reception {
  std::uint64_t id = 0;
  SimTime start = 0, end = 0;
  bool collided = false;
};

class Engine {
 public:
  explicit Engine(const ScenarioConfig& cfg)
      : cfg_(cfg), field_(cfg.field), keys_(cfg.seed) {}

  RunResult run();

 private:
  // --- wiring -------------------------------------------------------------
  void build_world();
  void schedule_initial();
  void bind_hooks(Node& node);

  // --- event plumbing -----------------------------------------------------
  void push(Event ev) {
    ev.seq = next_seq_++;
    queue_.push(std::move(ev));
  }
  void broadcast(Message msg, SimTime now);
  void start_tx(const Message& msg, SimTime now);
  void dispatch(const Event& ev);
  void handle_deliver(const Event& ev);

  double effective_loss(NodeId receiver, SimTime at) const;
  SimTime airtime(std::size_t bytes) const {
    return SimTime(double(bytes) * 8.0 * 1e9 / cfg_.bitrate_bps);
  }

  bool goal_met() const;
  void isolate(Node& receiver, const std::string& file, SimTime now);

  // --- trace --------------------------------------------------------------
  void trace_line(SimTime t, NodeId node, const char* event, const std::string& detail) {
    if (!cfg_.collect_trace) return;
    char head[64];
    std::snprintf(head, sizeof head, "%.9f %d ", sim_to_seconds(t), node);
    trace_ += head;
    trace_ += event;
    if (!detail.empty()) {
      trace_ += ' ';
      trace_ += detail;
    }
    trace_ += '\n';
  }

  const ScenarioConfig& cfg_;
  Field field_;
  integrity::KeyRing keys_;
  Topology topo_;
  std::deque<proto::FileManifest> manifests_;
  std::deque<std::vector<rlnc::SourceVector>> publisher_sources_;
  std::vector<std::unique_ptr<Node>> nodes_;
  std::vector<NodeId> receivers_;

  std::priority_queue<Event, std::vector<Event>, EventAfter> queue_;
  std::uint64_t next_seq_ = 0;
  SimTime now_ = 0;
  SimTime horizon_ = 0;

  std::vector<SimTime> busy_until_;
  std::vector<std::deque<Message>> outbox_;
  std::vector<std::vector<Reception>> receptions_;
  std::uint64_t next_reception_ = 1;
  std::map<std::uint64_t, std::uint64_t> edge_counter_;

  // pure-broadcast slotting
  SimTime slot_ = 0;
  std::size_t period_slots_ = 4;
  std::vector<std::size_t> tick_phase_, tick_stride_, tick_index_;

  std::string trace_;
  RunCounters counters_;
  bool done_ = false;
};

void Engine::build_world() {
  const bool corridor = cfg_.topology != TopologyKind::RandomWaypoint;
  if (corridor) {
    topo_ = Topology::corridor(cfg_.topology);
  } else {
    topo_ = Topology::random_waypoint(cfg_, substream(cfg_.seed, "mobility"));
  }
  const std::size_t n = topo_.node_count();
  busy_until_.assign(n, -1);
  outbox_.resize(n);
  receptions_.resize(n);
  tick_phase_.resize(n);
  tick_stride_.resize(n);
  tick_index_.assign(n, 0);

  std::vector<Role> roles(n, Role::Receiver);
  std::vector<NodeId> publishers;
  if (corridor) {
    roles[Topology::kCorridorSource] = Role::Publisher;
    for (NodeId relay = 1; relay <= 6; ++relay) roles[relay] = Role::Relay;
    roles[Topology::kCorridorReceiver] = Role::Receiver;
    publishers = {Topology::kCorridorSource};
    receivers_ = {Topology::kCorridorReceiver};
  } else {
    for (std::size_t i = 0; i < cfg_.publisher_count; ++i) {
      roles[i] = Role::Publisher;
      publishers.push_back(NodeId(i));
    }
    for (std::size_t i = cfg_.publisher_count; i < n; ++i) {
      if (cfg_.relay_nodes.count(NodeId(i))) {
        roles[i] = Role::Relay;
        continue;
      }
      receivers_.push_back(NodeId(i));
    }
  }

  for (std::size_t i = 0; i < n; ++i)
    nodes_.push_back(std::make_unique<Node>(NodeId(i), roles[i], cfg_, field_, keys_));

  // one file per publisher, content drawn from the payload substream
  for (std::size_t p = 0; p < publishers.size(); ++p) {
    RngStream payload = substream(cfg_.seed, "payload", p);
    std::vector<std::uint8_t> bytes(cfg_.effective_file_size());
    for (auto& b : bytes) b = std::uint8_t(payload.next_below(256));
    const std::string file_id = "f" + std::to_string(p);
    auto [gen, sources] = rlnc::segment(bytes, cfg_.block_count, field_, file_id);

    proto::FileManifest manifest;
    manifest.gen = gen;
    manifest.publisher = publishers[p];
    manifest.origin = integrity::sign_origin(gen.file_digest, publishers[p], keys_);
    for (const auto& sv : sources) {
      std::vector<std::uint8_t> raw;
      raw.reserve(sv.symbols.size());
      for (Symbol s : sv.symbols) raw.push_back(std::uint8_t(s & 0xff));
      manifest.block_digests.push_back(digest_bytes(raw.data(), raw.size()));
    }
    manifests_.push_back(std::move(manifest));
    publisher_sources_.push_back(std::move(sources));

    for (std::size_t i = 0; i < n; ++i) {
      const bool is_publisher = NodeId(i) == publishers[p];
      nodes_[i]->install_file(manifests_.back(),
                              is_publisher ? &publisher_sources_.back() : nullptr);
    }
    for (NodeId r : receivers_) nodes_[r]->want(file_id);
  }

  for (auto& node : nodes_) bind_hooks(*node);
}

void Engine::bind_hooks(Node& node) {
  Node* self = &node;
  node.trace = [this, self](const char* event, const std::string& detail) {
    trace_line(now_, self->id, event, detail);
  };
  node.arm_timeout = [this, self](const std::string& key, NodeId peer, SimTime deadline) {
    Event ev;
    ev.t = deadline;
    ev.kind = Event::HsTimeout;
    ev.node = self->id;
    ev.hs_key = key;
    ev.hs_peer = peer;
    push(std::move(ev));
  };
  node.on_digest_failure = [this](Node& n, const std::string& file, SimTime now) {
    isolate(n, file, now);
  };
}

void Engine::isolate(Node& receiver, const std::string& file, SimTime now) {
  auto* fs = receiver.file_state(file);
  if (!fs) return;
  // candidate caches: the signers attributed across the poisoned rows
  std::set<NodeId> signer_set;
  for (const auto& row : fs->decoder.rows())
    if (row.signer != kNoNode && row.signer != receiver.id) signer_set.insert(row.signer);
  if (signer_set.empty()) {
    trace_line(now, receiver.id, "accuse", "file=" + file + " node=none");
    return;
  }
  std::vector<integrity::SoloCandidate> caches;
  for (NodeId id : signer_set)
    caches.push_back({id, nodes_[id]->file_state(file)->decoded});

  // solo re-downloads are oracle fetches served by the live caches; the
  // procedure's cost is not charged to the channel
  auto fetch = [this, &file](NodeId cache, std::size_t count) {
    std::vector<rlnc::CodedBlock> out;
    for (std::size_t i = 0; i < count; ++i) {
      auto data = proto::serve_block(*nodes_[cache], file, std::nullopt);
      if (!data || !std::holds_alternative<rlnc::CodedBlock>(data->block)) break;
      out.push_back(std::get<rlnc::CodedBlock>(data->block));
    }
    return out;
  };

  const auto& gen = fs->manifest->gen;
  auto result = integrity::isolate_polluter(field_, gen, caches, fetch, keys_,
                                            receiver.blacklist);
  if (result) {
    receiver.accused = result->polluter;
    trace_line(now, receiver.id, "accuse",
               "file=" + file + " node=" + std::to_string(result->polluter) + " rounds=" +
                   std::to_string(result->solo_rounds));
  } else {
    trace_line(now, receiver.id, "accuse", "file=" + file + " node=none");
  }
}

void Engine::schedule_initial() {
  const std::size_t n = topo_.node_count();
  RngStream phase_rng = substream(cfg_.seed, "phase");

  if (cfg_.handshake) {
    for (std::size_t i = 0; i < n; ++i) {
      auto arm = [&](TimerKind kind, double period_s) {
        Event ev;
        ev.kind = Event::Timer;
        ev.node = NodeId(i);
        ev.timer = kind;
        ev.t = SimTime(phase_rng.next_double() * period_s * 1e9);
        push(std::move(ev));
      };
      arm(TimerKind::Interest, cfg_.interest_period_s);
      arm(TimerKind::Request, cfg_.request_period_s);
      arm(TimerKind::Summary, cfg_.summary_period_s);
    }
    return;
  }

  // pure broadcast: slot-aligned serve ticks for everyone but the sink.
  // slot length = data-block airtime for this run (all data frames equal).
  Message probe;
  probe.sender = 0;
  if (cfg_.strategy == StrategyKind::NoCoding) {
    proto::PlainBlock pb;
    pb.symbols.assign(manifests_.front().gen.symbols_per_block, 0);
    probe.body = DataMsg{kNoNode, std::move(pb)};
  } else {
    rlnc::CodedBlock cb;
    cb.gen = rlnc::ref_of(manifests_.front().gen);
    cb.coefficients.assign(cfg_.block_count, 0);
    cb.payload.assign(manifests_.front().gen.symbols_per_block, 0);
    probe.body = DataMsg{kNoNode, std::move(cb)};
  }
  slot_ = airtime(proto::wire_bytes(probe, field_));
  period_slots_ = std::max<std::size_t>(2, std::size_t(cfg_.pacing + 0.5));

  for (std::size_t i = 0; i < n; ++i) {
    tick_phase_[i] = phase_rng.next_below(period_slots_);
    tick_stride_[i] = 1 + phase_rng.next_below(period_slots_ - 1);
    if (nodes_[i]->role == Role::Receiver) continue;
    Event ev;
    ev.kind = Event::Timer;
    ev.node = NodeId(i);
    ev.timer = TimerKind::ServeTick;
    ev.t = SimTime(tick_phase_[i]) * slot_;
    push(std::move(ev));
  }
}

double Engine::effective_loss(NodeId receiver, SimTime at) const {
  double p = cfg_.loss;
  if (cfg_.jam_loss > 0 && at >= seconds_to_sim(cfg_.jam_start_s) &&
      at < seconds_to_sim(cfg_.jam_end_s)) {
    const bool corridor = cfg_.topology != TopologyKind::RandomWaypoint;
    if (!corridor || receiver >= 4) p = cfg_.jam_loss;  // downstream rows
  }
  return p;
}

void Engine::broadcast(Message msg, SimTime now) {
  const NodeId sender = msg.sender;
  if (busy_until_[sender] > now) {
    outbox_[sender].push_back(std::move(msg));
    return;
  }
  start_tx(msg, now);
}

void Engine::start_tx(const Message& msg, SimTime now) {
  const NodeId sender = msg.sender;
  if (busy_until_[sender] > now) throw SenderBusy();  // broadcast() queues instead
  const std::size_t bytes = proto::wire_bytes(msg, field_);
  const SimTime air = airtime(bytes);
  busy_until_[sender] = now + air;
  counters_.bytes_tx += bytes;

  std::string detail = std::string("kind=") + proto::kind_name(msg) +
                       " bytes=" + std::to_string(bytes);
  if (const auto* data = std::get_if<DataMsg>(&msg.body)) {
    ++counters_.data_tx;
    if (counters_.first_data_tx < 0) counters_.first_data_tx = now;
    detail += " name=" + proto::name_of(*data).render();
    if (const auto* coded = std::get_if<rlnc::CodedBlock>(&data->block)) {
      detail += " dig=" + proto::hex64(integrity::block_digest(*coded));
      detail += " signer=" + std::to_string(coded->provenance.block.signer);
    }
    if (data->target != kNoNode) detail += " target=" + std::to_string(data->target);
  }
  trace_line(now, sender, "tx", detail);

  const bool shared_slot = cfg_.effective_collision() == CollisionMode::SharedSlot;
  for (std::size_t i = 0; i < topo_.node_count(); ++i) {
    const NodeId rx = NodeId(i);
    if (rx == sender) continue;
    if (!topo_.in_range(sender, rx, now, cfg_.radio_range_m)) continue;

    const std::uint64_t edge = (std::uint64_t(std::uint32_t(sender)) << 32) | std::uint32_t(rx);
    const std::uint64_t k = edge_counter_[edge]++;
    if (edge_draw(cfg_.seed, "loss", std::uint64_t(sender), std::uint64_t(rx), k) <
        effective_loss(rx, now)) {
      trace_line(now, rx, "drop",
                 std::string("reason=loss from=") + std::to_string(sender) + " kind=" +
                     proto::kind_name(msg));
      continue;
    }

    Reception rec;
    rec.id = next_reception_++;
    rec.start = now;
    rec.end = now + air;
    if (shared_slot) {
      if (busy_until_[rx] > now) rec.collided = true;  // half-duplex: deaf while sending
      for (auto& other : receptions_[i])
        if (other.end > now) {
          other.collided = true;
          rec.collided = true;
        }
    }
    receptions_[i].push_back(rec);

    Event ev;
    ev.kind = Event::Deliver;
    ev.node = rx;
    ev.t = now + air;
    ev.msg = msg;
    ev.reception = rec.id;
    push(std::move(ev));
  }

  Event end;
  end.kind = Event::TxEnd;
  end.node = sender;
  end.t = now + air;
  push(std::move(end));
}

void Engine::handle_deliver(const Event& ev) {
  if (ev.reception != 0) {
    auto& recs = receptions_[ev.node];
    bool collided = false;
    for (auto it = recs.begin(); it != recs.end(); ++it)
      if (it->id == ev.reception) {
        collided = it->collided;
        recs.erase(it);
        break;
      }
    if (collided) {
      trace_line(ev.t, ev.node, "drop",
                 std::string("reason=coll from=") + std::to_string(ev.msg.sender) + " kind=" +
                     proto::kind_name(ev.msg));
      return;
    }
  }

  // per-block signature verification cost, charged before processing
  if (!ev.delayed && cfg_.sig_delay_s > 0 &&
      std::holds_alternative<DataMsg>(ev.msg.body)) {
    const StrategyKind s = nodes_[ev.node]->strategy;
    if (s == StrategyKind::SourceOnly || s == StrategyKind::FullCache) {
      Event later = ev;
      later.t = ev.t + seconds_to_sim(cfg_.sig_delay_s);
      later.reception = 0;
      later.delayed = true;
      push(std::move(later));
      return;
    }
  }

  trace_line(ev.t, ev.node, "rx",
             std::string("kind=") + proto::kind_name(ev.msg) + " from=" +
                 std::to_string(ev.msg.sender));
  auto replies = nodes_[ev.node]->on_message(ev.msg, ev.t);
  for (auto& m : replies) broadcast(std::move(m), ev.t);
}

bool Engine::goal_met() const {
  if (receivers_.empty()) return false;  // nothing to deliver: run to horizon
  for (NodeId r : receivers_)
    if (!nodes_[r]->wants_satisfied()) return false;
  return true;
}

void Engine::dispatch(const Event& ev) {
  switch (ev.kind) {
    case Event::Timer: {
      auto msgs = nodes_[ev.node]->on_timer(ev.timer, ev.t);
      for (auto& m : msgs) broadcast(std::move(m), ev.t);
      Event next;
      next.kind = Event::Timer;
      next.node = ev.node;
      next.timer = ev.timer;
      switch (ev.timer) {
        case TimerKind::Interest: next.t = ev.t + seconds_to_sim(cfg_.interest_period_s); break;
        case TimerKind::Request: next.t = ev.t + seconds_to_sim(cfg_.request_period_s); break;
        case TimerKind::Summary: next.t = ev.t + seconds_to_sim(cfg_.summary_period_s); break;
        case TimerKind::ServeTick: {
          auto& k = tick_index_[ev.node];
          ++k;
          const std::size_t slot =
              (tick_phase_[ev.node] + k * tick_stride_[ev.node]) % period_slots_;
          next.t = SimTime(k) * SimTime(period_slots_) * slot_ + SimTime(slot) * slot_;
          break;
        }
      }
      push(std::move(next));
      break;
    }
    case Event::TxEnd: {
      if (!outbox_[ev.node].empty() && busy_until_[ev.node] <= ev.t) {
        Message next = std::move(outbox_[ev.node].front());
        outbox_[ev.node].pop_front();
        start_tx(next, ev.t);
      }
      break;
    }
    case Event::Deliver:
      handle_deliver(ev);
      break;
    case Event::HsTimeout: {
      auto msgs = nodes_[ev.node]->on_handshake_timeout(ev.hs_key, ev.hs_peer, ev.t);
      for (auto& m : msgs) broadcast(std::move(m), ev.t);
      break;
    }
  }
}

RunResult Engine::run() {
  cfg_.validate();
  horizon_ = seconds_to_sim(cfg_.horizon_s);
  build_world();

  if (cfg_.collect_trace) {
    trace_ += "# cbnc trace v1\n";
    std::istringstream cfg_text(cfg_.to_text());
    std::string line;
    while (std::getline(cfg_text, line)) trace_ += "# " + line + "\n";
    if (!topo_.is_corridor()) {
      for (std::size_t i = 0; i < topo_.node_count(); ++i)
        for (const auto& leg : topo_.schedules()[i]) {
          char buf[160];
          std::snprintf(buf, sizeof buf,
                        "mob from=%.3f,%.3f to=%.3f,%.3f depart=%.9f arrive=%.9f", leg.from.x,
                        leg.from.y, leg.to.x, leg.to.y, sim_to_seconds(leg.depart),
                        sim_to_seconds(leg.arrive));
          trace_line(leg.start, NodeId(i), buf, "");
        }
    }
  }

  schedule_initial();

  while (!queue_.empty()) {
    Event ev = queue_.top();
    queue_.pop();
    if (ev.t > horizon_) break;
    now_ = ev.t;
    ++counters_.events;
    const bool was_data = ev.kind == Event::Deliver &&
                          std::holds_alternative<DataMsg>(ev.msg.body);
    dispatch(ev);
    if (was_data && goal_met()) {
      done_ = true;
      break;
    }
  }

  RunResult result;
  result.config = cfg_;
  result.counters = counters_;
  result.completed = done_;
  result.ended_at = now_;
  if (cfg_.collect_trace) result.trace = std::move(trace_);
  for (const auto& node : nodes_)
    result.final_inflight.push_back(node->outbound.size() + node->inbound.size());

  for (NodeId r : receivers_) {
    const Node& node = *nodes_[r];
    MetricRecord row;
    row.seed = cfg_.seed;
    row.strategy = cfg_.strategy;
    row.topology = cfg_.topology;
    row.loss = cfg_.loss;
    row.receiver = r;
    if (node.wants_satisfied() && counters_.first_data_tx >= 0) {
      SimTime last = 0;
      for (const auto& f : node.own_interests)
        last = std::max(last, node.files.at(f).decoded_at);
      row.decode_time_s = sim_to_seconds(last - counters_.first_data_tx);
    } else {
      row.decode_time_s = -1.0;
    }
    row.blocks_tx = counters_.data_tx;
    row.innovative_ratio =
        node.absorbed ? double(node.innovative) / double(node.absorbed) : 0.0;
    row.bytes_tx = counters_.bytes_tx;
    row.polluted = node.polluted ? 1 : 0;
    row.accused = node.accused;
    result.metrics.push_back(row);
  }
  return result;
}

}  // namespace

RunResult run(const ScenarioConfig& cfg) { return Engine(cfg).run(); }

}  // namespace cbnc::sim
