#include <sstream>

#include "cbnc/engine.hpp"
#include "cbnc/harness.hpp"
#include "cbnc/node.hpp"
#include "cbnc/strategy.hpp"
#include "doctest.h"

using namespace cbnc;
using namespace cbnc::proto;

namespace {

// State-level fixture: one node with one installed file manifest.
struct NodeFixture {
  ScenarioConfig cfg;
  Field field{FieldSpec::gf256()};
  integrity::KeyRing keys{11};
  std::vector<std::uint8_t> file_bytes;
  rlnc::Generation gen;
  std::vector<rlnc::SourceVector> sources;
  FileManifest manifest;
  std::unique_ptr<Node> node;

  explicit NodeFixture(StrategyKind strategy, NodeId id = 5, std::size_t m = 4) {
    cfg.strategy = strategy;
    cfg.handshake = true;
    cfg.seed = 77;
    RngStream rng(3);
    file_bytes.resize(m * 64);
    for (auto& b : file_bytes) b = std::uint8_t(rng.next_below(256));
    auto [g, s] = rlnc::segment(file_bytes, m, field, "f0");
    gen = g;
    sources = s;
    manifest.gen = gen;
    manifest.publisher = 0;
    manifest.origin = integrity::sign_origin(gen.file_digest, 0, keys);
    for (const auto& sv : sources) {
      std::vector<std::uint8_t> raw;
      for (Symbol sym : sv.symbols) raw.push_back(std::uint8_t(sym & 0xff));
      manifest.block_digests.push_back(digest_bytes(raw.data(), raw.size()));
    }
    node = std::make_unique<Node>(id, Role::Receiver, cfg, field, keys);
    node->install_file(manifest, nullptr);
    node->want("f0");
  }

  rlnc::CodedBlock publisher_block(RngStream& rng) {
    auto b = rlnc::encode_random(field, sources, rlnc::ref_of(gen), rng);
    b.provenance.origin = manifest.origin;
    return integrity::sign_block(std::move(b), 0, keys, {.is_publisher = true});
  }
};

const RtsbReplyMsg& reply_of(const std::vector<Message>& msgs) {
  REQUIRE(msgs.size() >= 1);
  const auto* reply = std::get_if<RtsbReplyMsg>(&msgs.back().body);
  REQUIRE(reply != nullptr);
  return *reply;
}

}  // namespace

TEST_CASE("rtsb accepted when the block is wanted and the node idle") {
  NodeFixture fx(StrategyKind::SourceOnly);
  auto msgs = fx.node->on_message({1, RtsbMsg{{"f0", 42}, 5}}, kSecond);
  const auto& reply = reply_of(msgs);
  CHECK(reply.accept);
  CHECK(fx.node->inbound.count("f0/42") == 1);
}

TEST_CASE("duplicate offer draws reject code 1") {
  NodeFixture fx(StrategyKind::SourceOnly);
  RngStream rng(5);
  auto block = fx.publisher_block(rng);
  const std::uint64_t id = block.block_id;
  std::vector<Message> out;
  fx.node->process_data(DataMsg{5, block}, 1, kSecond, false, out);
  auto msgs = fx.node->on_message({2, RtsbMsg{{"f0", id}, 5}}, 2 * kSecond);
  const auto& reply = reply_of(msgs);
  CHECK_FALSE(reply.accept);
  CHECK(reply.code == RejectCode::BlockAlreadyReceived);
}

TEST_CASE("complete file draws reject code 2") {
  NodeFixture fx(StrategyKind::SourceOnly);
  RngStream rng(6);
  std::vector<Message> out;
  while (!fx.node->files.at("f0").decoded)
    fx.node->process_data(DataMsg{5, fx.publisher_block(rng)}, 1, kSecond, false, out);
  auto msgs = fx.node->on_message({2, RtsbMsg{{"f0", 9999}, 5}}, 2 * kSecond);
  const auto& reply = reply_of(msgs);
  CHECK_FALSE(reply.accept);
  CHECK(reply.code == RejectCode::FileAlreadyReceived);
}

TEST_CASE("in-progress transfer from another neighbor draws reject code 3") {
  NodeFixture fx(StrategyKind::NoCoding);
  fx.node->inbound["f0/0"] = {1, 10 * kSecond};  // mid-handshake with node 1
  auto msgs = fx.node->on_message({2, RtsbMsg{{"f0", 0}, 5}}, kSecond);
  const auto& reply = reply_of(msgs);
  CHECK_FALSE(reply.accept);
  CHECK(reply.code == RejectCode::BeingSentByOther);
}

TEST_CASE("reject codes are checked in order 1,2,3") {
  NodeFixture fx(StrategyKind::NoCoding);
  // node holds raw block 0 and is also mid-handshake: code 1 must win
  PlainBlock raw{"f0", 0, fx.sources[0].symbols};
  std::vector<Message> out;
  fx.node->process_data(DataMsg{5, raw}, 1, kSecond, false, out);
  fx.node->inbound["f0/0"] = {1, 10 * kSecond};
  auto msgs = fx.node->on_message({2, RtsbMsg{{"f0", 0}, 5}}, 2 * kSecond);
  CHECK(reply_of(msgs).code == RejectCode::BlockAlreadyReceived);
}

TEST_CASE("interest timer carries own wants and ttl, empty when satisfied") {
  NodeFixture fx(StrategyKind::SourceOnly);
  auto msgs = fx.node->on_timer(TimerKind::Interest, kSecond);
  REQUIRE(msgs.size() == 1);
  const auto& interest = std::get<InterestMsg>(msgs[0].body);
  CHECK(interest.ttl == fx.cfg.interest_ttl);
  CHECK(interest.names.contains({"f0", std::nullopt}));

  NodeFixture idle(StrategyKind::SourceOnly);
  idle.node->own_interests.clear();
  auto empty_msgs = idle.node->on_timer(TimerKind::Interest, kSecond);
  REQUIRE(empty_msgs.size() == 1);
  CHECK(std::get<InterestMsg>(empty_msgs[0].body).names.empty());
}

TEST_CASE("heard interests are re-emitted with decremented ttl") {
  NodeFixture fx(StrategyKind::SourceOnly);
  fx.node->own_interests.clear();
  naming::BloomFilter filter(fx.cfg.bloom_bits, fx.cfg.bloom_hashes, fx.node->bloom_salt);
  filter.insert({"f0", std::nullopt});
  fx.node->on_message({3, InterestMsg{filter, 2}}, kSecond);
  auto msgs = fx.node->on_timer(TimerKind::Interest, kSecond + kSecond / 2);
  REQUIRE(msgs.size() == 2);  // own (empty) + relay
  const auto& relayed = std::get<InterestMsg>(msgs[1].body);
  CHECK(relayed.ttl == 1);
  CHECK(relayed.names.contains({"f0", std::nullopt}));

  // ttl 0 interests are not relayed
  NodeFixture fx0(StrategyKind::SourceOnly);
  fx0.node->own_interests.clear();
  fx0.node->on_message({3, InterestMsg{filter, 0}}, kSecond);
  CHECK(fx0.node->on_timer(TimerKind::Interest, kSecond + 1).size() == 1);
}

TEST_CASE("summary reflects decode state") {
  NodeFixture fx(StrategyKind::SourceOnly);
  auto empty = fx.node->summarize(kSecond);
  CHECK(empty.full_files.empty());
  CHECK(empty.partial_blocks.empty());
  CHECK(empty.file_rank.empty());

  RngStream rng(9);
  std::vector<Message> out;
  fx.node->process_data(DataMsg{5, fx.publisher_block(rng)}, 1, kSecond, false, out);
  fx.node->process_data(DataMsg{5, fx.publisher_block(rng)}, 1, kSecond, false, out);
  auto partial = fx.node->summarize(2 * kSecond);
  CHECK_FALSE(partial.full_files.contains({"f0", std::nullopt}));
  CHECK(partial.file_rank.at("f0") == 2);
  CHECK_FALSE(partial.partial_blocks.empty());

  while (!fx.node->files.at("f0").decoded)
    fx.node->process_data(DataMsg{5, fx.publisher_block(rng)}, 1, kSecond, false, out);
  auto full = fx.node->summarize(3 * kSecond);
  CHECK(full.full_files.contains({"f0", std::nullopt}));
  CHECK(full.file_rank.at("f0") == fx.gen.block_count);
}

TEST_CASE("blacklisted requesters are still served, blacklisted senders dropped") {
  NodeFixture fx(StrategyKind::SourceOnly, 5);
  RngStream rng(10);
  std::vector<Message> out;
  // node holds some content to serve
  fx.node->process_data(DataMsg{5, fx.publisher_block(rng)}, 1, kSecond, false, out);
  fx.node->blacklist.add(2, integrity::BlacklistReason::DigestMismatch);

  naming::BloomFilter wants(fx.cfg.bloom_bits, fx.cfg.bloom_hashes, fx.node->bloom_salt);
  wants.insert({"f0", std::nullopt});
  auto msgs = fx.node->on_message({2, RequestMsg{wants}}, 2 * kSecond);
  bool offered = false;
  for (const auto& m : msgs)
    if (std::holds_alternative<RtsbMsg>(m.body)) offered = true;
  CHECK(offered);  // blacklist gates inbound data only

  const std::size_t before = fx.node->absorbed;
  fx.node->process_data(DataMsg{5, fx.publisher_block(rng)}, 2, 2 * kSecond, false, out);
  CHECK(fx.node->absorbed == before);  // data from the blacklisted node is dropped
  CHECK(fx.node->verify_drops > 0);
}

TEST_CASE("overheard ack updates possession and suppresses pending offers") {
  NodeFixture fx(StrategyKind::NoCoding, 5);
  std::vector<Message> out;
  PlainBlock raw{"f0", 1, fx.sources[1].symbols};
  fx.node->process_data(DataMsg{5, raw}, 1, kSecond, false, out);

  // a pending outbound offer of f0/1 toward node 9
  OutboundHandshake hs;
  hs.name = {"f0", 1};
  hs.target = 9;
  hs.waiting_ack = false;
  hs.deadline = 10 * kSecond;
  fx.node->outbound.emplace("f0/1@9", hs);

  fx.node->on_message({9, AckMsg{{"f0", 1}, 3}}, 2 * kSecond);  // 9 acked someone else
  CHECK(fx.node->outbound.count("f0/1@9") == 0);
  CHECK(fx.node->peer_has(9, {"f0", 1}));
}

TEST_CASE("overheard reject code 2 marks the replier complete") {
  NodeFixture fx(StrategyKind::SourceOnly, 5);
  RtsbReplyMsg reply{{"f0", 7}, 8, false, RejectCode::FileAlreadyReceived};
  fx.node->on_message({4, reply}, kSecond);
  CHECK(fx.node->peer_complete(4, "f0"));
}

TEST_CASE("two node lossless link: one rtsb, one accept, one data, one ack") {
  ScenarioConfig cfg;
  cfg.topology = TopologyKind::RandomWaypoint;
  cfg.node_count = 2;
  cfg.publisher_count = 1;
  cfg.strategy = StrategyKind::NoCoding;
  cfg.loss = 0;
  cfg.seed = 4;
  cfg.block_count = 1;
  cfg.block_size = 512;
  cfg.horizon_s = 30;
  cfg.handshake = true;
  cfg.speed_min = cfg.speed_max = 0;
  cfg.placements = {{0, {0, 0}}, {1, {50, 0}}};
  auto result = sim::run(cfg);
  REQUIRE(result.completed);

  std::map<std::string, int> tx_counts;
  std::istringstream in(result.trace);
  std::string line;
  while (std::getline(in, line)) {
    if (line.find(" tx kind=") == std::string::npos) continue;
    for (const char* kind : {"rtsb_reply", "rtsb", "data", "ack"})
      if (line.find(std::string("kind=") + kind) != std::string::npos) {
        ++tx_counts[kind];
        break;
      }
  }
  CHECK(tx_counts["rtsb"] == 1);
  CHECK(tx_counts["rtsb_reply"] == 1);
  CHECK(tx_counts["data"] == 1);
  CHECK(tx_counts["ack"] == 1);
}

TEST_CASE("breadcrumb delivery across a static line with a pure relay") {
  ScenarioConfig cfg;
  cfg.topology = TopologyKind::RandomWaypoint;
  cfg.node_count = 3;
  cfg.publisher_count = 1;
  cfg.strategy = StrategyKind::NoCoding;
  cfg.loss = 0;
  cfg.seed = 1;
  cfg.block_count = 4;
  cfg.block_size = 256;
  cfg.horizon_s = 60;
  cfg.handshake = true;
  cfg.speed_min = cfg.speed_max = 0;
  cfg.placements = {{0, {0, 0}}, {1, {60, 0}}, {2, {120, 0}}};  // A - B - C
  cfg.relay_nodes = {1};
  auto result = sim::run(cfg);
  REQUIRE(result.completed);
  REQUIRE(result.metrics.size() == 1);
  CHECK(result.metrics[0].receiver == 2);
  CHECK(result.metrics[0].decode_time_s > 0);
}

TEST_CASE("handshake tables stay bounded over a long run") {
  ScenarioConfig cfg;
  cfg.topology = TopologyKind::RandomWaypoint;
  cfg.node_count = 10;
  cfg.publisher_count = 3;
  cfg.strategy = StrategyKind::FullCache;
  cfg.loss = 0.6;  // plenty of timeouts
  cfg.seed = 8;
  cfg.block_count = 32;
  cfg.block_size = 512;
  cfg.horizon_s = 900;
  cfg.handshake = true;
  cfg.collect_trace = false;
  auto result = sim::run(cfg);
  CHECK(result.counters.events >= 100000);
  for (std::size_t size : result.final_inflight) CHECK(size <= 8);
}
