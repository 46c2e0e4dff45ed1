#include <cmath>
#include <sstream>

#include "cbnc/engine.hpp"
#include "cbnc/harness.hpp"
#include "cbnc/strategy.hpp"
#include "doctest.h"

using namespace cbnc;
using namespace cbnc::proto;

namespace {

struct StratFixture {
  ScenarioConfig cfg;
  Field field{FieldSpec::gf256()};
  integrity::KeyRing keys{55};
  std::vector<std::uint8_t> file_bytes;
  rlnc::Generation gen;
  std::vector<rlnc::SourceVector> sources;
  FileManifest manifest;

  explicit StratFixture(std::size_t m = 8) {
    cfg.seed = 13;
    RngStream rng(21);
    file_bytes.resize(m * 32);
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
  }

  std::unique_ptr<Node> make_node(StrategyKind strategy, NodeId id, bool publisher) {
    cfg.strategy = strategy;
    auto node = std::make_unique<Node>(id, publisher ? Role::Publisher : Role::Receiver, cfg,
                                       field, keys);
    node->strategy = strategy;
    node->install_file(manifest, publisher ? &sources : nullptr);
    return node;
  }

  rlnc::CodedBlock publisher_block(RngStream& rng) {
    auto b = rlnc::encode_random(field, sources, rlnc::ref_of(gen), rng);
    b.provenance.origin = manifest.origin;
    return integrity::sign_block(std::move(b), 0, keys, {.is_publisher = true});
  }

  // decoder spanning the whole file: served blocks must be redundant to it
  rlnc::DecoderState full_span() {
    rlnc::DecoderState st(rlnc::ref_of(gen), &field);
    for (std::size_t i = 0; i < gen.block_count; ++i) {
      std::vector<Symbol> unit(gen.block_count, 0);
      unit[i] = 1;
      auto b = rlnc::encode(field, sources, unit);
      b.gen = rlnc::ref_of(gen);
      st.absorb(b);
    }
    return st;
  }
};

}  // namespace

TEST_CASE("no-coding source produces exactly the raw blocks") {
  StratFixture fx;
  auto node = fx.make_node(StrategyKind::NoCoding, 0, true);
  auto blocks = produce_at_source(*node, "f0", 99);
  REQUIRE(blocks.size() == fx.gen.block_count);
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const auto& plain = std::get<PlainBlock>(blocks[i].block);
    CHECK(plain.index == i);
    CHECK(plain.symbols == fx.sources[i].symbols);
  }
}

TEST_CASE("coded sources emit the requested number of signed mixtures") {
  StratFixture fx;
  for (auto strategy : {StrategyKind::SourceOnly, StrategyKind::FullCache,
                        StrategyKind::Unrestricted}) {
    auto node = fx.make_node(strategy, 0, true);
    auto blocks = produce_at_source(*node, "f0", 10);
    REQUIRE(blocks.size() == 10);
    for (const auto& msg : blocks) {
      const auto& coded = std::get<rlnc::CodedBlock>(msg.block);
      CHECK(integrity::verify_block(coded, fx.keys));
      CHECK(coded.provenance.block.signer == 0);
    }
  }
  auto consumer = fx.make_node(StrategyKind::SourceOnly, 3, false);
  CHECK_THROWS_AS(produce_at_source(*consumer, "f0", 1), NotAuthorized);
}

TEST_CASE("full cache at rank m serves fresh self-signed recodes in the file span") {
  StratFixture fx;
  auto node = fx.make_node(StrategyKind::FullCache, 4, false);
  RngStream rng(31);
  std::vector<Message> sink;
  while (!node->files.at("f0").decoded)
    node->process_data(DataMsg{4, fx.publisher_block(rng)}, 0, kSecond, false, sink);

  auto span = fx.full_span();
  for (int i = 0; i < 10; ++i) {
    auto served = serve_block(*node, "f0", std::nullopt);
    REQUIRE(served.has_value());
    auto coded = std::get<rlnc::CodedBlock>(served->block);
    CHECK(coded.provenance.block.signer == 4);
    CHECK(integrity::verify_block(coded, fx.keys));
    CHECK(span.absorb(coded) == rlnc::Verdict::Redundant);
  }
}

TEST_CASE("full cache below rank m forwards verbatim with the original signer") {
  StratFixture fx;
  auto node = fx.make_node(StrategyKind::FullCache, 4, false);
  RngStream rng(32);
  std::vector<Message> sink;
  for (std::size_t i = 0; i + 1 < fx.gen.block_count; ++i)
    node->process_data(DataMsg{4, fx.publisher_block(rng)}, 0, kSecond, false, sink);
  REQUIRE_FALSE(node->files.at("f0").decoded);

  auto served = serve_block(*node, "f0", std::nullopt);
  REQUIRE(served.has_value());
  const auto& coded = std::get<rlnc::CodedBlock>(served->block);
  CHECK(coded.provenance.block.signer == 0);  // never mixed, never re-signed
  CHECK(integrity::verify_block(coded, fx.keys));
}

TEST_CASE("unrestricted at the accumulation threshold recodes its whole holdings") {
  StratFixture fx;
  fx.cfg.accumulation_threshold = 2;
  auto node = fx.make_node(StrategyKind::Unrestricted, 4, false);
  RngStream rng(33);
  std::vector<Message> sink;
  node->process_data(DataMsg{4, fx.publisher_block(rng)}, 0, kSecond, false, sink);
  node->process_data(DataMsg{4, fx.publisher_block(rng)}, 0, kSecond, false, sink);
  REQUIRE(node->files.at("f0").stored.size() == 2);

  rlnc::DecoderState pair_span(rlnc::ref_of(fx.gen), &fx.field);
  for (const auto& b : node->files.at("f0").stored) pair_span.absorb(b);

  auto served = serve_block(*node, "f0", std::nullopt);
  REQUIRE(served.has_value());
  const auto& coded = std::get<rlnc::CodedBlock>(served->block);
  CHECK_FALSE(coded.provenance.block.present());  // mixes are unsigned
  CHECK(pair_span.absorb(coded) == rlnc::Verdict::Redundant);
}

TEST_CASE("receive verification per strategy") {
  StratFixture fx;
  RngStream rng(34);
  auto block = fx.publisher_block(rng);
  auto tampered = block;
  tampered.payload[0] = fx.field.add(tampered.payload[0], 3);

  auto fc = fx.make_node(StrategyKind::FullCache, 6, false);
  CHECK(verify_incoming(*fc, DataMsg{6, block}, 1) == ReceiveVerdict::AcceptAbsorb);
  CHECK(verify_incoming(*fc, DataMsg{6, tampered}, 1) == ReceiveVerdict::Drop);

  auto un = fx.make_node(StrategyKind::Unrestricted, 6, false);
  CHECK(verify_incoming(*un, DataMsg{6, tampered}, 1) == ReceiveVerdict::AcceptAbsorb);

  auto so = fx.make_node(StrategyKind::SourceOnly, 6, false);
  CHECK(verify_incoming(*so, DataMsg{6, block}, 1) == ReceiveVerdict::AcceptAbsorb);
  CHECK(verify_incoming(*so, DataMsg{6, tampered}, 1) == ReceiveVerdict::Drop);
  // a cache-signed block is not publisher-signed: source-only drops it
  auto cache_signed = rlnc::recode(fx.field, std::vector<rlnc::CodedBlock>{block}, rng);
  cache_signed.provenance.origin = fx.manifest.origin;
  cache_signed = integrity::sign_block(std::move(cache_signed), 3, fx.keys,
                                       {.full_rank_origin_verified = true});
  CHECK(verify_incoming(*so, DataMsg{6, cache_signed}, 1) == ReceiveVerdict::Drop);
}

TEST_CASE("signature coverage holds over full corridor traces") {
  for (auto strategy : {StrategyKind::SourceOnly, StrategyKind::FullCache}) {
    ScenarioConfig cfg;
    cfg.topology = TopologyKind::CorridorDisjoint;
    cfg.strategy = strategy;
    cfg.loss = 0.2;
    cfg.seed = 5;
    cfg.block_count = 8;
    cfg.block_size = 256;
    cfg.horizon_s = 60;
    auto result = sim::run(cfg);
    REQUIRE(result.completed);
    std::istringstream in(harness::data_tx_lines(result.trace));
    std::string line;
    std::size_t lines = 0;
    while (std::getline(in, line)) {
      ++lines;
      const auto at = line.find("signer=");
      REQUIRE(at != std::string::npos);
      const int signer = std::stoi(line.substr(at + 7));
      if (strategy == StrategyKind::SourceOnly)
        CHECK(signer == 0);  // publisher-signed, network wide
      else
        CHECK(signer >= 0);  // publisher or a full-rank cache
    }
    CHECK(lines > 0);
  }
}

TEST_CASE("independent recoding beats identical verbatim caches (micro)") {
  Field field(FieldSpec::gf256());
  RngStream rng(71);
  const int trials = 2000;
  for (std::size_t m : {4u, 8u}) {
    rlnc::GenerationRef gen{"f", m, 0};
    const std::size_t j_max = 3 * m;
    std::vector<int> full_a(j_max + 1, 0), full_b(j_max + 1, 0);

    for (int t = 0; t < trials; ++t) {
      // route a: every draw is a fresh uniform mixture
      rlnc::DecoderState a(gen, &field);
      for (std::size_t j = 1; j <= j_max; ++j) {
        rlnc::CodedBlock b;
        b.gen = gen;
        b.coefficients.resize(m);
        for (auto& c : b.coefficients) c = Symbol(rng.next_below(256));
        a.absorb(b);
        if (a.full()) {
          for (std::size_t k = j; k <= j_max; ++k) ++full_a[k];
          break;
        }
      }
      // route b: both caches hold the same m stored blocks, uniform picks
      std::vector<rlnc::CodedBlock> stored;
      rlnc::DecoderState indep(gen, &field);
      while (stored.size() < m) {
        rlnc::CodedBlock b;
        b.gen = gen;
        b.coefficients.resize(m);
        for (auto& c : b.coefficients) c = Symbol(rng.next_below(256));
        if (indep.absorb(b) == rlnc::Verdict::Innovative) stored.push_back(b);
      }
      rlnc::DecoderState bst(gen, &field);
      for (std::size_t j = 1; j <= j_max; ++j) {
        bst.absorb(stored[rng.next_below(m)]);
        if (bst.full()) {
          for (std::size_t k = j; k <= j_max; ++k) ++full_b[k];
          break;
        }
      }
    }
    for (std::size_t j = 1; j <= j_max; ++j) CHECK(full_a[j] >= full_b[j]);
    for (std::size_t j = m; j < 2 * m; ++j) CHECK(full_a[j] > full_b[j]);
  }
}

TEST_CASE("a third of fresh recodes from each of three caches recovers the file") {
  Field field(FieldSpec::gf256());
  RngStream rng(72);
  const std::size_t m = 16;
  rlnc::GenerationRef gen{"f", m, 0};
  const std::size_t per_cache = (m + 2) / 3;  // ceil(m/3)
  int recovered = 0;
  const int trials = 200;
  for (int t = 0; t < trials; ++t) {
    rlnc::DecoderState st(gen, &field);
    for (int cache = 0; cache < 3; ++cache)
      for (std::size_t i = 0; i < per_cache; ++i) {
        rlnc::CodedBlock b;
        b.gen = gen;
        b.coefficients.resize(m);
        for (auto& c : b.coefficients) c = Symbol(rng.next_below(256));
        st.absorb(b);
      }
    if (st.full()) ++recovered;
  }
  CHECK(recovered >= int(trials * 0.95));
}

TEST_CASE("unrestricted with an unreachable threshold forwards exactly like source-only") {
  ScenarioConfig base;
  base.topology = TopologyKind::CorridorDisjoint;
  base.loss = 0.3;
  base.seed = 17;
  base.block_count = 8;
  base.block_size = 512;
  base.horizon_s = 60;

  ScenarioConfig so = base;
  so.strategy = StrategyKind::SourceOnly;
  ScenarioConfig un = base;
  un.strategy = StrategyKind::Unrestricted;
  un.accumulation_threshold = 1000000;  // never met: verbatim forwarding only

  auto r1 = sim::run(so);
  auto r2 = sim::run(un);
  CHECK(harness::data_tx_lines(r1.trace) == harness::data_tx_lines(r2.trace));
  CHECK_FALSE(harness::data_tx_lines(r1.trace).empty());
}
