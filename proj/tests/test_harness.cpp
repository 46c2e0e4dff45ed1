#include <sstream>

#include "cbnc/harness.hpp"
#include "doctest.h"

using namespace cbnc;
using namespace cbnc::harness;

TEST_CASE("corridor30 preset matches the experiment description") {
  auto spec = preset_corridor30();
  CHECK(spec.base.loss == 0.30);
  CHECK(spec.base.block_count == 16);
  CHECK(spec.base.block_size == 1024);
  CHECK(spec.strategies.size() == 4);
  CHECK(spec.topologies.size() == 2);
  CHECK(spec.seeds.size() >= 20);
  CHECK_FALSE(spec.base.handshake);  // corridor analysis runs pure broadcast
}

TEST_CASE("mobile10 preset matches the experiment description") {
  auto spec = preset_mobile10();
  CHECK(spec.base.node_count == 10);
  CHECK(spec.base.publisher_count == 3);
  CHECK(spec.base.topology == TopologyKind::RandomWaypoint);
  CHECK(spec.strategies.size() == 4);
  CHECK(spec.base.handshake);
  CHECK_THROWS_AS(preset_by_name("bogus"), ConfigInvalid);
}

TEST_CASE("empty seed list yields an empty table with a warning") {
  auto spec = preset_corridor30();
  spec.seeds.clear();
  auto table = run_experiment(spec);
  CHECK(table.rows.empty());
}

TEST_CASE("run cardinality: strategies x seeds x topologies x receivers") {
  auto spec = preset_corridor30();
  spec.base.block_count = 4;
  spec.base.block_size = 128;
  spec.seeds = {1, 2, 3};
  spec.topologies = {TopologyKind::CorridorDisjoint};
  auto table = run_experiment(spec);
  CHECK(table.rows.size() == 4 * 3);  // 4 strategies x 3 seeds x 1 receiver
}

TEST_CASE("csv round-trips and aggregates recompute exactly") {
  auto spec = preset_corridor30();
  spec.base.block_count = 4;
  spec.base.block_size = 128;
  spec.seeds = {1, 2};
  spec.topologies = {TopologyKind::CorridorDisjoint};
  auto table = run_experiment(spec);
  auto parsed = parse_csv(to_csv(table.rows));
  REQUIRE(parsed.size() == table.rows.size());
  CHECK(to_csv(parsed) == to_csv(table.rows));

  std::vector<double> times;
  for (const auto& r : parsed) times.push_back(r.decode_time_s);
  auto agg = aggregate(times);
  CHECK(agg.n == parsed.size());
  double sum = 0;
  for (double t : times) sum += t;
  CHECK(agg.mean == doctest::Approx(sum / double(times.size())).epsilon(1e-12));

  CHECK_THROWS_AS(parse_csv("bad header\n1,2,3\n"), ConfigInvalid);
}

TEST_CASE("hypothesis testing needs ten seeds") {
  auto spec = preset_corridor30();
  spec.base.block_count = 4;
  spec.base.block_size = 128;
  spec.seeds = {1, 2, 3};
  spec.topologies = {TopologyKind::CorridorDisjoint};
  auto table = run_experiment(spec);
  CHECK_THROWS_AS(test_hypotheses(table, 4 * 128 * 8), InsufficientSeeds);
}

TEST_CASE("mobility trace is identical across strategies under a shared seed") {
  ScenarioConfig base;
  base.topology = TopologyKind::RandomWaypoint;
  base.node_count = 10;
  base.publisher_count = 3;
  base.seed = 6;
  base.block_count = 4;
  base.block_size = 128;
  base.horizon_s = 120;
  base.handshake = true;

  std::string reference;
  for (auto strategy : {StrategyKind::NoCoding, StrategyKind::SourceOnly,
                        StrategyKind::FullCache, StrategyKind::Unrestricted}) {
    ScenarioConfig cfg = base;
    cfg.strategy = strategy;
    auto result = sim::run(cfg);
    const std::string mob = mobility_lines(result.trace);
    CHECK_FALSE(mob.empty());
    if (reference.empty())
      reference = mob;
    else
      CHECK(mob == reference);
  }
}

TEST_CASE("experiment reruns reproduce the table") {
  auto spec = preset_corridor30();
  spec.base.block_count = 4;
  spec.base.block_size = 128;
  spec.seeds = {5, 6};
  spec.topologies = {TopologyKind::CorridorInterfering};
  auto a = run_experiment(spec);
  auto b = run_experiment(spec);
  CHECK(to_csv(a.rows) == to_csv(b.rows));
}

TEST_CASE("trace filter follows one node") {
  ScenarioConfig cfg;
  cfg.topology = TopologyKind::CorridorDisjoint;
  cfg.strategy = StrategyKind::FullCache;
  cfg.seed = 2;
  cfg.block_count = 4;
  cfg.block_size = 128;
  cfg.loss = 0;
  cfg.horizon_s = 20;
  auto result = sim::run(cfg);
  const std::string only7 = filter_trace(result.trace, 7);
  CHECK_FALSE(only7.empty());
  std::istringstream in(only7);
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    double t;
    int node;
    ls >> t >> node;
    CHECK(node == 7);
  }
}
