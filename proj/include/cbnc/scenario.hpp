#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cbnc/common.hpp"
#include "cbnc/field.hpp"
#include "cbnc/integrity.hpp"

namespace cbnc {

enum class StrategyKind { NoCoding, SourceOnly, FullCache, Unrestricted };

std::string strategy_name(StrategyKind s);
StrategyKind parse_strategy(const std::string& s);  // ConfigInvalid on error

enum class TopologyKind { CorridorDisjoint, CorridorInterfering, RandomWaypoint };

std::string topology_name(TopologyKind t);
TopologyKind parse_topology(const std::string& s);

enum class CollisionMode { Off, SharedSlot };

// Full run description. Parsed from flat "key value" text, one pair per
// line, '#' comments. run() rejects invalid combinations with field-level
// diagnostics.
struct ScenarioConfig {
  TopologyKind topology = TopologyKind::CorridorDisjoint;
  FieldSpec field = FieldSpec::gf256();
  StrategyKind strategy = StrategyKind::FullCache;
  std::map<NodeId, StrategyKind> strategy_overrides;  // strategy_node_<id>

  std::uint64_t seed = 1;
  double loss = 0.0;                 // per-link per-transmission probability
  double radio_range_m = 70.0;
  double bitrate_bps = 1e6;
  std::optional<CollisionMode> collision;  // unset: interfering corridor -> SharedSlot

  std::size_t block_count = 16;      // m
  std::size_t block_size = 1024;     // bytes per source block
  std::size_t file_size = 0;         // 0 -> block_count * block_size
  double horizon_s = 120.0;

  // mobility (random waypoint) parameters
  std::size_t node_count = 10;
  std::size_t publisher_count = 3;
  double area_w = 300.0, area_h = 300.0;
  double speed_min = 1.0, speed_max = 5.0;
  double pause_s = 2.0;
  // anchored nodes: fixed position, no waypoints (static test layouts)
  std::map<NodeId, std::pair<double, double>> placements;
  // waypoint-mode nodes that cache and forward but subscribe to nothing
  std::set<NodeId> relay_nodes;

  // protocol
  bool handshake = false;            // corridor default: pure broadcast
  bool promiscuous = true;
  double interest_period_s = 1.0;
  double request_period_s = 1.0;
  double summary_period_s = 2.0;
  double handshake_timeout_s = 0.5;
  int interest_ttl = 3;
  std::size_t bloom_bits = 1024;
  std::uint32_t bloom_hashes = 4;

  // strategy knobs
  std::size_t accumulation_threshold = 2;  // unrestricted
  double sig_delay_s = 0.0;                // per-block verification delay

  // data plane pacing: send spacing as a multiple of block airtime
  double pacing = 6.0;

  // attack
  std::optional<integrity::AttackConfig> attack;

  // jamming window: loss spike on the downstream corridor rows
  double jam_start_s = 0.0, jam_end_s = 0.0, jam_loss = 0.0;

  bool collect_trace = true;

  StrategyKind strategy_of(NodeId node) const {
    auto it = strategy_overrides.find(node);
    return it == strategy_overrides.end() ? strategy : it->second;
  }
  std::size_t effective_file_size() const {
    return file_size ? file_size : block_count * block_size;
  }
  CollisionMode effective_collision() const {
    if (collision) return *collision;
    return topology == TopologyKind::CorridorInterfering ? CollisionMode::SharedSlot
                                                         : CollisionMode::Off;
  }

  void validate() const;  // throws ConfigInvalid with diagnostics

  static ScenarioConfig parse_text(const std::string& text);
  static ScenarioConfig load_file(const std::string& path);
  std::string to_text() const;  // echoes every key; parse(to_text()) == *this
};

}  // namespace cbnc
