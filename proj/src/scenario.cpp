#include "cbnc/scenario.hpp"

#include <fstream>
#include <sstream>

namespace cbnc {

std::string strategy_name(StrategyKind s) {
  switch (s) {
    case StrategyKind::NoCoding: return "no_coding";
    case StrategyKind::SourceOnly: return "source_only";
    case StrategyKind::FullCache: return "full_cache";
    case StrategyKind::Unrestricted: return "unrestricted";
  }
  return "?";
}

StrategyKind parse_strategy(const std::string& s) {
  if (s == "no_coding") return StrategyKind::NoCoding;
  if (s == "source_only") return StrategyKind::SourceOnly;
  if (s == "full_cache") return StrategyKind::FullCache;
  if (s == "unrestricted") return StrategyKind::Unrestricted;
  throw ConfigInvalid("strategy: expected no_coding|source_only|full_cache|unrestricted, got '" +
                      s + "'");
}

std::string topology_name(TopologyKind t) {
  switch (t) {
    case TopologyKind::CorridorDisjoint: return "corridor_disjoint";
    case TopologyKind::CorridorInterfering: return "corridor_interfering";
    case TopologyKind::RandomWaypoint: return "random_waypoint";
  }
  return "?";
}

TopologyKind parse_topology(const std::string& s) {
  if (s == "corridor_disjoint") return TopologyKind::CorridorDisjoint;
  if (s == "corridor_interfering") return TopologyKind::CorridorInterfering;
  if (s == "random_waypoint") return TopologyKind::RandomWaypoint;
  throw ConfigInvalid(
      "topology: expected corridor_disjoint|corridor_interfering|random_waypoint, got '" + s +
      "'");
}

void ScenarioConfig::validate() const {
  auto fail = [](const std::string& what) { throw ConfigInvalid(what); };
  if (loss < 0.0 || loss > 1.0) fail("loss: must be in [0,1]");
  if (block_count < 1) fail("m: must be >= 1");
  if (block_size < 1) fail("block_size: must be >= 1");
  if (horizon_s < 0) fail("horizon: must be >= 0");
  if (radio_range_m <= 0) fail("radio_range: must be > 0");
  if (bitrate_bps <= 0) fail("bitrate: must be > 0");
  if (pacing < 1.0) fail("pacing: must be >= 1");
  if (topology == TopologyKind::RandomWaypoint) {
    if (node_count < 2) fail("nodes: need at least 2 for a waypoint scenario");
    if (publisher_count < 1 || publisher_count >= node_count)
      fail("publishers: must be in [1, nodes)");
    if (speed_min < 0 || speed_max < speed_min) fail("speed: need 0 <= speed_min <= speed_max");
    if (area_w <= 0 || area_h <= 0) fail("area: must be positive");
  }
  if (interest_period_s <= 0 || request_period_s <= 0 || summary_period_s <= 0 ||
      handshake_timeout_s <= 0)
    fail("timers: all periods must be > 0");
  if (accumulation_threshold < 2) fail("accumulation_threshold: must be >= 2");
  if (bloom_bits < 64 || bloom_bits % 8 != 0) fail("bloom_bits: need a multiple of 8, >= 64");
  if (bloom_hashes < 1) fail("bloom_hashes: must be >= 1");
  if (attack) {
    if (attack->rate <= 0.0 || attack->rate > 1.0) fail("attack_rate: must be in (0,1]");
    if (attack->attacker < 0) fail("attacker_node: must be a node id");
  }
  if (jam_loss < 0 || jam_loss > 1) fail("jam_loss: must be in [0,1]");
  if (jam_end_s < jam_start_s) fail("jam window: jam_end must be >= jam_start");
  if (field.order <= 255) fail("field: order must exceed 255 to carry byte payloads");
}

namespace {

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "on" || v == "true" || v == "1") return true;
  if (v == "off" || v == "false" || v == "0") return false;
  throw ConfigInvalid(key + ": expected on|off, got '" + v + "'");
}

double parse_num(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigInvalid(key + ": expected a number, got '" + v + "'");
  }
}

}  // namespace

ScenarioConfig ScenarioConfig::parse_text(const std::string& text) {
  ScenarioConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string key, value;
    if (!(ls >> key)) continue;
    if (!(ls >> value))
      throw ConfigInvalid("line " + std::to_string(lineno) + ": key '" + key + "' has no value");

    if (key == "topology") cfg.topology = parse_topology(value);
    else if (key == "field") cfg.field = FieldSpec::parse(value);
    else if (key == "strategy") cfg.strategy = parse_strategy(value);
    else if (key.rfind("strategy_node_", 0) == 0)
      cfg.strategy_overrides[NodeId(parse_num(key, key.substr(14)))] = parse_strategy(value);
    else if (key == "seed") cfg.seed = std::uint64_t(parse_num(key, value));
    else if (key == "loss") cfg.loss = parse_num(key, value);
    else if (key == "radio_range") cfg.radio_range_m = parse_num(key, value);
    else if (key == "bitrate") cfg.bitrate_bps = parse_num(key, value);
    else if (key == "collisions")
      cfg.collision = parse_bool(key, value) ? CollisionMode::SharedSlot : CollisionMode::Off;
    else if (key == "m") cfg.block_count = std::size_t(parse_num(key, value));
    else if (key == "block_size") cfg.block_size = std::size_t(parse_num(key, value));
    else if (key == "file_size") cfg.file_size = std::size_t(parse_num(key, value));
    else if (key == "horizon") cfg.horizon_s = parse_num(key, value);
    else if (key == "nodes") cfg.node_count = std::size_t(parse_num(key, value));
    else if (key == "publishers") cfg.publisher_count = std::size_t(parse_num(key, value));
    else if (key == "area_w") cfg.area_w = parse_num(key, value);
    else if (key == "area_h") cfg.area_h = parse_num(key, value);
    else if (key == "speed_min") cfg.speed_min = parse_num(key, value);
    else if (key == "speed_max") cfg.speed_max = parse_num(key, value);
    else if (key == "pause") cfg.pause_s = parse_num(key, value);
    else if (key.rfind("place_node_", 0) == 0) {
      const auto comma = value.find(',');
      if (comma == std::string::npos)
        throw ConfigInvalid(key + ": expected x,y coordinates");
      cfg.placements[NodeId(parse_num(key, key.substr(11)))] = {
          parse_num(key, value.substr(0, comma)), parse_num(key, value.substr(comma + 1))};
    }
    else if (key.rfind("relay_node_", 0) == 0) {
      if (parse_bool(key, value)) cfg.relay_nodes.insert(NodeId(parse_num(key, key.substr(11))));
    }
    else if (key == "handshake") cfg.handshake = parse_bool(key, value);
    else if (key == "promiscuous") cfg.promiscuous = parse_bool(key, value);
    else if (key == "interest_period") cfg.interest_period_s = parse_num(key, value);
    else if (key == "request_period") cfg.request_period_s = parse_num(key, value);
    else if (key == "summary_period") cfg.summary_period_s = parse_num(key, value);
    else if (key == "handshake_timeout") cfg.handshake_timeout_s = parse_num(key, value);
    else if (key == "interest_ttl") cfg.interest_ttl = int(parse_num(key, value));
    else if (key == "bloom_bits") cfg.bloom_bits = std::size_t(parse_num(key, value));
    else if (key == "bloom_hashes") cfg.bloom_hashes = std::uint32_t(parse_num(key, value));
    else if (key == "accumulation_threshold")
      cfg.accumulation_threshold = std::size_t(parse_num(key, value));
    else if (key == "sig_delay") cfg.sig_delay_s = parse_num(key, value);
    else if (key == "pacing") cfg.pacing = parse_num(key, value);
    else if (key == "attacker_node") {
      if (!cfg.attack) cfg.attack.emplace();
      cfg.attack->attacker = NodeId(parse_num(key, value));
    } else if (key == "attack_mode") {
      if (!cfg.attack) cfg.attack.emplace();
      if (value == "coeff") cfg.attack->mode = integrity::AttackMode::CorruptCoefficients;
      else if (value == "payload") cfg.attack->mode = integrity::AttackMode::CorruptPayload;
      else throw ConfigInvalid("attack_mode: expected coeff|payload, got '" + value + "'");
    } else if (key == "attack_rate") {
      if (!cfg.attack) cfg.attack.emplace();
      cfg.attack->rate = parse_num(key, value);
    } else if (key == "jam_start") cfg.jam_start_s = parse_num(key, value);
    else if (key == "jam_end") cfg.jam_end_s = parse_num(key, value);
    else if (key == "jam_loss") cfg.jam_loss = parse_num(key, value);
    else if (key == "trace") cfg.collect_trace = parse_bool(key, value);
    else throw ConfigInvalid("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
  }
  return cfg;
}

ScenarioConfig ScenarioConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigInvalid("cannot open scenario file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_text(buf.str());
}

std::string ScenarioConfig::to_text() const {
  std::ostringstream out;
  out.precision(17);
  out << "topology " << topology_name(topology) << "\n";
  out << "field " << field.name() << "\n";
  out << "strategy " << strategy_name(strategy) << "\n";
  for (const auto& [node, s] : strategy_overrides)
    out << "strategy_node_" << node << " " << strategy_name(s) << "\n";
  out << "seed " << seed << "\n";
  out << "loss " << loss << "\n";
  out << "radio_range " << radio_range_m << "\n";
  out << "bitrate " << bitrate_bps << "\n";
  if (collision)
    out << "collisions " << (*collision == CollisionMode::SharedSlot ? "on" : "off") << "\n";
  out << "m " << block_count << "\n";
  out << "block_size " << block_size << "\n";
  if (file_size) out << "file_size " << file_size << "\n";
  out << "horizon " << horizon_s << "\n";
  out << "nodes " << node_count << "\n";
  out << "publishers " << publisher_count << "\n";
  out << "area_w " << area_w << "\n";
  out << "area_h " << area_h << "\n";
  out << "speed_min " << speed_min << "\n";
  out << "speed_max " << speed_max << "\n";
  out << "pause " << pause_s << "\n";
  for (const auto& [node, at] : placements)
    out << "place_node_" << node << " " << at.first << "," << at.second << "\n";
  for (NodeId node : relay_nodes) out << "relay_node_" << node << " on\n";
  out << "handshake " << (handshake ? "on" : "off") << "\n";
  out << "promiscuous " << (promiscuous ? "on" : "off") << "\n";
  out << "interest_period " << interest_period_s << "\n";
  out << "request_period " << request_period_s << "\n";
  out << "summary_period " << summary_period_s << "\n";
  out << "handshake_timeout " << handshake_timeout_s << "\n";
  out << "interest_ttl " << interest_ttl << "\n";
  out << "bloom_bits " << bloom_bits << "\n";
  out << "bloom_hashes " << bloom_hashes << "\n";
  out << "accumulation_threshold " << accumulation_threshold << "\n";
  out << "sig_delay " << sig_delay_s << "\n";
  out << "pacing " << pacing << "\n";
  if (attack) {
    out << "attacker_node " << attack->attacker << "\n";
    out << "attack_mode "
        << (attack->mode == integrity::AttackMode::CorruptCoefficients ? "coeff" : "payload")
        << "\n";
    out << "attack_rate " << attack->rate << "\n";
  }
  if (jam_loss > 0) {
    out << "jam_start " << jam_start_s << "\n";
    out << "jam_end " << jam_end_s << "\n";
    out << "jam_loss " << jam_loss << "\n";
  }
  out << "trace " << (collect_trace ? "on" : "off") << "\n";
  return out.str();
}

}  // namespace cbnc
