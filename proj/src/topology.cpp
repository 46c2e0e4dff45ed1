#include "cbnc/topology.hpp"

#include <algorithm>
#include <cmath>

namespace cbnc {

Topology Topology::corridor(TopologyKind variant) {
  Topology t;
  t.kind_ = variant;
  t.corridor_ = true;
  // rows: source (0) | relays 1,2,3 | relays 4,5,6 | receiver (7)
  t.positions_ = {{0, 0},  {-80, 60}, {0, 60},  {80, 60},
                  {-80, 120}, {0, 120}, {80, 120}, {0, 180}};
  t.link_.assign(kCorridorNodes, std::vector<std::uint8_t>(kCorridorNodes, 0));
  auto link = [&](NodeId a, NodeId b) {
    t.link_[a][b] = 1;
    t.link_[b][a] = 1;
  };
  for (NodeId relay = 1; relay <= 3; ++relay) link(kCorridorSource, relay);
  for (NodeId relay = 4; relay <= 6; ++relay) link(relay, kCorridorReceiver);
  if (variant == TopologyKind::CorridorDisjoint) {
    link(1, 4);
    link(2, 5);
    link(3, 6);
  } else {
    for (NodeId up = 1; up <= 3; ++up)
      for (NodeId down = 4; down <= 6; ++down) link(up, down);
  }
  return t;
}

Topology Topology::random_waypoint(const ScenarioConfig& cfg, RngStream rng) {
  Topology t;
  t.kind_ = TopologyKind::RandomWaypoint;
  t.corridor_ = false;
  t.positions_.resize(cfg.node_count);
  t.legs_.resize(cfg.node_count);
  const SimTime horizon = seconds_to_sim(cfg.horizon_s);

  for (std::size_t node = 0; node < cfg.node_count; ++node) {
    Vec2 at{rng.next_double(0, cfg.area_w), rng.next_double(0, cfg.area_h)};
    const auto anchor = cfg.placements.find(NodeId(node));
    if (anchor != cfg.placements.end()) {
      at = {anchor->second.first, anchor->second.second};
      t.positions_[node] = at;
      Leg leg;
      leg.start = 0;
      leg.depart = 0;
      leg.from = leg.to = at;
      leg.arrive = horizon + kSecond;
      t.legs_[node].push_back(leg);
      continue;
    }
    t.positions_[node] = at;
    SimTime now = 0;
    bool first = true;
    while (now <= horizon) {
      const Vec2 dest{rng.next_double(0, cfg.area_w), rng.next_double(0, cfg.area_h)};
      const double speed = rng.next_double(cfg.speed_min, cfg.speed_max);
      Leg leg;
      leg.start = now;
      leg.depart = now + (first ? 0 : seconds_to_sim(cfg.pause_s));
      leg.from = at;
      if (speed <= 0.0) {  // degenerate mobility: stay put forever
        leg.to = at;
        leg.arrive = horizon + kSecond;
        t.legs_[node].push_back(leg);
        break;
      }
      leg.to = dest;
      leg.arrive = leg.depart + seconds_to_sim(dist(at, dest) / speed);
      t.legs_[node].push_back(leg);
      at = dest;
      now = leg.arrive;
      first = false;
    }
  }
  return t;
}

Vec2 Topology::position_at(NodeId node, SimTime t) const {
  if (corridor_ || legs_.empty()) return positions_[node];
  const auto& legs = legs_[std::size_t(node)];
  // last leg whose start <= t
  auto it = std::upper_bound(legs.begin(), legs.end(), t,
                             [](SimTime v, const Leg& l) { return v < l.start; });
  if (it == legs.begin()) return legs.front().from;
  const Leg& leg = *(it - 1);
  if (t <= leg.depart) return leg.from;
  if (t >= leg.arrive) return leg.to;
  const double f = double(t - leg.depart) / double(leg.arrive - leg.depart);
  return {leg.from.x + f * (leg.to.x - leg.from.x), leg.from.y + f * (leg.to.y - leg.from.y)};
}

bool Topology::in_range(NodeId a, NodeId b, SimTime t, double range_m) const {
  if (a == b) return false;
  if (corridor_) return link_[a][b] != 0;
  return dist(position_at(a, t), position_at(b, t)) <= range_m;
}

std::vector<NodeId> Topology::neighbors_at(NodeId of, SimTime t, double range_m) const {
  std::vector<NodeId> out;
  for (std::size_t n = 0; n < node_count(); ++n)
    if (in_range(of, NodeId(n), t, range_m)) out.push_back(NodeId(n));
  return out;
}

}  // namespace cbnc
