#pragma once

#include <cmath>
#include <vector>

#include "cbnc/rng.hpp"
#include "cbnc/scenario.hpp"

namespace cbnc {

struct Vec2 {
  double x = 0, y = 0;
};

inline double dist(Vec2 a, Vec2 b) {
  const double dx = a.x - b.x, dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

// Node placement and reachability. Corridor variants are 1-3-3-1 grids with
// the braid adjacency stated explicitly: the disjoint braid is not realizable
// as a single-radius disk graph (three mutually out-of-range relays cannot
// all chain to a common endpoint), so for corridors "in range" is the
// declared link relation and positions are nominal. Random waypoint uses
// disk-range connectivity over exact piecewise-linear trajectories.
class Topology {
 public:
  struct Leg {
    SimTime start = 0;   // leg begins (includes the pause at 'from')
    SimTime depart = 0;  // movement begins
    SimTime arrive = 0;  // movement ends
    Vec2 from, to;
  };

  static Topology corridor(TopologyKind variant);
  static Topology random_waypoint(const ScenarioConfig& cfg, RngStream rng);

  std::size_t node_count() const { return positions_.size(); }
  bool is_corridor() const { return corridor_; }
  TopologyKind kind() const { return kind_; }

  Vec2 position_at(NodeId node, SimTime t) const;
  bool in_range(NodeId a, NodeId b, SimTime t, double range_m) const;
  std::vector<NodeId> neighbors_at(NodeId of, SimTime t, double range_m) const;

  const std::vector<std::vector<Leg>>& schedules() const { return legs_; }

  // Corridor roles: node 0 publishes, node 7 receives, 1..6 relay.
  static constexpr NodeId kCorridorSource = 0;
  static constexpr NodeId kCorridorReceiver = 7;
  static constexpr std::size_t kCorridorNodes = 8;

 private:
  TopologyKind kind_ = TopologyKind::CorridorDisjoint;
  bool corridor_ = true;
  std::vector<Vec2> positions_;                  // initial positions
  std::vector<std::vector<std::uint8_t>> link_;  // corridor adjacency matrix
  std::vector<std::vector<Leg>> legs_;           // waypoint schedules
};

}  // namespace cbnc
