#pragma once

#include <span>
#include <string>
#include <vector>

#include "cbnc/scenario.hpp"

namespace cbnc {

// One delivery outcome per (run, receiver). decode_time_s is -1 when the
// receiver did not finish before the horizon; throughput treats such rows as
// zero rather than excluding them.
struct MetricRecord {
  std::uint64_t seed = 0;
  StrategyKind strategy = StrategyKind::FullCache;
  TopologyKind topology = TopologyKind::CorridorDisjoint;
  double loss = 0.0;
  NodeId receiver = kNoNode;
  double decode_time_s = -1.0;
  std::size_t blocks_tx = 0;
  double innovative_ratio = 0.0;
  std::size_t bytes_tx = 0;
  int polluted = 0;
  NodeId accused = kNoNode;
};

std::string csv_header();
std::string to_csv_row(const MetricRecord& r);
std::string to_csv(std::span<const MetricRecord> rows);
std::vector<MetricRecord> parse_csv(const std::string& text);  // ConfigInvalid on bad input

struct Aggregate {
  double mean = 0, stddev = 0, min = 0, max = 0, stderr_mean = 0;
  std::size_t n = 0;
};

Aggregate aggregate(std::span<const double> values);

// file bits / decode time; 0 for undelivered rows
double throughput_bps(const MetricRecord& r, double payload_bits);

}  // namespace cbnc
