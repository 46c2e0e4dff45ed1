#pragma once

#include <string>
#include <vector>

#include "cbnc/metrics.hpp"
#include "cbnc/scenario.hpp"

namespace cbnc::sim {

struct RunCounters {
  std::size_t events = 0;
  std::size_t data_tx = 0;       // data transmissions, network wide
  std::size_t bytes_tx = 0;      // all transmitted bytes including control
  SimTime first_data_tx = -1;
};

struct RunResult {
  ScenarioConfig config;
  std::string trace;                  // empty when collect_trace is off
  std::vector<MetricRecord> metrics;  // one row per receiver
  RunCounters counters;
  SimTime ended_at = 0;
  bool completed = false;  // every receiver decoded before the horizon
  std::vector<std::size_t> final_inflight;  // per node: live handshake entries at end
};

// Executes one scenario: deterministic single-threaded event dispatch,
// identical config (seed included) gives a bit-identical trace.
RunResult run(const ScenarioConfig& cfg);

}  // namespace cbnc::sim
