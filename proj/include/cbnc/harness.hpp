#pragma once

#include <string>
#include <vector>

#include "cbnc/engine.hpp"
#include "cbnc/metrics.hpp"

namespace cbnc::harness {

// A sweep: the base scenario crossed with topologies, strategies and seeds.
// Strategies share seeds pairwise; mobility and loss substreams depend only
// on the seed.
struct ExperimentSpec {
  std::string name;
  ScenarioConfig base;
  std::vector<TopologyKind> topologies;
  std::vector<StrategyKind> strategies;
  std::vector<std::uint64_t> seeds;
  std::string out_dir;       // when set: results.csv (+ traces) written here
  bool write_traces = false;
};

struct ResultTable {
  std::vector<MetricRecord> rows;
};

// Corridor at 30% loss, both braid variants, one publisher and one
// downstream receiver, all four strategies, m=16 blocks of 1024 bytes.
ExperimentSpec preset_corridor30();

// 10-node random waypoint, 3 publishers with one file each, 7 receivers
// subscribed to every file, all four strategies.
ExperimentSpec preset_mobile10();

ExperimentSpec preset_by_name(const std::string& name);  // ConfigInvalid on unknown

// Runs every (topology, strategy, seed) combination; engines fan out across
// worker threads and results merge in combination order. Returns the table;
// writes results.csv (and per-run traces) when out_dir is set.
ResultTable run_experiment(const ExperimentSpec& spec);

struct HypothesesReport {
  bool h1_full_cache_beats_source_only = false;
  bool h2_full_cache_comparable_to_unrestricted = false;
  bool paired = false;  // differences computed over matched (topology, seed, receiver) runs
  double mean_throughput_no_coding = 0;
  double mean_throughput_source_only = 0;
  double mean_throughput_full_cache = 0;
  double mean_throughput_unrestricted = 0;
  double h1_margin = 0;  // full_cache - source_only mean difference
  double h1_se = 0;
  double so_nc_margin = 0;  // source_only - no_coding, for the ordering chain
  double so_nc_se = 0;
  double h2_relative_gap = 0;  // |fc - un| / max
  double band = 0.15;
  std::string text;  // printable report
};

// H1: full-cache mean throughput exceeds source-only by more than one
// standard error; sweeps share seeds across strategies, so differences are
// taken per matched run when possible. H2: full-cache within the
// comparability band of unrestricted. Throws InsufficientSeeds below 10
// distinct seeds. payload_bits scales throughput only; verdicts are ratio
// based.
HypothesesReport test_hypotheses(const ResultTable& table, double payload_bits,
                                 double band = 0.15);

// Trace utilities for the CLI and the paired-seed assertions.
std::string filter_trace(const std::string& trace, NodeId follow_node);
std::string mobility_lines(const std::string& trace);
std::string data_tx_lines(const std::string& trace);

double scenario_payload_bits(const ScenarioConfig& cfg);

}  // namespace cbnc::harness
