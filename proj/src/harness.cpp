#include "cbnc/harness.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

namespace cbnc::harness {

ExperimentSpec preset_corridor30() {
  ExperimentSpec spec;
  spec.name = "corridor30";
  spec.base.topology = TopologyKind::CorridorDisjoint;
  spec.base.loss = 0.30;
  spec.base.block_count = 16;
  spec.base.block_size = 1024;
  spec.base.handshake = false;
  spec.base.horizon_s = 120.0;
  spec.topologies = {TopologyKind::CorridorDisjoint, TopologyKind::CorridorInterfering};
  spec.strategies = {StrategyKind::Unrestricted, StrategyKind::FullCache,
                     StrategyKind::SourceOnly, StrategyKind::NoCoding};
  for (std::uint64_t s = 1; s <= 20; ++s) spec.seeds.push_back(s);
  return spec;
}

ExperimentSpec preset_mobile10() {
  ExperimentSpec spec;
  spec.name = "mobile10";
  spec.base.topology = TopologyKind::RandomWaypoint;
  spec.base.node_count = 10;
  spec.base.publisher_count = 3;
  spec.base.loss = 0.10;
  spec.base.block_count = 16;
  spec.base.block_size = 1024;
  spec.base.handshake = true;
  spec.base.horizon_s = 600.0;
  spec.topologies = {TopologyKind::RandomWaypoint};
  spec.strategies = {StrategyKind::Unrestricted, StrategyKind::FullCache,
                     StrategyKind::SourceOnly, StrategyKind::NoCoding};
  for (std::uint64_t s = 1; s <= 20; ++s) spec.seeds.push_back(s);
  return spec;
}

ExperimentSpec preset_by_name(const std::string& name) {
  if (name == "corridor30") return preset_corridor30();
  if (name == "mobile10") return preset_mobile10();
  throw ConfigInvalid("unknown preset '" + name + "' (expected corridor30|mobile10)");
}

double scenario_payload_bits(const ScenarioConfig& cfg) {
  const std::size_t files =
      cfg.topology == TopologyKind::RandomWaypoint ? cfg.publisher_count : 1;
  return double(files) * double(cfg.effective_file_size()) * 8.0;
}

ResultTable run_experiment(const ExperimentSpec& spec) {
  ResultTable table;
  if (spec.seeds.empty()) {
    std::fprintf(stderr, "warning: experiment '%s' has no seeds, nothing to run\n",
                 spec.name.c_str());
    return table;
  }

  struct Combo {
    TopologyKind topology;
    StrategyKind strategy;
    std::uint64_t seed;
  };
  std::vector<Combo> combos;
  for (auto topo : spec.topologies)
    for (auto strat : spec.strategies)
      for (auto seed : spec.seeds) combos.push_back({topo, strat, seed});

  const bool writing = !spec.out_dir.empty();
  if (writing) std::filesystem::create_directories(spec.out_dir);

  std::vector<std::vector<MetricRecord>> results(combos.size());
  std::vector<std::string> traces(writing && spec.write_traces ? combos.size() : 0);
  std::vector<std::string> errors(combos.size());

#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < combos.size(); ++i) {
    ScenarioConfig cfg = spec.base;
    cfg.topology = combos[i].topology;
    cfg.strategy = combos[i].strategy;
    cfg.seed = combos[i].seed;
    cfg.collect_trace = writing && spec.write_traces;
    try {
      auto run = sim::run(cfg);
      results[i] = std::move(run.metrics);
      if (!traces.empty()) traces[i] = std::move(run.trace);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }

  for (std::size_t i = 0; i < combos.size(); ++i)
    if (!errors[i].empty())
      throw ConfigInvalid("run (" + strategy_name(combos[i].strategy) + ", seed " +
                          std::to_string(combos[i].seed) + ") failed: " + errors[i]);

  for (auto& rows : results)
    for (auto& r : rows) table.rows.push_back(r);

  if (writing) {
    std::ofstream csv(spec.out_dir + "/results.csv");
    csv << to_csv(table.rows);
    if (spec.write_traces)
      for (std::size_t i = 0; i < combos.size(); ++i) {
        char name[160];
        std::snprintf(name, sizeof name, "%s/trace_%s_%s_%llu.txt", spec.out_dir.c_str(),
                      topology_name(combos[i].topology).c_str(),
                      strategy_name(combos[i].strategy).c_str(),
                      static_cast<unsigned long long>(combos[i].seed));
        std::ofstream out(name);
        out << traces[i];
      }
  }
  return table;
}

namespace {
std::vector<double> throughputs(const ResultTable& table, StrategyKind strategy,
                                double payload_bits) {
  std::vector<double> out;
  for (const auto& r : table.rows)
    if (r.strategy == strategy) out.push_back(throughput_bps(r, payload_bits));
  return out;
}

using RunKey = std::tuple<std::string, std::uint64_t, NodeId>;  // topology, seed, receiver

struct DiffStats {
  double mean = 0, se = 0;
  bool ok = false;
};

// Mean and standard error of per-run differences between two strategies over
// matched (topology, seed, receiver) runs.
DiffStats matched_diff(const std::map<RunKey, std::map<StrategyKind, double>>& by_run,
                       StrategyKind a, StrategyKind b) {
  std::vector<double> diffs;
  for (const auto& [key, vals] : by_run) {
    auto ia = vals.find(a), ib = vals.find(b);
    if (ia == vals.end() || ib == vals.end()) return {};
    diffs.push_back(ia->second - ib->second);
  }
  if (diffs.size() < 2) return {};
  DiffStats st;
  st.ok = true;
  for (double d : diffs) st.mean += d;
  st.mean /= double(diffs.size());
  double ss = 0;
  for (double d : diffs) ss += (d - st.mean) * (d - st.mean);
  st.se = std::sqrt(ss / double(diffs.size() - 1)) / std::sqrt(double(diffs.size()));
  return st;
}
}  // namespace

HypothesesReport test_hypotheses(const ResultTable& table, double payload_bits, double band) {
  std::set<std::uint64_t> seeds;
  for (const auto& r : table.rows) seeds.insert(r.seed);
  if (seeds.size() < 10)
    throw InsufficientSeeds("hypothesis testing needs >= 10 seeds, got " +
                            std::to_string(seeds.size()));

  const auto nc = aggregate(throughputs(table, StrategyKind::NoCoding, payload_bits));
  const auto so = aggregate(throughputs(table, StrategyKind::SourceOnly, payload_bits));
  const auto fc = aggregate(throughputs(table, StrategyKind::FullCache, payload_bits));
  const auto un = aggregate(throughputs(table, StrategyKind::Unrestricted, payload_bits));

  std::map<RunKey, std::map<StrategyKind, double>> by_run;
  for (const auto& r : table.rows)
    by_run[{topology_name(r.topology), r.seed, r.receiver}][r.strategy] =
        throughput_bps(r, payload_bits);

  HypothesesReport rep;
  rep.band = band;
  rep.mean_throughput_no_coding = nc.mean;
  rep.mean_throughput_source_only = so.mean;
  rep.mean_throughput_full_cache = fc.mean;
  rep.mean_throughput_unrestricted = un.mean;

  const auto fc_so = matched_diff(by_run, StrategyKind::FullCache, StrategyKind::SourceOnly);
  const auto so_nc = matched_diff(by_run, StrategyKind::SourceOnly, StrategyKind::NoCoding);
  rep.paired = fc_so.ok && so_nc.ok;
  if (rep.paired) {
    rep.h1_margin = fc_so.mean;
    rep.h1_se = fc_so.se;
    rep.so_nc_margin = so_nc.mean;
    rep.so_nc_se = so_nc.se;
  } else {  // unmatched rows: fall back to pooled standard errors
    rep.h1_margin = fc.mean - so.mean;
    rep.h1_se = std::sqrt(fc.stderr_mean * fc.stderr_mean + so.stderr_mean * so.stderr_mean);
    rep.so_nc_margin = so.mean - nc.mean;
    rep.so_nc_se = std::sqrt(so.stderr_mean * so.stderr_mean + nc.stderr_mean * nc.stderr_mean);
  }
  rep.h1_full_cache_beats_source_only = rep.h1_margin > rep.h1_se;
  const double top = std::max(fc.mean, un.mean);
  rep.h2_relative_gap = top > 0 ? std::abs(fc.mean - un.mean) / top : 0.0;
  rep.h2_full_cache_comparable_to_unrestricted = rep.h2_relative_gap <= band;

  std::ostringstream out;
  auto line = [&](const char* name, const Aggregate& a) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "  %-13s mean %12.1f bps  sd %12.1f  se %10.1f  n=%zu\n",
                  name, a.mean, a.stddev, a.stderr_mean, a.n);
    out << buf;
  };
  out << "throughput by strategy:\n";
  line("unrestricted", un);
  line("full_cache", fc);
  line("source_only", so);
  line("no_coding", nc);
  char buf[220];
  std::snprintf(buf, sizeof buf,
                "H1 full_cache > source_only: %s (%s margin %.1f bps, se %.1f)\n",
                rep.h1_full_cache_beats_source_only ? "yes" : "no",
                rep.paired ? "paired" : "pooled", rep.h1_margin, rep.h1_se);
  out << buf;
  std::snprintf(buf, sizeof buf,
                "H2 |full_cache - unrestricted| within %.0f%%: %s (gap %.1f%%)\n", band * 100,
                rep.h2_full_cache_comparable_to_unrestricted ? "yes" : "no",
                rep.h2_relative_gap * 100);
  out << buf;
  std::snprintf(buf, sizeof buf, "ordering: source_only - no_coding margin %.1f bps, se %.1f\n",
                rep.so_nc_margin, rep.so_nc_se);
  out << buf;
  rep.text = out.str();
  return rep;
}

namespace {
std::string filter_lines(const std::string& trace, auto&& keep) {
  std::istringstream in(trace);
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line))
    if (keep(line)) out << line << '\n';
  return out.str();
}

bool line_field_is(const std::string& line, std::size_t index, const std::string& want) {
  std::istringstream ls(line);
  std::string tok;
  for (std::size_t i = 0; i <= index; ++i)
    if (!(ls >> tok)) return false;
  return tok == want;
}
}  // namespace

std::string filter_trace(const std::string& trace, NodeId follow_node) {
  const std::string want = std::to_string(follow_node);
  return filter_lines(trace, [&](const std::string& line) {
    if (!line.empty() && line[0] == '#') return false;
    return line_field_is(line, 1, want);
  });
}

std::string mobility_lines(const std::string& trace) {
  return filter_lines(trace,
                      [&](const std::string& line) { return line_field_is(line, 2, "mob"); });
}

std::string data_tx_lines(const std::string& trace) {
  return filter_lines(trace, [&](const std::string& line) {
    return line_field_is(line, 2, "tx") && line.find("kind=data") != std::string::npos;
  });
}

}  // namespace cbnc::harness
