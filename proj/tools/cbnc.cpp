// Command line front end: run experiments or single scenarios, evaluate the
// strategy hypotheses on a results CSV, and filter event traces.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "cbnc/engine.hpp"
#include "cbnc/harness.hpp"

using namespace cbnc;

namespace {

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  // "a..b" or comma separated list
  std::vector<std::uint64_t> seeds;
  const auto dots = text.find("..");
  if (dots != std::string::npos) {
    const std::uint64_t lo = std::stoull(text.substr(0, dots));
    const std::uint64_t hi = std::stoull(text.substr(dots + 2));
    if (hi < lo) throw ConfigInvalid("--seeds: range end before start");
    for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
    return seeds;
  }
  std::istringstream in(text);
  std::string tok;
  while (std::getline(in, tok, ',')) seeds.push_back(std::stoull(tok));
  return seeds;
}

std::vector<StrategyKind> parse_strategies(const std::string& text) {
  std::vector<StrategyKind> out;
  std::istringstream in(text);
  std::string tok;
  while (std::getline(in, tok, ',')) out.push_back(parse_strategy(tok));
  return out;
}

void apply_attack(ScenarioConfig& cfg, const std::string& text) {
  // node,mode,rate
  std::istringstream in(text);
  std::string node, mode, rate;
  if (!std::getline(in, node, ',') || !std::getline(in, mode, ',') || !std::getline(in, rate))
    throw ConfigInvalid("--attacker: expected node,mode,rate");
  integrity::AttackConfig attack;
  attack.attacker = std::stoi(node);
  if (mode == "coeff") attack.mode = integrity::AttackMode::CorruptCoefficients;
  else if (mode == "payload") attack.mode = integrity::AttackMode::CorruptPayload;
  else throw ConfigInvalid("--attacker: mode must be coeff|payload");
  attack.rate = std::stod(rate);
  cfg.attack = attack;
}

void apply_jam(ScenarioConfig& cfg, const std::string& text) {
  std::istringstream in(text);
  std::string start, end, loss;
  if (!std::getline(in, start, ',') || !std::getline(in, end, ',') || !std::getline(in, loss))
    throw ConfigInvalid("--jam: expected start,end,loss");
  cfg.jam_start_s = std::stod(start);
  cfg.jam_end_s = std::stod(end);
  cfg.jam_loss = std::stod(loss);
}

int cmd_run(const std::string& preset, const std::string& config_path,
            const std::string& seeds, const std::string& strategies, const std::string& out_dir,
            const std::string& attacker, const std::string& jam, bool traces) {
  if (preset.empty() == config_path.empty())
    throw ConfigInvalid("run: give exactly one of --preset or --config");

  if (!preset.empty()) {
    harness::ExperimentSpec spec = harness::preset_by_name(preset);
    if (!seeds.empty()) spec.seeds = parse_seeds(seeds);
    if (!strategies.empty()) spec.strategies = parse_strategies(strategies);
    if (!out_dir.empty()) spec.out_dir = out_dir;
    if (!attacker.empty()) apply_attack(spec.base, attacker);
    if (!jam.empty()) apply_jam(spec.base, jam);
    spec.write_traces = traces;
    auto table = harness::run_experiment(spec);
    std::printf("%zu rows", table.rows.size());
    if (!spec.out_dir.empty()) std::printf(", written to %s/results.csv", spec.out_dir.c_str());
    std::printf("\n");
    if (!table.rows.empty() && spec.strategies.size() == 4) {
      auto report = harness::test_hypotheses(table, harness::scenario_payload_bits(spec.base));
      std::fputs(report.text.c_str(), stdout);
    }
    return 0;
  }

  ScenarioConfig cfg = ScenarioConfig::load_file(config_path);
  if (!attacker.empty()) apply_attack(cfg, attacker);
  if (!jam.empty()) apply_jam(cfg, jam);
  std::vector<std::uint64_t> run_seeds =
      seeds.empty() ? std::vector<std::uint64_t>{cfg.seed} : parse_seeds(seeds);
  std::vector<StrategyKind> run_strategies =
      strategies.empty() ? std::vector<StrategyKind>{cfg.strategy}
                         : parse_strategies(strategies);

  std::vector<MetricRecord> rows;
  for (StrategyKind strategy : run_strategies) {
    cfg.strategy = strategy;
    for (std::uint64_t s : run_seeds) {
      cfg.seed = s;
      cfg.collect_trace = traces || !out_dir.empty();
      auto result = sim::run(cfg);
      for (const auto& r : result.metrics) rows.push_back(r);
      if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        if (cfg.collect_trace) {
          std::ofstream trace(out_dir + "/trace_" + strategy_name(strategy) + "_" +
                              std::to_string(s) + ".txt");
          trace << result.trace;
        }
      }
      std::printf("%s seed %llu: %s after %.3f s simulated, %zu data tx\n",
                  strategy_name(strategy).c_str(), static_cast<unsigned long long>(s),
                  result.completed ? "delivered" : "incomplete",
                  sim_to_seconds(result.ended_at), result.counters.data_tx);
    }
  }
  if (!out_dir.empty()) {
    std::ofstream csv(out_dir + "/results.csv");
    csv << to_csv(rows);
  } else {
    std::fputs((to_csv(rows)).c_str(), stdout);
  }
  return 0;
}

int cmd_hypotheses(const std::string& in_path, double band, double payload_bits) {
  std::ifstream in(in_path);
  if (!in) throw ConfigInvalid("cannot open '" + in_path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  harness::ResultTable table{parse_csv(buf.str())};
  auto report = harness::test_hypotheses(table, payload_bits, band);
  std::fputs(report.text.c_str(), stdout);
  return report.h1_full_cache_beats_source_only &&
                 report.h2_full_cache_comparable_to_unrestricted
             ? 0
             : 1;
}

int cmd_trace(const std::string& in_path, NodeId follow) {
  std::ifstream in(in_path);
  if (!in) throw ConfigInvalid("cannot open '" + in_path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  std::fputs(harness::filter_trace(buf.str(), follow).c_str(), stdout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"content-based MANET network coding simulator"};
  app.require_subcommand(1);

  std::string preset, config_path, seeds, strategies, out_dir, attacker, jam;
  bool traces = false;
  auto* run = app.add_subcommand("run", "run a preset experiment or a scenario file");
  run->add_option("--preset", preset, "corridor30|mobile10");
  run->add_option("--config", config_path, "scenario file (flat key value text)");
  run->add_option("--seeds", seeds, "a..b or comma list");
  run->add_option("--strategy", strategies, "comma list of strategies to sweep");
  run->add_option("--out", out_dir, "output directory for results.csv and traces");
  run->add_option("--attacker", attacker, "node,mode,rate (mode: coeff|payload)");
  run->add_option("--jam", jam, "start,end,loss");
  run->add_flag("--traces", traces, "write per-run event traces");

  std::string hyp_in;
  double band = 0.15, payload_bits = 16 * 1024 * 8;
  auto* hyp = app.add_subcommand("hypotheses", "evaluate H1/H2 on a results csv");
  hyp->add_option("--in", hyp_in, "results.csv path")->required();
  hyp->add_option("--band", band, "comparability band (default 0.15)");
  hyp->add_option("--bits", payload_bits, "payload bits per receiver (scales throughput)");

  std::string trace_in;
  NodeId follow = 0;
  auto* trc = app.add_subcommand("trace", "filter a trace by node");
  trc->add_option("--in", trace_in, "trace file")->required();
  trc->add_option("--follow-node", follow, "node id to follow")->required();

  CLI11_PARSE(app, argc, argv);
  try {
    if (run->parsed())
      return cmd_run(preset, config_path, seeds, strategies, out_dir, attacker, jam, traces);
    if (hyp->parsed()) return cmd_hypotheses(hyp_in, band, payload_bits);
    if (trc->parsed()) return cmd_trace(trace_in, follow);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
