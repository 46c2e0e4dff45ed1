#include "cbnc/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace cbnc {

std::string csv_header() {
  return "seed,strategy,topology,loss,receiver,decode_time_s,blocks_tx,innovative_ratio,"
         "bytes_tx,polluted,accused";
}

std::string to_csv_row(const MetricRecord& r) {
  char buf[320];
  std::snprintf(buf, sizeof buf, "%llu,%s,%s,%.6g,%d,%.6f,%zu,%.6f,%zu,%d,%d",
                static_cast<unsigned long long>(r.seed), strategy_name(r.strategy).c_str(),
                topology_name(r.topology).c_str(), r.loss, r.receiver, r.decode_time_s,
                r.blocks_tx, r.innovative_ratio, r.bytes_tx, r.polluted, r.accused);
  return buf;
}

std::string to_csv(std::span<const MetricRecord> rows) {
  std::string out = csv_header();
  out += '\n';
  for (const auto& r : rows) {
    out += to_csv_row(r);
    out += '\n';
  }
  return out;
}

std::vector<MetricRecord> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != csv_header())
    throw ConfigInvalid("csv: missing or unexpected header");
  std::vector<MetricRecord> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() != 11)
      throw ConfigInvalid("csv line " + std::to_string(lineno) + ": expected 11 columns");
    MetricRecord r;
    try {
      r.seed = std::stoull(cells[0]);
      r.strategy = parse_strategy(cells[1]);
      r.topology = parse_topology(cells[2]);
      r.loss = std::stod(cells[3]);
      r.receiver = std::stoi(cells[4]);
      r.decode_time_s = std::stod(cells[5]);
      r.blocks_tx = std::stoull(cells[6]);
      r.innovative_ratio = std::stod(cells[7]);
      r.bytes_tx = std::stoull(cells[8]);
      r.polluted = std::stoi(cells[9]);
      r.accused = std::stoi(cells[10]);
    } catch (const std::exception&) {
      throw ConfigInvalid("csv line " + std::to_string(lineno) + ": cannot parse");
    }
    rows.push_back(r);
  }
  return rows;
}

Aggregate aggregate(std::span<const double> values) {
  Aggregate a;
  a.n = values.size();
  if (values.empty()) return a;
  a.min = a.max = values[0];
  double sum = 0;
  for (double v : values) {
    sum += v;
    a.min = std::min(a.min, v);
    a.max = std::max(a.max, v);
  }
  a.mean = sum / double(a.n);
  double ss = 0;
  for (double v : values) ss += (v - a.mean) * (v - a.mean);
  a.stddev = a.n > 1 ? std::sqrt(ss / double(a.n - 1)) : 0.0;
  a.stderr_mean = a.n > 0 ? a.stddev / std::sqrt(double(a.n)) : 0.0;
  return a;
}

double throughput_bps(const MetricRecord& r, double payload_bits) {
  if (r.decode_time_s <= 0) return 0.0;
  return payload_bits / r.decode_time_s;
}

}  // namespace cbnc
