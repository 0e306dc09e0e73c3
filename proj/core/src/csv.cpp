#include "wmpg/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "wmpg/errors.hpp"

namespace wmpg {

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

std::string format_run_csv(const std::vector<EpisodeMetrics>& episodes) {
  std::string out(kRunCsvHeader);
  out += '\n';
  for (std::size_t i = 0; i < episodes.size(); ++i) {
    const auto& e = episodes[i];
    out += std::to_string(i + 1);
    for (double v : {e.episode_return, e.policy_loss, e.value_loss, e.transition_loss, e.reward_loss, e.mean_k,
                     e.entropy}) {
      out += ',';
      out += format_number(v);
    }
    out += '\n';
  }
  return out;
}

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw ConfigError("CSV has no column '" + std::string(name) + "'");
}

std::vector<double> CsvTable::column_values(std::string_view name) const {
  const auto c = column(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[c]);
  return out;
}

namespace {

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(line.substr(start, comma == std::string_view::npos ? line.size() - start : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

double parse_cell(std::string_view cell, std::size_t line_no) {
  if (cell == "nan") return std::nan("");
  if (cell == "inf") return INFINITY;
  if (cell == "-inf") return -INFINITY;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size())
    throw ConfigError("CSV line " + std::to_string(line_no) + ": '" + std::string(cell) + "' is not a number");
  return v;
}

}  // namespace

CsvTable parse_csv(std::string_view text) {
  CsvTable table;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    const auto cells = split(line);
    if (table.header.empty()) {
      for (auto c : cells) table.header.emplace_back(c);
      continue;
    }
    if (cells.size() != table.header.size())
      throw ConfigError("CSV line " + std::to_string(line_no) + ": expected " + std::to_string(table.header.size()) +
                        " fields, found " + std::to_string(cells.size()));
    std::vector<double> row;
    row.reserve(cells.size());
    for (auto c : cells) row.push_back(parse_cell(c, line_no));
    table.rows.push_back(std::move(row));
  }
  if (table.header.empty()) throw ConfigError("CSV line 1: missing header row");
  return table;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str());
}

std::vector<double> trailing_mean(const std::vector<double>& values, std::size_t window) {
  std::vector<double> out(values.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    sum += values[i];
    if (i >= window) sum -= values[i - window];
    const std::size_t n = std::min(window, i + 1);
    out[i] = sum / static_cast<double>(n);
  }
  return out;
}

std::size_t episodes_to_threshold(const std::vector<double>& returns, double threshold, std::size_t window) {
  double sum = 0.0;
  for (std::size_t i = 0; i < returns.size(); ++i) {
    sum += returns[i];
    if (i >= window) sum -= returns[i - window];
    if (i + 1 >= window && sum / static_cast<double>(window) >= threshold) return i + 1;
  }
  return 0;
}

std::vector<AggregateRow> aggregate_returns(const std::vector<std::vector<double>>& per_seed) {
  std::vector<AggregateRow> rows;
  if (per_seed.empty()) return rows;
  const std::size_t n_episodes = per_seed.front().size();
  for (const auto& r : per_seed)
    if (r.size() != n_episodes) throw ConfigError("per-seed curves differ in length");
  std::vector<std::vector<double>> smoothed;
  for (const auto& r : per_seed) smoothed.push_back(trailing_mean(r));
  const double n = static_cast<double>(per_seed.size());
  for (std::size_t e = 0; e < n_episodes; ++e) {
    AggregateRow row;
    row.episode = e + 1;
    row.seeds = per_seed.size();
    double sum = 0.0, smooth_sum = 0.0;
    for (std::size_t s = 0; s < per_seed.size(); ++s) {
      sum += per_seed[s][e];
      smooth_sum += smoothed[s][e];
    }
    row.mean = sum / n;
    row.mean_trailing20 = smooth_sum / n;
    double ss = 0.0;
    for (const auto& r : per_seed) ss += (r[e] - row.mean) * (r[e] - row.mean);
    row.sd = per_seed.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    row.lower = row.mean - 2.0 * row.sd;
    row.upper = row.mean + 2.0 * row.sd;
    rows.push_back(row);
  }
  return rows;
}

std::string format_aggregate_csv(const std::vector<AggregateRow>& rows) {
  std::string out(kAggregateCsvHeader);
  out += '\n';
  for (const auto& r : rows) {
    out += std::to_string(r.episode);
    for (double v : {r.mean, r.sd, r.lower, r.upper, r.mean_trailing20}) {
      out += ',';
      out += format_number(v);
    }
    out += ',' + std::to_string(r.seeds) + '\n';
  }
  return out;
}

}  // namespace wmpg
