#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "wmpg/agent.hpp"

namespace wmpg {

inline constexpr std::string_view kRunCsvHeader =
    "episode,return,policy_loss,value_loss,transition_loss,reward_loss,mean_k,entropy";
inline constexpr std::string_view kAggregateCsvHeader =
    "episode,mean,sd,lower,upper,mean_trailing20,n_seeds";

/// Per-seed learning curve, one row per episode (1-based), LF line endings.
std::string format_run_csv(const std::vector<EpisodeMetrics>& episodes);

/// Numeric table parsed from CSV text; errors carry the offending line number.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::size_t column(std::string_view name) const;
  std::vector<double> column_values(std::string_view name) const;
};

CsvTable parse_csv(std::string_view text);
CsvTable read_csv(const std::string& path);

struct AggregateRow {
  std::size_t episode = 0;
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation across seeds (0 for a single seed)
  double lower = 0.0;  // mean - 2 sd
  double upper = 0.0;  // mean + 2 sd
  double mean_trailing20 = 0.0;
  std::size_t seeds = 0;
};

/// Aggregates per-seed return curves of equal length.
std::vector<AggregateRow> aggregate_returns(const std::vector<std::vector<double>>& per_seed_returns);
std::string format_aggregate_csv(const std::vector<AggregateRow>& rows);

/// Mean of the last min(window, i+1) values at each position i.
std::vector<double> trailing_mean(const std::vector<double>& values, std::size_t window = 20);

/// First 1-based episode at which the full trailing-`window` mean reaches `threshold`, or 0 if never.
std::size_t episodes_to_threshold(const std::vector<double>& returns, double threshold, std::size_t window = 20);

std::string format_number(double value);

}  // namespace wmpg
