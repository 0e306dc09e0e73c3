#pragma once

#include <string>
#include <vector>

#include "wmpg/csv.hpp"

namespace wmpg {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> mean;
  std::vector<double> lower;
  std::vector<double> upper;
};

/// Reads the episode/mean/lower/upper columns of an aggregate CSV.
PlotSeries series_from_aggregate(const CsvTable& table, std::string label = "mean");

/// Mean curves with shaded lower/upper bands. Output depends only on the input.
std::string render_svg(const std::vector<PlotSeries>& series, const std::string& title = {});

/// Parses an aggregate CSV file and writes the SVG next to `output_path`.
void emit_plot(const std::string& aggregate_csv_path, const std::string& output_path);

}  // namespace wmpg
