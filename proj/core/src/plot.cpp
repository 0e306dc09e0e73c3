#include "wmpg/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "wmpg/errors.hpp"

namespace wmpg {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 400.0;
constexpr double kLeft = 60.0;
constexpr double kRight = 20.0;
constexpr double kTop = 30.0;
constexpr double kBottom = 45.0;
constexpr const char* kPalette[] = {"#1f77b4", "#2ca02c", "#d62728", "#9467bd", "#ff7f0e", "#8c564b",
                                    "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

// Rounds the span to a 1/2/5 x 10^n step.
double nice_step(double span, int target_ticks) {
  if (!(span > 0.0)) return 1.0;
  const double raw = span / target_ticks;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double norm = raw / mag;
  const double step = norm < 1.5 ? 1.0 : norm < 3.5 ? 2.0 : norm < 7.5 ? 5.0 : 10.0;
  return step * mag;
}

}  // namespace

PlotSeries series_from_aggregate(const CsvTable& table, std::string label) {
  PlotSeries s;
  s.label = std::move(label);
  s.x = table.column_values("episode");
  s.mean = table.column_values("mean");
  s.lower = table.column_values("lower");
  s.upper = table.column_values("upper");
  if (s.x.empty()) throw ConfigError("aggregate CSV has no data rows");
  return s;
}

std::string render_svg(const std::vector<PlotSeries>& series, const std::string& title) {
  if (series.empty()) throw ConfigError("nothing to plot");
  double x_min = std::numeric_limits<double>::infinity(), x_max = -x_min;
  double y_min = x_min, y_max = -x_min;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      x_min = std::min(x_min, s.x[i]);
      x_max = std::max(x_max, s.x[i]);
      for (double v : {s.mean[i], s.lower[i], s.upper[i]}) {
        if (!std::isfinite(v)) continue;
        y_min = std::min(y_min, v);
        y_max = std::max(y_max, v);
      }
    }
  }
  if (!std::isfinite(y_min)) y_min = 0.0, y_max = 1.0;
  if (x_max == x_min) x_min -= 1.0, x_max += 1.0;
  if (y_max == y_min) y_min -= 1.0, y_max += 1.0;
  const double y_step = nice_step(y_max - y_min, 5);
  y_min = std::floor(y_min / y_step) * y_step;
  y_max = std::ceil(y_max / y_step) * y_step;
  const double x_step = nice_step(x_max - x_min, 5);

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  const auto px = [&](double x) { return kLeft + (x - x_min) / (x_max - x_min) * plot_w; };
  const auto py = [&](double y) { return kTop + (1.0 - (y - y_min) / (y_max - y_min)) * plot_h; };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) +
         "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!title.empty())
    svg += "<text x=\"" + num(kWidth / 2) + "\" y=\"18\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"14\">" + escape(title) + "</text>\n";

  // Axes and ticks.
  svg += "<g stroke=\"#444\" stroke-width=\"1\" fill=\"none\">\n";
  svg += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(kTop + plot_h) + "\" x2=\"" + num(kLeft + plot_w) + "\" y2=\"" +
         num(kTop + plot_h) + "\"/>\n";
  svg += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(kTop) + "\" x2=\"" + num(kLeft) + "\" y2=\"" +
         num(kTop + plot_h) + "\"/>\n";
  svg += "</g>\n<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#444\">\n";
  for (double y = y_min; y <= y_max + 1e-9 * y_step; y += y_step) {
    svg += "<text x=\"" + num(kLeft - 6) + "\" y=\"" + num(py(y) + 4) + "\" text-anchor=\"end\">" + num(y) +
           "</text>\n";
  }
  const double first_x = std::ceil(x_min / x_step) * x_step;
  for (double x = first_x; x <= x_max + 1e-9 * x_step; x += x_step) {
    svg += "<text x=\"" + num(px(x)) + "\" y=\"" + num(kTop + plot_h + 16) + "\" text-anchor=\"middle\">" + num(x) +
           "</text>\n";
  }
  svg += "<text x=\"" + num(kLeft + plot_w / 2) + "\" y=\"" + num(kHeight - 8) +
         "\" text-anchor=\"middle\">episode</text>\n";
  svg += "</g>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto& ser = series[s];
    const std::string color = kPalette[s % std::size(kPalette)];
    if (ser.x.size() == 1) {
      svg += "<circle cx=\"" + num(px(ser.x[0])) + "\" cy=\"" + num(py(ser.mean[0])) + "\" r=\"3\" fill=\"" + color +
             "\"/>\n";
    } else {
      std::string band;
      for (std::size_t i = 0; i < ser.x.size(); ++i) band += num(px(ser.x[i])) + "," + num(py(ser.upper[i])) + " ";
      for (std::size_t i = ser.x.size(); i-- > 0;)
        band += num(px(ser.x[i])) + "," + num(py(ser.lower[i])) + (i ? " " : "");
      svg += "<polygon points=\"" + band + "\" fill=\"" + color + "\" fill-opacity=\"0.2\" stroke=\"none\"/>\n";
      std::string line;
      for (std::size_t i = 0; i < ser.x.size(); ++i)
        line += num(px(ser.x[i])) + "," + num(py(ser.mean[i])) + (i + 1 < ser.x.size() ? " " : "");
      svg += "<polyline points=\"" + line + "\" fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.5\"/>\n";
    }
    if (series.size() > 1 || !ser.label.empty()) {
      const double ly = kTop + 14.0 * static_cast<double>(s) + 6.0;
      svg += "<text x=\"" + num(kLeft + plot_w - 4) + "\" y=\"" + num(ly + 4) +
             "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\" fill=\"" + color + "\">" +
             escape(ser.label) + "</text>\n";
    }
  }
  svg += "</svg>\n";
  return svg;
}

void emit_plot(const std::string& aggregate_csv_path, const std::string& output_path) {
  const auto table = read_csv(aggregate_csv_path);
  const auto svg = render_svg({series_from_aggregate(table)});
  std::ofstream out(output_path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + output_path);
  out << svg;
}

}  // namespace wmpg
