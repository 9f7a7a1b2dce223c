#pragma once

// Minimal native SVG line plots: fixed 640x400 viewBox, polylines, axis
// ticks at the data range ends. Output depends only on the data.

#include <string>
#include <vector>

namespace beamctl {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
  bool dashed = false;
};

struct Plot {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  std::vector<PlotSeries> series;
};

std::string render_svg(const Plot& plot);

/// %.17g, the round-trip format used for every CSV number.
std::string format_number(double v);

}  // namespace beamctl
