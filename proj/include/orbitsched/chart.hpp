// Minimal standalone SVG bar charts.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace orbitsched {

struct Bar {
  std::string label;
  double value = 0.0;
};

struct BarChart {
  std::string title;
  std::string y_label;
  std::vector<Bar> bars;
  int width = 720;
  int height = 420;
};

/// Axes, one bar per entry (negative values hang below the zero line), value and category labels.
void write_svg(std::ostream& os, const BarChart& chart);

}  // namespace orbitsched
