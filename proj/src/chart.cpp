#include "orbitsched/chart.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace orbitsched {

namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(4) << v;
  return os.str();
}

// Rounds the span up to 1, 2 or 5 times a power of ten.
double nice_step(double span, int ticks) {
  const double raw = span / ticks;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (m * mag >= raw) return m * mag;
  }
  return 10.0 * mag;
}

const char* kPalette[] = {"#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1", "#ff9da7"};

}  // namespace

void write_svg(std::ostream& os, const BarChart& chart) {
  const double left = 70.0;
  const double right = 20.0;
  const double top = 40.0;
  const double bottom = 110.0;
  const double plot_w = chart.width - left - right;
  const double plot_h = chart.height - top - bottom;

  double lo = 0.0;
  double hi = 0.0;
  for (const auto& b : chart.bars) {
    if (!std::isfinite(b.value)) continue;
    lo = std::min(lo, b.value);
    hi = std::max(hi, b.value);
  }
  if (hi == lo) hi = lo + 1.0;
  const double step = nice_step(hi - lo, 5);
  lo = std::floor(lo / step) * step;
  hi = std::ceil(hi / step) * step;
  const auto y_of = [&](double v) { return top + plot_h * (hi - v) / (hi - lo); };

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << chart.width << "\" height=\"" << chart.height
     << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << chart.width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(chart.title)
     << "</text>\n";
  os << "<text transform=\"translate(16," << top + plot_h / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
     << escape(chart.y_label) << "</text>\n";

  for (double v = lo; v <= hi + step * 1e-9; v += step) {
    const double y = y_of(v);
    os << "<line x1=\"" << left << "\" y1=\"" << y << "\" x2=\"" << left + plot_w << "\" y2=\"" << y
       << "\" stroke=\"#ddd\"/>\n";
    os << "<text x=\"" << left - 6 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">" << num(v) << "</text>\n";
  }
  os << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + plot_h
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << left << "\" y1=\"" << y_of(0.0) << "\" x2=\"" << left + plot_w << "\" y2=\"" << y_of(0.0)
     << "\" stroke=\"black\"/>\n";

  const std::size_t n = chart.bars.size();
  const double slot = n ? plot_w / static_cast<double>(n) : plot_w;
  const double bar_w = slot * 0.7;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& b = chart.bars[i];
    const double x = left + slot * static_cast<double>(i) + (slot - bar_w) / 2;
    const double cx = x + bar_w / 2;
    if (std::isfinite(b.value)) {
      const double y0 = y_of(std::max(0.0, b.value));
      const double y1 = y_of(std::min(0.0, b.value));
      os << "<rect x=\"" << x << "\" y=\"" << y0 << "\" width=\"" << bar_w << "\" height=\"" << y1 - y0
         << "\" fill=\"" << kPalette[i % std::size(kPalette)] << "\"/>\n";
      os << "<text x=\"" << cx << "\" y=\"" << (b.value >= 0 ? y0 - 4 : y1 + 12) << "\" text-anchor=\"middle\">"
         << num(b.value) << "</text>\n";
    }
    os << "<text transform=\"translate(" << cx << "," << top + plot_h + 14 << ") rotate(35)\">" << escape(b.label)
       << "</text>\n";
  }
  os << "</svg>\n";
}

}  // namespace orbitsched
