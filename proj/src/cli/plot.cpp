#include "beamctl/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace beamctl {
namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 400.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 36.0;
constexpr double kBottom = 50.0;

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  bool empty() const { return !(lo <= hi); }
  void pad() {
    if (empty()) {
      lo = 0.0;
      hi = 1.0;
    } else if (hi - lo < 1e-300) {
      const double d = std::max(std::abs(lo), 1.0) * 0.5;
      lo -= d;
      hi += d;
    }
  }
};

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string render_svg(const Plot& plot) {
  auto tx = [&](double v) { return plot.log_x ? std::log10(v) : v; };
  auto ty = [&](double v) { return plot.log_y ? std::log10(v) : v; };
  auto usable = [&](double x, double y) {
    return std::isfinite(x) && std::isfinite(y) && (!plot.log_x || x > 0.0) &&
           (!plot.log_y || y > 0.0);
  };

  Range rx, ry;
  for (const PlotSeries& s : plot.series) {
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!usable(s.x[i], s.y[i])) continue;
      rx.add(tx(s.x[i]));
      ry.add(ty(s.y[i]));
    }
  }
  rx.pad();
  ry.pad();
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double v) { return kLeft + (tx(v) - rx.lo) / (rx.hi - rx.lo) * pw; };
  auto py = [&](double v) { return kTop + (ry.hi - ty(v)) / (ry.hi - ry.lo) * ph; };
  auto label = [](double v, bool log) { return tick(log ? std::pow(10.0, v) : v); };

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 640 400\" "
         "width=\"640\" height=\"400\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out += "<rect x=\"0\" y=\"0\" width=\"640\" height=\"400\" fill=\"white\"/>\n";
  out += "<text x=\"320\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" +
         escape(plot.title) + "</text>\n";
  out += "<rect x=\"" + fixed(kLeft) + "\" y=\"" + fixed(kTop) + "\" width=\"" +
         fixed(pw) + "\" height=\"" + fixed(ph) +
         "\" fill=\"none\" stroke=\"black\"/>\n";

  // ticks at the ends and the middle of each axis
  for (int k = 0; k <= 2; ++k) {
    const double fx = rx.lo + 0.5 * k * (rx.hi - rx.lo);
    const double fy = ry.lo + 0.5 * k * (ry.hi - ry.lo);
    const double sx = kLeft + 0.5 * k * pw;
    const double sy = kTop + ph - 0.5 * k * ph;
    out += "<text x=\"" + fixed(sx) + "\" y=\"" + fixed(kTop + ph + 16) +
           "\" text-anchor=\"middle\">" + label(fx, plot.log_x) + "</text>\n";
    out += "<text x=\"" + fixed(kLeft - 6) + "\" y=\"" + fixed(sy + 4) +
           "\" text-anchor=\"end\">" + label(fy, plot.log_y) + "</text>\n";
  }
  out += "<text x=\"" + fixed(kLeft + pw / 2) + "\" y=\"" + fixed(kHeight - 10) +
         "\" text-anchor=\"middle\">" + escape(plot.x_label) + "</text>\n";
  out += "<text x=\"16\" y=\"" + fixed(kTop + ph / 2) +
         "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " + fixed(kTop + ph / 2) +
         ")\">" + escape(plot.y_label) + "</text>\n";

  double legend_y = kTop + 14;
  for (const PlotSeries& s : plot.series) {
    std::string points;
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!usable(s.x[i], s.y[i])) continue;
      if (!points.empty()) points += ' ';
      points += fixed(px(s.x[i])) + "," + fixed(py(s.y[i]));
    }
    out += "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"1.5\"";
    if (s.dashed) out += " stroke-dasharray=\"6 4\"";
    out += " points=\"" + points + "\"/>\n";
    if (!s.label.empty()) {
      const double lx = kLeft + pw - 150;
      out += "<line x1=\"" + fixed(lx) + "\" y1=\"" + fixed(legend_y - 4) + "\" x2=\"" +
             fixed(lx + 20) + "\" y2=\"" + fixed(legend_y - 4) + "\" stroke=\"" +
             s.color + "\"" + (s.dashed ? " stroke-dasharray=\"6 4\"" : "") + "/>\n";
      out += "<text x=\"" + fixed(lx + 26) + "\" y=\"" + fixed(legend_y) + "\">" +
             escape(s.label) + "</text>\n";
      legend_y += 16;
    }
  }
  out += "</svg>\n";
  return out;
}

}  // namespace beamctl
