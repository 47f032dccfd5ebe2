// SPDX-License-Identifier: Apache-2.0
#include "fpinn/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "fpinn/error.hpp"

namespace fpinn {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string fixed(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  std::string s = buf;
  return s == "-0.00" || s == "-0.0" || s == "-0" ? s.substr(1) : s;
}

std::string tick_label(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", std::abs(v) < 1e-12 ? 0.0 : v);
  return buf;
}

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

/// Step of 1, 2 or 5 × 10^k giving roughly `target` intervals.
double nice_step(double span, int target) {
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double f = raw / mag;
  return (f < 1.5 ? 1.0 : f < 3.5 ? 2.0 : f < 7.5 ? 5.0 : 10.0) * mag;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void finish() {
    if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
    if (hi - lo < 1e-12) {
      const double pad = std::max(1e-3, std::abs(lo) * 0.05);
      lo -= pad;
      hi += pad;
    }
  }
};

}  // namespace

std::string render_svg(const std::vector<PlotSeries>& series, const PlotOptions& o) {
  if (series.empty()) throw ValidationError("render_svg: no series to plot");
  Range xr, yr;
  for (const auto& s : series) {
    if (s.x.size() != s.y.size()) throw ValidationError("render_svg: series '" + s.label + "' has x/y size mismatch");
    for (double v : s.x) xr.add(v);
    for (double v : s.y) yr.add(v);
  }
  xr.finish();
  yr.finish();
  const double ypad = 0.05 * (yr.hi - yr.lo);
  yr.lo -= ypad;
  yr.hi += ypad;

  const double left = 70, right = 20, top = o.title.empty() ? 20 : 40, bottom = 50;
  const double pw = o.width - left - right;
  const double ph = o.height - top - bottom;
  const auto sx = [&](double x) { return left + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
  const auto sy = [&](double y) { return top + (yr.hi - y) / (yr.hi - yr.lo) * ph; };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(o.width) + "\" height=\"" +
         std::to_string(o.height) + "\" viewBox=\"0 0 " + std::to_string(o.width) + " " +
         std::to_string(o.height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!o.title.empty()) {
    svg += "<text x=\"" + fixed(o.width / 2.0) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" +
           escape(o.title) + "</text>\n";
  }

  // Axes and ticks.
  svg += "<g stroke=\"#333\" stroke-width=\"1\" fill=\"none\">\n";
  svg += "<line x1=\"" + fixed(left) + "\" y1=\"" + fixed(top + ph) + "\" x2=\"" + fixed(left + pw) + "\" y2=\"" +
         fixed(top + ph) + "\"/>\n";
  svg += "<line x1=\"" + fixed(left) + "\" y1=\"" + fixed(top) + "\" x2=\"" + fixed(left) + "\" y2=\"" +
         fixed(top + ph) + "\"/>\n";
  svg += "</g>\n<g fill=\"#333\">\n";
  const double xs = nice_step(xr.hi - xr.lo, 6);
  for (double v = std::ceil(xr.lo / xs) * xs; v <= xr.hi + 1e-9 * xs; v += xs) {
    const std::string x = fixed(sx(v));
    svg += "<line x1=\"" + x + "\" y1=\"" + fixed(top + ph) + "\" x2=\"" + x + "\" y2=\"" + fixed(top + ph + 5) +
           "\" stroke=\"#333\"/>\n";
    svg += "<text x=\"" + x + "\" y=\"" + fixed(top + ph + 18) + "\" text-anchor=\"middle\">" + tick_label(v) +
           "</text>\n";
  }
  const double ys = nice_step(yr.hi - yr.lo, 5);
  for (double v = std::ceil(yr.lo / ys) * ys; v <= yr.hi + 1e-9 * ys; v += ys) {
    const std::string y = fixed(sy(v));
    svg += "<line x1=\"" + fixed(left - 5) + "\" y1=\"" + y + "\" x2=\"" + fixed(left) + "\" y2=\"" + y +
           "\" stroke=\"#333\"/>\n";
    svg += "<text x=\"" + fixed(left - 8) + "\" y=\"" + y + "\" text-anchor=\"end\" dominant-baseline=\"middle\">" +
           tick_label(v) + "</text>\n";
  }
  svg += "<text x=\"" + fixed(left + pw / 2) + "\" y=\"" + fixed(o.height - 10.0) + "\" text-anchor=\"middle\">" +
         escape(o.x_label) + "</text>\n";
  if (!o.y_label.empty()) {
    svg += "<text transform=\"translate(16," + fixed(top + ph / 2) +
           ") rotate(-90)\" text-anchor=\"middle\">" + escape(o.y_label) + "</text>\n";
  }
  svg += "</g>\n";

  // One polyline per series; non-finite samples break the line.
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kPalette[k % std::size(kPalette)];
    std::string points;
    const auto flush = [&] {
      if (points.empty()) return;
      svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"1.5\" points=\"" +
             points + "\"/>\n";
      points.clear();
    };
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
        flush();
        continue;
      }
      points += (points.empty() ? "" : " ") + fixed(sx(s.x[i])) + "," + fixed(sy(s.y[i]));
    }
    flush();
  }

  // Legend, top right.
  const double lx = left + pw - 160;
  for (std::size_t k = 0; k < series.size(); ++k) {
    const double ly = top + 12 + 16.0 * static_cast<double>(k);
    const char* color = kPalette[k % std::size(kPalette)];
    svg += "<line x1=\"" + fixed(lx) + "\" y1=\"" + fixed(ly) + "\" x2=\"" + fixed(lx + 20) + "\" y2=\"" + fixed(ly) +
           "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + fixed(lx + 26) + "\" y=\"" + fixed(ly) + "\" dominant-baseline=\"middle\">" +
           escape(series[k].label) + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace fpinn
