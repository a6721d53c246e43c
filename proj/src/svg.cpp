// Copyright 2026 The quadplan Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "quadplan/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace quadplan {
namespace {

constexpr double kWidth = 900.0;
constexpr double kSubplotHeight = 190.0;
constexpr double kMarginLeft = 70.0, kMarginRight = 20.0;
constexpr double kMarginTop = 48.0, kMarginBottom = 36.0;

std::string num(double v, const char* spec = "%.6g") {
  if (!std::isfinite(v)) return "0";
  char b[40];
  std::snprintf(b, sizeof b, spec, v);
  return b;
}

std::string escape(const std::string& s) {
  std::string out;
  for (const char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void absorb(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  // Non-degenerate plotting interval.
  void finalize() {
    if (lo > hi) {
      lo = 0.0;
      hi = 1.0;
    }
    if (hi - lo < 1e-12) {
      const double pad = std::max(1e-6, std::abs(hi) * 0.1);
      lo -= pad;
      hi += pad;
    }
  }
  double map(double v, double px_lo, double px_hi) const {
    return px_lo + (v - lo) / (hi - lo) * (px_hi - px_lo);
  }
};

void axis_ticks(std::ostringstream& os, const Range& r, bool horizontal, double fixed_px,
                double px_lo, double px_hi, int n_ticks) {
  for (int k = 0; k <= n_ticks; ++k) {
    const double v = r.lo + (r.hi - r.lo) * k / n_ticks;
    const double p = r.map(v, px_lo, px_hi);
    if (horizontal) {
      os << "<line x1='" << num(p) << "' y1='" << num(fixed_px) << "' x2='" << num(p) << "' y2='"
         << num(fixed_px + 4) << "' stroke='#666'/>\n";
      os << "<text x='" << num(p) << "' y='" << num(fixed_px + 16)
         << "' font-size='10' text-anchor='middle' fill='#444'>" << num(v, "%.3g") << "</text>\n";
    } else {
      os << "<line x1='" << num(fixed_px - 4) << "' y1='" << num(p) << "' x2='" << num(fixed_px)
         << "' y2='" << num(p) << "' stroke='#666'/>\n";
      os << "<text x='" << num(fixed_px - 7) << "' y='" << num(p + 3)
         << "' font-size='10' text-anchor='end' fill='#444'>" << num(v, "%.3g") << "</text>\n";
    }
  }
}

void polyline(std::ostringstream& os, const PlotSeries& s, const Range& xr, const Range& yr,
              double x_lo, double x_hi, double y_top, double y_bot) {
  os << "<polyline fill='none' stroke='" << s.color << "' stroke-width='1.4'";
  if (s.dashed) os << " stroke-dasharray='6 4'";
  os << " points='";
  const std::size_t n = std::min(s.t.size(), s.y.size());
  for (std::size_t k = 0; k < n; ++k) {
    // y axis points down in SVG.
    os << num(xr.map(s.t[k], x_lo, x_hi)) << ',' << num(yr.map(s.y[k], y_bot, y_top)) << ' ';
  }
  os << "'/>\n";
}

}  // namespace

std::string render_time_series(const std::string& title, const std::vector<Subplot>& subplots) {
  const double height = kMarginTop + kSubplotHeight * static_cast<double>(subplots.size()) + 10.0;
  std::ostringstream os;
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << num(kWidth) << "' height='"
     << num(height) << "' viewBox='0 0 " << num(kWidth) << ' ' << num(height) << "'>\n";
  os << "<rect width='100%' height='100%' fill='white'/>\n";
  os << "<text x='" << num(kWidth / 2) << "' y='24' font-size='16' text-anchor='middle'>"
     << escape(title) << "</text>\n";

  Range xr;
  for (const Subplot& sp : subplots)
    for (const PlotSeries& s : sp.series)
      for (const double t : s.t) xr.absorb(t);
  xr.finalize();

  for (std::size_t i = 0; i < subplots.size(); ++i) {
    const Subplot& sp = subplots[i];
    const double top = kMarginTop + kSubplotHeight * static_cast<double>(i);
    const double plot_top = top + 22.0;
    const double plot_bot = top + kSubplotHeight - kMarginBottom;
    const double x_lo = kMarginLeft, x_hi = kWidth - kMarginRight;

    Range yr;
    for (const PlotSeries& s : sp.series)
      for (const double y : s.y) yr.absorb(y);
    yr.finalize();

    os << "<text x='" << num(kMarginLeft) << "' y='" << num(top + 14) << "' font-size='12'>"
       << escape(sp.title) << "</text>\n";
    os << "<rect x='" << num(x_lo) << "' y='" << num(plot_top) << "' width='"
       << num(x_hi - x_lo) << "' height='" << num(plot_bot - plot_top)
       << "' fill='none' stroke='#999'/>\n";
    axis_ticks(os, xr, true, plot_bot, x_lo, x_hi, 6);
    axis_ticks(os, yr, false, x_lo, plot_bot, plot_top, 4);
    os << "<text x='14' y='" << num((plot_top + plot_bot) / 2)
       << "' font-size='10' fill='#444' transform='rotate(-90 14 "
       << num((plot_top + plot_bot) / 2) << ")' text-anchor='middle'>" << escape(sp.y_label)
       << "</text>\n";

    double legend_x = x_hi - 10.0;
    for (auto it = sp.series.rbegin(); it != sp.series.rend(); ++it) {
      const double w = 11.0 + 6.2 * static_cast<double>(it->label.size()) + 28.0;
      legend_x -= w;
      os << "<line x1='" << num(legend_x) << "' y1='" << num(top + 10) << "' x2='"
         << num(legend_x + 22) << "' y2='" << num(top + 10) << "' stroke='" << it->color
         << "' stroke-width='1.6'" << (it->dashed ? " stroke-dasharray='6 4'" : "") << "/>\n";
      os << "<text x='" << num(legend_x + 26) << "' y='" << num(top + 13)
         << "' font-size='10' fill='#333'>" << escape(it->label) << "</text>\n";
    }
    for (const PlotSeries& s : sp.series) polyline(os, s, xr, yr, x_lo, x_hi, plot_top, plot_bot);
  }
  os << "<text x='" << num(kWidth / 2) << "' y='" << num(height - 4)
     << "' font-size='11' text-anchor='middle' fill='#444'>time [s]</text>\n";
  os << "</svg>\n";
  return os.str();
}

std::string render_error_summary(const std::string& title, const std::string& y_label,
                                 const std::vector<ErrorBarGroup>& groups) {
  const double height = 320.0;
  const double plot_top = 50.0, plot_bot = height - 50.0;
  const double x_lo = kMarginLeft, x_hi = kWidth - kMarginRight;
  std::ostringstream os;
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << num(kWidth) << "' height='"
     << num(height) << "' viewBox='0 0 " << num(kWidth) << ' ' << num(height) << "'>\n";
  os << "<rect width='100%' height='100%' fill='white'/>\n";
  os << "<text x='" << num(kWidth / 2) << "' y='24' font-size='16' text-anchor='middle'>"
     << escape(title) << "</text>\n";

  Range yr;
  yr.absorb(0.0);
  for (const ErrorBarGroup& g : groups) {
    yr.absorb(g.mean);
    yr.absorb(g.max);
  }
  yr.finalize();

  os << "<rect x='" << num(x_lo) << "' y='" << num(plot_top) << "' width='" << num(x_hi - x_lo)
     << "' height='" << num(plot_bot - plot_top) << "' fill='none' stroke='#999'/>\n";
  axis_ticks(os, yr, false, x_lo, plot_bot, plot_top, 5);
  os << "<text x='14' y='" << num((plot_top + plot_bot) / 2)
     << "' font-size='10' fill='#444' transform='rotate(-90 14 "
     << num((plot_top + plot_bot) / 2) << ")' text-anchor='middle'>" << escape(y_label)
     << "</text>\n";

  const double n = std::max<std::size_t>(1, groups.size());
  const double slot = (x_hi - x_lo) / static_cast<double>(n);
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const ErrorBarGroup& g = groups[i];
    const double cx = x_lo + slot * (static_cast<double>(i) + 0.5);
    const double bw = std::min(60.0, slot * 0.5);
    const double y0 = yr.map(0.0, plot_bot, plot_top);
    const double ym = yr.map(g.mean, plot_bot, plot_top);
    const double yx = yr.map(g.max, plot_bot, plot_top);
    os << "<rect x='" << num(cx - bw / 2) << "' y='" << num(std::min(ym, y0)) << "' width='"
       << num(bw) << "' height='" << num(std::abs(y0 - ym))
       << "' fill='#4c78a8' fill-opacity='0.8'/>\n";
    os << "<line x1='" << num(cx) << "' y1='" << num(ym) << "' x2='" << num(cx) << "' y2='"
       << num(yx) << "' stroke='#333'/>\n";
    os << "<line x1='" << num(cx - bw / 4) << "' y1='" << num(yx) << "' x2='"
       << num(cx + bw / 4) << "' y2='" << num(yx) << "' stroke='#333'/>\n";
    os << "<text x='" << num(cx) << "' y='" << num(plot_bot + 16)
       << "' font-size='10' text-anchor='middle' fill='#333'>" << escape(g.label) << "</text>\n";
  }
  os << "<text x='" << num(kWidth / 2) << "' y='" << num(height - 8)
     << "' font-size='10' text-anchor='middle' fill='#444'>bar: mean, whisker: max</text>\n";
  os << "</svg>\n";
  return os.str();
}

std::string series_csv(const std::vector<Subplot>& subplots) {
  std::ostringstream os;
  os << "subplot,series,t,value\n";
  char b[40];
  for (const Subplot& sp : subplots)
    for (const PlotSeries& s : sp.series) {
      const std::size_t n = std::min(s.t.size(), s.y.size());
      for (std::size_t k = 0; k < n; ++k) {
        os << sp.title << ',' << s.label << ',';
        std::snprintf(b, sizeof b, "%.17g", s.t[k]);
        os << b << ',';
        std::snprintf(b, sizeof b, "%.17g", s.y[k]);
        os << b << '\n';
      }
    }
  return os.str();
}

std::string error_csv(const std::vector<ErrorBarGroup>& groups) {
  std::ostringstream os;
  os << "label,mean,max\n";
  char b[40];
  for (const ErrorBarGroup& g : groups) {
    os << g.label << ',';
    std::snprintf(b, sizeof b, "%.17g", g.mean);
    os << b << ',';
    std::snprintf(b, sizeof b, "%.17g", g.max);
    os << b << '\n';
  }
  return os.str();
}

}  // namespace quadplan
