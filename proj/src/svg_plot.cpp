// Copyright 2026 The ibvs_lander Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ibvs/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <fmt/format.h>

#include "ibvs/errors.hpp"

namespace ibvs {
namespace {

constexpr double kWidth = 840.0;
constexpr double kHeight = 520.0;
constexpr double kLeft = 70.0, kRight = 20.0, kTop = 40.0, kBottom = 50.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
constexpr int kPaletteSize = 8;

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void include(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void pad() {
    if (lo > hi) {
      lo = 0.0;
      hi = 1.0;
    }
    if (hi - lo < 1e-12) {
      lo -= 0.5;
      hi += 0.5;
    } else {
      const double m = 0.05 * (hi - lo);
      lo -= m;
      hi += m;
    }
  }
};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_svg_plot(const std::string& title,
                            const std::string& x_label,
                            const std::string& y_label,
                            const std::vector<PlotSeries>& series) {
  Range rx, ry;
  for (const PlotSeries& s : series) {
    for (double v : s.x) rx.include(v);
    for (double v : s.y) ry.include(v);
  }
  rx.pad();
  ry.pad();

  const double px0 = kLeft, px1 = kWidth - kRight;
  const double py0 = kHeight - kBottom, py1 = kTop;
  const auto map_x = [&](double v) {
    return px0 + (v - rx.lo) / (rx.hi - rx.lo) * (px1 - px0);
  };
  const auto map_y = [&](double v) {
    return py0 + (v - ry.lo) / (ry.hi - ry.lo) * (py1 - py0);
  };

  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" "
      "height=\"{:.0f}\" viewBox=\"0 0 {:.0f} {:.0f}\">\n",
      kWidth, kHeight, kWidth, kHeight);
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += fmt::format(
      "<text x=\"{:.1f}\" y=\"24\" font-family=\"sans-serif\" "
      "font-size=\"16\" text-anchor=\"middle\">{}</text>\n",
      0.5 * kWidth, escape(title));

  // Axis frame and 5 gridlines per axis with tick labels.
  svg += fmt::format(
      "<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"{:.1f}\" height=\"{:.1f}\" "
      "fill=\"none\" stroke=\"black\"/>\n",
      px0, py1, px1 - px0, py0 - py1);
  for (int i = 0; i <= 5; ++i) {
    const double fx = rx.lo + (rx.hi - rx.lo) * i / 5.0;
    const double fy = ry.lo + (ry.hi - ry.lo) * i / 5.0;
    const double gx = map_x(fx);
    const double gy = map_y(fy);
    if (i > 0 && i < 5) {
      svg += fmt::format(
          "<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" "
          "stroke=\"#dddddd\"/>\n",
          gx, py0, gx, py1);
      svg += fmt::format(
          "<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" "
          "stroke=\"#dddddd\"/>\n",
          px0, gy, px1, gy);
    }
    svg += fmt::format(
        "<text x=\"{:.1f}\" y=\"{:.1f}\" font-family=\"sans-serif\" "
        "font-size=\"11\" text-anchor=\"middle\">{:.4g}</text>\n",
        gx, py0 + 16.0, fx);
    svg += fmt::format(
        "<text x=\"{:.1f}\" y=\"{:.1f}\" font-family=\"sans-serif\" "
        "font-size=\"11\" text-anchor=\"end\">{:.4g}</text>\n",
        px0 - 6.0, gy + 4.0, fy);
  }
  svg += fmt::format(
      "<text x=\"{:.1f}\" y=\"{:.1f}\" font-family=\"sans-serif\" "
      "font-size=\"13\" text-anchor=\"middle\">{}</text>\n",
      0.5 * (px0 + px1), kHeight - 12.0, escape(x_label));
  svg += fmt::format(
      "<text x=\"16\" y=\"{:.1f}\" font-family=\"sans-serif\" "
      "font-size=\"13\" text-anchor=\"middle\" "
      "transform=\"rotate(-90 16 {:.1f})\">{}</text>\n",
      0.5 * (py0 + py1), 0.5 * (py0 + py1), escape(y_label));

  for (std::size_t si = 0; si < series.size(); ++si) {
    const PlotSeries& s = series[si];
    if (s.x.size() != s.y.size()) {
      throw Error(fmt::format("plot series `{}` has mismatched lengths",
                              s.label));
    }
    const char* color = kPalette[si % kPaletteSize];
    std::string points;
    const std::size_t stride = std::max<std::size_t>(1, s.x.size() / 2000);
    for (std::size_t i = 0; i < s.x.size(); i += stride) {
      points += fmt::format("{:.2f},{:.2f} ", map_x(s.x[i]), map_y(s.y[i]));
    }
    if (!s.x.empty() && (s.x.size() - 1) % stride != 0) {
      points += fmt::format("{:.2f},{:.2f} ", map_x(s.x.back()),
                            map_y(s.y.back()));
    }
    svg += fmt::format(
        "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" "
        "points=\"{}\"/>\n",
        color, points);
    svg += fmt::format(
        "<text x=\"{:.1f}\" y=\"{:.1f}\" font-family=\"sans-serif\" "
        "font-size=\"12\" fill=\"{}\">{}</text>\n",
        px1 - 150.0, py1 + 16.0 + 16.0 * si, color, escape(s.label));
  }
  svg += "</svg>\n";
  return svg;
}

void write_svg_plot(const std::string& path, const std::string& title,
                    const std::string& x_label, const std::string& y_label,
                    const std::vector<PlotSeries>& series) {
  std::ofstream out(path);
  if (!out) throw Error(fmt::format("cannot write plot file `{}`", path));
  out << render_svg_plot(title, x_label, y_label, series);
}

}  // namespace ibvs
