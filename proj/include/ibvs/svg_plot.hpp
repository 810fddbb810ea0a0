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

#ifndef IBVS_SVG_PLOT_HPP_
#define IBVS_SVG_PLOT_HPP_

#include <string>
#include <vector>

namespace ibvs {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Renders a fixed-size line chart. Output is a pure function of the
/// inputs (byte-stable across runs and platforms using the same libm
/// formatting), so plots can be diffed.
std::string render_svg_plot(const std::string& title,
                            const std::string& x_label,
                            const std::string& y_label,
                            const std::vector<PlotSeries>& series);

void write_svg_plot(const std::string& path, const std::string& title,
                    const std::string& x_label, const std::string& y_label,
                    const std::vector<PlotSeries>& series);

}  // namespace ibvs

#endif  // IBVS_SVG_PLOT_HPP_
