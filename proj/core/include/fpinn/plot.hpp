// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

namespace fpinn {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotOptions {
  std::string title;
  std::string x_label = "t";
  std::string y_label;
  int width = 720;
  int height = 440;
};

/// Line plot with axes, ticks and a legend; byte-identical for equal input.
/// Throws ValidationError for an empty series list or mismatched x/y sizes.
std::string render_svg(const std::vector<PlotSeries>& series, const PlotOptions& options);

}  // namespace fpinn
