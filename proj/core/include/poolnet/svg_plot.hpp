#pragma once

#include <string>
#include <vector>

#include "poolnet/sweep.hpp"

namespace poolnet {

enum class PlotAxis { SampleSize, PatchCount };
enum class PlotMetric { TestError, TrainError };

struct PlotSpec {
  std::string title = "test error";
  PlotAxis x_axis = PlotAxis::SampleSize;
  PlotMetric metric = PlotMetric::TestError;
  bool log_x = true;
  int width = 640;
  int height = 420;
};

/// Self-contained SVG line chart: one series per model (split further by the
/// axis that is not plotted when it takes several values), mean line with a
/// shaded band of one standard deviation. Every point carries a <title> with
/// its exact value. Throws ParameterError when there is nothing to plot.
std::string render_svg(const std::vector<SweepAggregate>& cells, const PlotSpec& spec);

}  // namespace poolnet
