// Bare SVG 1.1 plots: framed axes, tick labels, polylines or a cell heatmap.
#pragma once

#include <string>
#include <vector>

namespace freqent::cli {

struct PlotLabels {
  std::string title;
  std::string x_label;
  std::string y_label;
};

// NaN y values break the polyline.
struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

std::string svg_line_plot(const std::vector<Series>& series, const PlotLabels& labels);

// values[i * y.size() + j] is drawn at (x[i], y[j]).
std::string svg_heatmap(const std::vector<double>& x, const std::vector<double>& y,
                        const std::vector<double>& values, const PlotLabels& labels);

}  // namespace freqent::cli
