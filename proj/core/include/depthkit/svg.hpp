#pragma once

#include <array>
#include <string>
#include <vector>

namespace depthkit::svg {

/// One polyline in a contour plot; closed series are drawn as polygons.
struct Series {
  std::string name;
  std::string color;  // any SVG color string
  std::vector<std::array<double, 2>> points;
  bool close = false;
};

/// Fixed-layout 800x600 plot with equal axis scales, origin cross hairs and
/// a legend.  Deterministic output for identical input.
void write_contour_plot(const std::string& path, const std::string& title,
                        const std::vector<Series>& series);

/// Fixed-layout 800x600 boxplots, one per group: quartile box, median line,
/// 1.5*IQR whiskers, outliers as circles.
void write_boxplot(const std::string& path, const std::string& title,
                   const std::vector<std::string>& groups,
                   const std::vector<std::vector<double>>& values);

}  // namespace depthkit::svg
