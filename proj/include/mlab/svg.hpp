#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mlab/polyline.hpp"

namespace mlab {

struct plot_curve {
  polyline curve;
  std::string label;
  std::string color = "#000000";
  double width = 1.0;
  bool dashed = false;
};

struct plot_marker {
  planar_point at;
  std::string label;
  std::string color = "#cc0000";
};

struct scene_annotations {
  double epsilon = 0.0;
  double mbar = 0.0;
  std::optional<double> beta;   // marks beta^{1/2} on the x1 axis
  std::optional<double> rho;    // marks rho^{1/2} on the x1 axis
  double x_magnify = 1.0;       // anisotropic scaling of x1, declared in the legend
};

/// Standalone SVG with annotated axes; curves are drawn with the x1 axis
/// magnified (the curves span several orders of magnitude in aspect).
void plot_scene(const std::vector<plot_curve>& curves,
                const std::vector<plot_marker>& markers, const scene_annotations& ann,
                const std::string& path);

}  // namespace mlab
