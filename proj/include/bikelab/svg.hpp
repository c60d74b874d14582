#pragma once

#include <string>
#include <vector>

#include "bikelab/curve.hpp"
#include "bikelab/smooth.hpp"

namespace bikelab {

// Plots project 3D data orthographically onto the xy plane.

struct PlotLayer {
  std::vector<Vec> points;
  std::string color = "#000000";
  std::string label;
  bool closed = true;
  bool dashed = false;
  std::vector<Vec> markers;  ///< drawn as small circles
};

std::string svg_document(const std::vector<PlotLayer>& layers, int width = 640, int height = 640);

std::string plot_curve(const SampledCurve& c);
/// Front track, rear track and cusp markers.
std::string plot_rear_track(const SampledCurve& front, const RearTrack& rear);
std::string plot_partners(const SampledCurve& g1, const SampledCurve& g2);

}  // namespace bikelab
