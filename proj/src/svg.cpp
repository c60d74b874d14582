#include "bikelab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace bikelab {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

PlotLayer layer(const std::vector<Vec>& points, const char* color, const char* label) {
  PlotLayer l;
  l.points = points;
  l.color = color;
  l.label = label;
  return l;
}

}  // namespace

std::string svg_document(const std::vector<PlotLayer>& layers, int width, int height) {
  double lo_x = std::numeric_limits<double>::infinity(), lo_y = lo_x;
  double hi_x = -lo_x, hi_y = -lo_x;
  for (const auto& l : layers) {
    for (const auto& p : l.points) {
      lo_x = std::min(lo_x, p.x());
      hi_x = std::max(hi_x, p.x());
      lo_y = std::min(lo_y, p.y());
      hi_y = std::max(hi_y, p.y());
    }
  }
  if (!std::isfinite(lo_x)) lo_x = lo_y = -1.0, hi_x = hi_y = 1.0;
  const double margin = 24.0;
  const double span = std::max({hi_x - lo_x, hi_y - lo_y, 1e-12});
  const double scale = std::min(width, height - 20) - 2.0 * margin;
  auto X = [&](const Vec& p) { return margin + (p.x() - lo_x) / span * scale; };
  auto Y = [&](const Vec& p) { return height - margin - (p.y() - lo_y) / span * scale; };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  int legend = 0;
  for (const auto& l : layers) {
    if (l.points.empty()) continue;
    out << "<path fill=\"none\" stroke=\"" << l.color << "\" stroke-width=\"1.5\"";
    if (l.dashed) out << " stroke-dasharray=\"6 4\"";
    out << " d=\"";
    for (std::size_t i = 0; i < l.points.size(); ++i)
      out << (i == 0 ? 'M' : 'L') << num(X(l.points[i])) << ',' << num(Y(l.points[i])) << ' ';
    if (l.closed) out << 'Z';
    out << "\"/>\n";
    for (const auto& m : l.markers)
      out << "<circle cx=\"" << num(X(m)) << "\" cy=\"" << num(Y(m)) << "\" r=\"4\" fill=\"none\" stroke=\"" << l.color
          << "\"/>\n";
    if (!l.label.empty()) {
      out << "<text x=\"" << margin + 130 * legend << "\" y=\"14\" font-family=\"sans-serif\" font-size=\"12\" fill=\""
          << l.color << "\">" << l.label << "</text>\n";
      ++legend;
    }
  }
  out << "</svg>\n";
  return out.str();
}

std::string plot_curve(const SampledCurve& c) {
  return svg_document({layer(c.points(), "#1f4e99", "curve")});
}

std::string plot_rear_track(const SampledCurve& front, const RearTrack& rear) {
  PlotLayer f = layer(front.points(), "#1f4e99", "front track");
  PlotLayer r = layer(rear.points, "#b03a2e", "rear track");
  for (const auto& c : rear.cusps) {
    const std::size_t i = c.after_sample, j = (i + 1) % rear.points.size();
    r.markers.push_back(0.5 * (rear.points[i] + rear.points[j]));
  }
  return svg_document({f, r});
}

std::string plot_partners(const SampledCurve& g1, const SampledCurve& g2) {
  PlotLayer a = layer(g1.points(), "#1f4e99", "G1");
  PlotLayer b = layer(g2.points(), "#2e8b57", "G2");
  b.dashed = true;
  return svg_document({a, b});
}

}  // namespace bikelab
