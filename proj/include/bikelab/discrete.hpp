#pragma once

#include <vector>

#include "bikelab/curve.hpp"
#include "bikelab/moebius.hpp"

namespace bikelab {

/// Steps whose translated segment is within this angle of the reflection
/// line are reported; the formula itself stays well defined there.
inline constexpr double kNearCollinearAngle = 1e-6;

struct TrapezoidStep {
  Vec point;
  bool near_collinear = false;
};

/// Next vertex of the isosceles trapezoid P_k Q_k P_{k+1} Q_{k+1}: translate
/// Q_k by the edge P_{k+1} - P_k, then apply X -> 2 proj(X) - X for the line
/// through Q_k and P_{k+1} (mirror in 2D, half-turn about the line in 3D).
TrapezoidStep trapezoid_step(const Vec& pk, const Vec& pk1, const Vec& qk, double d);

struct DiscreteTransform {
  Polygon polygon;  ///< Q_1 .. Q_n
  Vec end_point;  ///< Q_{n+1}
  double closure_defect = 0.0;  ///< |Q_{n+1} - Q_1|
  std::vector<std::size_t> near_collinear_steps;
};

DiscreteTransform transform_polygon(const Polygon& p, const Vec& q1, double d);

struct MonodromyFit {
  MoebiusMap map;
  double residual = 0.0;
  MonodromyClass classification;
};

/// Q_1 -> Q_{n+1} on the sphere |Q - P_1| = d, written as a map of unit
/// directions (Q - P_1)/d and fitted by a Moebius map.
MonodromyFit discrete_monodromy(const Polygon& p, double d, std::size_t samples = 16);

/// Start point Q_1 = P_1 + d * direction of a fixed point of the monodromy. When the
/// fit is degenerate (strongly hyperbolic) only the attracting point is returned.
std::vector<Vec> discrete_fixed_starts(const Polygon& p, double d);

/// Vertices of a sampled curve as a polygon.
Polygon as_polygon(const SampledCurve& c);

}  // namespace bikelab
