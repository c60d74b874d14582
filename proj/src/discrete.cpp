#include "bikelab/discrete.hpp"

#include <cmath>
#include <string>

#include "bikelab/parallel.hpp"

namespace bikelab {

TrapezoidStep trapezoid_step(const Vec& pk, const Vec& pk1, const Vec& qk, double d) {
  if (std::abs((pk - qk).norm() - d) > 1e-9 * std::max(1.0, d))
    throw Error(ErrorCode::BadParams, "|P_k - Q_k| differs from d");
  const Vec axis = pk1 - qk;
  const double len = axis.norm();
  if (len < 1e-12) throw Error(ErrorCode::DegenerateLine, "Q_k coincides with P_{k+1}");
  const Vec w = axis / len;
  const Vec x = qk + (pk1 - pk);
  const Vec proj = qk + (x - qk).dot(w) * w;

  TrapezoidStep step;
  step.point = 2.0 * proj - x;
  const Vec arm = x - pk1;
  const double sin_angle = arm.cross(w).norm() / std::max(arm.norm(), 1e-300);
  step.near_collinear = sin_angle < kNearCollinearAngle;
  return step;
}

DiscreteTransform transform_polygon(const Polygon& p, const Vec& q1, double d) {
  const std::size_t n = p.size();
  std::vector<Vec> q(n);
  q[0] = q1;
  DiscreteTransform out;
  Vec cur = q1;
  for (std::size_t k = 0; k < n; ++k) {
    TrapezoidStep s;
    try {
      s = trapezoid_step(p[k], p[(k + 1) % n], cur, d);
    } catch (const Error& e) {
      throw Error(e.code(), std::string(e.what()) + " (step " + std::to_string(k) + ")");
    }
    if (s.near_collinear) out.near_collinear_steps.push_back(k);
    cur = s.point;
    if (k + 1 < n) q[k + 1] = cur;
  }
  out.end_point = cur;
  out.closure_defect = (cur - q1).norm();
  out.polygon = Polygon(p.dim(), std::move(q), true);
  return out;
}

MonodromyFit discrete_monodromy(const Polygon& p, double d, std::size_t samples) {
  if (!p.closed()) throw Error(ErrorCode::InvalidInput, "discrete monodromy needs a closed polygon");
  if (samples < 12) samples = 12;
  const auto dirs = sample_directions(p.dim(), samples);
  std::vector<Vec> images(dirs.size());
  parallel_for(dirs.size(), [&](std::size_t i) {
    const auto t = transform_polygon(p, p[0] + d * dirs[i], d);
    images[i] = (t.end_point - p[0]) / d;
  });
  const auto fit = fit_moebius(p.dim(), dirs, images);
  return {fit.map, fit.residual, classify(fit.map)};
}

std::vector<Vec> discrete_fixed_starts(const Polygon& p, double d) {
  std::vector<Vec> out;
  try {
    const auto mono = discrete_monodromy(p, d);
    for (const auto& fp : mono.classification.fixed_points) out.push_back(p[0] + d * fp.direction);
    return out;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::FitDegenerate) throw;
  }
  // Images collapsed onto one point: iterate the monodromy onto the attracting fixed point.
  Vec q = p[0] + d * sample_directions(p.dim(), 1).front();
  for (int it = 0; it < 64; ++it) {
    const Vec next = transform_polygon(p, q, d).end_point;
    const double step = (next - q).norm();
    q = p[0] + d * (next - p[0]).normalized();
    if (step < 1e-13 * std::max(1.0, d)) break;
  }
  out.push_back(q);
  return out;
}

Polygon as_polygon(const SampledCurve& c) { return Polygon(c.dim(), c.points(), true); }

}  // namespace bikelab
