#pragma once

#include <string>
#include <utility>
#include <vector>

#include "bikelab/curve.hpp"
#include "bikelab/invariants.hpp"

namespace bikelab {

/// A weighted sum of hierarchy fields X_0..X_3 with time-stepping settings.
struct FlowSpec {
  std::vector<std::pair<int, double>> weights;  ///< (n, weight)
  double dt = 1e-3;
  int steps = 1;
  int resample_every = 10;  ///< 0 disables arc-length resampling
  bool log = true;

  static FlowSpec filament(double dt, int steps) { return {{{1, 1.0}}, dt, steps}; }
  static FlowSpec planar_filament(double dt, int steps) { return {{{2, 1.0}}, dt, steps}; }
  static FlowSpec hierarchy(int n, double dt, int steps) { return {{{n, 1.0}}, dt, steps}; }
  /// filament | planar_filament | hierarchy_<n>
  static FlowSpec named(const std::string& name, double dt, int steps);

  void validate(int dim) const;
};

struct HierarchyField {
  VectorField field;
  std::vector<bool> flagged;  ///< samples where the field is not determined
};

/// X_0 = -T, X_1 = k B, X_2 = (k^2/2) T + k' N + k tau B,
/// X_3 = k^2 tau T + (2 k' tau + k tau') N + (k tau^2 - k'' - k^3/2) B.
/// Where the curvature vanishes, X_1 = T x T' and X_2 = T'' + (3/2)|T'|^2 T
/// are used; X_3 has no such form and those samples stay flagged.
HierarchyField hierarchy_field(const SampledCurve& c, int n);

/// sup_i |T x X_n - X_{n-1}'| with ' = d/dx.
double recursion_check(const SampledCurve& c, int n);

struct FlowLogEntry {
  int step = 0;
  double t = 0.0;
  FilamentIntegrals integrals;
  Eigen::Matrix3d A = Eigen::Matrix3d::Zero();
  Vec J = Vec::Zero();
};

struct FlowResult {
  SampledCurve curve;
  std::vector<FlowLogEntry> log;
  int kept_modes = 0;  ///< Fourier modes retained by the stability filter
};

/// Classical RK4 in curve space. Fourier modes beyond the explicit-RK4
/// stability bound dt * k^p < 2.5 (p = derivative order of the field) are
/// removed after every step.
FlowResult evolve(const SampledCurve& c, const FlowSpec& spec);

/// The summed field of a spec at the current curve.
VectorField flow_field(const SampledCurve& c, const FlowSpec& spec);

/// Shape change between two curves modulo rigid motion and reparametrization:
/// min over cyclic shift of the sup difference of the curvature (and torsion)
/// profiles on arc-length grids.
double shape_drift(const SampledCurve& a, const SampledCurve& b, std::size_t samples = 512);

/// Max distance from points of `a` to the trigonometric interpolant of `b`.
double curve_distance(const SampledCurve& a, const SampledCurve& b);

}  // namespace bikelab
