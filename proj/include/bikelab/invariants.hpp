#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "bikelab/curve.hpp"

namespace bikelab {

/// int 1, int tau, int k^2, int k^2 tau, int (k'^2 + k^2 tau^2 - k^4/4), all dx.
struct FilamentIntegrals {
  double F1 = 0.0, F2 = 0.0, F3 = 0.0, F4 = 0.0, F5 = 0.0;
  std::size_t flagged_samples = 0;  ///< excluded from the torsion terms

  std::array<double, 5> values() const { return {F1, F2, F3, F4, F5}; }
};

FilamentIntegrals filament_integrals(const SampledCurve& c);
FilamentIntegrals filament_integrals(const SampledCurve& c, const FrameData& frame);

/// Planar fifth integral restricted to the steering expansion: int (k'^2 - k^4/4) dx.
double planar_quartic_integral(const SampledCurve& c);

struct AreaCentroid {
  Eigen::Matrix3d A = Eigen::Matrix3d::Zero();  ///< A(i,j) = int (G_i G'_j - G_j G'_i) dt
  Vec J = Vec::Zero();  ///< int (G.G') G dt
  bool zero_area = false;
  std::optional<Vec> center_of_mass;  ///< 2D only: rot90(J) / area
};

AreaCentroid area_centroid(const SampledCurve& c);

/// omega(u, v) = int u' . v dt.
double omega_form(const SampledCurve& c, const VectorField& u, const VectorField& v);
/// Omega(u, v) = int det(G', u, v) dt; 3D only.
double Omega_form(const SampledCurve& c, const VectorField& u, const VectorField& v);

struct SpectrumPoint {
  double lambda = 0.0;
  double trace_invariant = 0.0;  ///< real part of Tr^2/det
  double trace_invariant_imag = 0.0;
  std::string kind;
  double integral_cos_alpha = 0.0;  ///< NaN when unavailable
  std::string error;
};

struct MonodromySpectrum {
  std::vector<SpectrumPoint> points;
  std::array<double, 5> taylor{};  ///< c0..c4 of int cos(alpha) dx at lambda = 0
  std::array<double, 5> taylor_half_step{};  ///< same stencil at half the step
  double c4_extrapolated = 0.0;  ///< Richardson combination of the two c4 estimates
  double step = 0.0;
  std::vector<std::string> warnings;
};

/// int cos(alpha) dx on the periodic steering branch that tends to alpha = 0
/// as lambda -> 0. Negative lambda is handled by reversing and mirroring the
/// curve, which maps the equation for -lambda onto the one for +lambda.
double cos_alpha_integral(const SampledCurve& front, double lambda);

MonodromySpectrum cos_alpha_spectrum(const SampledCurve& front, const std::vector<double>& lambda_grid);
MonodromySpectrum monodromy_spectrum(const SampledCurve& front, const std::vector<double>& lambda_grid);

}  // namespace bikelab
