#pragma once

#include <optional>
#include <vector>

#include "bikelab/curve.hpp"
#include "bikelab/moebius.hpp"

namespace bikelab {

/// Unit bicycle direction (rear to front) at every sample of the front track.
struct DirectionState {
  double ell = 0.0;
  std::vector<Vec> e;  ///< e[i] at sample i, i = 0..n-1
  Vec final;  ///< direction after one full period
};

/// Classical RK4 for e' = (G' - (G'.e) e) / ell along the sampling
/// parameter, `substeps` steps per sample interval, renormalized every step.
/// With `backward`, integrates from u = 2*pi down to 0 starting at e0 and
/// `final` is the direction reached at u = 0.
DirectionState integrate_direction(const SampledCurve& front, double ell, const Vec& e0, int substeps = 1,
                                   bool backward = false);

struct SmoothMonodromy {
  MoebiusMap map;  ///< Riccati product in 2D, fitted map in 3D
  double fit_residual = 0.0;  ///< held-out Moebius residual of the direction-ODE route
  MoebiusMap fitted;  ///< direction-ODE route
  std::optional<MoebiusMap> riccati;  ///< 2D only, acting on absolute directions
  std::optional<Mat2c> riccati_steering;  ///< 2D only, acting on tan(alpha/2)
  double route_gap = 0.0;  ///< 2D: max chordal gap between the two routes
  double richardson_gap = 0.0;  ///< change of the ODE images under step halving
  MonodromyClass classification;
};

SmoothMonodromy monodromy(const SampledCurve& front, double lambda, std::size_t samples = 16);

/// Ordered RK4 product for z' = s(u) [[-1/(2l), k/2], [-k/2, 1/(2l)]] z, the
/// linear lift of the steering equation for y = tan(alpha/2).
Mat2c riccati_product(const SampledCurve& front, double lambda);

/// Periodic bicycle motion starting from a fixed point of the monodromy.
struct SteeringSolution {
  double ell = 0.0;
  int branch = 0;
  std::vector<double> alpha;  ///< steering angle (signed in 2D, in [0, pi] in 3D)
  std::vector<Vec> e;
  double periodicity_defect = 0.0;
  cplx multiplier;  ///< derivative of the monodromy at the chosen fixed point
  MonodromyClass classification;
};

/// Branch 0 is the attracting fixed point, branch 1 the repelling one.
SteeringSolution periodic_steering(const SampledCurve& front, double lambda, int branch);

struct Cusp {
  std::size_t after_sample = 0;  ///< zero lies in (u_i, u_{i+1})
  double u = 0.0;
  double speed = 0.0;  ///< |dgamma/du| at the located zero
};

struct RearTrack {
  std::vector<Vec> points;  ///< gamma = Gamma - lambda e
  int dim = 2;
  std::vector<int> coorientation;  ///< sign of Gamma'.e per sample
  std::vector<Cusp> cusps;
  double reconstruction_residual = 0.0;  ///< gamma + lambda*cooriented tangent vs Gamma, away from cusps
};

RearTrack rear_track(const SampledCurve& front, double lambda, int branch);
RearTrack rear_track(const SampledCurve& front, const SteeringSolution& steering);

/// Gamma_2 = Gamma_1 - 2 lambda e; the pair is in bicycle correspondence
/// with chord length 2 lambda.
SampledCurve bicycle_partner(const SampledCurve& front, double lambda, int branch);
SampledCurve bicycle_partner(const SampledCurve& front, const SteeringSolution& steering);

struct CorrespondenceResidual {
  double chord = 0.0;  ///< max | |G1 - G2| - d |
  double midpoint_angle = 0.0;  ///< max angle (rad) between midpoint velocity and chord
  double speed = 0.0;  ///< max | |G1'| - |G2'| | / |G1'|
  double max() const { return std::max({chord, midpoint_angle, speed}); }
};

CorrespondenceResidual verify_correspondence(const SampledCurve& g1, const SampledCurve& g2, double d);

struct SigmaReport {
  double lambda = 0.0;
  double integral_cos_alpha = 0.0;  ///< int cos(alpha) dx on the attracting branch
  double sigma_scaled[2]{};  ///< exp(-+ int cos(alpha) dx / lambda)
  double sigma_unscaled[2]{};  ///< exp(-+ int cos(alpha) dx)
  double sigma_numeric[2]{};  ///< finite-difference derivative of the direction map at its fixed points
  double sigma_matrix[2]{};  ///< multipliers of the Riccati monodromy
  bool scaled_matches = false;  ///< which normalization agrees with sigma_numeric
  double trace_invariant = 0.0;
  double identity_gap = 0.0;  ///< |1/s1 + 1/s2 - (Tr^2/det - 2)| / max(1, Tr^2/det), with the matching formula
  double product_gap = 0.0;  ///< |s1 s2 - 1|
};

SigmaReport sigma_derivatives(const SampledCurve& front, double lambda);

/// Signed planar angle of a direction.
double direction_angle(const Vec& e);

}  // namespace bikelab
