#pragma once

#include <array>
#include <complex>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bikelab/curve.hpp"

namespace bikelab {

using cplx = std::complex<double>;
using Mat2c = Eigen::Matrix2cd;
using Hom = Eigen::Vector2cd;

/// Projective coordinates of a unit direction.
///   2D: e = (cos t, sin t)  ->  [sin(t/2) : cos(t/2)]     (z = tan(t/2))
///   3D: e = (x, y, z)       ->  [x + i y : 1 - z]          (stereographic from the north pole)
/// Both are stereographic projections; the 2D one is taken from the pole (-1, 0).
Hom to_homogeneous(const Vec& direction, int dim);
Vec from_homogeneous(const Hom& h, int dim);

/// A Moebius transformation of the circle (dim 2, real matrix) or the
/// sphere (dim 3, complex matrix) of directions. Normalized to det = +-1
/// (det = -1 only for orientation-reversing real maps). Planar maps too
/// hyperbolic for that normalization keep a unit-max matrix and a log scale:
/// normalized = matrix() * exp(log_scale()).
class MoebiusMap {
 public:
  MoebiusMap() = default;
  MoebiusMap(int dim, const Mat2c& raw);
  /// For matrices whose determinant is known more accurately than det(raw).
  MoebiusMap(int dim, const Mat2c& raw, cplx det);
  /// Planar map from a real matrix and log|det(raw)|, for products whose
  /// determinant underflows.
  static MoebiusMap planar(const Mat2c& raw, double log_abs_det, bool reversing);

  static MoebiusMap identity(int dim) { return MoebiusMap(dim, Mat2c::Identity()); }

  int dim() const noexcept { return dim_; }
  const Mat2c& matrix() const noexcept { return m_; }
  double log_scale() const noexcept { return log_scale_; }
  /// Determinant of the normalized matrix: -1 for orientation-reversing planar maps, else 1.
  cplx det() const noexcept { return reversing_ ? cplx(-1.0) : cplx(1.0); }
  /// Tr^2/det of the unnormalized matrix; conjugacy invariant.
  cplx trace_invariant() const noexcept { return trace_invariant_; }
  bool orientation_reversing() const noexcept { return reversing_; }

  Vec apply(const Vec& direction) const;
  /// (*this)(other(x)).
  MoebiusMap after(const MoebiusMap& other) const;
  MoebiusMap inverse() const;
  /// Derivative of the action at a direction (complex multiplier in 3D,
  /// real in 2D); only meaningful at fixed points in 3D.
  cplx multiplier_at(const Vec& direction) const;

 private:
  int dim_ = 2;
  Mat2c m_ = Mat2c::Identity();
  double log_scale_ = 0.0;
  cplx trace_invariant_{4.0, 0.0};
  bool reversing_ = false;
};

enum class MonodromyKind { Elliptic, Parabolic, Hyperbolic, Identity };
std::string to_string(MonodromyKind k);

struct FixedPoint {
  Vec direction;
  cplx multiplier;  ///< derivative of the map at the fixed point
};

struct MonodromyClass {
  MonodromyKind kind = MonodromyKind::Identity;
  std::vector<FixedPoint> fixed_points;  ///< attracting first
  cplx trace_invariant;
  double identity_distance = 0.0;  ///< min ||M -+ I|| of the normalized matrix
};

inline constexpr double kIdentityTolerance = 1e-8;
inline constexpr double kParabolicTolerance = 1e-9;

MonodromyClass classify(const MoebiusMap& map);

/// Unique map sending three source directions to three images.
MoebiusMap moebius_through(int dim, std::span<const Vec, 3> sources, std::span<const Vec, 3> images);

struct MoebiusFit {
  MoebiusMap map;
  double residual = 0.0;  ///< max chordal error over held-out samples
  std::array<std::size_t, 3> anchors{};
};

/// Fit through three well separated anchor pairs; the remaining pairs are
/// held out and their worst chordal error is the residual.
MoebiusFit fit_moebius(int dim, std::span<const Vec> sources, std::span<const Vec> images);

/// Deterministic spread of unit directions (equal angles in 2D, Fibonacci
/// lattice in 3D).
std::vector<Vec> sample_directions(int dim, std::size_t count);

/// Max chordal distance between the two actions over sample directions.
double map_distance(const MoebiusMap& a, const MoebiusMap& b, std::size_t samples = 64);

}  // namespace bikelab
