#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bikelab/error.hpp"

namespace bikelab {

/// Points are always stored in R^3; planar data keeps z == 0 and dim == 2.
using Vec = Eigen::Vector3d;

/// A closed curve sampled at uniformly spaced parameter values u_j = 2*pi*j/n.
/// The parameter need not be arc length; everything downstream uses the
/// speed |dGamma/du|.
class SampledCurve {
 public:
  SampledCurve() = default;
  SampledCurve(int dim, std::vector<Vec> points, bool closed = true);

  int dim() const noexcept { return dim_; }
  bool closed() const noexcept { return closed_; }
  std::size_t size() const noexcept { return points_.size(); }
  const std::vector<Vec>& points() const noexcept { return points_; }
  const Vec& operator[](std::size_t i) const { return points_[i]; }

  double diameter() const;

 private:
  int dim_ = 2;
  bool closed_ = true;
  std::vector<Vec> points_;
};

class Polygon {
 public:
  Polygon() = default;
  Polygon(int dim, std::vector<Vec> vertices, bool closed = true);

  int dim() const noexcept { return dim_; }
  bool closed() const noexcept { return closed_; }
  std::size_t size() const noexcept { return vertices_.size(); }
  const std::vector<Vec>& vertices() const noexcept { return vertices_; }
  const Vec& operator[](std::size_t i) const { return vertices_[i]; }

 private:
  int dim_ = 2;
  bool closed_ = true;
  std::vector<Vec> vertices_;
};

/// Per-sample Frenet data. In 2D, N is T rotated by +90 degrees and kappa is
/// the signed curvature; in 3D kappa >= 0.
struct FrameData {
  std::vector<double> x;  ///< arc length from sample 0
  std::vector<double> speed;  ///< |dGamma/du|
  std::vector<Vec> T, N, B;
  std::vector<double> kappa, tau;
  std::vector<bool> flagged;  ///< kappa below threshold: N, B, tau transported
  double length = 0.0;

  std::size_t flagged_count() const;
};

/// A vector per sample of some base curve.
struct VectorField {
  std::vector<Vec> vectors;

  std::size_t size() const noexcept { return vectors.size(); }
  const Vec& operator[](std::size_t i) const { return vectors[i]; }
};

inline constexpr double kVanishingCurvature = 1e-8;

// ---- geometry on sampled curves ------------------------------------------

/// dGamma/du, d2Gamma/du2, ... via spectral differentiation.
std::vector<Vec> parameter_derivative(const SampledCurve& c, int order = 1);
std::vector<double> speed(const SampledCurve& c);
/// Spectrally accurate length.
double length(const SampledCurve& c);
/// Sum of chord lengths.
double polygon_length(const SampledCurve& c);

FrameData frenet_data(const SampledCurve& c);

/// Equispaced-in-arc-length resampling to m points, starting at sample 0.
SampledCurve resample_arclength(const SampledCurve& c, std::size_t m);

/// Trig-interpolated curve evaluated at u + shift for every grid u.
SampledCurve shift_parameter(const SampledCurve& c, double shift);

/// Reverse traversal direction, keeping sample 0 fixed.
SampledCurve reversed(const SampledCurve& c);
/// Mirror a planar curve in the x axis.
SampledCurve mirrored(const SampledCurve& c);
/// Rigid motion p -> R p + t.
SampledCurve transformed(const SampledCurve& c, const Eigen::Matrix3d& R, const Vec& t);
/// Cyclic relabeling so that sample k becomes sample 0.
SampledCurve relabeled(const SampledCurve& c, std::size_t k);
/// The same curve traversed `times` times.
SampledCurve repeated(const SampledCurve& c, int times);
/// Curve with every point displaced by eps * field.
SampledCurve displaced(const SampledCurve& c, const VectorField& field, double eps);
/// Embed a planar curve in R^3 (z = 0, dim = 3).
SampledCurve embed3d(const SampledCurve& c);

// ---- generators -----------------------------------------------------------

SampledCurve make_circle(double radius, std::size_t n, const Vec& center = Vec::Zero(), int dim = 2);
SampledCurve make_ellipse(double a, double b, std::size_t n);
SampledCurve make_torus_knot(int p, int q, double R, double r, std::size_t n);

struct FourierPerturbation {
  std::uint64_t seed = 1;
  double amplitude = 0.1;
  double radius = 1.0;
  int first_mode = 2;
  int last_mode = 5;
  int dim = 2;
};
/// Circle with seeded random radial (and, in 3D, vertical) Fourier modes.
SampledCurve make_fourier_perturbed(const FourierPerturbation& p, std::size_t n);

struct CurveParams {
  double r = 1.0, a = 2.0, b = 1.0;
  double R = 2.0, minor = 0.5;
  int p = 2, q = 3;
  std::size_t n = 512;
  std::uint64_t seed = 1;
  double amp = 0.1;
  int dim = 2;
  int first_mode = 2, last_mode = 5;
};
/// kind: circle | ellipse | torus_knot | fourier_perturbed.
SampledCurve make_curve(const std::string& kind, const CurveParams& params);

// ---- vector fields --------------------------------------------------------

VectorField constant_field(const SampledCurve& c, const Vec& v);
VectorField tangent_field(const SampledCurve& c);
/// Smooth random field built from low Fourier modes (deterministic in seed).
VectorField random_fourier_field(const SampledCurve& c, std::uint64_t seed, int modes = 4);

/// Portable uniform variate in [0, 1) from a 64-bit generator state.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace bikelab
