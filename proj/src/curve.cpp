#include "bikelab/curve.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "bikelab/spectral.hpp"

namespace bikelab {

using std::numbers::pi;

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::DegenerateCurve: return "DegenerateCurve";
    case ErrorCode::BadParams: return "BadParams";
    case ErrorCode::DegenerateLine: return "DegenerateLine";
    case ErrorCode::FitDegenerate: return "FitDegenerate";
    case ErrorCode::NoPeriodicSolution: return "NoPeriodicSolution";
    case ErrorCode::NotHyperbolic: return "NotHyperbolic";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::BlowUp: return "BlowUp";
    case ErrorCode::NotApplicable: return "NotApplicable";
    case ErrorCode::InvalidInput: return "InvalidInput";
  }
  return "Unknown";
}

namespace {

double diameter_of(const std::vector<Vec>& pts) {
  if (pts.empty()) return 0.0;
  Vec lo = pts[0], hi = pts[0];
  for (const auto& p : pts) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  return (hi - lo).norm();
}

void check_points(int dim, std::vector<Vec>& pts, std::size_t min_count, bool closed) {
  if (dim != 2 && dim != 3) throw Error(ErrorCode::InvalidInput, "dim must be 2 or 3");
  if (pts.size() < min_count)
    throw Error(ErrorCode::TooFewSamples, "need at least " + std::to_string(min_count) + " points");
  for (const auto& p : pts)
    if (!p.allFinite()) throw Error(ErrorCode::InvalidInput, "non-finite coordinate");
  if (dim == 2)
    for (auto& p : pts) p.z() = 0.0;
  const double tol = 1e-12 * std::max(diameter_of(pts), 1e-300);
  const std::size_t n = pts.size();
  const std::size_t edges = closed ? n : n - 1;
  for (std::size_t i = 0; i < edges; ++i)
    if ((pts[(i + 1) % n] - pts[i]).norm() <= tol)
      throw Error(ErrorCode::DegenerateCurve, "consecutive points coincide at index " + std::to_string(i));
}

}  // namespace

SampledCurve::SampledCurve(int dim, std::vector<Vec> points, bool closed)
    : dim_(dim), closed_(closed), points_(std::move(points)) {
  check_points(dim_, points_, closed_ ? 8 : 2, closed_);
}

double SampledCurve::diameter() const { return diameter_of(points_); }

Polygon::Polygon(int dim, std::vector<Vec> vertices, bool closed)
    : dim_(dim), closed_(closed), vertices_(std::move(vertices)) {
  check_points(dim_, vertices_, 3, closed_);
}

std::size_t FrameData::flagged_count() const {
  return static_cast<std::size_t>(std::count(flagged.begin(), flagged.end(), true));
}

std::vector<Vec> parameter_derivative(const SampledCurve& c, int order) {
  return spectral::derivative(std::span<const Vec>(c.points()), order);
}

std::vector<double> speed(const SampledCurve& c) {
  const auto d = parameter_derivative(c, 1);
  std::vector<double> s(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) s[i] = d[i].norm();
  return s;
}

double length(const SampledCurve& c) {
  const auto s = speed(c);
  double sum = 0.0;
  for (double v : s) sum += v;
  return sum * spectral::grid_step(s.size());
}

double polygon_length(const SampledCurve& c) {
  const auto& p = c.points();
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) sum += (p[(i + 1) % p.size()] - p[i]).norm();
  return sum;
}

FrameData frenet_data(const SampledCurve& c) {
  const std::size_t n = c.size();
  const auto d1 = parameter_derivative(c, 1);
  const auto d2 = parameter_derivative(c, 2);
  const auto d3 = parameter_derivative(c, 3);

  FrameData f;
  f.speed.resize(n);
  f.T.resize(n);
  f.N.resize(n);
  f.B.resize(n);
  f.kappa.resize(n);
  f.tau.resize(n);
  f.flagged.assign(n, false);

  for (std::size_t i = 0; i < n; ++i) {
    const double s = d1[i].norm();
    f.speed[i] = s;
    f.T[i] = d1[i] / s;
    if (c.dim() == 2) {
      const double cross = d1[i].x() * d2[i].y() - d1[i].y() * d2[i].x();
      f.kappa[i] = cross / (s * s * s);
      f.N[i] = Vec(-f.T[i].y(), f.T[i].x(), 0.0);
      f.B[i] = Vec::UnitZ();
      f.tau[i] = 0.0;
      continue;
    }
    const Vec cr = d1[i].cross(d2[i]);
    const double cn = cr.norm();
    f.kappa[i] = cn / (s * s * s);
    if (f.kappa[i] < kVanishingCurvature) {
      f.flagged[i] = true;
      continue;
    }
    f.B[i] = cr / cn;
    f.N[i] = f.B[i].cross(f.T[i]);
    f.tau[i] = cr.dot(d3[i]) / (cn * cn);
  }

  if (c.dim() == 3 && f.flagged_count() > 0) {
    // Parallel transport N from the nearest unflagged predecessor.
    std::size_t start = 0;
    while (start < n && f.flagged[start]) ++start;
    Vec carry;
    if (start == n) {
      // straight-ish everywhere: any normal will do
      const Vec t = f.T[0];
      carry = std::abs(t.x()) < 0.9 ? Vec::UnitX() : Vec::UnitY();
      start = 0;
    } else {
      carry = f.N[start];
    }
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t i = (start + k) % n;
      if (!f.flagged[i]) {
        carry = f.N[i];
        continue;
      }
      Vec nn = carry - carry.dot(f.T[i]) * f.T[i];
      nn.normalize();
      f.N[i] = nn;
      f.B[i] = f.T[i].cross(nn);
      f.tau[i] = 0.0;
      carry = nn;
    }
  }

  double mean = 0.0;
  f.x = spectral::periodic_antiderivative(std::span<const double>(f.speed), &mean);
  const double h = spectral::grid_step(n);
  for (std::size_t i = 0; i < n; ++i) f.x[i] += mean * h * static_cast<double>(i);
  f.length = mean * 2.0 * pi;
  return f;
}

SampledCurve resample_arclength(const SampledCurve& c, std::size_t m) {
  if (m < 8) throw Error(ErrorCode::TooFewSamples, "resample_arclength needs m >= 8");
  const std::size_t n = c.size();
  const auto s = speed(c);
  double mean = 0.0;
  const auto periodic = spectral::periodic_antiderivative(std::span<const double>(s), &mean);
  const double L = mean * 2.0 * pi;
  if (L < 1e-12) throw Error(ErrorCode::DegenerateCurve, "curve length below 1e-12");

  const spectral::Interpolant arc(periodic);
  const spectral::Interpolant spd(s);
  std::vector<spectral::Interpolant> coord;
  for (int k = 0; k < 3; ++k) {
    std::vector<double> comp(n);
    for (std::size_t i = 0; i < n; ++i) comp[i] = c[i][k];
    coord.emplace_back(comp);
  }

  std::vector<Vec> out(m);
  double u = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    const double target = L * static_cast<double>(j) / static_cast<double>(m);
    if (j > 0) u = 2.0 * pi * static_cast<double>(j) / static_cast<double>(m);
    for (int it = 0; it < 50; ++it) {
      const double x = mean * u + arc(u);
      const double du = (x - target) / spd(u);
      u -= du;
      if (std::abs(du) < 1e-15) break;
    }
    out[j] = Vec(coord[0](u), coord[1](u), coord[2](u));
  }
  return SampledCurve(c.dim(), std::move(out), true);
}

SampledCurve shift_parameter(const SampledCurve& c, double shift) {
  return SampledCurve(c.dim(), spectral::shifted(std::span<const Vec>(c.points()), shift), true);
}

SampledCurve reversed(const SampledCurve& c) {
  std::vector<Vec> pts(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) pts[i] = c[(c.size() - i) % c.size()];
  return SampledCurve(c.dim(), std::move(pts), c.closed());
}

SampledCurve mirrored(const SampledCurve& c) {
  std::vector<Vec> pts = c.points();
  for (auto& p : pts) p.y() = -p.y();
  return SampledCurve(c.dim(), std::move(pts), c.closed());
}

SampledCurve transformed(const SampledCurve& c, const Eigen::Matrix3d& R, const Vec& t) {
  std::vector<Vec> pts(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) pts[i] = R * c[i] + t;
  return SampledCurve(c.dim(), std::move(pts), c.closed());
}

SampledCurve relabeled(const SampledCurve& c, std::size_t k) {
  std::vector<Vec> pts(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) pts[i] = c[(i + k) % c.size()];
  return SampledCurve(c.dim(), std::move(pts), c.closed());
}

SampledCurve repeated(const SampledCurve& c, int times) {
  std::vector<Vec> pts;
  pts.reserve(c.size() * times);
  for (int t = 0; t < times; ++t) pts.insert(pts.end(), c.points().begin(), c.points().end());
  return SampledCurve(c.dim(), std::move(pts), c.closed());
}

SampledCurve displaced(const SampledCurve& c, const VectorField& field, double eps) {
  if (field.size() != c.size()) throw Error(ErrorCode::InvalidInput, "field size differs from curve size");
  std::vector<Vec> pts(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) pts[i] = c[i] + eps * field[i];
  return SampledCurve(c.dim(), std::move(pts), c.closed());
}

SampledCurve embed3d(const SampledCurve& c) { return SampledCurve(3, c.points(), c.closed()); }

SampledCurve make_circle(double radius, std::size_t n, const Vec& center, int dim) {
  if (!(radius > 0.0)) throw Error(ErrorCode::BadParams, "circle radius must be positive");
  std::vector<Vec> pts(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = 2.0 * pi * static_cast<double>(i) / static_cast<double>(n);
    pts[i] = center + Vec(radius * std::cos(t), radius * std::sin(t), 0.0);
  }
  return SampledCurve(dim, std::move(pts), true);
}

SampledCurve make_ellipse(double a, double b, std::size_t n) {
  if (!(a > 0.0 && b > 0.0)) throw Error(ErrorCode::BadParams, "ellipse semi-axes must be positive");
  std::vector<Vec> pts(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = 2.0 * pi * static_cast<double>(i) / static_cast<double>(n);
    pts[i] = Vec(a * std::cos(t), b * std::sin(t), 0.0);
  }
  return SampledCurve(2, std::move(pts), true);
}

SampledCurve make_torus_knot(int p, int q, double R, double r, std::size_t n) {
  if (!(R > 0.0 && r > 0.0 && r < R) || p <= 0 || q <= 0)
    throw Error(ErrorCode::BadParams, "torus knot needs p, q > 0 and 0 < r < R");
  std::vector<Vec> pts(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = 2.0 * pi * static_cast<double>(i) / static_cast<double>(n);
    const double rho = R + r * std::cos(q * t);
    pts[i] = Vec(rho * std::cos(p * t), rho * std::sin(p * t), r * std::sin(q * t));
  }
  return SampledCurve(3, std::move(pts), true);
}

SampledCurve make_fourier_perturbed(const FourierPerturbation& fp, std::size_t n) {
  if (!(fp.radius > 0.0) || fp.amplitude < 0.0 || fp.first_mode < 1 || fp.last_mode < fp.first_mode)
    throw Error(ErrorCode::BadParams, "bad Fourier perturbation parameters");
  Rng rng(fp.seed);
  const int modes = fp.last_mode - fp.first_mode + 1;
  const double scale = fp.amplitude / (2.0 * modes);
  std::vector<double> ra, rb, za, zb;
  for (int k = 0; k < modes; ++k) {
    ra.push_back(scale * rng.uniform(-1.0, 1.0));
    rb.push_back(scale * rng.uniform(-1.0, 1.0));
    za.push_back(scale * rng.uniform(-1.0, 1.0));
    zb.push_back(scale * rng.uniform(-1.0, 1.0));
  }
  std::vector<Vec> pts(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = 2.0 * pi * static_cast<double>(i) / static_cast<double>(n);
    double rad = 1.0, z = 0.0;
    for (int k = 0; k < modes; ++k) {
      const int m = fp.first_mode + k;
      rad += ra[k] * std::cos(m * t) + rb[k] * std::sin(m * t);
      z += za[k] * std::cos(m * t) + zb[k] * std::sin(m * t);
    }
    pts[i] = fp.radius * Vec(rad * std::cos(t), rad * std::sin(t), fp.dim == 3 ? z : 0.0);
  }
  return SampledCurve(fp.dim, std::move(pts), true);
}

SampledCurve make_curve(const std::string& kind, const CurveParams& p) {
  if (kind == "circle") return make_circle(p.r, p.n, Vec::Zero(), p.dim);
  if (kind == "ellipse") return make_ellipse(p.a, p.b, p.n);
  if (kind == "torus_knot") return make_torus_knot(p.p, p.q, p.R, p.minor, p.n);
  if (kind == "fourier_perturbed") {
    FourierPerturbation fp;
    fp.seed = p.seed;
    fp.amplitude = p.amp;
    fp.radius = p.r;
    fp.dim = p.dim;
    fp.first_mode = p.first_mode;
    fp.last_mode = p.last_mode;
    return make_fourier_perturbed(fp, p.n);
  }
  throw Error(ErrorCode::BadParams, "unknown curve kind '" + kind + "'");
}

VectorField constant_field(const SampledCurve& c, const Vec& v) { return {std::vector<Vec>(c.size(), v)}; }

VectorField tangent_field(const SampledCurve& c) {
  auto d = parameter_derivative(c, 1);
  for (auto& v : d) v.normalize();
  return {std::move(d)};
}

VectorField random_fourier_field(const SampledCurve& c, std::uint64_t seed, int modes) {
  Rng rng(seed);
  std::vector<Vec> a(modes + 1), b(modes + 1);
  for (int k = 0; k <= modes; ++k) {
    for (int j = 0; j < 3; ++j) {
      a[k][j] = rng.uniform(-1.0, 1.0) / (1.0 + k);
      b[k][j] = rng.uniform(-1.0, 1.0) / (1.0 + k);
    }
    if (c.dim() == 2) a[k].z() = b[k].z() = 0.0;
  }
  VectorField f;
  f.vectors.resize(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double t = 2.0 * pi * static_cast<double>(i) / static_cast<double>(c.size());
    Vec v = a[0];
    for (int k = 1; k <= modes; ++k) v += a[k] * std::cos(k * t) + b[k] * std::sin(k * t);
    f.vectors[i] = v;
  }
  return f;
}

Rng::Rng(std::uint64_t seed) : gen_(seed) {}

// mt19937_64 output is fixed by the standard; the distribution objects are not.
double Rng::uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

}  // namespace bikelab
