#include "bikelab/invariants.hpp"

#include <cmath>
#include <limits>

#include "bikelab/parallel.hpp"
#include "bikelab/smooth.hpp"
#include "bikelab/spectral.hpp"

namespace bikelab {

namespace {

// d/dx of a per-sample scalar, x = arc length.
std::vector<double> arc_derivative(const std::vector<double>& f, const std::vector<double>& speed) {
  auto d = spectral::derivative(std::span<const double>(f), 1);
  for (std::size_t i = 0; i < d.size(); ++i) d[i] /= speed[i];
  return d;
}

double five_point_taylor(int order, const std::array<double, 5>& f, double h) {
  // f = {f(-2h), f(-h), f(0), f(h), f(2h)}
  switch (order) {
    case 1: return (f[0] - 8.0 * f[1] + 8.0 * f[3] - f[4]) / (12.0 * h);
    case 2: return (-f[0] + 16.0 * f[1] - 30.0 * f[2] + 16.0 * f[3] - f[4]) / (12.0 * h * h) / 2.0;
    case 3: return (-f[0] + 2.0 * f[1] - 2.0 * f[3] + f[4]) / (2.0 * h * h * h) / 6.0;
    case 4: return (f[0] - 4.0 * f[1] + 6.0 * f[2] - 4.0 * f[3] + f[4]) / (h * h * h * h) / 24.0;
  }
  return f[2];
}

}  // namespace

FilamentIntegrals filament_integrals(const SampledCurve& c) { return filament_integrals(c, frenet_data(c)); }

FilamentIntegrals filament_integrals(const SampledCurve& c, const FrameData& fr) {
  // F4 and F5 through T' and T'' (k^2 tau = T.(T' x T''), k'^2 + k^2 tau^2 + k^4 = |T''|^2),
  // which stay smooth where the Frenet frame does not.
  const std::size_t n = c.size();
  const double h = spectral::grid_step(n);
  auto arc_d = [&](const std::vector<Vec>& f) {
    auto d = spectral::derivative(std::span<const Vec>(f), 1);
    for (std::size_t i = 0; i < n; ++i) d[i] /= fr.speed[i];
    return d;
  };
  const auto t1 = arc_d(fr.T);
  const auto t2 = arc_d(t1);
  FilamentIntegrals out;
  out.flagged_samples = fr.flagged_count();
  for (std::size_t i = 0; i < n; ++i) {
    const double w = fr.speed[i] * h;
    const double k2 = t1[i].squaredNorm();
    out.F1 += w;
    out.F2 += (fr.flagged[i] ? 0.0 : fr.tau[i]) * w;
    out.F3 += k2 * w;
    out.F4 += fr.T[i].dot(t1[i].cross(t2[i])) * w;
    out.F5 += (t2[i].squaredNorm() - 1.25 * k2 * k2) * w;
  }
  return out;
}

double planar_quartic_integral(const SampledCurve& c) {
  const auto fr = frenet_data(c);
  const auto kp = arc_derivative(fr.kappa, fr.speed);
  const double h = spectral::grid_step(c.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double k = fr.kappa[i];
    sum += (kp[i] * kp[i] - 0.25 * k * k * k * k) * fr.speed[i] * h;
  }
  return sum;
}

AreaCentroid area_centroid(const SampledCurve& c) {
  const auto d = parameter_derivative(c, 1);
  const double h = spectral::grid_step(c.size());
  AreaCentroid out;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const Vec& g = c[i];
    out.A += (g * d[i].transpose() - d[i] * g.transpose()) * h;
    out.J += g.dot(d[i]) * g * h;
  }
  if (c.dim() == 2) {
    const double area = 0.5 * out.A(0, 1);
    out.zero_area = std::abs(out.A(0, 1)) < 1e-10;
    if (!out.zero_area) out.center_of_mass = Vec(-out.J.y(), out.J.x(), 0.0) / area;
  } else {
    out.zero_area = out.A.norm() < 1e-10;
  }
  return out;
}

double omega_form(const SampledCurve& c, const VectorField& u, const VectorField& v) {
  if (u.size() != c.size() || v.size() != c.size())
    throw Error(ErrorCode::InvalidInput, "vector field size differs from curve size");
  const auto du = spectral::derivative(std::span<const Vec>(u.vectors), 1);
  double sum = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) sum += du[i].dot(v[i]);
  return sum * spectral::grid_step(c.size());
}

double Omega_form(const SampledCurve& c, const VectorField& u, const VectorField& v) {
  if (c.dim() != 3) throw Error(ErrorCode::DimensionMismatch, "Omega is defined for space curves");
  if (u.size() != c.size() || v.size() != c.size())
    throw Error(ErrorCode::InvalidInput, "vector field size differs from curve size");
  const auto d = parameter_derivative(c, 1);
  double sum = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) sum += d[i].cross(u[i]).dot(v[i]);
  return sum * spectral::grid_step(c.size());
}

double cos_alpha_integral(const SampledCurve& front, double lambda) {
  if (front.dim() != 2) throw Error(ErrorCode::DimensionMismatch, "steering expansion is planar");
  if (lambda == 0.0) return length(front);
  const SampledCurve curve = lambda > 0.0 ? front : mirrored(reversed(front));
  const double l = std::abs(lambda);
  const auto st = periodic_steering(curve, l, 0);
  const auto s = speed(curve);
  const double h = spectral::grid_step(curve.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < curve.size(); ++i) sum += std::cos(st.alpha[i]) * s[i] * h;
  return sum;
}

MonodromySpectrum cos_alpha_spectrum(const SampledCurve& front, const std::vector<double>& grid) {
  MonodromySpectrum out;
  out.points.resize(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    auto& p = out.points[i];
    p.lambda = grid[i];
    p.integral_cos_alpha = std::numeric_limits<double>::quiet_NaN();
    try {
      const auto m = monodromy(front, grid[i]);
      p.trace_invariant = m.classification.trace_invariant.real();
      p.kind = to_string(m.classification.kind);
      p.integral_cos_alpha = cos_alpha_integral(front, grid[i]);
    } catch (const Error& e) {
      p.error = e.what();
    }
  });

  double lmax = 0.0;
  for (double l : grid) lmax = std::max(lmax, std::abs(l));
  double h = lmax / 8.0;
  const double f0 = length(front);
  auto stencil = [&](double step) {
    std::array<double, 5> f{};
    const double offs[5] = {-2.0, -1.0, 0.0, 1.0, 2.0};
    for (int k = 0; k < 5; ++k) f[k] = k == 2 ? f0 : cos_alpha_integral(front, offs[k] * step);
    return f;
  };
  for (int attempt = 0; attempt < 20; ++attempt) {
    try {
      const auto f = stencil(h);
      const auto fh = stencil(0.5 * h);
      out.taylor[0] = out.taylor_half_step[0] = f0;
      for (int k = 1; k <= 4; ++k) {
        out.taylor[k] = five_point_taylor(k, f, h);
        out.taylor_half_step[k] = five_point_taylor(k, fh, 0.5 * h);
      }
      out.c4_extrapolated = (4.0 * out.taylor_half_step[4] - out.taylor[4]) / 3.0;
      out.step = h;
      return out;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoPeriodicSolution && e.code() != ErrorCode::NotHyperbolic) throw;
      out.warnings.push_back("no hyperbolic monodromy at step " + std::to_string(h) + "; halving");
      h *= 0.5;
    }
  }
  throw Error(ErrorCode::NotHyperbolic, "could not find a hyperbolic neighbourhood of lambda = 0");
}

MonodromySpectrum monodromy_spectrum(const SampledCurve& front, const std::vector<double>& grid) {
  MonodromySpectrum out;
  out.points.resize(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    auto& p = out.points[i];
    p.lambda = grid[i];
    p.integral_cos_alpha = std::numeric_limits<double>::quiet_NaN();
    try {
      if (!(grid[i] > 0.0)) throw Error(ErrorCode::BadParams, "lambda must be positive");
      const auto m = monodromy(front, grid[i]);
      p.trace_invariant = m.classification.trace_invariant.real();
      p.trace_invariant_imag = m.classification.trace_invariant.imag();
      p.kind = to_string(m.classification.kind);
    } catch (const Error& e) {
      p.error = e.what();
    }
  });
  return out;
}

}  // namespace bikelab
