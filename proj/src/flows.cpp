#include "bikelab/flows.hpp"

#include <cmath>
#include <numbers>

#include "bikelab/spectral.hpp"

namespace bikelab {

namespace {

std::vector<double> arc_derivative(const std::vector<double>& f, const std::vector<double>& speed) {
  auto d = spectral::derivative(std::span<const double>(f), 1);
  for (std::size_t i = 0; i < d.size(); ++i) d[i] /= speed[i];
  return d;
}

std::vector<Vec> arc_derivative(const std::vector<Vec>& f, const std::vector<double>& speed) {
  auto d = spectral::derivative(std::span<const Vec>(f), 1);
  for (std::size_t i = 0; i < d.size(); ++i) d[i] /= speed[i];
  return d;
}

bool planar_field(int n) { return n == 0 || n == 2; }

}  // namespace

FlowSpec FlowSpec::named(const std::string& name, double dt, int steps) {
  if (name == "filament") return filament(dt, steps);
  if (name == "planar_filament") return planar_filament(dt, steps);
  if (name.rfind("hierarchy_", 0) == 0) {
    const std::string digits = name.substr(10);
    if (digits.size() == 1 && digits[0] >= '0' && digits[0] <= '3') return hierarchy(digits[0] - '0', dt, steps);
  }
  throw Error(ErrorCode::BadParams, "unknown field '" + name + "'");
}

void FlowSpec::validate(int dim) const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw Error(ErrorCode::BadParams, "dt must be positive");
  if (steps < 1) throw Error(ErrorCode::BadParams, "steps must be >= 1");
  if (weights.empty()) throw Error(ErrorCode::BadParams, "flow needs at least one field");
  for (const auto& [n, w] : weights) {
    if (n < 0 || n > 3) throw Error(ErrorCode::BadParams, "hierarchy index must be 0..3");
    if (!std::isfinite(w)) throw Error(ErrorCode::BadParams, "weights must be finite");
    if (dim == 2 && !planar_field(n))
      throw Error(ErrorCode::DimensionMismatch, "X_" + std::to_string(n) + " leaves the plane");
  }
}

HierarchyField hierarchy_field(const SampledCurve& c, int n) {
  if (n < 0 || n > 3) throw Error(ErrorCode::BadParams, "hierarchy index must be 0..3");
  if (c.dim() == 2 && !planar_field(n))
    throw Error(ErrorCode::DimensionMismatch, "X_" + std::to_string(n) + " leaves the plane");
  const auto fr = frenet_data(c);
  const std::size_t m = c.size();
  HierarchyField out;
  out.field.vectors.assign(m, Vec::Zero());
  out.flagged.assign(m, false);
  if (n == 0) {
    for (std::size_t i = 0; i < m; ++i) out.field.vectors[i] = -fr.T[i];
    return out;
  }
  const auto dT = arc_derivative(fr.T, fr.speed);  // kappa N
  const auto kp = arc_derivative(fr.kappa, fr.speed);
  std::vector<double> kpp, tp;
  std::vector<Vec> ddT;
  if (n >= 2) ddT = arc_derivative(dT, fr.speed);
  if (n == 3) {
    kpp = arc_derivative(kp, fr.speed);
    tp = arc_derivative(fr.tau, fr.speed);
  }
  for (std::size_t i = 0; i < m; ++i) {
    const double k = fr.kappa[i], t = fr.tau[i];
    const Vec &T = fr.T[i], &N = fr.N[i], &B = fr.B[i];
    Vec& X = out.field.vectors[i];
    if (fr.flagged[i]) {
      if (n == 1) X = T.cross(dT[i]);
      if (n == 2) X = ddT[i] + 1.5 * dT[i].squaredNorm() * T;
      if (n == 3) out.flagged[i] = true;
      continue;
    }
    switch (n) {
      case 1: X = k * B; break;
      case 2: X = 0.5 * k * k * T + kp[i] * N + k * t * B; break;
      case 3:
        X = k * k * t * T + (2.0 * kp[i] * t + k * tp[i]) * N + (k * t * t - kpp[i] - 0.5 * k * k * k) * B;
        break;
    }
  }
  return out;
}

double recursion_check(const SampledCurve& c, int n) {
  if (c.dim() != 3) throw Error(ErrorCode::DimensionMismatch, "recursion uses the cross product in R^3");
  if (n < 1 || n > 3) throw Error(ErrorCode::BadParams, "recursion index must be 1..3");
  const auto fr = frenet_data(c);
  const auto xn = hierarchy_field(c, n);
  const auto prev = hierarchy_field(c, n - 1);
  const auto dprev = arc_derivative(prev.field.vectors, fr.speed);
  double r = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (xn.flagged[i] || prev.flagged[i] || fr.flagged[i]) continue;
    r = std::max(r, (fr.T[i].cross(xn.field[i]) - dprev[i]).norm());
  }
  return r;
}

VectorField flow_field(const SampledCurve& c, const FlowSpec& spec) {
  VectorField sum{std::vector<Vec>(c.size(), Vec::Zero())};
  for (const auto& [n, w] : spec.weights) {
    if (w == 0.0) continue;
    auto f = hierarchy_field(c, n);
    for (std::size_t i = 0; i < c.size(); ++i) sum.vectors[i] += w * f.field[i];
  }
  if (c.dim() == 2)
    for (auto& v : sum.vectors) v.z() = 0.0;
  return sum;
}

FlowResult evolve(const SampledCurve& c0, const FlowSpec& spec) {
  spec.validate(c0.dim());
  const std::size_t n = c0.size();
  int order = 1;
  for (const auto& [k, w] : spec.weights)
    if (w != 0.0) order = std::max(order, k + 1);
  const double L = length(c0);
  const double bound = L / (2.0 * std::numbers::pi) * std::pow(2.5 / spec.dt, 1.0 / order);
  const int kmax = static_cast<int>(std::min<double>(std::floor(bound), static_cast<double>(n) / 3.0));

  FlowResult out;
  out.kept_modes = kmax;
  auto record = [&](int step, const SampledCurve& c) {
    if (!spec.log) return;
    FlowLogEntry e;
    e.step = step;
    e.t = step * spec.dt;
    e.integrals = filament_integrals(c);
    const auto ac = area_centroid(c);
    e.A = ac.A;
    e.J = ac.J;
    out.log.push_back(e);
  };

  SampledCurve cur = c0;
  record(0, cur);
  const double dt = spec.dt;
  auto rhs = [&](const std::vector<Vec>& pts) { return flow_field(SampledCurve(c0.dim(), pts), spec).vectors; };
  auto axpy = [](const std::vector<Vec>& x, double a, const std::vector<Vec>& y) {
    std::vector<Vec> r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) r[i] = x[i] + a * y[i];
    return r;
  };
  for (int step = 1; step <= spec.steps; ++step) {
    const auto& p = cur.points();
    const auto k1 = rhs(p);
    const auto k2 = rhs(axpy(p, 0.5 * dt, k1));
    const auto k3 = rhs(axpy(p, 0.5 * dt, k2));
    const auto k4 = rhs(axpy(p, dt, k3));
    std::vector<Vec> next(n);
    for (std::size_t i = 0; i < n; ++i) next[i] = p[i] + (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    next = spectral::lowpass(std::span<const Vec>(next), kmax);
    for (const auto& q : next)
      if (!q.allFinite() || q.norm() > 1e6) throw Error(ErrorCode::BlowUp, "point norm exceeded 1e6 at step " + std::to_string(step));
    cur = SampledCurve(c0.dim(), std::move(next));
    if (spec.resample_every > 0 && step % spec.resample_every == 0) cur = resample_arclength(cur, n);
    const auto fr = frenet_data(cur);
    for (double k : fr.kappa)
      if (std::abs(k) > 1e4) throw Error(ErrorCode::BlowUp, "curvature exceeded 1e4 at step " + std::to_string(step));
    record(step, cur);
  }
  out.curve = std::move(cur);
  return out;
}

double shape_drift(const SampledCurve& a, const SampledCurve& b, std::size_t samples) {
  const auto ra = resample_arclength(a, samples);
  const auto rb = resample_arclength(b, samples);
  const auto fa = frenet_data(ra);
  const auto fb = frenet_data(rb);
  const bool space = a.dim() == 3;
  auto profile_gap = [&](const std::vector<double>& ka, const std::vector<double>& kb, const std::vector<double>& ta,
                         const std::vector<double>& tb, std::size_t shift) {
    double g = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
      const std::size_t j = (i + shift) % samples;
      g = std::max(g, std::abs(ka[i] - kb[j]));
      if (space) g = std::max(g, std::abs(ta[i] - tb[j]));
    }
    return g;
  };
  std::size_t best_shift = 0;
  double best = 1e300;
  for (std::size_t s = 0; s < samples; ++s) {
    const double g = profile_gap(fa.kappa, fb.kappa, fa.tau, fb.tau, s);
    if (g < best) {
      best = g;
      best_shift = s;
    }
  }
  // sub-sample refinement of the shift
  const double h = spectral::grid_step(samples);
  auto gap_at = [&](double frac) {
    const auto kb = spectral::shifted(std::span<const double>(fb.kappa), frac * h);
    const auto tb = spectral::shifted(std::span<const double>(fb.tau), frac * h);
    return profile_gap(fa.kappa, kb, fa.tau, tb, best_shift);
  };
  double lo = -1.0, hi = 1.0;
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  double g1 = gap_at(x1), g2 = gap_at(x2);
  for (int it = 0; it < 40; ++it) {
    if (g1 < g2) {
      hi = x2;
      x2 = x1;
      g2 = g1;
      x1 = hi - gr * (hi - lo);
      g1 = gap_at(x1);
    } else {
      lo = x1;
      x1 = x2;
      g1 = g2;
      x2 = lo + gr * (hi - lo);
      g2 = gap_at(x2);
    }
  }
  return std::min(best, std::min(g1, g2));
}

double curve_distance(const SampledCurve& a, const SampledCurve& b) {
  const std::size_t n = b.size();
  std::vector<spectral::Interpolant> coord;
  for (int k = 0; k < 3; ++k) {
    std::vector<double> comp(n);
    for (std::size_t i = 0; i < n; ++i) comp[i] = b[i][k];
    coord.emplace_back(comp);
  }
  auto at = [&](double u) { return Vec(coord[0](u), coord[1](u), coord[2](u)); };
  auto vel = [&](double u) { return Vec(coord[0].derivative(u), coord[1].derivative(u), coord[2].derivative(u)); };
  const double h = spectral::grid_step(n);
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    // nearest grid point, then Newton on the squared distance using a first-order model
    std::size_t best = 0;
    double bd = 1e300;
    for (std::size_t j = 0; j < n; ++j) {
      const double d = (b[j] - a[i]).squaredNorm();
      if (d < bd) {
        bd = d;
        best = j;
      }
    }
    double u = h * static_cast<double>(best);
    for (int it = 0; it < 20; ++it) {
      const Vec r = at(u) - a[i];
      const Vec v = vel(u);
      const double du = r.dot(v) / v.squaredNorm();
      u -= du;
      if (std::abs(du) < 1e-14) break;
    }
    worst = std::max(worst, (at(u) - a[i]).norm());
  }
  return worst;
}

}  // namespace bikelab
