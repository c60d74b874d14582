#include "bikelab/smooth.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Dense>

#include "bikelab/parallel.hpp"
#include "bikelab/spectral.hpp"

namespace bikelab {

using std::numbers::pi;
using Mat2 = Eigen::Matrix2d;

namespace {

Vec direction_rhs(const Vec& g, const Vec& e, double ell) { return (g - g.dot(e) * e) / ell; }

// Velocity samples at the RK4 nodes: nodes[j][i] = G'(u_i + j*h/(2m)).
std::vector<std::vector<Vec>> velocity_nodes(const SampledCurve& front, int m) {
  const auto du = parameter_derivative(front, 1);
  const double h = spectral::grid_step(front.size());
  std::vector<std::vector<Vec>> nodes(2 * m);
  nodes[0] = du;
  for (int j = 1; j < 2 * m; ++j) nodes[j] = spectral::shifted(std::span<const Vec>(du), j * h / (2.0 * m));
  return nodes;
}

Mat2 steering_generator(double s, double kappa, double lambda) {
  Mat2 a;
  a << -0.5 / lambda, 0.5 * kappa, -0.5 * kappa, 0.5 / lambda;
  return s * a;
}

// One RK4 step matrix per sample interval for the lifted steering equation.
std::vector<Mat2> riccati_steps(const SampledCurve& front, double lambda) {
  if (front.dim() != 2) throw Error(ErrorCode::DimensionMismatch, "steering equation is planar");
  const auto frame = frenet_data(front);
  const std::size_t n = front.size();
  const double h = spectral::grid_step(n);
  const auto kh = spectral::shifted(std::span<const double>(frame.kappa), 0.5 * h);
  const auto sh = spectral::shifted(std::span<const double>(frame.speed), 0.5 * h);
  const Mat2 id = Mat2::Identity();
  std::vector<Mat2> steps(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = (i + 1) % n;
    const Mat2 a1 = steering_generator(frame.speed[i], frame.kappa[i], lambda);
    const Mat2 a2 = steering_generator(sh[i], kh[i], lambda);
    const Mat2 a3 = steering_generator(frame.speed[j], frame.kappa[j], lambda);
    const Mat2 k1 = a1;
    const Mat2 k2 = a2 * (id + 0.5 * h * k1);
    const Mat2 k3 = a2 * (id + 0.5 * h * k2);
    const Mat2 k4 = a3 * (id + h * k3);
    steps[i] = id + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return steps;
}

// Product of the step matrices, scaled to unit max entry. The determinant is
// accumulated separately: for small lambda the product is numerically rank one.
struct Product {
  Mat2 p;
  double log_det = 0.0;
};

Product ordered_product(const std::vector<Mat2>& steps) {
  Mat2 p = Mat2::Identity();
  double log_det = 0.0;
  for (const auto& s : steps) {
    p = s * p;
    log_det += std::log(s.determinant());
    const double scale = p.cwiseAbs().maxCoeff();
    if (scale > 1e100) {
      p /= scale;
      log_det -= 2.0 * std::log(scale);
    }
  }
  const double scale = p.cwiseAbs().maxCoeff();
  p /= scale;
  log_det -= 2.0 * std::log(scale);
  return {p, log_det};
}

// theta -> psi0 - theta in half-angle coordinates; an involution.
Mat2 steering_reflection(double psi0) {
  Mat2 r;
  const double c = std::cos(0.5 * psi0), s = std::sin(0.5 * psi0);
  r << -c, s, s, c;
  return r;
}

Mat2c to_complex(const Mat2& m) { return m.cast<cplx>(); }

double wrap_angle(double a) { return std::remainder(a, 2.0 * pi); }

// Complex chart on the direction sphere, fixed for one Newton solve.
struct Chart {
  bool swap = false;
  cplx to(const Vec& e) const {
    const Hom h = to_homogeneous(e, 3);
    return swap ? h(1) / h(0) : h(0) / h(1);
  }
  Vec from(cplx z) const {
    Hom h;
    if (swap)
      h << 1.0, z;
    else
      h << z, 1.0;
    return from_homogeneous(h / h.norm(), 3);
  }
};

Vec refine_fixed_direction(const SampledCurve& front, double ell, const Vec& guess, bool backward) {
  Chart chart;
  const Hom h0 = to_homogeneous(guess, 3);
  chart.swap = std::abs(h0(0)) > std::abs(h0(1));
  auto F = [&](cplx z) {
    const Vec img = integrate_direction(front, ell, chart.from(z), 1, backward).final;
    return chart.to(img) - z;
  };
  cplx z = chart.to(guess);
  for (int it = 0; it < 12; ++it) {
    const cplx f = F(z);
    if (std::abs(f) < 1e-15) break;
    const double delta = 1e-6;
    const cplx df = (F(z + delta) - F(z - delta)) / (2.0 * delta);
    const cplx step = f / df;
    z -= step;
    if (std::abs(step) < 1e-15) break;
  }
  return chart.from(z);
}

}  // namespace

double direction_angle(const Vec& e) { return std::atan2(e.y(), e.x()); }

DirectionState integrate_direction(const SampledCurve& front, double ell, const Vec& e0, int substeps,
                                   bool backward) {
  if (!(ell > 0.0)) throw Error(ErrorCode::BadParams, "bicycle length must be positive");
  if (substeps < 1) substeps = 1;
  const std::size_t n = front.size();
  const int m = substeps;
  const double hs = spectral::grid_step(n) / m;
  const auto nodes = velocity_nodes(front, m);
  auto node = [&](std::size_t i, int j) -> const Vec& { return j == 2 * m ? nodes[0][(i + 1) % n] : nodes[j][i]; };

  auto rk4 = [&](Vec e, const Vec& ga, const Vec& gb, const Vec& gc, double step) {
    const Vec k1 = direction_rhs(ga, e, ell);
    const Vec k2 = direction_rhs(gb, e + 0.5 * step * k1, ell);
    const Vec k3 = direction_rhs(gb, e + 0.5 * step * k2, ell);
    const Vec k4 = direction_rhs(gc, e + step * k3, ell);
    e += (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    return Vec(e / e.norm());
  };

  DirectionState out;
  out.ell = ell;
  out.e.resize(n);
  Vec e = e0.normalized();
  if (!backward) {
    out.e[0] = e;
    for (std::size_t i = 0; i < n; ++i) {
      for (int k = 0; k < m; ++k) e = rk4(e, node(i, 2 * k), node(i, 2 * k + 1), node(i, 2 * k + 2), hs);
      if (i + 1 < n) out.e[i + 1] = e;
    }
  } else {
    for (std::size_t i = n; i-- > 0;) {
      for (int k = m; k-- > 0;) e = rk4(e, node(i, 2 * k + 2), node(i, 2 * k + 1), node(i, 2 * k), -hs);
      out.e[i] = e;
    }
  }
  out.final = e;
  return out;
}

Mat2c riccati_product(const SampledCurve& front, double lambda) {
  return to_complex(ordered_product(riccati_steps(front, lambda)).p);
}

SmoothMonodromy monodromy(const SampledCurve& front, double lambda, std::size_t samples) {
  if (!(lambda > 0.0)) throw Error(ErrorCode::BadParams, "lambda must be positive");
  if (samples < 12) samples = 12;
  const int dim = front.dim();
  const auto dirs = sample_directions(dim, samples);
  std::vector<Vec> images(dirs.size()), refined(dirs.size());
  parallel_for(dirs.size(), [&](std::size_t i) {
    images[i] = integrate_direction(front, lambda, dirs[i], 1).final;
    refined[i] = integrate_direction(front, lambda, dirs[i], 2).final;
  });

  SmoothMonodromy out;
  for (std::size_t i = 0; i < dirs.size(); ++i)
    out.richardson_gap = std::max(out.richardson_gap, (images[i] - refined[i]).norm());
  std::optional<MoebiusFit> fit;
  try {
    fit = fit_moebius(dim, dirs, images);
  } catch (const Error& e) {
    // every sample lands on the attracting point; only the Riccati route survives
    if (dim != 2 || e.code() != ErrorCode::FitDegenerate) throw;
  }
  out.fit_residual = std::numeric_limits<double>::quiet_NaN();
  out.route_gap = std::numeric_limits<double>::quiet_NaN();
  if (fit) {
    out.fitted = fit->map;
    out.fit_residual = fit->residual;
    out.map = fit->map;
  }
  if (dim == 2) {
    const auto [p, log_det] = ordered_product(riccati_steps(front, lambda));
    const auto d1 = parameter_derivative(front, 1);
    const Mat2 r = steering_reflection(direction_angle(d1[0]));
    out.riccati_steering = to_complex(p);
    out.riccati = MoebiusMap::planar(to_complex(r * p * r), log_det, false);
    if (fit) out.route_gap = map_distance(*out.riccati, fit->map);
    out.map = *out.riccati;
  }
  out.classification = classify(out.map);
  return out;
}

SteeringSolution periodic_steering(const SampledCurve& front, double lambda, int branch) {
  if (!(lambda > 0.0)) throw Error(ErrorCode::BadParams, "lambda must be positive");
  if (branch < 0 || branch > 1) throw Error(ErrorCode::BadParams, "branch must be 0 or 1");
  const std::size_t n = front.size();
  const auto d1 = parameter_derivative(front, 1);
  SteeringSolution sol;
  sol.ell = lambda;
  sol.branch = branch;
  sol.alpha.resize(n);
  sol.e.resize(n);

  if (front.dim() == 2) {
    const auto steps = riccati_steps(front, lambda);
    const auto [p, log_det] = ordered_product(steps);
    const double det = std::exp(log_det);
    const Mat2 r = steering_reflection(direction_angle(d1[0]));
    sol.classification = classify(MoebiusMap::planar(to_complex(r * p * r), log_det, false));
    const auto kind = sol.classification.kind;
    if (kind == MonodromyKind::Elliptic)
      throw Error(ErrorCode::NoPeriodicSolution, "monodromy is elliptic");
    if (kind == MonodromyKind::Parabolic && branch != 0)
      throw Error(ErrorCode::NoPeriodicSolution, "parabolic monodromy has a single fixed point");

    Eigen::Vector2d v(0.0, 1.0);  // alpha = 0, any start works for the identity
    bool backward = branch == 1;
    if (kind != MonodromyKind::Identity) {
      const double tr = p.trace();
      const double disc = std::max(0.0, tr * tr - 4.0 * det);
      const double mu_big = 0.5 * (tr + std::copysign(std::sqrt(disc), tr));
      const double mu_small = det / mu_big;
      const double mu = branch == 0 ? mu_big : mu_small;
      const Eigen::Vector2d v1(p(0, 1), mu - p(0, 0)), v2(mu - p(1, 1), p(1, 0));
      v = v1.norm() >= v2.norm() ? v1 : v2;
      v.normalize();
      if (kind == MonodromyKind::Parabolic)
        sol.multiplier = 1.0;
      else if (branch == 0)
        sol.multiplier = mu_small / mu_big;
      else
        sol.multiplier = mu_small == 0.0 ? std::numeric_limits<double>::infinity() : mu_big / mu_small;
      if (kind == MonodromyKind::Parabolic) backward = false;
    } else {
      sol.multiplier = 1.0;
      if (branch == 1) v = Eigen::Vector2d(1.0, 0.0);  // alpha = pi
      backward = false;
    }

    auto angle = [](const Eigen::Vector2d& z) { return 2.0 * std::atan2(z(0), z(1)); };
    const double alpha_fixed = angle(v);
    Eigen::Vector2d z = v;
    if (!backward) {
      sol.alpha[0] = alpha_fixed;
      for (std::size_t i = 0; i < n; ++i) {
        z = steps[i] * z;
        z.normalize();
        if (i + 1 < n) sol.alpha[i + 1] = angle(z);
      }
      sol.periodicity_defect = std::abs(wrap_angle(angle(z) - alpha_fixed));
    } else {
      for (std::size_t i = n; i-- > 0;) {
        z = steps[i].inverse() * z;
        z.normalize();
        sol.alpha[i] = angle(z);
      }
      sol.periodicity_defect = std::abs(wrap_angle(sol.alpha[0] - alpha_fixed));
    }
    for (std::size_t i = 0; i < n; ++i) {
      const Vec t = d1[i].normalized();
      const Vec nrm(-t.y(), t.x(), 0.0);
      sol.e[i] = std::cos(sol.alpha[i]) * t - std::sin(sol.alpha[i]) * nrm;
    }
    return sol;
  }

  const auto mono = monodromy(front, lambda);
  sol.classification = mono.classification;
  Vec start;
  bool backward = false;
  if (mono.classification.kind == MonodromyKind::Identity) {
    start = (branch == 0 ? 1.0 : -1.0) * d1[0].normalized();
    sol.multiplier = 1.0;
  } else {
    const auto& fps = mono.classification.fixed_points;
    if (static_cast<std::size_t>(branch) >= fps.size())
      throw Error(ErrorCode::NoPeriodicSolution, "monodromy has no fixed point for this branch");
    sol.multiplier = fps[branch].multiplier;
    backward = std::abs(sol.multiplier) > 1.0;
    start = refine_fixed_direction(front, lambda, fps[branch].direction, backward);
  }
  const auto traj = integrate_direction(front, lambda, start, 1, backward);
  sol.e = traj.e;
  sol.periodicity_defect = (traj.final - start).norm();
  for (std::size_t i = 0; i < n; ++i)
    sol.alpha[i] = std::acos(std::clamp(sol.e[i].dot(d1[i].normalized()), -1.0, 1.0));
  return sol;
}

RearTrack rear_track(const SampledCurve& front, double lambda, int branch) {
  return rear_track(front, periodic_steering(front, lambda, branch));
}

RearTrack rear_track(const SampledCurve& front, const SteeringSolution& st) {
  const std::size_t n = front.size();
  const double h = spectral::grid_step(n);
  const auto d1 = parameter_derivative(front, 1);
  RearTrack rt;
  rt.dim = front.dim();
  rt.points.resize(n);
  rt.coorientation.resize(n);
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    rt.points[i] = front[i] - st.ell * st.e[i];
    g[i] = d1[i].normalized().dot(st.e[i]);
    rt.coorientation[i] = g[i] >= 0.0 ? 1 : -1;
  }
  const auto gu = spectral::derivative(std::span<const Vec>(rt.points), 1);

  const spectral::Interpolant gi(g);
  std::vector<spectral::Interpolant> vel;
  for (int k = 0; k < 3; ++k) {
    std::vector<double> comp(n);
    for (std::size_t i = 0; i < n; ++i) comp[i] = gu[i][k];
    vel.emplace_back(comp);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = (i + 1) % n;
    if (rt.coorientation[i] == rt.coorientation[j]) continue;
    double a = h * static_cast<double>(i), b = a + h;
    double fa = gi(a);
    for (int it = 0; it < 80 && b - a > 1e-16; ++it) {
      const double mid = 0.5 * (a + b);
      const double fm = gi(mid);
      if ((fm >= 0.0) == (fa >= 0.0)) {
        a = mid;
        fa = fm;
      } else {
        b = mid;
      }
    }
    Cusp c;
    c.after_sample = i;
    c.u = 0.5 * (a + b);
    c.speed = Vec(vel[0](c.u), vel[1](c.u), vel[2](c.u)).norm();
    rt.cusps.push_back(c);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(g[i]) < 0.1) continue;
    const Vec rebuilt = rt.points[i] + st.ell * rt.coorientation[i] * gu[i].normalized();
    rt.reconstruction_residual = std::max(rt.reconstruction_residual, (rebuilt - front[i]).norm());
  }
  return rt;
}

SampledCurve bicycle_partner(const SampledCurve& front, double lambda, int branch) {
  return bicycle_partner(front, periodic_steering(front, lambda, branch));
}

SampledCurve bicycle_partner(const SampledCurve& front, const SteeringSolution& st) {
  std::vector<Vec> pts(front.size());
  for (std::size_t i = 0; i < front.size(); ++i) pts[i] = front[i] - 2.0 * st.ell * st.e[i];
  return SampledCurve(front.dim(), std::move(pts), true);
}

CorrespondenceResidual verify_correspondence(const SampledCurve& g1, const SampledCurve& g2, double d) {
  if (g1.size() != g2.size()) throw Error(ErrorCode::InvalidInput, "curves must share the sampling");
  const auto v1 = parameter_derivative(g1, 1);
  const auto v2 = parameter_derivative(g2, 1);
  CorrespondenceResidual r;
  for (std::size_t i = 0; i < g1.size(); ++i) {
    const Vec chord = g1[i] - g2[i];
    r.chord = std::max(r.chord, std::abs(chord.norm() - d));
    const Vec mid = 0.5 * (v1[i] + v2[i]);
    const double mn = mid.norm(), cn = chord.norm();
    if (mn > 1e-12 && cn > 1e-12) r.midpoint_angle = std::max(r.midpoint_angle, std::asin(std::min(1.0, mid.cross(chord).norm() / (mn * cn))));
    r.speed = std::max(r.speed, std::abs(v1[i].norm() - v2[i].norm()) / v1[i].norm());
  }
  return r;
}

SigmaReport sigma_derivatives(const SampledCurve& front, double lambda) {
  if (front.dim() != 2) throw Error(ErrorCode::DimensionMismatch, "sigma derivatives are planar");
  const auto mono = monodromy(front, lambda);
  if (mono.classification.kind != MonodromyKind::Hyperbolic)
    throw Error(ErrorCode::NotHyperbolic, "monodromy is " + to_string(mono.classification.kind));

  SigmaReport rep;
  rep.lambda = lambda;
  rep.trace_invariant = mono.classification.trace_invariant.real();
  const auto frame = frenet_data(front);
  const double h = spectral::grid_step(front.size());
  const auto st = periodic_steering(front, lambda, 0);
  for (std::size_t i = 0; i < front.size(); ++i) rep.integral_cos_alpha += std::cos(st.alpha[i]) * frame.speed[i] * h;
  const double I = rep.integral_cos_alpha;
  rep.sigma_scaled[0] = std::exp(-I / lambda);
  rep.sigma_scaled[1] = std::exp(I / lambda);
  rep.sigma_unscaled[0] = std::exp(-I);
  rep.sigma_unscaled[1] = std::exp(I);
  for (int b = 0; b < 2; ++b) rep.sigma_matrix[b] = mono.classification.fixed_points[b].multiplier.real();

  const auto st1 = periodic_steering(front, lambda, 1);
  const SteeringSolution* sols[2] = {&st, &st1};
  const double delta = 1e-6;
  for (int b = 0; b < 2; ++b) {
    const double th = direction_angle(sols[b]->e[0]);
    auto image = [&](double t) {
      return direction_angle(integrate_direction(front, lambda, Vec(std::cos(t), std::sin(t), 0.0)).final);
    };
    rep.sigma_numeric[b] = wrap_angle(image(th + delta) - image(th - delta)) / (2.0 * delta);
  }

  auto log_gap = [&](const double* s) {
    return std::max(std::abs(std::log(s[0] / rep.sigma_numeric[0])), std::abs(std::log(s[1] / rep.sigma_numeric[1])));
  };
  rep.scaled_matches = log_gap(rep.sigma_scaled) <= log_gap(rep.sigma_unscaled);
  const double* s = rep.scaled_matches ? rep.sigma_scaled : rep.sigma_unscaled;
  rep.identity_gap = std::abs(1.0 / s[0] + 1.0 / s[1] - (rep.trace_invariant - 2.0)) / std::max(1.0, std::abs(rep.trace_invariant));
  rep.product_gap = std::abs(s[0] * s[1] - 1.0);
  return rep;
}

}  // namespace bikelab
