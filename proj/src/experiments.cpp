#include "bikelab/experiments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "bikelab/discrete.hpp"
#include "bikelab/error.hpp"
#include "bikelab/invariants.hpp"
#include "bikelab/parallel.hpp"
#include "bikelab/smooth.hpp"
#include "bikelab/spectral.hpp"

namespace bikelab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
// Residuals below this are treated as converged when reading off orders.
constexpr double kFloor = 1e-11;

double rel_gap(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(a)); }

// N, N/2, N/4 (coarsest first), all arc-length resampled except the finest.
std::vector<SampledCurve> refinements(const SampledCurve& c, int levels = 3) {
  std::vector<SampledCurve> out;
  for (int k = levels - 1; k >= 1; --k) out.push_back(resample_arclength(c, std::max<std::size_t>(8, c.size() >> k)));
  out.push_back(c);
  return out;
}

// Largest shortfall of the error ratio below `ratio` between consecutive
// refinements, ignoring pairs already at the floor. Spectral derivatives reach
// a roundoff floor that grows with N; once the best level is below 1e-6 that
// level is taken as the floor estimate.
double refinement_deficit(const std::vector<double>& errors, double ratio) {
  const double best = *std::min_element(errors.begin(), errors.end());
  const double floor = std::max(kFloor, best < 1e-6 ? 100.0 * best : 0.0);
  double deficit = 0.0;
  for (std::size_t i = 0; i + 1 < errors.size(); ++i) {
    if (!(errors[i] > floor)) continue;
    const double r = errors[i] / std::max(errors[i + 1], 1e-300);
    deficit = std::max(deficit, ratio - std::min(r, ratio));
  }
  return deficit;
}

Json residual_json(const Residual& r, CheckKind kind) {
  Json j;
  j["name"] = r.name;
  j["value"] = r.value;
  if (kind == CheckKind::Theorem) {
    j["tolerance"] = r.tolerance;
    j["pass"] = std::isfinite(r.value) && r.value <= r.tolerance;
  } else {
    j["error"] = r.error;
  }
  return j;
}

Json class_json(const MonodromyClass& c) {
  Json j;
  j["class"] = to_string(c.kind);
  j["tr2_over_det"] = c.trace_invariant.real();
  return j;
}

VectorField difference_quotient(const SampledCurve& plus, const SampledCurve& minus, double eps) {
  VectorField f{std::vector<Vec>(plus.size())};
  for (std::size_t i = 0; i < plus.size(); ++i) f.vectors[i] = (plus[i] - minus[i]) / (2.0 * eps);
  return f;
}

double max_gap(const VectorField& a, const VectorField& b) {
  double g = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) g = std::max(g, (a[i] - b[i]).norm());
  return g;
}

double max_chord(const SampledCurve& c) {
  double best = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i)
    for (std::size_t j = i + 1; j < c.size(); ++j) best = std::max(best, (c[i] - c[j]).squaredNorm());
  return std::sqrt(best);
}

SampledCurve perturbed(std::uint64_t seed, double amp, std::size_t n, int dim, double radius = 1.0) {
  FourierPerturbation fp;
  fp.seed = seed;
  fp.amplitude = amp;
  fp.radius = radius;
  fp.dim = dim;
  return make_fourier_perturbed(fp, n);
}

}  // namespace

void CheckReport::add(const std::string& residual, double value, double tolerance) {
  residuals.push_back({residual, value, tolerance, kNaN});
}

void CheckReport::add_probe(const std::string& quantity, double value, double error) {
  residuals.push_back({quantity, value, kNaN, error});
}

bool CheckReport::pass() const {
  if (kind == CheckKind::Probe) return true;
  return std::all_of(residuals.begin(), residuals.end(),
                     [](const Residual& r) { return std::isfinite(r.value) && r.value <= r.tolerance; });
}

Json CheckReport::to_json() const {
  Json j;
  j["check"] = name;
  j["kind"] = kind == CheckKind::Theorem ? "theorem" : "probe";
  j["inputs"] = inputs;
  Json rs = Json::array();
  for (const auto& r : residuals) rs.push_back(residual_json(r, kind));
  j["residuals"] = rs;
  if (kind == CheckKind::Theorem)
    j["pass"] = pass();
  else
    j["pass"] = nullptr;
  j["convergence"] = convergence;
  j["details"] = details;
  j["warnings"] = warnings;
  return j;
}

// ---- monodromy ----------------------------------------------------------------

CheckReport check_mono_moebius(const SampledCurve& front, double lambda) {
  CheckReport r;
  r.name = "mono-moebius";
  r.inputs = {{"dim", front.dim()}, {"n", front.size()}, {"lambda", lambda}};
  std::vector<double> fits;
  double route = 0.0;
  for (const auto& c : refinements(front)) {
    const auto m = monodromy(c, lambda);
    fits.push_back(m.fit_residual);
    Json row{{"n", c.size()}, {"fit_residual", m.fit_residual}};
    if (c.dim() == 2) {
      row["route_gap"] = m.route_gap;
      route = m.route_gap;
    }
    r.convergence.push_back(row);
    r.details = class_json(m.classification);
  }
  r.add("fit_residual", fits.back(), 1e-8);
  r.add("refinement_deficit", refinement_deficit(fits, 3.5), 0.0);
  if (front.dim() == 2) r.add("route_gap", route, 1e-7);
  return r;
}

CheckReport check_discrete_moebius(const Polygon& polygon, double d) {
  CheckReport r;
  r.name = "discrete-moebius";
  r.inputs = {{"dim", polygon.dim()}, {"n", polygon.size()}, {"d", d}};
  const auto fit = discrete_monodromy(polygon, d);
  r.details = class_json(fit.classification);
  r.add("fit_residual", fit.residual, 1e-8);
  double closure = 0.0;
  for (const auto& q1 : discrete_fixed_starts(polygon, d))
    closure = std::max(closure, transform_polygon(polygon, q1, d).closure_defect);
  r.details["fixed_point_closure"] = closure;
  r.convergence.push_back({{"n", polygon.size()}, {"fit_residual", fit.residual}});
  return r;
}

CheckReport check_mono_conjugacy(const SampledCurve& g1, double ell, const std::vector<double>& grid, double plant) {
  CheckReport r;
  r.name = "mono-conjugacy";
  r.inputs = {{"dim", g1.dim()}, {"n", g1.size()}, {"l", ell}, {"lambda_grid", grid}, {"plant", plant}};
  std::vector<double> worst_per_level;
  Json table = Json::array();
  for (const auto& c : refinements(g1)) {
    SampledCurve g2 = bicycle_partner(c, ell, 0);
    if (plant != 0.0) g2 = displaced(g2, random_fourier_field(g2, 99), plant);
    double worst = 0.0;
    table = Json::array();
    for (double l : grid) {
      const auto t1 = monodromy(c, l).classification.trace_invariant;
      const auto t2 = monodromy(g2, l).classification.trace_invariant;
      const double gap = std::abs(t1 - t2) / std::max(1.0, std::abs(t1));
      worst = std::max(worst, gap);
      table.push_back({{"lambda", l}, {"tr2_over_det_1", t1.real()}, {"tr2_over_det_2", t2.real()}, {"gap", gap}});
    }
    worst_per_level.push_back(worst);
    r.convergence.push_back({{"n", c.size()}, {"conjugacy_gap", worst}});
  }
  r.details["grid"] = table;
  r.add("conjugacy_gap", worst_per_level.back(), 1e-5);
  return r;
}

// ---- symplectic forms ------------------------------------------------------------

namespace {

struct FormPair {
  double omega_1 = 0.0, omega_2 = 0.0;
  double Omega_1 = 0.0, Omega_2 = 0.0;
};

// g -> g + sign * ell * c T(g), c the coorientation of the original rear track.
SampledCurve rear_to_front(const SampledCurve& gamma, const std::vector<int>& co, double ell, double sign) {
  const auto d = parameter_derivative(gamma, 1);
  std::vector<Vec> pts(gamma.size());
  for (std::size_t i = 0; i < gamma.size(); ++i) pts[i] = gamma[i] + sign * ell * co[i] * d[i].normalized();
  return SampledCurve(gamma.dim(), std::move(pts));
}

}  // namespace

CheckReport check_bisymp(const SampledCurve& front, double ell, int trials, std::uint64_t seed) {
  CheckReport r;
  r.name = "bisymp";
  r.inputs = {{"dim", front.dim()}, {"n", front.size()}, {"l", ell}, {"trials", trials}, {"seed", seed}};
  const auto rt = rear_track(front, ell, 0);
  const bool space = front.dim() == 3;
  const bool cusps = !rt.cusps.empty();
  r.details["cusps"] = rt.cusps.size();
  r.details["route"] = cusps ? "partner-finite-difference" : "rear-track-pushforward";

  double form_gap = 0.0, form_gap_space = 0.0, route_gap = 0.0;
  Json table = Json::array();

  if (!cusps) {
    const SampledCurve gamma(front.dim(), rt.points);
    const auto& co = rt.coorientation;
    const auto dg = parameter_derivative(gamma, 1);
    const auto sp = speed(gamma);
    const SampledCurve plus = rear_to_front(gamma, co, ell, 1.0);
    const SampledCurve minus = rear_to_front(gamma, co, ell, -1.0);
    const double eps = 1e-6;
    auto push = [&](const VectorField& u, double sign) {
      const auto du = spectral::derivative(std::span<const Vec>(u.vectors), 1);
      VectorField out{std::vector<Vec>(u.size())};
      for (std::size_t i = 0; i < u.size(); ++i) {
        const Vec t = dg[i] / sp[i];
        const Vec w = co[i] * (du[i] - t.dot(du[i]) * t) / sp[i];
        out.vectors[i] = u[i] + sign * ell * w;
      }
      return out;
    };
    auto push_fd = [&](const VectorField& u, double sign) {
      return difference_quotient(rear_to_front(displaced(gamma, u, eps), co, ell, sign),
                                 rear_to_front(displaced(gamma, u, -eps), co, ell, sign), eps);
    };
    for (int k = 0; k < trials; ++k) {
      const auto u = random_fourier_field(gamma, seed + 2 * k);
      const auto v = random_fourier_field(gamma, seed + 2 * k + 1);
      const auto up = push(u, 1.0), um = push(u, -1.0), vp = push(v, 1.0), vm = push(v, -1.0);
      route_gap = std::max({route_gap, max_gap(up, push_fd(u, 1.0)), max_gap(um, push_fd(u, -1.0)),
                            max_gap(vp, push_fd(v, 1.0)), max_gap(vm, push_fd(v, -1.0))});
      FormPair f;
      f.omega_1 = omega_form(plus, up, vp);
      f.omega_2 = omega_form(minus, um, vm);
      form_gap = std::max(form_gap, rel_gap(f.omega_1, f.omega_2));
      Json row{{"trial", k}, {"omega_plus", f.omega_1}, {"omega_minus", f.omega_2}};
      if (space) {
        f.Omega_1 = Omega_form(plus, up, vp);
        f.Omega_2 = Omega_form(minus, um, vm);
        form_gap_space = std::max(form_gap_space, rel_gap(f.Omega_1, f.Omega_2));
        row["Omega_plus"] = f.Omega_1;
        row["Omega_minus"] = f.Omega_2;
      }
      table.push_back(row);
    }
    r.add("pushforward_formula_vs_fd", route_gap, 1e-6);
  } else {
    // Cusps: the rear track is not an immersed curve, so fields live on the
    // front track and are carried across by differentiating the partner map.
    int mismatched = 0;
    for (const auto& c : rt.cusps) {
      const std::size_t a = c.after_sample, b = (a + 1) % rt.coorientation.size();
      if (rt.coorientation[a] == rt.coorientation[b]) ++mismatched;
    }
    r.details["coorientation_flips_missing"] = mismatched;
    r.add("cusp_sign_bookkeeping", mismatched, 0.0);
    const SampledCurve partner = bicycle_partner(front, ell, 0);
    auto push = [&](const VectorField& u, double eps) {
      return difference_quotient(bicycle_partner(displaced(front, u, eps), ell, 0),
                                 bicycle_partner(displaced(front, u, -eps), ell, 0), eps);
    };
    const double eps = 1e-4;
    for (int k = 0; k < trials; ++k) {
      const auto u = random_fourier_field(front, seed + 2 * k);
      const auto v = random_fourier_field(front, seed + 2 * k + 1);
      const auto u2 = push(u, eps), v2 = push(v, eps);
      if (k == 0) route_gap = max_gap(u2, push(u, 0.5 * eps));
      FormPair f;
      f.omega_1 = omega_form(front, u, v);
      f.omega_2 = omega_form(partner, u2, v2);
      form_gap = std::max(form_gap, rel_gap(f.omega_1, f.omega_2));
      Json row{{"trial", k}, {"omega_1", f.omega_1}, {"omega_2", f.omega_2}};
      if (space) {
        f.Omega_1 = Omega_form(front, u, v);
        f.Omega_2 = Omega_form(partner, u2, v2);
        form_gap_space = std::max(form_gap_space, rel_gap(f.Omega_1, f.Omega_2));
        row["Omega_1"] = f.Omega_1;
        row["Omega_2"] = f.Omega_2;
      }
      table.push_back(row);
    }
    r.details["fd_step_halving_gap"] = route_gap;
  }
  r.details["trials"] = table;
  r.add("omega_gap", form_gap, 1e-5);
  if (space) r.add("Omega_gap", form_gap_space, 1e-5);
  r.convergence.push_back({{"n", front.size()}, {"omega_gap", form_gap}});
  return r;
}

// ---- integrals of the correspondence ---------------------------------------------

CheckReport check_theorem_int(const SampledCurve& g1, double ell) {
  CheckReport r;
  r.name = "theorem-int";
  r.inputs = {{"dim", g1.dim()}, {"n", g1.size()}, {"l", ell}};
  const bool space = g1.dim() == 3;
  const std::vector<int> which = space ? std::vector<int>{0, 1, 2, 3, 4} : std::vector<int>{0, 2, 4};

  std::vector<double> drift_per_level;
  for (const auto& c : refinements(g1)) {
    const auto f1 = filament_integrals(c).values();
    const auto f2 = filament_integrals(bicycle_partner(c, ell, 0)).values();
    double drift = 0.0;
    Json row{{"n", c.size()}};
    for (int k : which) {
      const double d = rel_gap(f1[k], f2[k]);
      drift = std::max(drift, d);
      row["F" + std::to_string(k + 1)] = d;
      if (c.size() == g1.size()) r.details["F" + std::to_string(k + 1)] = {f1[k], f2[k]};
    }
    drift_per_level.push_back(drift);
    r.convergence.push_back(row);
  }
  r.add("integral_drift", drift_per_level.back(), 1e-5);

  // Commutation with one Euler step of the hierarchy field: the
  // correspondence commutes with the flow, so the gap is O(t^2).
  const FlowSpec spec = space ? FlowSpec::filament(1.0, 1) : FlowSpec::planar_filament(1.0, 1);
  const SampledCurve g2 = bicycle_partner(g1, ell, 0);
  const auto x1 = flow_field(g1, spec);
  const auto x2 = flow_field(g2, spec);
  std::vector<double> gaps;
  Json table = Json::array();
  for (double t : {1e-2, 5e-3, 2.5e-3}) {
    const SampledCurve a = bicycle_partner(displaced(g1, x1, t), ell, 0);
    const SampledCurve b = displaced(g2, x2, t);
    const double gap = std::max(curve_distance(a, b), curve_distance(b, a));
    gaps.push_back(gap);
    table.push_back({{"t", t}, {"gap", gap}});
  }
  r.details["commutation"] = table;
  r.add("commutation_order_deficit", refinement_deficit(gaps, 3.5), 0.0);
  return r;
}

CheckReport check_other_integrals(const SampledCurve& g1, double ell) {
  CheckReport r;
  r.name = "other-integrals";
  r.inputs = {{"dim", g1.dim()}, {"n", g1.size()}, {"l", ell}};
  std::vector<double> gaps;
  for (const auto& c : refinements(g1)) {
    const auto a1 = area_centroid(c);
    const auto a2 = area_centroid(bicycle_partner(c, ell, 0));
    const double ga = (a1.A - a2.A).cwiseAbs().maxCoeff() / std::max(1.0, a1.A.cwiseAbs().maxCoeff());
    const double gj = (a1.J - a2.J).cwiseAbs().maxCoeff() / std::max(1.0, a1.J.cwiseAbs().maxCoeff());
    gaps.push_back(std::max(ga, gj));
    r.convergence.push_back({{"n", c.size()}, {"A_gap", ga}, {"J_gap", gj}});
    if (c.size() == g1.size()) {
      Json A = Json::array();
      for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
          if (c.dim() == 3 || j < 2) A.push_back({{"i", i + 1}, {"j", j + 1}, {"G1", a1.A(i, j)}, {"G2", a2.A(i, j)}});
      r.details["A"] = A;
      r.details["J"] = {vec_to_json(a1.J, c.dim()), vec_to_json(a2.J, c.dim())};
      r.add("A_gap", ga, 1e-6);
      r.add("J_gap", gj, 1e-6);
    }
  }
  return r;
}

CheckReport check_bianchi(const SampledCurve& g1, double ell, double lambda) {
  CheckReport r;
  r.name = "bianchi";
  r.inputs = {{"dim", g1.dim()}, {"n", g1.size()}, {"l", ell}, {"lambda", lambda}};
  std::vector<double> best_per_level;
  Json table = Json::array();
  int closing = 0;
  for (const auto& c : refinements(g1)) {
    const SampledCurve g2 = bicycle_partner(c, ell, 0);
    const SampledCurve g3 = bicycle_partner(c, lambda, 0);
    double best = std::numeric_limits<double>::infinity();
    table = Json::array();
    closing = 0;
    for (int branch = 0; branch < 2; ++branch) {
      Json row{{"branch", branch}};
      try {
        const SampledCurve g4 = bicycle_partner(g2, lambda, branch);
        const auto res = verify_correspondence(g3, g4, 2.0 * ell);
        row["chord"] = res.chord;
        row["midpoint_angle"] = res.midpoint_angle;
        row["speed"] = res.speed;
        row["residual"] = res.max();
        row["closes"] = res.max() < 1e-4;
        if (res.max() < 1e-4) ++closing;
        best = std::min(best, res.max());
      } catch (const Error& e) {
        row["error"] = e.what();
      }
      table.push_back(row);
    }
    best_per_level.push_back(best);
    r.convergence.push_back({{"n", c.size()}, {"closing_residual", best}});
  }
  r.details["branches"] = table;
  r.details["closing_branches"] = closing;
  r.add("closing_residual", best_per_level.back(), 1e-4);
  r.add("closing_branch_count_error", std::abs(closing - 1), 0.0);
  return r;
}

// ---- Zindler curves -----------------------------------------------------------------

namespace {

struct ZindlerFit {
  double shift = 0.0;  ///< arc length
  double residual = 0.0;
  CorrespondenceResidual parts;
};

ZindlerFit best_self_shift(const SampledCurve& g, double d) {
  const double L = length(g);
  const double scale = 2.0 * std::numbers::pi / L;
  auto res = [&](double c) { return verify_correspondence(g, shift_parameter(g, c * scale), d); };
  auto f = [&](double c) { return res(c).max(); };
  const int coarse = 64;
  int best = 1;
  double fb = f(L / coarse);
  for (int j = 2; j < coarse; ++j) {
    const double v = f(L * j / coarse);
    if (v < fb) {
      fb = v;
      best = j;
    }
  }
  double lo = L * (best - 1) / coarse, hi = L * (best + 1) / coarse;
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 80 && hi - lo > 1e-13 * L; ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = f(x2);
    }
  }
  ZindlerFit z;
  z.shift = f1 < f2 ? x1 : x2;
  z.parts = res(z.shift);
  z.residual = z.parts.max();
  return z;
}

}  // namespace

CheckReport check_zindler(const SampledCurve& g, double d) {
  CheckReport r;
  r.name = "zindler";
  r.inputs = {{"dim", g.dim()}, {"n", g.size()}, {"d", d}};
  if (!(d > 0.0)) throw Error(ErrorCode::BadParams, "chord length must be positive");
  if (d >= max_chord(g) * (1.0 - 1e-12)) throw Error(ErrorCode::NotApplicable, "chord length exceeds the curve's diameter");
  const SampledCurve a = resample_arclength(g, g.size());
  const auto z = best_self_shift(a, d);
  r.details["shift"] = z.shift;
  r.details["length"] = length(a);
  r.details["chord"] = z.parts.chord;
  r.details["midpoint_angle"] = z.parts.midpoint_angle;
  r.details["speed"] = z.parts.speed;
  r.details["zindler"] = z.residual < 1e-5;
  r.add("self_correspondence", z.residual, 1e-5);
  r.convergence.push_back({{"n", a.size()}, {"self_correspondence", z.residual}});
  return r;
}

CheckReport check_zflow(const SampledCurve& g, double d, const FlowSpec& spec) {
  CheckReport r;
  r.name = "zflow";
  const double t_end = spec.dt * spec.steps;
  r.inputs = {{"dim", g.dim()}, {"n", g.size()}, {"d", d}, {"dt", spec.dt}, {"steps", spec.steps}};
  const auto before = check_zindler(g, d);
  r.details["initial_residual"] = before.residuals.front().value;
  // Re-certify at quarter intervals to show how the residual grows with t.
  const int parts = 4;
  FlowSpec piece = spec;
  piece.steps = std::max(1, spec.steps / parts);
  piece.log = false;
  SampledCurve cur = g;
  Json table = Json::array();
  double last = 0.0;
  for (int k = 1; k <= parts; ++k) {
    cur = evolve(cur, piece).curve;
    const auto z = check_zindler(cur, d);
    last = z.residuals.front().value;
    table.push_back({{"t", piece.dt * piece.steps * k}, {"self_correspondence", last}, {"shift", z.details["shift"]}});
  }
  r.details["t_end"] = t_end;
  r.details["table"] = table;
  r.add("self_correspondence_after_flow", last, 1e-4);
  return r;
}

// ---- Lemma on F_a and J_a -------------------------------------------------------

namespace {

double F_a(const SampledCurve& c, const Vec& a) {
  const auto d = parameter_derivative(c, 1);
  double s = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) s += c[i].cross(d[i]).dot(a);
  return 0.5 * s * spectral::grid_step(c.size());
}

double J_a(const SampledCurve& c, const Vec& a) {
  const auto d = parameter_derivative(c, 1);
  double s = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) s += c[i].dot(d[i]) * c[i].dot(a);
  return -s * spectral::grid_step(c.size());
}

}  // namespace

CheckReport check_lemma_proj(const SampledCurve& g, const Vec& a, int trials, std::uint64_t seed) {
  if (g.dim() != 3) throw Error(ErrorCode::DimensionMismatch, "the lemma is stated in R^3");
  CheckReport r;
  r.name = "lemma-proj";
  r.inputs = {{"n", g.size()}, {"a", vec_to_json(a, 3)}, {"trials", trials}, {"seed", seed}};
  const auto ca = constant_field(g, a);
  VectorField gxa{std::vector<Vec>(g.size())};
  for (std::size_t i = 0; i < g.size(); ++i) gxa.vectors[i] = g[i].cross(a);

  double gaps[4] = {0, 0, 0, 0};
  const double eps = 1e-4;
  Json table = Json::array();
  std::vector<double> fd_errors(3, 0.0);
  const double eps_list[3] = {1e-2, 5e-3, 2.5e-3};
  for (int k = 0; k < trials; ++k) {
    const auto v = random_fourier_field(g, seed + k);
    const double ia_Omega = Omega_form(g, ca, v);
    const double dFa = (F_a(displaced(g, v, eps), a) - F_a(displaced(g, v, -eps), a)) / (2.0 * eps);
    const double igxa_omega = omega_form(g, gxa, v);
    const double igxa_Omega = Omega_form(g, gxa, v);
    const double dJa = (J_a(displaced(g, v, eps), a) - J_a(displaced(g, v, -eps), a)) / (2.0 * eps);
    gaps[0] = std::max(gaps[0], rel_gap(ia_Omega, dFa));
    gaps[1] = std::max(gaps[1], rel_gap(dFa, igxa_omega));
    gaps[2] = std::max(gaps[2], rel_gap(ia_Omega, igxa_omega));
    gaps[3] = std::max(gaps[3], rel_gap(igxa_Omega, dJa));
    for (int e = 0; e < 3; ++e) {
      const double h = eps_list[e];
      const double fd = (J_a(displaced(g, v, h), a) - J_a(displaced(g, v, -h), a)) / (2.0 * h);
      fd_errors[e] = std::max(fd_errors[e], std::abs(fd - igxa_Omega));
    }
    table.push_back({{"trial", k},
                     {"i_a_Omega", ia_Omega},
                     {"dF_a", dFa},
                     {"i_Gxa_omega", igxa_omega},
                     {"i_Gxa_Omega", igxa_Omega},
                     {"dJ_a", dJa}});
  }
  for (int e = 0; e < 3; ++e) r.convergence.push_back({{"eps", eps_list[e]}, {"dJ_a_fd_error", fd_errors[e]}});
  r.details["trials"] = table;
  r.add("i_a_Omega_vs_dF_a", gaps[0], 1e-5);
  r.add("dF_a_vs_i_Gxa_omega", gaps[1], 1e-5);
  r.add("i_a_Omega_vs_i_Gxa_omega", gaps[2], 1e-5);
  r.add("i_Gxa_Omega_vs_dJ_a", gaps[3], 1e-5);
  r.add("fd_order_deficit", refinement_deficit(fd_errors, 3.5), 0.0);
  return r;
}

// ---- sigma and recursion ---------------------------------------------------------

CheckReport check_sigma(const SampledCurve& front, double lambda) {
  CheckReport r;
  r.name = "sigma";
  r.inputs = {{"dim", front.dim()}, {"n", front.size()}, {"lambda", lambda}};
  const auto s = sigma_derivatives(front, lambda);
  r.details["integral_cos_alpha"] = s.integral_cos_alpha;
  r.details["sigma_scaled"] = {s.sigma_scaled[0], s.sigma_scaled[1]};
  r.details["sigma_unscaled"] = {s.sigma_unscaled[0], s.sigma_unscaled[1]};
  r.details["sigma_numeric"] = {s.sigma_numeric[0], s.sigma_numeric[1]};
  r.details["sigma_matrix"] = {s.sigma_matrix[0], s.sigma_matrix[1]};
  r.details["normalization"] = s.scaled_matches ? "exp(-+ int cos(alpha) dx / lambda)" : "exp(-+ int cos(alpha) dx)";
  r.details["tr2_over_det"] = s.trace_invariant;
  const double* chosen = s.scaled_matches ? s.sigma_scaled : s.sigma_unscaled;
  double formula_gap = 0.0;
  for (int k = 0; k < 2; ++k)
    formula_gap = std::max(formula_gap, std::abs(chosen[k] - s.sigma_numeric[k]) / std::max(chosen[k], s.sigma_numeric[k]));
  const double sum_gap = std::abs(s.sigma_matrix[0] + s.sigma_matrix[1] + 2.0 - s.trace_invariant) /
                         std::max(1.0, s.trace_invariant);
  r.add("formula_vs_numeric", formula_gap, 1e-5);
  r.add("reciprocal_identity", s.identity_gap, 1e-6);
  r.add("product", s.product_gap, 1e-8);
  r.add("trace_vs_sigma_sum", sum_gap, 1e-6);
  return r;
}

CheckReport check_recursion(const SampledCurve& g) {
  CheckReport r;
  r.name = "recursion";
  r.inputs = {{"n", g.size()}};
  std::vector<std::vector<double>> res(3);
  for (const auto& c : refinements(g)) {
    Json row{{"n", c.size()}};
    for (int n = 1; n <= 3; ++n) {
      const double v = recursion_check(c, n);
      res[n - 1].push_back(v);
      row["X" + std::to_string(n)] = v;
    }
    r.convergence.push_back(row);
  }
  double deficit = 0.0;
  for (int n = 1; n <= 3; ++n) {
    r.add("recursion_X" + std::to_string(n), res[n - 1].back(), 1e-3);
    deficit = std::max(deficit, refinement_deficit(res[n - 1], 3.5));
  }
  r.add("refinement_deficit", deficit, 0.0);
  return r;
}

// ---- probes -----------------------------------------------------------------------

namespace {

using Functional = std::function<std::vector<double>(const SampledCurve&)>;

// Gradient densities g with dF(v) = int g . v dt, by central differences on
// single sample coordinates.
std::vector<std::vector<Vec>> gradients(const SampledCurve& c, const Functional& f, std::size_t count, double eps) {
  const std::size_t n = c.size();
  const double h = spectral::grid_step(n);
  std::vector<std::vector<Vec>> g(count, std::vector<Vec>(n, Vec::Zero()));
  std::vector<std::pair<std::size_t, int>> jobs;
  for (std::size_t i = 0; i < n; ++i)
    for (int k = 0; k < c.dim(); ++k) jobs.push_back({i, k});
  std::vector<std::vector<double>> diff(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t j) {
    auto pts = c.points();
    pts[jobs[j].first][jobs[j].second] += eps;
    const auto fp = f(SampledCurve(c.dim(), pts));
    pts[jobs[j].first][jobs[j].second] -= 2.0 * eps;
    const auto fm = f(SampledCurve(c.dim(), pts));
    diff[j].resize(count);
    for (std::size_t q = 0; q < count; ++q) diff[j][q] = (fp[q] - fm[q]) / (2.0 * eps * h);
  });
  for (std::size_t j = 0; j < jobs.size(); ++j)
    for (std::size_t q = 0; q < count; ++q) g[q][jobs[j].first][jobs[j].second] = diff[j][q];
  return g;
}

// Hamiltonian field of a gradient density: omega in 2D (X' = g), Omega in 3D
// (G' x X = g).
std::vector<Vec> hamiltonian_field(const SampledCurve& c, const std::vector<Vec>& g) {
  const std::size_t n = c.size();
  std::vector<Vec> x(n, Vec::Zero());
  if (c.dim() == 2) {
    for (int k = 0; k < 2; ++k) {
      std::vector<double> comp(n);
      for (std::size_t i = 0; i < n; ++i) comp[i] = g[i][k];
      const auto anti = spectral::periodic_antiderivative(std::span<const double>(comp));
      for (std::size_t i = 0; i < n; ++i) x[i][k] = anti[i];
    }
  } else {
    const auto d = parameter_derivative(c, 1);
    // the tangential part of a sampled gradient is discretization noise for a
    // reparametrization-invariant functional
    for (std::size_t i = 0; i < n; ++i) {
      const Vec t = d[i].normalized();
      const Vec normal = g[i] - g[i].dot(t) * t;
      x[i] = normal.cross(d[i]) / d[i].squaredNorm();
    }
  }
  return x;
}

std::vector<Vec> centered(std::vector<Vec> g) {
  Vec mean = Vec::Zero();
  for (const auto& v : g) mean += v;
  mean /= static_cast<double>(g.size());
  for (auto& v : g) v -= mean;
  return g;
}

double bracket(const SampledCurve& c, const std::vector<Vec>& gf, const std::vector<Vec>& gg) {
  // omega lives on curves modulo translations: gradients there have zero mean
  const bool planar = c.dim() == 2;
  const auto xf = hamiltonian_field(c, planar ? centered(gf) : gf);
  const auto g2 = planar ? centered(gg) : gg;
  double s = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) s += g2[i].dot(xf[i]);
  return s * spectral::grid_step(c.size());
}

// c2 and c4 of int cos(alpha) dx from a fixed five-point stencil.
std::array<double, 2> steering_coefficients(const SampledCurve& c, double h) {
  const double f0 = length(c);
  const double fm2 = cos_alpha_integral(c, -2.0 * h), fm1 = cos_alpha_integral(c, -h);
  const double fp1 = cos_alpha_integral(c, h), fp2 = cos_alpha_integral(c, 2.0 * h);
  const double c2 = (-fm2 + 16.0 * fm1 - 30.0 * f0 + 16.0 * fp1 - fp2) / (24.0 * h * h);
  const double c4 = (fm2 - 4.0 * fm1 + 6.0 * f0 - 4.0 * fp1 + fp2) / (24.0 * h * h * h * h);
  return {c2, c4};
}

struct Regression {
  double slope = 0.0, intercept = 0.0, r2 = 0.0, slope_error = 0.0;
};

Regression regress(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  Eigen::MatrixXd A(n, 2);
  Eigen::VectorXd b(n);
  for (std::size_t i = 0; i < n; ++i) {
    A(i, 0) = x[i];
    A(i, 1) = 1.0;
    b(i) = y[i];
  }
  const Eigen::Vector2d coef = A.colPivHouseholderQr().solve(b);
  const Eigen::VectorXd res = b - A * coef;
  const double mean = b.mean();
  const double ss_tot = (b.array() - mean).square().sum();
  Regression r;
  r.slope = coef(0);
  r.intercept = coef(1);
  r.r2 = ss_tot > 0.0 ? 1.0 - res.squaredNorm() / ss_tot : 1.0;
  if (n > 2) {
    const double s2 = res.squaredNorm() / static_cast<double>(n - 2);
    const Eigen::Matrix2d cov = s2 * (A.transpose() * A).inverse();
    r.slope_error = std::sqrt(std::max(0.0, cov(0, 0)));
  }
  return r;
}

}  // namespace

CheckReport probe_conjecture_commute(const SampledCurve& g) {
  CheckReport r;
  r.name = "probe-commute";
  r.kind = CheckKind::Probe;
  r.inputs = {{"dim", g.dim()}, {"n", g.size()}};
  const bool planar = g.dim() == 2;
  r.details["form"] = planar ? "omega" : "Omega";
  const double h = 0.1;
  const std::vector<double> lambdas{0.5, 0.8};
  Functional f = [&](const SampledCurve& c) {
    const auto F = filament_integrals(c);
    std::vector<double> out{F.F1, F.F3};
    if (planar) {
      const auto cs = steering_coefficients(c, h);
      out.push_back(cs[0]);
      out.push_back(cs[1]);
    } else {
      for (double l : lambdas) out.push_back(std::log(monodromy(c, l).classification.trace_invariant.real()));
    }
    return out;
  };
  const std::vector<std::string> names = planar ? std::vector<std::string>{"F1", "F3", "c2", "c4"}
                                                : std::vector<std::string>{"F1", "F3", "log_tr2_over_det(0.5)", "log_tr2_over_det(0.8)"};
  const std::vector<std::pair<int, int>> pairs{{0, 1}, {2, 3}, {2, 2}, {1, 2}};
  std::vector<std::vector<double>> values;
  const SampledCurve fine = resample_arclength(g, g.size());
  const SampledCurve coarse = resample_arclength(g, g.size() / 2);
  for (const SampledCurve* c : {&coarse, &fine}) {
    const auto grads = gradients(*c, f, names.size(), 1e-6);
    std::vector<double> row;
    for (const auto& [a, b] : pairs) row.push_back(bracket(*c, grads[a], grads[b]));
    values.push_back(row);
    Json jr{{"n", c->size()}};
    for (std::size_t k = 0; k < pairs.size(); ++k) jr["{" + names[pairs[k].first] + "," + names[pairs[k].second] + "}"] = row[k];
    r.convergence.push_back(jr);
  }
  for (std::size_t k = 0; k < pairs.size(); ++k)
    r.add_probe("{" + names[pairs[k].first] + "," + names[pairs[k].second] + "}", values[1][k],
                std::abs(values[1][k] - values[0][k]));
  r.details["calibration_pair"] = "{F1,F3}";
  return r;
}

CheckReport probe_conjecture_depend(int curves, std::uint64_t seed, const std::vector<double>& grid) {
  CheckReport r;
  r.name = "probe-depend";
  r.kind = CheckKind::Probe;
  r.inputs = {{"curves", curves}, {"seed", seed}, {"lambda_grid", grid}};
  std::vector<double> F1(curves), F3(curves), Q(curves), c0(curves), c2(curves), c4(curves);
  Rng rng(seed);
  std::vector<std::pair<double, double>> shape(curves);
  for (auto& s : shape) s = {rng.uniform(0.02, 0.1), rng.uniform(0.8, 1.2)};
  Json table = Json::array();
  for (int k = 0; k < curves; ++k) {
    const SampledCurve c = perturbed(seed + 1 + k, shape[k].first, 256, 2, shape[k].second);
    const auto F = filament_integrals(c);
    const auto sp = cos_alpha_spectrum(c, grid);
    F1[k] = F.F1;
    F3[k] = F.F3;
    Q[k] = planar_quartic_integral(c);
    c0[k] = sp.taylor[0];
    c2[k] = sp.taylor[2];
    c4[k] = sp.c4_extrapolated;
    table.push_back({{"F1", F1[k]}, {"F3", F3[k]}, {"Q", Q[k]}, {"c0", c0[k]}, {"c2", c2[k]}, {"c4", c4[k]}});
  }
  r.details["curves"] = table;
  const std::pair<const char*, Regression> fits[3] = {
      {"c0~F1", regress(F1, c0)}, {"c2~F3", regress(F3, c2)}, {"c4~Q", regress(Q, c4)}};
  for (const auto& [nm, fit] : fits) {
    r.details[nm] = {{"slope", fit.slope}, {"intercept", fit.intercept}, {"r2", fit.r2}};
    r.add_probe(std::string(nm) + " slope", fit.slope, fit.slope_error);
    r.add_probe(std::string(nm) + " r2", fit.r2, kNaN);
  }
  return r;
}

CheckReport probe_circle_identity(double radius, int max_cover) {
  CheckReport r;
  r.name = "circle-identity";
  r.kind = CheckKind::Probe;
  r.inputs = {{"radius", radius}, {"max_cover", max_cover}};
  Json table = Json::array();
  for (int k = 1; k <= max_cover; ++k) {
    const SampledCurve c = repeated(make_circle(radius, 256), k);
    auto dist = [&](double l) { return monodromy(c, l).classification.identity_distance; };
    // scan lambda in (R, 8R) on a log grid
    double best_l = 0.0, best = std::numeric_limits<double>::infinity();
    const int scan = 160;
    for (int j = 1; j <= scan; ++j) {
      const double l = radius * std::pow(8.0, static_cast<double>(j) / scan);
      const double v = dist(l);
      if (v < best) {
        best = v;
        best_l = l;
      }
    }
    // golden refinement in log(lambda) between the neighbouring scan points
    const double step = std::log(8.0) / scan;
    double lo = std::log(best_l) - step, hi = std::min(std::log(best_l) + step, std::log(8.0 * radius));
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int it = 0; it < 50; ++it) {
      const double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
      if (dist(std::exp(x1)) < dist(std::exp(x2)))
        hi = x2;
      else
        lo = x1;
    }
    if (dist(std::exp(0.5 * (lo + hi))) < best) {
      best_l = std::exp(0.5 * (lo + hi));
      best = dist(best_l);
    }
    Json row{{"cover", k}, {"scan_min_distance", best}, {"scan_argmin_lambda", best_l}};
    Json predicted = Json::array();
    // identity when k sqrt(1 - R^2/l^2) is an integer j < k
    for (int j = 1; j < k; ++j) {
      const double q = static_cast<double>(j) / k;
      const double l = radius / std::sqrt(1.0 - q * q);
      const double v = dist(l);
      predicted.push_back({{"lambda", l}, {"identity_distance", v}});
      r.add_probe("cover_" + std::to_string(k) + "_identity_distance_at_" + std::to_string(j) + "/" + std::to_string(k), v, kNaN);
    }
    row["predicted_identity"] = predicted;
    table.push_back(row);
    r.add_probe("cover_" + std::to_string(k) + "_min_identity_distance", best, kNaN);
  }
  r.details["table"] = table;
  return r;
}

CheckReport probe_soliton(const SampledCurve& g, const FlowSpec& spec) {
  CheckReport r;
  r.name = "soliton";
  r.kind = CheckKind::Probe;
  Json w = Json::array();
  for (const auto& [n, c] : spec.weights) w.push_back({{"n", n}, {"weight", c}});
  r.inputs = {{"dim", g.dim()}, {"n", g.size()}, {"weights", w}, {"dt", spec.dt}, {"steps", spec.steps}};
  FlowSpec quiet = spec;
  quiet.log = false;
  const auto out = evolve(g, quiet);
  const double drift = shape_drift(g, out.curve, 512);
  const double coarse = shape_drift(g, out.curve, 256);
  r.add_probe("shape_drift", drift, std::abs(drift - coarse));
  return r;
}

// ---- suites -------------------------------------------------------------------------

std::vector<SuiteEntry> suite(const std::string& which) {
  std::vector<SuiteEntry> s;
  if (which == "theorems") {
    s.push_back({"mono-moebius-2d", [] { return check_mono_moebius(perturbed(1, 0.1, 2048, 2), 0.6); }});
    s.push_back({"mono-moebius-3d", [] { return check_mono_moebius(perturbed(2, 0.1, 2048, 3), 0.6); }});
    s.push_back({"discrete-moebius", [] { return check_discrete_moebius(as_polygon(perturbed(3, 0.1, 200, 3)), 3.0); }});
    s.push_back({"mono-conjugacy", [] {
                   std::vector<double> grid;
                   for (int k = 0; k < 8; ++k) grid.push_back(0.2 + 0.1 * k);
                   return check_mono_conjugacy(perturbed(4, 0.05, 1024, 2), 0.4, grid);
                 }});
    s.push_back({"bisymp-2d", [] { return check_bisymp(perturbed(5, 0.05, 512, 2), 0.3, 7, 50); }});
    s.push_back({"bisymp-3d", [] { return check_bisymp(perturbed(6, 0.05, 512, 3), 0.3, 7, 60); }});
    s.push_back({"bisymp-cusps", [] { return check_bisymp(make_ellipse(2.0, 0.6, 512), 0.8, 6, 70); }});
    s.push_back({"theorem-int-2d", [] { return check_theorem_int(perturbed(7, 0.05, 1024, 2), 0.4); }});
    s.push_back({"theorem-int-3d", [] { return check_theorem_int(perturbed(8, 0.05, 1024, 3), 0.4); }});
    s.push_back({"other-integrals-2d", [] { return check_other_integrals(perturbed(9, 0.05, 1024, 2), 0.4); }});
    s.push_back({"other-integrals-3d", [] { return check_other_integrals(perturbed(10, 0.05, 1024, 3), 0.4); }});
    s.push_back({"bianchi", [] { return check_bianchi(perturbed(11, 0.05, 1024, 2), 0.3, 0.5); }});
    s.push_back({"zindler", [] { return check_zindler(make_circle(5.0, 512), 6.0); }});
    s.push_back({"zflow", [] { return check_zflow(make_circle(5.0, 512), 6.0, FlowSpec::planar_filament(1e-3, 100)); }});
    s.push_back({"lemma-proj", [] { return check_lemma_proj(perturbed(12, 0.1, 512, 3), Vec(0.3, -0.5, 0.8), 5, 120); }});
    s.push_back({"sigma", [] { return check_sigma(perturbed(13, 0.1, 1024, 2), 0.6); }});
    s.push_back({"recursion", [] { return check_recursion(make_torus_knot(2, 3, 2.0, 0.5, 2048)); }});
  } else if (which == "probes") {
    s.push_back({"probe-commute-2d", [] { return probe_conjecture_commute(perturbed(21, 0.05, 64, 2)); }});
    s.push_back({"probe-commute-3d", [] { return probe_conjecture_commute(perturbed(22, 0.05, 128, 3)); }});
    s.push_back({"probe-depend", [] {
                   std::vector<double> grid;
                   for (int k = 1; k <= 8; ++k) grid.push_back(0.1 * k);
                   return probe_conjecture_depend(10, 23, grid);
                 }});
    s.push_back({"circle-identity", [] { return probe_circle_identity(1.0, 3); }});
    s.push_back({"soliton", [] {
                   FlowSpec spec{{{1, 1.0}, {2, 0.5}}, 1e-3, 200};
                   return probe_soliton(embed3d(make_circle(1.0, 256)), spec);
                 }});
  } else {
    throw Error(ErrorCode::BadParams, "suite must be 'theorems' or 'probes'");
  }
  return s;
}

}  // namespace bikelab
