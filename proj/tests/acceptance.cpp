// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "bikelab/curve.hpp"
#include "bikelab/discrete.hpp"
#include "bikelab/experiments.hpp"
#include "bikelab/flows.hpp"
#include "bikelab/invariants.hpp"
#include "bikelab/smooth.hpp"
#include "oracles.hpp"

using namespace bikelab;

namespace {

constexpr double pi = oracle::pi;

struct Outcome {
  bool pass = true;
  std::ostringstream note;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      note << " [failed: " << what << "]";
    }
  }
};

SampledCurve perturbed(std::uint64_t seed, double amp, std::size_t n, int dim = 2) {
  FourierPerturbation fp;
  fp.seed = seed;
  fp.amplitude = amp;
  fp.dim = dim;
  return make_fourier_perturbed(fp, n);
}

double residual(const CheckReport& r, const std::string& name) {
  for (const auto& x : r.residuals)
    if (x.name == name) return x.value;
  return NAN;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void moebius_monodromy(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0;
  bool refines = true;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto r = check_mono_moebius(perturbed(100 + seed, 0.1, 2048, seed % 2 ? 2 : 3), 0.6);
    worst = std::max(worst, residual(r, "fit_residual"));
    refines = refines && residual(r, "refinement_deficit") == 0.0;
  }
  double worst_poly = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto r = check_discrete_moebius(as_polygon(perturbed(200 + seed, 0.1, 200, seed % 2 ? 2 : 3)), 3.0);
    worst_poly = std::max(worst_poly, residual(r, "fit_residual"));
  }
  const double s = seconds_since(t0);
  o.note << "smooth " << worst << ", polygons " << worst_poly << ", " << s << " s";
  o.require(worst < 1e-8, "smooth residual");
  o.require(worst_poly < 1e-8, "polygon residual");
  o.require(refines, "3.5x per doubling");
  o.require(s < 30.0, "runtime");
}

void discrete_steps(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(2024);
  double worst = 0;
  for (int i = 0; i < 10000; ++i) {
    const Vec p1(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    const Vec p2 = p1 + Vec(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    const double d = rng.uniform(0.2, 3.0);
    Vec u;
    do u = Vec(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    while (u.norm() < 0.1 || u.norm() > 1);
    const Vec q1 = p1 + d * u.normalized();
    const Vec q2 = trapezoid_step(p1, p2, q1, d).point;
    worst = std::max({worst, std::abs((p2 - q2).norm() - d), std::abs((q2 - q1).norm() - (p2 - p1).norm()),
                      std::abs((q1 - p1).dot((p2 - p1).cross(q2 - p1))) / std::max(1.0, (p2 - p1).norm() * d)});
  }
  const double s = seconds_since(t0);
  o.note << "worst " << worst << ", " << s << " s";
  o.require(worst < 1e-12, "exactness");
  o.require(s < 1.0, "runtime");
}

void circle_analytics(Outcome& o) {
  const auto F = filament_integrals(make_circle(2.0, 512));
  const double gf = std::max({std::abs(F.F1 - 4 * pi), std::abs(F.F3 - pi), std::abs(F.F5 + pi / 16)});
  double gr = 0;
  for (const auto& p : rear_track(make_circle(5.0, 512), 3.0, 0).points) gr = std::max(gr, std::abs(p.norm() - 4.0));
  const double ga = std::abs(area_centroid(make_circle(2.0, 512)).A(0, 1) - 8 * pi);
  const double gj = (area_centroid(make_circle(1.0, 512, Vec(2, 0, 0))).J - Vec(0, -2 * pi, 0)).norm();
  o.note << "F " << gf << ", rear " << gr << ", A " << ga << ", J " << gj;
  o.require(gf < 1e-6, "F1 F3 F5");
  o.require(gr < 1e-8, "rear radius");
  o.require(ga < 1e-6, "A12");
  o.require(gj < 1e-6, "J");
}

void conjugacy(Outcome& o) {
  std::vector<double> grid;
  for (int k = 0; k < 8; ++k) grid.push_back(0.2 + 0.1 * k);
  double worst = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed)
    worst = std::max(worst, residual(check_mono_conjugacy(perturbed(300 + seed, 0.05, 2048), 0.4, grid), "conjugacy_gap"));
  const bool planted = !check_mono_conjugacy(perturbed(301, 0.05, 1024), 0.4, grid, 0.02).pass();
  o.note << "worst " << worst << ", planted violation " << (planted ? "caught" : "missed");
  o.require(worst < 1e-5, "conjugacy");
  o.require(planted, "negative control");
}

void symplectic(Outcome& o) {
  const auto a = check_bisymp(perturbed(401, 0.05, 512, 2), 0.3, 7, 41);
  const auto b = check_bisymp(perturbed(402, 0.05, 512, 3), 0.3, 7, 42);
  const auto c = check_bisymp(make_ellipse(2.0, 0.6, 512), 0.8, 6, 43);
  const double w = std::max({residual(a, "omega_gap"), residual(b, "omega_gap"), residual(c, "omega_gap")});
  const double W = residual(b, "Omega_gap");
  o.note << "omega " << w << ", Omega " << W << ", cusp bookkeeping " << residual(c, "cusp_sign_bookkeeping");
  o.require(a.pass() && b.pass() && c.pass(), "checks");
  o.require(w < 1e-5 && W < 1e-5, "form gaps");
  o.require(!c.details.empty() && residual(c, "cusp_sign_bookkeeping") == 0.0, "cusp configuration");
}

void integrals(Outcome& o) {
  const auto a = check_theorem_int(perturbed(501, 0.05, 1024, 2), 0.4);
  const auto b = check_theorem_int(perturbed(502, 0.05, 1024, 3), 0.4);
  const double drift = std::max(residual(a, "integral_drift"), residual(b, "integral_drift"));
  o.note << "drift " << drift;
  o.require(drift < 1e-5, "drift");
  o.require(residual(a, "commutation_order_deficit") == 0.0 && residual(b, "commutation_order_deficit") == 0.0,
            "O(t^2) commutation");
}

void other_integrals(Outcome& o) {
  double worst = 0;
  for (int dim : {2, 3}) {
    const auto r = check_other_integrals(perturbed(600 + dim, 0.05, 1024, dim), 0.4);
    worst = std::max({worst, residual(r, "A_gap"), residual(r, "J_gap")});
  }
  o.note << "worst " << worst;
  o.require(worst < 1e-6, "A and J");
}

void bianchi(Outcome& o) {
  double worst = 0;
  bool single = true;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto r = check_bianchi(perturbed(700 + seed, 0.05, 1024), 0.3, 0.5);
    worst = std::max(worst, residual(r, "closing_residual"));
    single = single && residual(r, "closing_branch_count_error") == 0.0;
  }
  o.note << "closing residual " << worst;
  o.require(worst < 1e-4, "closing");
  o.require(single, "exactly one closing branch");
}

void lemma(Outcome& o) {
  const auto r = check_lemma_proj(perturbed(801, 0.1, 512, 3), Vec(0.3, -0.5, 0.8), 5, 81);
  double worst = 0;
  for (const char* n : {"i_a_Omega_vs_dF_a", "dF_a_vs_i_Gxa_omega", "i_a_Omega_vs_i_Gxa_omega", "i_Gxa_Omega_vs_dJ_a"})
    worst = std::max(worst, residual(r, n));
  o.note << "worst " << worst;
  o.require(worst < 1e-5, "identities");
  o.require(residual(r, "fd_order_deficit") == 0.0, "2nd-order eps convergence");
}

void filament_flow(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto circle = evolve(embed3d(make_circle(1.0, 256)), FlowSpec::filament(1e-3, 1000));
  double gc = 0;
  for (const auto& p : circle.curve.points())
    gc = std::max({gc, std::abs(p.z() - 1.0), std::abs(p.head<2>().norm() - 1.0)});

  const auto r = evolve(perturbed(901, 0.1, 1024, 3), FlowSpec::filament(1e-3, 1000));
  const auto& first = r.log.front();
  double drift = 0;
  for (const auto& e : r.log) {
    const auto a = e.integrals.values(), b = first.integrals.values();
    for (int i = 0; i < 5; ++i) drift = std::max(drift, std::abs(a[i] - b[i]) / std::max(1.0, std::abs(b[i])));
    drift = std::max(drift, (e.A - first.A).norm());
  }
  const double s = seconds_since(t0);
  o.note << "circle " << gc << ", drift " << drift << ", " << s << " s";
  o.require(gc < 1e-6, "circle translation");
  o.require(drift < 1e-5, "conservation");
  o.require(s < 60.0, "runtime");
}

void recursion(Outcome& o) {
  const auto r = check_recursion(make_torus_knot(2, 3, 2.0, 0.5, 2048));
  const double worst = std::max({residual(r, "recursion_X1"), residual(r, "recursion_X2"), residual(r, "recursion_X3")});
  o.note << "worst " << worst;
  o.require(worst < 1e-3, "residual");
  o.require(residual(r, "refinement_deficit") == 0.0, "2nd-order convergence");
}

void expansion(Outcome& o) {
  const auto circ = make_circle(2.0, 512);
  double gi = 0;
  for (double l = 0.05; l <= 0.8 + 1e-12; l += 0.05)
    gi = std::max(gi, std::abs(cos_alpha_integral(circ, l) - 4 * pi * std::sqrt(1 - l * l / 4)));

  double g0 = 0, g2 = 0, go = 0;
  const std::vector<std::pair<double, double>> axes{{1.0, 0.8}, {1.2, 1.0}, {1.0, 0.7}, {1.5, 1.1}, {0.9, 1.0}};
  for (const auto& [a, b] : axes) {
    auto speed = [a = a, b = b](double t) { return std::sqrt(a * a * std::sin(t) * std::sin(t) + b * b * std::cos(t) * std::cos(t)); };
    auto kappa = [a = a, b = b, speed](double t) { return a * b / std::pow(speed(t), 3); };
    const auto ref = oracle::steering_series(speed, kappa, 4096);
    const auto c = make_ellipse(a, b, 1024);
    const auto F = filament_integrals(c);
    const auto sp = cos_alpha_spectrum(c, {0.05, 0.1, 0.15, 0.2});
    g0 = std::max(g0, std::abs(sp.taylor[0] - F.F1) / F.F1);
    g2 = std::max(g2, std::abs(sp.taylor[2] + F.F3 / 2) / (F.F3 / 2));
    go = std::max(go, std::abs(ref.c2 + F.F3 / 2) / (F.F3 / 2));
  }
  o.note << "I(lambda) " << gi << ", c0 " << g0 << ", c2 " << g2 << ", oracle constant " << go;
  o.require(gi < 1e-6, "circle I(lambda)");
  o.require(g0 < 1e-13, "c0 = F1");
  o.require(g2 < 1e-3, "c2 = -F3/2");
  o.require(go < 1e-6, "perturbative oracle");
}

void sigma(Outcome& o) {
  double recip = 0, prod = 0;
  bool matched = true;
  auto take = [&](const SampledCurve& c, double l) {
    const auto s = sigma_derivatives(c, l);
    recip = std::max(recip, std::abs(1 / s.sigma_scaled[0] + 1 / s.sigma_scaled[1] - (s.trace_invariant - 2)) /
                                std::max(1.0, s.trace_invariant));
    prod = std::max(prod, std::abs(s.sigma_scaled[0] * s.sigma_scaled[1] - 1.0));
    matched = matched && s.scaled_matches;
  };
  take(make_circle(2.0, 512), 1.0);
  for (std::uint64_t seed = 1; seed <= 3; ++seed) take(perturbed(1300 + seed, 0.1, 1024), 0.6);
  o.note << "reciprocal " << recip << ", product " << prod;
  o.require(recip < 1e-6, "reciprocal identity");
  o.require(prod < 1e-8, "unimodularity");
  o.require(matched, "normalization");
}

void zindler(Outcome& o) {
  const auto z = check_zindler(make_circle(5.0, 512), 6.0);
  const double gap = std::abs(z.details["shift"].get<double>() - 2 * 5.0 * std::asin(3.0 / 5.0));
  const bool rejected = !check_zindler(make_ellipse(2.0, 1.0, 512), 1.5).pass();
  const auto f = check_zflow(make_circle(5.0, 512), 6.0, FlowSpec::planar_filament(1e-3, 100));
  o.note << "shift gap " << gap << ", after flow " << residual(f, "self_correspondence_after_flow");
  o.require(z.pass() && gap < 1e-5, "circle");
  o.require(rejected, "ellipse rejected");
  o.require(f.pass(), "re-certification");
}

void probes(Outcome& o) {
  bool bars = true, silent = true;
  double cal = 0;
  for (const auto& c : {perturbed(1501, 0.05, 64, 2), perturbed(1502, 0.05, 128, 3)}) {
    const auto r = probe_conjecture_commute(c);
    cal = std::max(cal, std::abs(residual(r, "{F1,F3}")));
    for (const auto& x : r.residuals) bars = bars && std::isfinite(x.error);
    silent = silent && r.to_json()["pass"].is_null();
  }
  std::vector<double> grid;
  for (int k = 1; k <= 8; ++k) grid.push_back(0.1 * k);
  const auto d = probe_conjecture_depend(10, 1503, grid);
  silent = silent && d.to_json()["pass"].is_null();
  o.note << "{F1,F3} " << cal << ", c2~F3 slope " << residual(d, "c2~F3 slope") << " r2 " << residual(d, "c2~F3 r2");
  o.require(bars, "error bars");
  o.require(cal < 1e-4, "calibration bracket");
  o.require(silent, "no verdict");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"Moebius monodromy", moebius_monodromy},
      {"discrete step exactness", discrete_steps},
      {"circle analytics", circle_analytics},
      {"monodromy conjugacy", conjugacy},
      {"symplectic forms", symplectic},
      {"filament integrals", integrals},
      {"A and J", other_integrals},
      {"Bianchi permutability", bianchi},
      {"contraction identities", lemma},
      {"filament flow", filament_flow},
      {"hierarchy recursion", recursion},
      {"steering expansion", expansion},
      {"sigma identity", sigma},
      {"Zindler curves", zindler},
      {"conjecture probes", probes},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    o.note.precision(3);
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.note << " [exception: " << e.what() << "]";
    }
    if (!o.pass) ++failed;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.note.str().c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
