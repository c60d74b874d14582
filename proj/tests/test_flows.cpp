#include <doctest.h>

#include <cmath>

#include "bikelab/curve.hpp"
#include "bikelab/flows.hpp"
#include "bikelab/invariants.hpp"
#include "oracles.hpp"

using namespace bikelab;

namespace {

SampledCurve perturbed(std::uint64_t seed, double amp, std::size_t n, int dim = 2) {
  FourierPerturbation fp;
  fp.seed = seed;
  fp.amplitude = amp;
  fp.dim = dim;
  return make_fourier_perturbed(fp, n);
}

double max_gap(const SampledCurve& a, const SampledCurve& b) {
  double g = 0;
  for (std::size_t i = 0; i < a.size(); ++i) g = std::max(g, (a[i] - b[i]).norm());
  return g;
}

}  // namespace

TEST_SUITE("flows") {

TEST_CASE("named flows and validation") {
  CHECK(FlowSpec::named("filament", 1e-3, 5).weights == FlowSpec::filament(1e-3, 5).weights);
  CHECK(FlowSpec::named("hierarchy_3", 1e-3, 5).weights == FlowSpec::hierarchy(3, 1e-3, 5).weights);
  CHECK_THROWS_AS(FlowSpec::named("hierarchy_x", 1e-3, 5), Error);
  CHECK_THROWS_AS(FlowSpec::named("vortex", 1e-3, 5), Error);
  CHECK_THROWS_AS(FlowSpec::filament(1e-3, 5).validate(2), Error);
  CHECK_NOTHROW(FlowSpec::planar_filament(1e-3, 5).validate(2));
  CHECK_THROWS_AS(FlowSpec::filament(-1.0, 5).validate(3), Error);
}

TEST_CASE("hierarchy fields of circles") {
  const auto c = embed3d(make_circle(1.0, 128));
  const auto fr = frenet_data(c);
  const auto x0 = hierarchy_field(c, 0).field;
  const auto x1 = hierarchy_field(c, 1).field;
  for (std::size_t i = 0; i < c.size(); ++i) {
    CHECK((x0[i] + fr.T[i]).norm() < 1e-12);
    CHECK((x1[i] - Vec(0, 0, 1)).norm() < 1e-10);
  }
  const auto c2 = embed3d(make_circle(2.0, 128));
  const auto f2 = frenet_data(c2);
  const auto x2 = hierarchy_field(c2, 2).field;
  for (std::size_t i = 0; i < c2.size(); ++i) CHECK((x2[i] - f2.T[i] / 8.0).norm() < 1e-10);
}

TEST_CASE("torus knot X2, X3 against closed-form Frenet data") {
  const oracle::TorusKnot k{2, 3, 2.0, 0.5};
  const std::size_t n = 2048;
  const auto c = make_torus_knot(2, 3, 2.0, 0.5, n);
  const auto x2 = hierarchy_field(c, 2).field;
  const auto x3 = hierarchy_field(c, 3).field;
  double g2 = 0, g3 = 0;
  for (std::size_t i = 0; i < n; i += 8) {
    const double t = 2 * oracle::pi * i / n;
    g2 = std::max(g2, (x2[i] - k.X2(t)).norm());
    g3 = std::max(g3, (x3[i] - k.X3(t)).norm());
  }
  CHECK(g2 < 1e-3);
  CHECK(g3 < 1e-3);
}

TEST_CASE("recursion T x X_n = X_(n-1)'") {
  const auto circle = embed3d(make_circle(1.5, 64));
  for (int n = 1; n <= 3; ++n) CHECK(recursion_check(circle, n) < 1e-10);

  for (int n = 2; n <= 3; ++n) {
    double prev = recursion_check(make_torus_knot(2, 3, 2.0, 0.5, 256), n);
    for (std::size_t N : {512u, 1024u}) {
      const double r = recursion_check(make_torus_knot(2, 3, 2.0, 0.5, N), n);
      if (prev > 1e-6) CHECK(prev / r >= 3.5);
      prev = r;
    }
    CHECK(prev < 1e-3);
  }
  CHECK_THROWS_AS(recursion_check(make_circle(1.0, 64), 2), Error);
}

TEST_CASE("unit circle under the filament flow translates along its axis") {
  auto spec = FlowSpec::filament(1e-3, 250);
  const auto c = embed3d(make_circle(1.0, 128));
  const auto r = evolve(c, spec);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const Vec p = r.curve[i];
    CHECK(std::abs(p.z() - 0.25) < 1e-6);
    CHECK(std::abs(p.head<2>().norm() - 1.0) < 1e-6);
  }
}

TEST_CASE("circle under the planar filament flow keeps its point set") {
  const auto c = make_circle(1.0, 128);
  const auto r = evolve(c, FlowSpec::planar_filament(1e-3, 200));
  for (std::size_t i = 0; i < c.size(); ++i) CHECK(std::abs(r.curve[i].norm() - 1.0) < 1e-6);
  CHECK(shape_drift(c, r.curve) < 1e-6);
}

TEST_CASE("planar filament flow conserves F1, F3, F5 and A") {
  // third-order dispersion: dt = 1e-4 keeps the stability cutoff above the curve's content
  const auto c = perturbed(3, 0.1, 256);
  const auto r = evolve(c, FlowSpec::planar_filament(1e-4, 500));
  const auto& first = r.log.front();
  for (const auto& e : r.log) {
    CHECK(std::abs(e.integrals.F1 - first.integrals.F1) < 1e-5 * std::abs(first.integrals.F1));
    CHECK(std::abs(e.integrals.F3 - first.integrals.F3) < 1e-5 * std::abs(first.integrals.F3));
    CHECK(std::abs(e.integrals.F5 - first.integrals.F5) < 1e-5 * std::max(1.0, std::abs(first.integrals.F5)));
    CHECK(std::abs(e.A(0, 1) - first.A(0, 1)) < 1e-6);
  }
}

TEST_CASE("RK4 step error shrinks at least 15x when dt halves") {
  // all three step sizes keep the same N/3 modes, so they integrate one system
  const auto c = perturbed(4, 0.1, 128, 3);
  auto run = [&](double dt, int steps) {
    auto spec = FlowSpec::filament(dt, steps);
    spec.resample_every = 0;
    spec.log = false;
    return evolve(c, spec);
  };
  const double T = 1e-3;
  const auto a = run(T, 1), b = run(T / 2, 2), d = run(T / 4, 4);
  REQUIRE(a.kept_modes == b.kept_modes);
  REQUIRE(b.kept_modes == d.kept_modes);
  CHECK(max_gap(a.curve, b.curve) / max_gap(b.curve, d.curve) >= 15.0);
}

TEST_CASE("flow log records every step and the requested quantities") {
  const auto c = perturbed(5, 0.05, 128, 3);
  const auto r = evolve(c, FlowSpec::filament(1e-3, 20));
  REQUIRE(r.log.size() == 21);
  CHECK(r.log.back().step == 20);
  CHECK(r.log.back().t == doctest::Approx(0.02));
  CHECK(r.kept_modes > 0);
}

TEST_CASE("shape drift and curve distance ignore rigid motions and reparameterization") {
  const auto c = perturbed(6, 0.1, 256, 3);
  const Eigen::Matrix3d R = Eigen::AngleAxisd(0.4, Vec(1, 1, 0).normalized()).toRotationMatrix();
  const auto moved = relabeled(transformed(c, R, Vec(0.3, 0, -1)), 40);
  CHECK(shape_drift(c, moved) < 1e-8);
  CHECK(curve_distance(c, relabeled(c, 40)) < 1e-10);
  CHECK(curve_distance(c, transformed(c, Eigen::Matrix3d::Identity(), Vec(0, 0, 0.1))) == doctest::Approx(0.1));
}

}  // TEST_SUITE
