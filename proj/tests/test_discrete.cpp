#include <doctest.h>

#include <cmath>

#include "bikelab/curve.hpp"
#include "bikelab/discrete.hpp"
#include "bikelab/moebius.hpp"
#include "oracles.hpp"

using namespace bikelab;

namespace {

Polygon regular_polygon(int n, double radius = 1.0, int dim = 2) {
  std::vector<Vec> v;
  for (int k = 0; k < n; ++k) {
    const double a = 2 * oracle::pi * k / n;
    v.emplace_back(radius * std::cos(a), radius * std::sin(a), 0.0);
  }
  return Polygon(dim, v, true);
}

Vec random_unit(Rng& rng, int dim) {
  for (;;) {
    Vec v(rng.uniform(-1, 1), rng.uniform(-1, 1), dim == 3 ? rng.uniform(-1, 1) : 0.0);
    if (v.norm() > 0.1 && v.norm() < 1) return v.normalized();
  }
}

}  // namespace

TEST_SUITE("discrete") {

TEST_CASE("trapezoid step: hand-evaluated cases") {
  const Vec q2 = trapezoid_step(Vec(0, 0, 0), Vec(1, 0, 0), Vec(0, 1, 0), 1.0).point;
  CHECK((q2 - Vec(0, 0, 0)).norm() < 1e-15);
  const auto s = trapezoid_step(Vec(0, 0, 0), Vec(1, 0, 0), Vec(2, 0, 0), 2.0);
  CHECK((s.point - Vec(3, 0, 0)).norm() < 1e-15);
  CHECK(s.near_collinear);
}

TEST_CASE("trapezoid step rejects inconsistent input") {
  CHECK_THROWS_AS(trapezoid_step(Vec(0, 0, 0), Vec(1, 0, 0), Vec(0, 2, 0), 1.0), Error);
  CHECK_THROWS_AS(trapezoid_step(Vec(0, 0, 0), Vec(1, 0, 0), Vec(1, 0, 0), 1.0), Error);
}

TEST_CASE("random 3D steps keep the segment length, edge length and plane") {
  Rng rng(42);
  for (int trial = 0; trial < 200; ++trial) {
    const Vec p1(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    const Vec p2 = p1 + Vec(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    const double d = rng.uniform(0.2, 3.0);
    const Vec q1 = p1 + d * random_unit(rng, 3);
    const Vec q2 = trapezoid_step(p1, p2, q1, d).point;
    CHECK(std::abs((p2 - q2).norm() - d) < 1e-12);
    CHECK(std::abs((q2 - q1).norm() - (p2 - p1).norm()) < 1e-12);
    const double triple = (q1 - p1).dot((p2 - p1).cross(q2 - p1));
    CHECK(std::abs(triple) < 1e-10);
  }
}

TEST_CASE("square: every transformed edge keeps its length") {
  const Polygon sq(2, {Vec(0, 0, 0), Vec(1, 0, 0), Vec(1, 1, 0), Vec(0, 1, 0)}, true);
  for (const Vec& q1 : {Vec(0, -1, 0), Vec(std::sqrt(0.5), std::sqrt(0.5), 0)}) {
    const auto t = transform_polygon(sq, q1, 1.0);
    const auto& q = t.polygon;
    for (std::size_t k = 0; k < 4; ++k) {
      const Vec next = k + 1 < 4 ? q[k + 1] : t.end_point;
      CHECK(std::abs((next - q[k]).norm() - (sq[(k + 1) % 4] - sq[k]).norm()) < 1e-12);
    }
  }
}

TEST_CASE("regular hexagon closes from a fixed point") {
  const auto hex = regular_polygon(6);
  const auto starts = discrete_fixed_starts(hex, 0.6);
  REQUIRE(!starts.empty());
  for (const auto& q1 : starts) CHECK(transform_polygon(hex, q1, 0.6).closure_defect < 1e-8);
}

TEST_CASE("equilateral triangle, d = 10, against explicit reflection matrices") {
  const auto tri = regular_polygon(3, 1.0 / std::sqrt(3.0));
  const double d = 10.0;
  for (double a : {0.3, 1.7, 4.0}) {
    const Vec q1 = tri[0] + d * Vec(std::cos(a), std::sin(a), 0);
    Eigen::Vector2d q = q1.head<2>();
    for (int k = 0; k < 3; ++k) q = oracle::reflect_step(tri[k].head<2>(), tri[(k + 1) % 3].head<2>(), q);
    const double ref = (q - q1.head<2>()).norm();
    CHECK(std::abs(transform_polygon(tri, q1, d).closure_defect - ref) < 1e-12);
  }
}

TEST_CASE("triangle with d >> diameter: Moebius residual") {
  const auto fit = discrete_monodromy(regular_polygon(3), 20.0);
  CHECK(fit.residual < 1e-9);
}

TEST_CASE("double traversal squares the monodromy") {
  const auto p = regular_polygon(5, 1.0);
  std::vector<Vec> twice = p.vertices();
  twice.insert(twice.end(), p.vertices().begin(), p.vertices().end());
  const double d = 2.5;
  const auto m1 = discrete_monodromy(p, d);
  const auto m2 = discrete_monodromy(Polygon(2, twice, true), d);
  CHECK(map_distance(m2.map, m1.map.after(m1.map)) < 1e-8);
}

TEST_CASE("regular n-gon: monodromy respects the rotation symmetry") {
  for (int dim : {2, 3}) {
    const int n = 7;
    const auto p = regular_polygon(n, 1.0, dim);
    std::vector<Vec> shifted(p.vertices().begin() + 1, p.vertices().end());
    shifted.push_back(p[0]);
    const double d = 2.2;
    const auto m = discrete_monodromy(p, d).map;
    const auto ms = discrete_monodromy(Polygon(dim, shifted, true), d).map;
    // rotation by 2 pi/n acting on directions
    const Eigen::Matrix3d rot = Eigen::AngleAxisd(2 * oracle::pi / n, Vec::UnitZ()).toRotationMatrix();
    double gap = 0;
    for (const auto& e : sample_directions(dim, 32)) {
      const Vec lhs = ms.apply(rot * e);
      const Vec rhs = rot * m.apply(e);
      gap = std::max(gap, (lhs - rhs).norm());
    }
    CHECK(gap < 1e-8);
  }
}

TEST_CASE("discrete monodromy residual stays below 1e-8 on random polygons") {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    FourierPerturbation fp;
    fp.seed = seed;
    fp.dim = seed % 2 ? 2 : 3;
    const auto poly = as_polygon(make_fourier_perturbed(fp, 200));
    CHECK(discrete_monodromy(poly, 3.0).residual < 1e-8);
  }
}

TEST_CASE("strongly hyperbolic polygon: degenerate fit, attracting start by iteration") {
  const auto hex = regular_polygon(60);
  CHECK_THROWS_AS(discrete_monodromy(hex, 0.05), Error);
  const auto starts = discrete_fixed_starts(hex, 0.05);
  REQUIRE(starts.size() == 1);
  CHECK(transform_polygon(hex, starts[0], 0.05).closure_defect < 1e-8);
}

TEST_CASE("classification of model matrices") {
  const auto id = classify(MoebiusMap::identity(2));
  CHECK(id.kind == MonodromyKind::Identity);
  CHECK(id.trace_invariant.real() == doctest::Approx(4.0));

  Mat2c diag = Mat2c::Zero();
  diag(0, 0) = 2.0;
  diag(1, 1) = 0.5;
  const MoebiusMap hyp(2, diag);
  const auto h = classify(hyp);
  CHECK(h.kind == MonodromyKind::Hyperbolic);
  CHECK(h.trace_invariant.real() == doctest::Approx(6.25));
  REQUIRE(h.fixed_points.size() == 2);
  const Vec zero = from_homogeneous(Hom(0.0, 1.0), 2), inf = from_homogeneous(Hom(1.0, 0.0), 2);
  for (const auto& fp : h.fixed_points) {
    CHECK((hyp.apply(fp.direction) - fp.direction).norm() < 1e-12);
    CHECK(std::min((fp.direction - zero).norm(), (fp.direction - inf).norm()) < 1e-12);
  }
  CHECK(std::abs(h.fixed_points[0].multiplier) < 1.0);

  const double th = 1.1;
  Mat2c rot;
  rot << std::cos(th / 2), -std::sin(th / 2), std::sin(th / 2), std::cos(th / 2);
  const auto e = classify(MoebiusMap(2, rot));
  CHECK(e.kind == MonodromyKind::Elliptic);
  CHECK(e.trace_invariant.real() == doctest::Approx(4 * std::cos(th / 2) * std::cos(th / 2)));
  CHECK(e.trace_invariant.real() < 4.0);
}

TEST_CASE("Moebius maps through three points are exact") {
  for (int dim : {2, 3}) {
    const auto src = sample_directions(dim, 6);
    Mat2c m;
    m << cplx(1.2, dim == 3 ? 0.3 : 0.0), cplx(0.4, 0), cplx(-0.7, 0), cplx(0.9, dim == 3 ? -0.2 : 0.0);
    const MoebiusMap f(dim, m);
    std::vector<Vec> img;
    for (const auto& s : src) img.push_back(f.apply(s));
    const auto fit = fit_moebius(dim, src, img);
    CHECK(fit.residual < 1e-12);
    CHECK(map_distance(fit.map, f) < 1e-10);
    CHECK(map_distance(f.after(f.inverse()), MoebiusMap::identity(dim)) < 1e-12);
  }
}

}  // TEST_SUITE
