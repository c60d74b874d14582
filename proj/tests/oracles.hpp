#pragma once

// Reference computations written independently of the library: closed-form
// derivatives, scalar quadrature and plain rotation matrices.

#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

constexpr double pi = 3.14159265358979323846;

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                               int depth = 50) {
  std::function<double(double, double, double, double, double, double, int)> rec =
      [&](double lo, double hi, double flo, double fmid, double fhi, double whole, int d) {
        const double mid = 0.5 * (lo + hi);
        const double lm = 0.5 * (lo + mid), rm = 0.5 * (mid + hi);
        const double flm = f(lm), frm = f(rm);
        const double left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid);
        const double right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi);
        if (d <= 0 || std::abs(left + right - whole) <= 15.0 * tol) return left + right + (left + right - whole) / 15.0;
        return rec(lo, mid, flo, flm, fmid, left, d - 1) + rec(mid, hi, fmid, frm, fhi, right, d - 1);
      };
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  return rec(a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), depth);
}

inline double ellipse_perimeter(double a, double b) {
  return adaptive_simpson(
      [&](double t) { return std::sqrt(a * a * std::sin(t) * std::sin(t) + b * b * std::cos(t) * std::cos(t)); }, 0.0,
      2.0 * pi, 1e-13);
}

// Torus knot rho = R + r cos(qt): (rho cos pt, rho sin pt, r sin qt), derivatives in t.
struct TorusKnot {
  int p, q;
  double R, r;

  std::array<Eigen::Vector3d, 4> jets(double t) const {
    std::array<Eigen::Vector3d, 4> out;
    const double P = p, Q = q;
    // rho^(k) and the trig factors' derivatives
    const double rho[4] = {R + r * std::cos(Q * t), -r * Q * std::sin(Q * t), -r * Q * Q * std::cos(Q * t),
                           r * Q * Q * Q * std::sin(Q * t)};
    const double c[4] = {std::cos(P * t), -P * std::sin(P * t), -P * P * std::cos(P * t), P * P * P * std::sin(P * t)};
    const double s[4] = {std::sin(P * t), P * std::cos(P * t), -P * P * std::sin(P * t), -P * P * P * std::cos(P * t)};
    const double z[4] = {r * std::sin(Q * t), r * Q * std::cos(Q * t), -r * Q * Q * std::sin(Q * t),
                         -r * Q * Q * Q * std::cos(Q * t)};
    const int binom[4][4] = {{1, 0, 0, 0}, {1, 1, 0, 0}, {1, 2, 1, 0}, {1, 3, 3, 1}};
    for (int k = 0; k < 4; ++k) {
      double x = 0, y = 0;
      for (int j = 0; j <= k; ++j) {
        x += binom[k][j] * rho[j] * c[k - j];
        y += binom[k][j] * rho[j] * s[k - j];
      }
      out[k] = Eigen::Vector3d(x, y, z[k]);
    }
    return out;
  }

  double speed(double t) const { return jets(t)[1].norm(); }

  double kappa(double t) const {
    const auto j = jets(t);
    return j[1].cross(j[2]).norm() / std::pow(j[1].norm(), 3);
  }

  double tau(double t) const {
    const auto j = jets(t);
    const Eigen::Vector3d b = j[1].cross(j[2]);
    return b.dot(j[3]) / b.squaredNorm();
  }

  // d kappa / dx by a sixth-order central difference of the closed-form kappa.
  double kappa_prime(double t) const {
    const double h = 1e-3;
    const double d = (-kappa(t - 3 * h) + 9 * kappa(t - 2 * h) - 45 * kappa(t - h) + 45 * kappa(t + h) -
                      9 * kappa(t + 2 * h) + kappa(t + 3 * h)) /
                     (60.0 * h);
    return d / speed(t);
  }

  // d/dx of a function of t by a sixth-order central difference.
  template <class F>
  auto d_dx(const F& f, double t) const {
    const double h = 1e-3;
    return ((-f(t - 3 * h) + 9 * f(t - 2 * h) - 45 * f(t - h) + 45 * f(t + h) - 9 * f(t + 2 * h) + f(t + 3 * h)) /
            (60.0 * h)) /
           speed(t);
  }

  std::array<Eigen::Vector3d, 3> frame(double t) const {
    const auto j = jets(t);
    const Eigen::Vector3d T = j[1].normalized();
    const Eigen::Vector3d B = j[1].cross(j[2]).normalized();
    return {T, B.cross(T), B};
  }

  // X2 = (k^2/2) T + k' N + k tau B
  Eigen::Vector3d X2(double t) const {
    const auto [T, N, B] = frame(t);
    const double k = kappa(t);
    return 0.5 * k * k * T + kappa_prime(t) * N + k * tau(t) * B;
  }

  // X3 = k^2 tau T + (2 k' tau + k tau') N + (k tau^2 - k'' - k^3/2) B
  Eigen::Vector3d X3(double t) const {
    const auto [T, N, B] = frame(t);
    const double k = kappa(t), tt = tau(t), kp = kappa_prime(t);
    const double tp = d_dx([this](double s) { return tau(s); }, t);
    const double kpp = d_dx([this](double s) { return kappa_prime(s); }, t);
    return k * k * tt * T + (2 * kp * tt + k * tp) * N + (k * tt * tt - kpp - 0.5 * k * k * k) * B;
  }

  // F1..F5 by the periodic trapezoid rule on m nodes.
  std::array<double, 5> integrals(int m) const {
    std::array<double, 5> F{};
    const double h = 2.0 * pi / m;
    for (int i = 0; i < m; ++i) {
      const double t = i * h;
      const double w = speed(t) * h, k = kappa(t), tt = tau(t), kp = kappa_prime(t);
      F[0] += w;
      F[1] += tt * w;
      F[2] += k * k * w;
      F[3] += k * k * tt * w;
      F[4] += (kp * kp + k * k * tt * tt - 0.25 * k * k * k * k) * w;
    }
    return F;
  }
};

// Planar trapezoid step as translate-then-reflect with explicit reflection matrices.
inline Eigen::Vector2d reflect_step(const Eigen::Vector2d& pk, const Eigen::Vector2d& pk1, const Eigen::Vector2d& qk) {
  const Eigen::Vector2d x = qk + (pk1 - pk);
  const Eigen::Vector2d dir = pk1 - qk;
  const double th = std::atan2(dir.y(), dir.x());
  Eigen::Matrix2d ref;
  ref << std::cos(2 * th), std::sin(2 * th), std::sin(2 * th), -std::cos(2 * th);
  return qk + ref * (x - qk);
}

// Steering angle from d alpha/dt = s(t) (kappa(t) - sin(alpha)/l), RK4 over
// [0, 2 pi] with `steps` steps; s is the speed of the parameterization.
inline std::vector<double> steering_angle(const std::function<double(double)>& speed,
                                          const std::function<double(double)>& kappa, double l, double alpha0,
                                          int steps) {
  std::vector<double> out(steps + 1);
  const double h = 2 * pi / steps;
  double a = alpha0;
  auto f = [&](double t, double al) { return speed(t) * (kappa(t) - std::sin(al) / l); };
  out[0] = a;
  for (int i = 0; i < steps; ++i) {
    const double t = i * h;
    const double k1 = f(t, a), k2 = f(t + h / 2, a + h / 2 * k1), k3 = f(t + h / 2, a + h / 2 * k2),
                 k4 = f(t + h, a + h * k3);
    a += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    out[i + 1] = a;
  }
  return out;
}

// Small-lambda series of the periodic steering angle:
// alpha = l k - l^2 k' + l^3 (k'' + k^3/6) + O(l^4), with ' = d/dx, inserted
// into cos(alpha) = 1 - alpha^2/2 + alpha^4/24 and integrated over arc length:
// int cos(alpha) dx = c0 + c2 l^2 + c4 l^4 + ...
// The curve is given by its speed and curvature as functions of t in [0, 2 pi].
struct SteeringSeries {
  double c0 = 0, c2 = 0, c4 = 0;
};

inline SteeringSeries steering_series(const std::function<double(double)>& speed,
                                      const std::function<double(double)>& kappa, int m) {
  const double h = 1e-3;
  auto dx = [&](const std::function<double(double)>& f) {
    return [&, f](double t) {
      return (f(t - 2 * h) - 8 * f(t - h) + 8 * f(t + h) - f(t + 2 * h)) / (12 * h) / speed(t);
    };
  };
  const std::function<double(double)> k1 = dx(kappa);
  const std::function<double(double)> k2 = dx(k1);
  SteeringSeries s;
  const double dt = 2 * pi / m;
  for (int i = 0; i < m; ++i) {
    const double t = i * dt, w = speed(t) * dt;
    const double a1 = kappa(t), a2 = -k1(t), a3 = k2(t) + a1 * a1 * a1 / 6;
    s.c0 += w;
    s.c2 += -0.5 * a1 * a1 * w;
    s.c4 += (-0.5 * (a2 * a2 + 2 * a1 * a3) + a1 * a1 * a1 * a1 / 24) * w;
  }
  return s;
}

}  // namespace oracle
