#include "bikelab/spectral.hpp"

#include <cmath>

#include <unsupported/Eigen/FFT>

namespace bikelab::spectral {

namespace {

Eigen::FFT<double>& engine() {
  thread_local Eigen::FFT<double> fft;
  return fft;
}

std::vector<double> component(std::span<const Vec> f, int c) {
  std::vector<double> out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i][c];
  return out;
}

template <class Fn>
std::vector<Vec> per_component(std::span<const Vec> f, Fn&& fn) {
  std::vector<Vec> out(f.size(), Vec::Zero());
  for (int c = 0; c < 3; ++c) {
    const auto comp = component(f, c);
    bool zero = true;
    for (double v : comp) zero = zero && v == 0.0;
    if (zero) continue;  // planar curves keep an exact zero z
    const auto r = fn(std::span<const double>(comp));
    for (std::size_t i = 0; i < f.size(); ++i) out[i][c] = r[i];
  }
  return out;
}

}  // namespace

std::vector<cplx> forward(std::span<const double> f) {
  std::vector<cplx> in(f.begin(), f.end()), out;
  engine().fwd(out, in);
  return out;
}

std::vector<double> inverse(std::span<const cplx> spec) {
  std::vector<cplx> in(spec.begin(), spec.end()), out;
  engine().inv(out, in);
  std::vector<double> r(out.size());
  for (std::size_t i = 0; i < out.size(); ++i) r[i] = out[i].real();
  return r;
}

std::vector<double> derivative(std::span<const double> f, int order) {
  const int n = static_cast<int>(f.size());
  auto s = forward(f);
  for (int j = 0; j < n; ++j) {
    const int k = wavenumber(j, n);
    if (n % 2 == 0 && j == n / 2) {
      s[j] = 0.0;
      continue;
    }
    s[j] *= std::pow(cplx(0.0, static_cast<double>(k)), order);
  }
  return inverse(s);
}

std::vector<Vec> derivative(std::span<const Vec> f, int order) {
  return per_component(f, [order](std::span<const double> c) { return derivative(c, order); });
}

std::vector<double> shifted(std::span<const double> f, double shift) {
  const int n = static_cast<int>(f.size());
  auto s = forward(f);
  for (int j = 0; j < n; ++j) {
    const int k = wavenumber(j, n);
    if (n % 2 == 0 && j == n / 2) {
      // real-valued interpolant: Nyquist term is c*cos(n u / 2)
      s[j] *= std::cos(0.5 * n * shift);
      continue;
    }
    s[j] *= std::exp(cplx(0.0, k * shift));
  }
  return inverse(s);
}

std::vector<Vec> shifted(std::span<const Vec> f, double shift) {
  return per_component(f, [shift](std::span<const double> c) { return shifted(c, shift); });
}

std::vector<double> periodic_antiderivative(std::span<const double> f, double* mean) {
  const int n = static_cast<int>(f.size());
  auto s = forward(f);
  if (mean) *mean = s[0].real() / n;
  s[0] = 0.0;
  for (int j = 1; j < n; ++j) {
    if (n % 2 == 0 && j == n / 2) {
      s[j] = 0.0;
      continue;
    }
    s[j] /= cplx(0.0, static_cast<double>(wavenumber(j, n)));
  }
  auto r = inverse(s);
  const double r0 = r.empty() ? 0.0 : r[0];
  for (double& v : r) v -= r0;
  return r;
}

std::vector<Vec> lowpass(std::span<const Vec> f, int kmax) {
  const int n = static_cast<int>(f.size());
  return per_component(f, [n, kmax](std::span<const double> c) {
    auto s = forward(c);
    for (int j = 0; j < n; ++j)
      if (std::abs(wavenumber(j, n)) > kmax || (n % 2 == 0 && j == n / 2 && n / 2 > kmax)) s[j] = 0.0;
    return inverse(s);
  });
}

Interpolant::Interpolant(std::span<const double> f) {
  const int n = static_cast<int>(f.size());
  const auto s = forward(f);
  mean_ = s[0].real() / n;
  double cmax = 0.0;
  for (int j = 1; j <= n / 2; ++j) cmax = std::max(cmax, std::abs(s[j]));
  for (int j = 1; j <= n / 2; ++j) {
    if (std::abs(s[j]) <= 1e-17 * cmax) continue;
    const bool nyquist = (n % 2 == 0 && j == n / 2);
    k_.push_back(j);
    c_.push_back(s[j] * (nyquist ? 1.0 / n : 2.0 / n));
  }
}

double Interpolant::operator()(double u) const {
  double v = mean_;
  for (std::size_t i = 0; i < k_.size(); ++i) {
    const double ph = k_[i] * u;
    v += c_[i].real() * std::cos(ph) - c_[i].imag() * std::sin(ph);
  }
  return v;
}

double Interpolant::derivative(double u) const {
  double v = 0.0;
  for (std::size_t i = 0; i < k_.size(); ++i) {
    const double ph = k_[i] * u;
    v += k_[i] * (-c_[i].real() * std::sin(ph) - c_[i].imag() * std::cos(ph));
  }
  return v;
}

}  // namespace bikelab::spectral
