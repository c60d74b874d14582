#pragma once

// Fourier tools for periodic, uniformly sampled data on the parameter
// circle u in [0, 2*pi). All curve derivatives in the library go through
// here, so quadrature and differentiation share one grid.

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace bikelab::spectral {

using Vec = Eigen::Vector3d;
using cplx = std::complex<double>;

/// Forward DFT (unnormalized) of a real sequence.
std::vector<cplx> forward(std::span<const double> f);
/// Inverse of forward(); returns the real part.
std::vector<double> inverse(std::span<const cplx> spec);

/// Signed wavenumber of DFT bin j for length n.
inline int wavenumber(int j, int n) { return j <= n / 2 ? j : j - n; }

/// d^order f / du^order. The Nyquist bin is dropped, which keeps the
/// first-derivative matrix exactly skew-symmetric.
std::vector<double> derivative(std::span<const double> f, int order = 1);
std::vector<Vec> derivative(std::span<const Vec> f, int order = 1);

/// Values of the trigonometric interpolant at u_j + shift.
std::vector<double> shifted(std::span<const double> f, double shift);
std::vector<Vec> shifted(std::span<const Vec> f, double shift);

/// Periodic antiderivative of (f - mean f), zero at u = 0. Returns the mean
/// separately so callers can add the secular part mean*u.
std::vector<double> periodic_antiderivative(std::span<const double> f, double* mean = nullptr);

/// Zero all modes with |k| > kmax.
std::vector<Vec> lowpass(std::span<const Vec> f, int kmax);

/// Trigonometric interpolant of one real sequence, evaluable anywhere.
class Interpolant {
 public:
  explicit Interpolant(std::span<const double> f);
  double operator()(double u) const;
  double derivative(double u) const;

 private:
  double mean_ = 0.0;
  std::vector<int> k_;
  std::vector<cplx> c_;  // already scaled by 2/n (or 1/n for Nyquist)
};

/// Uniform grid spacing for n samples on [0, 2*pi).
inline double grid_step(std::size_t n) { return 2.0 * 3.14159265358979323846 / static_cast<double>(n); }

}  // namespace bikelab::spectral
