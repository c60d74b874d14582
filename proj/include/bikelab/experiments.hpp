#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "bikelab/curve.hpp"
#include "bikelab/curve_io.hpp"
#include "bikelab/flows.hpp"

namespace bikelab {

enum class CheckKind { Theorem, Probe };

struct Residual {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;  ///< NaN for probe values
  double error = 0.0;  ///< error bar (probes); NaN when not estimated
};

struct CheckReport {
  std::string name;
  CheckKind kind = CheckKind::Theorem;
  Json inputs = Json::object();
  std::vector<Residual> residuals;
  Json convergence = Json::array();  ///< rows {"n": N, <residual>: value, ...}
  Json details = Json::object();
  std::vector<std::string> warnings;

  void add(const std::string& residual, double value, double tolerance);
  void add_probe(const std::string& quantity, double value, double error);
  /// Theorem checks: every residual finite and within tolerance. Probes
  /// always return true; they carry no verdict.
  bool pass() const;
  Json to_json() const;
};

// ---- theorem checks ---------------------------------------------------------

/// Held-out Moebius residual of the smooth monodromy, refined in N.
CheckReport check_mono_moebius(const SampledCurve& front, double lambda);
/// Same for the discrete monodromy of a polygon.
CheckReport check_discrete_moebius(const Polygon& polygon, double d);

/// Tr^2/det of M_{G1,lambda} and M_{G2,lambda} over a grid, G2 the partner
/// with chord 2 ell. `plant` displaces G2 by a random field before comparing.
CheckReport check_mono_conjugacy(const SampledCurve& g1, double ell, const std::vector<double>& lambda_grid,
                                 double plant = 0.0);

/// omega (and in 3D Omega) carried to the partner. Cusp-free rear tracks use
/// the closed pushforward U = u + ell c (u' - (T.u')T)/|g'| checked against
/// finite differences of g -> g +- ell c T; rear tracks with cusps push
/// fields on G1 through finite differences of the partner map.
CheckReport check_bisymp(const SampledCurve& front, double ell, int trials, std::uint64_t seed);

/// Filament integrals on G1 and its partner, and commutation of the
/// hierarchy flow with the correspondence for small t.
CheckReport check_theorem_int(const SampledCurve& g1, double ell);

/// A and J on G1 and its partner.
CheckReport check_other_integrals(const SampledCurve& g1, double ell);

/// G2 = B_ell(G1), G3 = B_lambda(G1); both lambda-partners of G2 are tried
/// as G4 and compared with G3 under B_ell.
CheckReport check_bianchi(const SampledCurve& g1, double ell, double lambda);

/// Best arc-length shift c with B(G(.), G(. + c)) for chord length d.
CheckReport check_zindler(const SampledCurve& g, double d);

/// Evolve a Zindler curve and re-certify it with the same chord.
CheckReport check_zflow(const SampledCurve& g, double d, const FlowSpec& spec);

/// The contraction identities for F_a = A.a/2 and J_a = -J.a.
CheckReport check_lemma_proj(const SampledCurve& g, const Vec& a, int trials, std::uint64_t seed);

/// sigma normalization verdict and the sigma identities.
CheckReport check_sigma(const SampledCurve& front, double lambda);

/// T x X_n = X_{n-1}' on a 3D curve, refined in N.
CheckReport check_recursion(const SampledCurve& g);

// ---- probes -------------------------------------------------------------------

/// Poisson brackets of monodromy integrals (omega in 2D, Omega in 3D), with
/// {F1, F3} as calibration.
CheckReport probe_conjecture_commute(const SampledCurve& g);

/// Regression of the steering-expansion coefficients on F1, F3 and
/// int (k'^2 - k^4/4) dx over random curves.
CheckReport probe_conjecture_depend(int curves, std::uint64_t seed, const std::vector<double>& lambda_grid);

/// Distance of circle monodromies from the identity, single and k-fold.
CheckReport probe_circle_identity(double radius, int max_cover);

/// Shape drift modulo rigid motion under a combination of hierarchy flows.
CheckReport probe_soliton(const SampledCurve& g, const FlowSpec& spec);

// ---- suites -------------------------------------------------------------------

struct SuiteEntry {
  std::string name;
  std::function<CheckReport()> run;
};

/// "theorems" or "probes"; every entry uses fixed seeds.
std::vector<SuiteEntry> suite(const std::string& which);

}  // namespace bikelab
