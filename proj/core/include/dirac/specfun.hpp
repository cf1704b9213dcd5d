#pragma once

#include <array>
#include <complex>
#include <stdexcept>
#include <vector>

namespace dirac::specfun {

using cplx = std::complex<double>;

struct SpecfunError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct PoleError : SpecfunError {
  using SpecfunError::SpecfunError;
};
struct ConvergenceError : SpecfunError {
  using SpecfunError::SpecfunError;
};
struct DomainError : SpecfunError {
  using SpecfunError::SpecfunError;
};

// Principal branch of log Gamma (branch cut on the negative real axis).
cplx ln_gamma(cplx z);
double ln_gamma(double x);  // log|Gamma(x)|

// Coefficients t_j of 1F1(-n, c, z) = sum_j t_j z^j.
std::vector<double> kummer_poly_coeffs(int n, double c);
double kummer_poly(int n, double c, double z);

// 1F1(-n, alpha+1, x) evaluated through the Laguerre three-term recurrence.
// Stable for large n and x, unlike the Horner form.
double kummer_poly_stable(int n, double c, double x);

// 1F1 with complex parameters.
//
// Regime selection (|z| = modulus of the argument):
//  - Taylor series when the largest term does not exceed kTaylorGrowth times
//    the result (about 1e-12 relative accuracy),
//  - large-|z| asymptotic expansion when its smallest term is below
//    kAsymptoticTol relative to the leading term,
//  - otherwise the Kummer transform is tried for Re z < 0, then the series
//    value at a point on the same ray is continued through the ODE
//    z w'' + (c - z) w' - a w = 0 with local Taylor steps.
inline constexpr double kTaylorGrowth = 1.0e4;
inline constexpr double kAsymptoticTol = 1.0e-14;

struct KummerPair {
  cplx value;
  cplx deriv;
};

cplx kummer_complex(cplx a, cplx c, cplx z);

// Individual regimes, exposed for tests and the radial sweeps.
// Return false when the regime cannot reach its tolerance.
bool kummer_taylor(cplx a, cplx c, cplx z, KummerPair& out);
bool kummer_asymptotic(cplx a, cplx c, cplx z, cplx& out);

// Advances (w, w') of a 1F1(a, c, .) solution from z0 to z1 along the segment.
KummerPair kummer_step(cplx a, cplx c, cplx z0, KummerPair w, cplx z1);

// Gauss 2F1. Terminating series choose among equivalent polynomial
// representations by estimated cancellation; otherwise the direct series is
// used for |z| < 1 and the Pfaff transform when it moves z closer to 0.
cplx gauss_2f1(cplx a, cplx b, cplx c, cplx z);

// 2F1(-n, b; c; w) for nonnegative integer n.
cplx terminating_2f1(int n, cplx b, cplx c, cplx w);

// Omega_{kappa,m}(theta, phi) two-component spinor harmonic.
std::array<cplx, 2> spinor_harmonic(int kappa, double m, double theta, double phi);
cplx spherical_harmonic(int l, int m, double theta, double phi);

struct Quadrature {
  std::vector<double> x;
  std::vector<double> w;
};

// n-point Gauss-Legendre rule on [-1, 1].
Quadrature gauss_legendre(int n);
// n-point generalized Gauss-Laguerre rule, weight t^alpha e^{-t} on (0, inf).
Quadrature gauss_laguerre(int n, double alpha);

}  // namespace dirac::specfun
