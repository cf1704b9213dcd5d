#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dirac::hydrogenic {

using cplx = std::complex<double>;

inline constexpr double kAlpha = 1.0 / 137.035999;
// Bohr radius in angstrom, only used for dimensional output.
inline constexpr double kBohrAngstrom = 0.529177210903;

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Internal units: lengths r_B/Z, momenta hbar Z/r_B, energies m0 c^2.
struct PhysicalContext {
  double Z_effective = 1.0;
  double alpha = kAlpha;

  static PhysicalContext make(double z_eff, double alpha = kAlpha);
  double aZ() const { return alpha * Z_effective; }
  // Compton wavelength in units of r_B/Z.
  double compton_length() const { return aZ(); }
  // Momentum grid value (hbar Z/r_B) to m0 c units.
  double to_compton_momentum(double p) const { return aZ() * p; }
  double gamma(int kappa) const;
};

enum class Kind { Bound, Continuum };

struct QuantumNumbers {
  int kappa = -1;
  double m = 0.5;
  Kind kind = Kind::Bound;
  int n_r = 0;
  double p = 0.0;
  int eps = 1;

  static QuantumNumbers bound(int kappa, double m, int n_r);
  static QuantumNumbers continuum(int kappa, double m, double p, int eps);
  // Throws ConfigError on invalid combinations.
  void validate(const PhysicalContext& ctx) const;
  int principal() const { return n_r + (kappa < 0 ? -kappa : kappa); }
  int l() const { return kappa > 0 ? kappa : -kappa - 1; }
  double j() const { return (kappa < 0 ? -kappa : kappa) - 0.5; }
  std::string name() const;
};

int kappa_of(double j, int l);

double bound_energy(const QuantumNumbers& q, const PhysicalContext& ctx);
// Continuum energy W = eps sqrt(1 + (aZ p)^2).
double continuum_energy(double p, int eps, const PhysicalContext& ctx);

// Samples of r*g(r) and r*f(r).
struct RadialPair {
  std::vector<double> r;
  std::vector<double> rg;
  std::vector<double> rf;
  double energy = 0.0;
  QuantumNumbers label;
};

class BoundState {
 public:
  BoundState(const QuantumNumbers& q, const PhysicalContext& ctx);

  double energy() const { return W_; }
  double gamma() const { return gamma_; }
  double N() const { return N_; }
  int n_r() const { return n_r_; }
  int kappa() const { return kappa_; }
  double ln_norm() const { return lnA_; }
  const QuantumNumbers& label() const { return q_; }

  // r*g and r*f at radius r.
  void eval(double r, double& rg, double& rf) const;
  // Polynomial parts: r*g = pre * (2r/N)^gamma e^{-r/N} * Pg(r), same for f.
  void poly_parts(double r, double& pg, double& pf) const;
  double prefactor() const { return std::exp(lnA_); }
  RadialPair sample(const std::vector<double>& grid) const;

 private:
  QuantumNumbers q_;
  int kappa_;
  int n_r_;
  double gamma_, N_, W_, c_, lnA_;
};

class ContinuumState {
 public:
  ContinuumState(double p, int eps, int kappa, const PhysicalContext& ctx);

  double energy() const { return W_; }
  double p() const { return k_; }
  int eps() const { return eps_; }
  double y() const { return y_; }
  double gamma() const { return gamma_; }
  cplx a_param() const { return a_; }
  double c_param() const { return c_; }
  // Complex log of the normalization constant D.
  cplx ln_D() const { return lnD_; }
  double amp_g() const { return ag_; }
  double amp_f() const { return af_; }

  // D * (2kr)^gamma e^{-ikr} 1F1(a, c, 2ikr)
  cplx dg(double r) const;
  void eval(double r, double& rg, double& rf) const;
  // Sorted radii, marching the Kummer ODE between neighbours.
  void sweep(const std::vector<double>& r, double* rg, double* rf) const;
  RadialPair sample(const std::vector<double>& grid) const;

  // Large-r trigonometric forms.
  double phase(double r) const;  // k r + delta(r)
  double asym_amp_g() const;
  double asym_amp_f() const;
  void asymptotic(double r, double& rg, double& rf) const;

 private:
  int kappa_, eps_;
  double aZ_, k_, W_, y_, gamma_, c_;
  cplx a_, lnD_;
  double ag_, af_;
  double eta_;           // arg of e^{i eta}
  double arg_gamma_;     // arg Gamma(gamma + i y)
  // Large-x form D G = C1 e^{-i th} S1(1/x)/x + C2 e^{i th} S2(1/x),
  // th = y ln x + x/2, x = 2kr; used for x >= x_asym_.
  cplx C1_, C2_;
  std::vector<cplx> s1_, s2_;
  double x_asym_ = 0.0;
  void setup_asymptotic();
  cplx dg_asymptotic(double x) const;

 public:
  // Smallest 2kr where the sweep switches to the asymptotic series.
  double asymptotic_threshold() const { return x_asym_; }
  // Large-x terms continued to complex x = 2kr, Re x > 0, |x| >= asymptotic_threshold().
  // Outgoing terms carry e^{+ix/2}, incoming ones e^{-ix/2}. For real x,
  // D G = out.first + in.first and conj(D G) = out.second + in.second.
  std::pair<cplx, cplx> asymptotic_outgoing(cplx x) const;
  std::pair<cplx, cplx> asymptotic_incoming(cplx x) const;
};

void continuum_asymptotic(const QuantumNumbers& q, const PhysicalContext& ctx, double r, double& rg,
                          double& rf);
RadialPair bound_radial(const QuantumNumbers& q, const PhysicalContext& ctx,
                        const std::vector<double>& grid);
RadialPair continuum_radial(const QuantumNumbers& q, const PhysicalContext& ctx,
                            const std::vector<double>& grid);

}  // namespace dirac::hydrogenic
