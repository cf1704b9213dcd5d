#include "dirac/hydrogenic.hpp"

#include "dirac/specfun.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace dirac::hydrogenic {

namespace {
constexpr double kPi = std::numbers::pi;
}

PhysicalContext PhysicalContext::make(double z_eff, double alpha) {
  PhysicalContext c{z_eff, alpha};
  if (!(alpha > 0.0) || !(z_eff > 0.0) || !(c.aZ() < 1.0))
    throw ConfigError("physical context requires 0 < alpha Z < 1");
  return c;
}

double PhysicalContext::gamma(int kappa) const {
  const double a = aZ();
  const double g2 = double(kappa) * kappa - a * a;
  if (!(g2 > 0.0)) throw ConfigError("gamma is not real for this kappa and Z");
  return std::sqrt(g2);
}

QuantumNumbers QuantumNumbers::bound(int kappa, double m, int n_r) {
  QuantumNumbers q;
  q.kappa = kappa;
  q.m = m;
  q.kind = Kind::Bound;
  q.n_r = n_r;
  return q;
}

QuantumNumbers QuantumNumbers::continuum(int kappa, double m, double p, int eps) {
  QuantumNumbers q;
  q.kappa = kappa;
  q.m = m;
  q.kind = Kind::Continuum;
  q.p = p;
  q.eps = eps;
  return q;
}

void QuantumNumbers::validate(const PhysicalContext& ctx) const {
  if (kappa == 0) throw ConfigError("kappa must be nonzero");
  const double tm = 2.0 * m;
  if (std::abs(tm - std::round(tm)) > 1e-12 || std::lround(tm) % 2 == 0 || std::abs(m) > j() + 1e-12)
    throw ConfigError("m must be a half-integer with |m| <= j");
  ctx.gamma(kappa);
  if (kind == Kind::Bound) {
    if (n_r < 0) throw ConfigError("n_r must be nonnegative");
    if (kappa > 0 && n_r < 1) throw ConfigError("bound states with kappa > 0 need n_r >= 1");
  } else {
    if (!(p > 0.0)) throw ConfigError("continuum momentum must be positive");
    if (eps != 1 && eps != -1) throw ConfigError("continuum sign must be +1 or -1");
  }
}

std::string QuantumNumbers::name() const {
  static const char* kL = "SPDFGHIK";
  std::ostringstream os;
  const int ll = l();
  const char lc = ll < 8 ? kL[ll] : '?';
  const int twoj = 2 * std::abs(kappa) - 1;
  if (kind == Kind::Bound) {
    os << principal() << lc << twoj << "/2";
  } else {
    os << (eps > 0 ? "p+" : "p-") << "(" << p << ")" << lc << twoj << "/2";
  }
  return os.str();
}

int kappa_of(double j, int l) {
  if (l < 0 || !(j > 0.0)) throw ConfigError("kappa_of: need j > 0 and l >= 0");
  if (std::abs(j - (l + 0.5)) < 1e-12) return -static_cast<int>(std::lround(j + 0.5));
  if (std::abs(j - (l - 0.5)) < 1e-12) return static_cast<int>(std::lround(j + 0.5));
  throw ConfigError("kappa_of: j must equal l +- 1/2");
}

double bound_energy(const QuantumNumbers& q, const PhysicalContext& ctx) {
  q.validate(ctx);
  if (q.kind != Kind::Bound) throw ConfigError("bound_energy: continuum label");
  const double g = ctx.gamma(q.kappa);
  const double t = ctx.aZ() / (q.n_r + g);
  return 1.0 / std::sqrt(1.0 + t * t);
}

double continuum_energy(double p, int eps, const PhysicalContext& ctx) {
  const double t = ctx.aZ() * p;
  return eps * std::sqrt(1.0 + t * t);
}

BoundState::BoundState(const QuantumNumbers& q, const PhysicalContext& ctx) : q_(q) {
  q.validate(ctx);
  if (q.kind != Kind::Bound) throw ConfigError("BoundState: continuum label");
  kappa_ = q.kappa;
  n_r_ = q.n_r;
  gamma_ = ctx.gamma(kappa_);
  const double n = q.principal();
  const double ak = std::abs(kappa_);
  N_ = std::sqrt(n * n - 2.0 * n_r_ * (ak - gamma_));
  W_ = bound_energy(q, ctx);
  c_ = 2.0 * gamma_ + 1.0;
  lnA_ = 0.5 * std::lgamma(c_ + n_r_) - std::lgamma(c_) - 0.5 * std::log(4.0 * N_ * (N_ - kappa_)) -
         0.5 * std::lgamma(n_r_ + 1.0) + 0.5 * std::log(2.0 / N_);
  if (!std::isfinite(lnA_)) throw std::overflow_error("BoundState: normalization overflow");
}

void BoundState::poly_parts(double r, double& pg, double& pf) const {
  const double x = 2.0 * r / N_;
  const double f0 = specfun::kummer_poly_stable(n_r_, c_, x);
  const double f1 = n_r_ > 0 ? specfun::kummer_poly_stable(n_r_ - 1, c_, x) : 0.0;
  const double u = (N_ - kappa_) * f0;
  const double v = n_r_ * f1;
  pg = std::sqrt(1.0 + W_) * (u - v);
  pf = -std::sqrt(1.0 - W_) * (u + v);
}

void BoundState::eval(double r, double& rg, double& rf) const {
  double pg, pf;
  poly_parts(r, pg, pf);
  const double x = 2.0 * r / N_;
  const double b = std::exp(lnA_ - r / N_ + gamma_ * std::log(x));
  rg = b * pg;
  rf = b * pf;
}

RadialPair BoundState::sample(const std::vector<double>& grid) const {
  RadialPair rp;
  rp.r = grid;
  rp.rg.resize(grid.size());
  rp.rf.resize(grid.size());
  for (size_t i = 0; i < grid.size(); ++i) eval(grid[i], rp.rg[i], rp.rf[i]);
  rp.energy = W_;
  rp.label = q_;
  return rp;
}

ContinuumState::ContinuumState(double p, int eps, int kappa, const PhysicalContext& ctx)
    : kappa_(kappa), eps_(eps) {
  QuantumNumbers::continuum(kappa, std::abs(kappa) - 0.5, p, eps).validate(ctx);
  aZ_ = ctx.aZ();
  k_ = p;
  W_ = continuum_energy(p, eps, ctx);
  y_ = W_ / p;  // aZ W / sqrt(W^2 - 1) in these units
  gamma_ = ctx.gamma(kappa);
  c_ = 2.0 * gamma_ + 1.0;
  a_ = cplx(gamma_ + 1.0, y_);
  const cplx gy(gamma_, y_);
  const cplx lg = specfun::ln_gamma(gy);
  arg_gamma_ = lg.imag();
  const cplx eieta = std::sqrt(-(double(kappa) - cplx(0.0, y_ / W_)) / gy);
  eta_ = std::arg(eieta);
  lnD_ = kPi * y_ / 2.0 + lg.real() - std::log(2.0 * std::sqrt(kPi * std::abs(W_))) -
         std::lgamma(c_) + cplx(0.0, eta_) + std::log(gy);
  ag_ = 2.0 * std::sqrt(std::abs(W_) + eps_);
  af_ = -2.0 * eps_ * std::sqrt(std::abs(W_) - eps_);
  setup_asymptotic();
}

void ContinuumState::setup_asymptotic() {
  const cplx lgc = std::lgamma(c_);
  const cplx ipi2(0.0, kPi / 2.0);
  C1_ = std::exp(lnD_ + lgc - specfun::ln_gamma(c_ - a_) + ipi2 * a_);
  C2_ = std::exp(lnD_ + lgc - specfun::ln_gamma(a_) + ipi2 * (a_ - c_));
  constexpr int kMaxTerms = 24;
  constexpr double kTol = 1e-15;
  s1_.assign(1, 1.0);
  s2_.assign(1, 1.0);
  const cplx I(0.0, 1.0);
  for (int n = 0; n < kMaxTerms; ++n) {
    const double nn = n;
    s1_.push_back(s1_.back() * (a_ + nn) * (a_ - c_ + 1.0 + nn) / (nn + 1.0) * I);
    s2_.push_back(s2_.back() * (c_ - a_ + nn) * (1.0 - a_ + nn) / (nn + 1.0) * (-I));
  }
  // Pick the truncation order with the smallest usable x.
  const double m1 = std::abs(C1_), m2 = std::abs(C2_);
  double best_x = std::numeric_limits<double>::infinity();
  int best_k = kMaxTerms;
  for (int k = 1; k <= kMaxTerms; ++k) {
    const double e1 = std::abs(s1_[k]) * m1, e2 = std::abs(s2_[k]) * m2;
    // x with e1/x^{k+1} + e2/x^k <= tol * m2, bounded by requiring x^k >= 2 e/(tol m2)
    const double xk = std::max(std::pow(2.0 * e2 / (kTol * m2), 1.0 / k),
                               std::pow(2.0 * e1 / (kTol * m2), 1.0 / (k + 1)));
    // terms must keep decreasing up to order k
    double xr = 0.0;
    for (int n = 0; n < k; ++n) {
      xr = std::max(xr, 2.0 * std::abs(s1_[n + 1]) / std::abs(s1_[n]));
      xr = std::max(xr, 2.0 * std::abs(s2_[n + 1]) / std::abs(s2_[n]));
    }
    const double x = std::max({xk, xr, 20.0});
    if (x < best_x) {
      best_x = x;
      best_k = k;
    }
  }
  s1_.resize(best_k);
  s2_.resize(best_k);
  x_asym_ = best_x;
}

cplx ContinuumState::dg_asymptotic(double x) const {
  const double u = 1.0 / x;
  cplx t1 = 0.0, t2 = 0.0;
  for (size_t n = s1_.size(); n-- > 0;) {
    t1 = t1 * u + s1_[n];
    t2 = t2 * u + s2_[n];
  }
  const double th = y_ * std::log(x) + 0.5 * x;
  const cplx e = std::polar(1.0, th);
  return C1_ * std::conj(e) * t1 * u + C2_ * e * t2;
}

std::pair<cplx, cplx> ContinuumState::asymptotic_outgoing(cplx x) const {
  const cplx u = 1.0 / x;
  cplx t1 = 0.0, t2 = 0.0;
  for (size_t n = s1_.size(); n-- > 0;) {
    t1 = t1 * u + std::conj(s1_[n]);
    t2 = t2 * u + s2_[n];
  }
  const cplx e = std::exp(cplx(0.0, 1.0) * (y_ * std::log(x) + 0.5 * x));
  return {C2_ * e * t2, std::conj(C1_) * e * t1 * u};
}

std::pair<cplx, cplx> ContinuumState::asymptotic_incoming(cplx x) const {
  const cplx u = 1.0 / x;
  cplx t1 = 0.0, t2 = 0.0;
  for (size_t n = s1_.size(); n-- > 0;) {
    t1 = t1 * u + s1_[n];
    t2 = t2 * u + std::conj(s2_[n]);
  }
  const cplx e = std::exp(cplx(0.0, -1.0) * (y_ * std::log(x) + 0.5 * x));
  return {C1_ * e * t1 * u, std::conj(C2_) * e * t2};
}

cplx ContinuumState::dg(double r) const {
  const double x = 2.0 * k_ * r;
  const cplx m = specfun::kummer_complex(a_, c_, cplx(0.0, x));
  return std::exp(lnD_ + gamma_ * std::log(x) - cplx(0.0, k_ * r)) * m;
}

void ContinuumState::eval(double r, double& rg, double& rf) const {
  const cplx v = dg(r);
  rg = ag_ * v.real();
  rf = af_ * v.imag();
}

void ContinuumState::sweep(const std::vector<double>& r, double* rg, double* rf) const {
  using specfun::KummerPair;
  bool marching = false;
  KummerPair w{};
  cplx zprev = 0.0;
  const double amag = std::abs(a_);
  const double dmod = std::exp(lnD_.real());
  // e^{-ikr} is advanced by rotation between exact resyncs.
  cplx rot = 1.0, step_rot = 1.0;
  double rot_r = -1.0, step_dr = 0.0;
  int since_sync = 0;
  for (size_t i = 0; i < r.size(); ++i) {
    const double x = 2.0 * k_ * r[i];
    if (x >= x_asym_) {
      const cplx v = dg_asymptotic(x);
      rg[i] = ag_ * v.real();
      rf[i] = af_ * v.imag();
      continue;
    }
    const cplx z(0.0, x);
    if (!marching) {
      KummerPair t;
      const bool small = x * std::max(1.0, amag) < 4.0;
      if (small && specfun::kummer_taylor(a_, c_, z, t)) {
        w = t;
      } else {
        if (i == 0) throw specfun::ConvergenceError("sweep: first radius outside the series regime");
        marching = true;
      }
    }
    if (marching) w = specfun::kummer_step(a_, c_, zprev, w, z);
    zprev = z;
    const double dr = r[i] - rot_r;
    if (since_sync < 64 && rot_r >= 0.0 && std::abs(dr - step_dr) <= 1e-12 * r[i]) {
      rot *= step_rot;
      ++since_sync;
    } else {
      rot = std::polar(1.0, lnD_.imag() - k_ * r[i]);
      if (rot_r >= 0.0) {
        step_dr = dr;
        step_rot = std::polar(1.0, -k_ * dr);
      }
      since_sync = 0;
    }
    rot_r = r[i];
    const cplx v = (dmod * std::pow(x, gamma_)) * rot * w.value;
    rg[i] = ag_ * v.real();
    rf[i] = af_ * v.imag();
  }
}

RadialPair ContinuumState::sample(const std::vector<double>& grid) const {
  RadialPair rp;
  rp.r = grid;
  rp.rg.resize(grid.size());
  rp.rf.resize(grid.size());
  sweep(grid, rp.rg.data(), rp.rf.data());
  rp.energy = W_;
  rp.label = QuantumNumbers::continuum(kappa_, std::abs(kappa_) - 0.5, k_, eps_);
  return rp;
}

double ContinuumState::phase(double r) const {
  return k_ * r + y_ * std::log(2.0 * k_ * r) - arg_gamma_ - kPi * gamma_ / 2.0 + eta_;
}

double ContinuumState::asym_amp_g() const {
  return std::sqrt((std::abs(W_) + eps_) / (kPi * std::abs(W_)));
}

double ContinuumState::asym_amp_f() const {
  return std::sqrt((std::abs(W_) - eps_) / (kPi * std::abs(W_)));
}

void ContinuumState::asymptotic(double r, double& rg, double& rf) const {
  const double th = phase(r);
  rg = asym_amp_g() * std::cos(th);
  rf = -eps_ * asym_amp_f() * std::sin(th);
}

void continuum_asymptotic(const QuantumNumbers& q, const PhysicalContext& ctx, double r, double& rg,
                          double& rf) {
  ContinuumState(q.p, q.eps, q.kappa, ctx).asymptotic(r, rg, rf);
}

RadialPair bound_radial(const QuantumNumbers& q, const PhysicalContext& ctx,
                        const std::vector<double>& grid) {
  for (size_t i = 0; i < grid.size(); ++i)
    if (!(grid[i] > 0.0) || (i && grid[i] <= grid[i - 1]))
      throw ConfigError("radial grid must be positive and strictly increasing");
  auto rp = BoundState(q, ctx).sample(grid);
  rp.label = q;
  return rp;
}

RadialPair continuum_radial(const QuantumNumbers& q, const PhysicalContext& ctx,
                            const std::vector<double>& grid) {
  for (size_t i = 0; i < grid.size(); ++i)
    if (!(grid[i] > 0.0) || (i && grid[i] <= grid[i - 1]))
      throw ConfigError("radial grid must be positive and strictly increasing");
  q.validate(ctx);
  auto rp = ContinuumState(q.p, q.eps, q.kappa, ctx).sample(grid);
  rp.label = q;
  return rp;
}

}  // namespace dirac::hydrogenic
