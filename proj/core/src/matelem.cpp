#include "dirac/matelem.hpp"

#include "dirac/parallel.hpp"
#include "dirac/specfun.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <optional>
#include <ostream>

namespace dirac::matelem {

using hydrogenic::BoundState;
using hydrogenic::ConfigError;
using hydrogenic::ContinuumState;
using hydrogenic::Kind;
using specfun::cplx;

namespace {

constexpr double kPi = std::numbers::pi;

int block_slot(Block b) { return static_cast<int>(b); }

bool same_channel(const QuantumNumbers& a, const QuantumNumbers& b) {
  return a.kappa == b.kappa && a.m == b.m;
}

void put(std::ostream& os, double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  os.write(buf, res.ptr - buf);
}

// int r^{2 gamma} e^{-s r} P1(r) P2(r) dr over generalized Gauss-Laguerre nodes.
double bound_pair(const BoundState& b1, const BoundState& b2, const specfun::Quadrature& rule, int sign) {
  const double g = b1.gamma();
  const double s = 1.0 / b1.N() + 1.0 / b2.N();
  double acc = 0.0;
  for (size_t k = 0; k < rule.x.size(); ++k) {
    const double r = rule.x[k] / s;
    double g1, f1, g2, f2;
    b1.poly_parts(r, g1, f1);
    b2.poly_parts(r, g2, f2);
    acc += rule.w[k] * (g1 * g2 + sign * f1 * f2);
  }
  const double lnpre = b1.ln_norm() + b2.ln_norm() + g * (std::log(2.0 / b1.N()) + std::log(2.0 / b2.N())) -
                       (2.0 * g + 1.0) * std::log(s);
  return std::exp(lnpre) * acc;
}

specfun::Quadrature laguerre_rule(int max_nr, double gamma) {
  return specfun::gauss_laguerre(max_nr + 2, 2.0 * gamma);
}

// D * int (2r/N)^gamma e^{-r/N} 1F1(-n, c, 2r/N) G(r) dr, G = (2kr)^gamma e^{-ikr} 1F1(a, c, 2ikr).
cplx laplace_term(const BoundState& b, const ContinuumState& cs, int n) {
  const double N = b.N(), g = b.gamma(), c = 2.0 * g + 1.0, k = cs.p();
  const cplx a = cs.a_param();
  const cplx lam(1.0 / N, k);
  const cplx l2(1.0 / N, -k);
  const cplx w = (2.0 / N) * cplx(0.0, 2.0 * k) / ((lam - 2.0 / N) * l2);
  // (lam - 2/N)^n lam^{-n} has unit modulus.
  const cplx rho = (lam - 2.0 / N) / lam;
  const cplx lnpre = cs.ln_D() + g * std::log(2.0 / N) + g * std::log(2.0 * k) + std::lgamma(c) +
                     (a - c) * std::log(lam) - a * std::log(l2);
  return std::exp(lnpre) * std::pow(rho, n) * specfun::terminating_2f1(n, a, c, w);
}

double bound_continuum(const QuantumNumbers& qb, const QuantumNumbers& qc, const PhysicalContext& ctx, int sign) {
  if (qb.kind != Kind::Bound || qc.kind != Kind::Continuum)
    throw std::invalid_argument("bound-continuum element needs (bound, continuum) labels");
  if (!same_channel(qb, qc)) return 0.0;
  qc.validate(ctx);
  const BoundState b(qb, ctx);
  const ContinuumState cs(qc.p, qc.eps, qc.kappa, ctx);
  const int nr = b.n_r();
  const cplx j0 = laplace_term(b, cs, nr);
  const cplx j1 = nr > 0 ? laplace_term(b, cs, nr - 1) : cplx(0.0);
  const double A = b.prefactor(), N = b.N(), W = b.energy();
  const cplx ig = A * std::sqrt(1.0 + W) * ((N - b.kappa()) * j0 - double(nr) * j1);
  const cplx iff = -A * std::sqrt(1.0 - W) * ((N - b.kappa()) * j0 + double(nr) * j1);
  return cs.amp_g() * ig.real() + sign * cs.amp_f() * iff.imag();
}

const specfun::Quadrature& legendre_rule(int n) {
  static const specfun::Quadrature q16 = specfun::gauss_legendre(16);
  static const specfun::Quadrature q24 = specfun::gauss_legendre(24);
  if (n == 16) return q16;
  if (n == 24) return q24;
  throw std::invalid_argument("legendre_rule: unsupported order");
}

const specfun::Quadrature& laguerre_decay_rule(int n) {
  static const specfun::Quadrature q48 = specfun::gauss_laguerre(48, 0.0);
  static const specfun::Quadrature q64 = specfun::gauss_laguerre(64, 0.0);
  if (n == 48) return q48;
  if (n == 64) return q64;
  throw std::invalid_argument("laguerre_decay_rule: unsupported order");
}

// Bound r g, r f continued to complex r (Re r > 0).
void bound_complex(const BoundState& b, cplx r, cplx& rg, cplx& rf) {
  const int n = b.n_r();
  const double c = 2.0 * b.gamma() + 1.0, al = c - 1.0, N = b.N();
  const cplx x = 2.0 * r / N;
  auto f1f1 = [&](int m) -> cplx {
    if (m == 0) return 1.0;
    cplx l0 = 1.0, l1 = 1.0 + al - x;
    for (int j = 1; j < m; ++j) {
      const cplx l2 = ((2.0 * j + 1.0 + al - x) * l1 - (j + al) * l0) / double(j + 1);
      l0 = l1;
      l1 = l2;
    }
    return l1 * std::exp(std::lgamma(m + 1.0) + std::lgamma(al + 1.0) - std::lgamma(m + al + 1.0));
  };
  const cplx u = (N - b.kappa()) * f1f1(n);
  const cplx v = n > 0 ? double(n) * f1f1(n - 1) : cplx(0.0);
  const cplx pre = std::exp(b.ln_norm() - r / N + b.gamma() * std::log(x));
  rg = pre * std::sqrt(1.0 + b.energy()) * (u - v);
  rf = -pre * std::sqrt(1.0 - b.energy()) * (u + v);
}

}  // namespace

const char* provenance_name(Provenance p) {
  switch (p) {
    case Provenance::Analytic: return "analytic";
    case Provenance::Quadrature: return "quadrature";
    case Provenance::Model: return "model";
  }
  return "?";
}

const char* block_name(Block b) {
  switch (b) {
    case Block::Bound: return "bound";
    case Block::Positive: return "pos";
    case Block::Negative: return "neg";
  }
  return "?";
}

SymmetricMatrixTable::SymmetricMatrixTable(BlockLayout layout)
    : layout_(layout), data_(size_t(layout.dim()) * (size_t(layout.dim()) + 1) / 2, 0.0) {
  prov_.fill(Provenance::Analytic);
}

Provenance SymmetricMatrixTable::provenance(Block a, Block b) const {
  return prov_[block_slot(a) * 3 + block_slot(b)];
}

void SymmetricMatrixTable::set_provenance(Block a, Block b, Provenance p) {
  prov_[block_slot(a) * 3 + block_slot(b)] = p;
  prov_[block_slot(b) * 3 + block_slot(a)] = p;
}

Eigen::MatrixXd SymmetricMatrixTable::dense() const {
  const int n = dim();
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) m(i, j) = m(j, i) = (*this)(i, j);
  return m;
}

Eigen::MatrixXd SymmetricMatrixTable::block(Block a, Block b) const {
  auto range = [&](Block x) -> std::pair<int, int> {
    switch (x) {
      case Block::Bound: return {0, layout_.n_bound};
      case Block::Positive: return {layout_.n_bound, layout_.n_pos};
      case Block::Negative: return {layout_.n_plus(), layout_.n_neg};
    }
    return {0, 0};
  };
  const auto [ra, na] = range(a);
  const auto [rb, nb] = range(b);
  Eigen::MatrixXd m(na, nb);
  for (int i = 0; i < na; ++i)
    for (int j = 0; j < nb; ++j) m(i, j) = (*this)(ra + i, rb + j);
  return m;
}

bool SymmetricMatrixTable::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

void SymmetricMatrixTable::write_csv(std::ostream& os, double threshold) const {
  os << "i,j,value,block\n";
  for (int i = 0; i < dim(); ++i) {
    for (int j = 0; j <= i; ++j) {
      const double v = (*this)(i, j);
      if (i != j && !(std::abs(v) > threshold)) continue;
      os << i << ',' << j << ',';
      put(os, v);
      os << ',' << block_name(layout_.block_of(j)) << '-' << block_name(layout_.block_of(i)) << '\n';
    }
  }
}

double beta_bound_bound(const QuantumNumbers& q1, const QuantumNumbers& q2, const PhysicalContext& ctx) {
  if (q1.kind != Kind::Bound || q2.kind != Kind::Bound) throw std::invalid_argument("bound labels expected");
  if (!same_channel(q1, q2)) return 0.0;
  const BoundState b1(q1, ctx), b2(q2, ctx);
  return bound_pair(b1, b2, laguerre_rule(std::max(q1.n_r, q2.n_r), b1.gamma()), -1);
}

double overlap_bound_bound(const QuantumNumbers& q1, const QuantumNumbers& q2, const PhysicalContext& ctx) {
  if (q1.kind != Kind::Bound || q2.kind != Kind::Bound) throw std::invalid_argument("bound labels expected");
  if (!same_channel(q1, q2)) return 0.0;
  const BoundState b1(q1, ctx), b2(q2, ctx);
  return bound_pair(b1, b2, laguerre_rule(std::max(q1.n_r, q2.n_r), b1.gamma()), +1);
}

double beta_bound_bound_euler(const QuantumNumbers& q1, const QuantumNumbers& q2, const PhysicalContext& ctx,
                              int sign) {
  if (q1.kind != Kind::Bound || q2.kind != Kind::Bound) throw std::invalid_argument("bound labels expected");
  if (!same_channel(q1, q2)) return 0.0;
  const BoundState b1(q1, ctx), b2(q2, ctx);
  const double g = b1.gamma(), c = 2.0 * g + 1.0;
  // Polynomial coefficients of P(r) in powers of r.
  auto expand = [&](const BoundState& b, std::vector<double>& pg, std::vector<double>& pf) {
    const int n = b.n_r();
    const auto t0 = specfun::kummer_poly_coeffs(n, c);
    const auto t1 = n > 0 ? specfun::kummer_poly_coeffs(n - 1, c) : std::vector<double>{};
    pg.assign(n + 1, 0.0);
    pf.assign(n + 1, 0.0);
    const double sg = std::sqrt(1.0 + b.energy()), sf = std::sqrt(1.0 - b.energy());
    double scale = 1.0;
    for (int j = 0; j <= n; ++j) {
      const double u = (b.N() - b.kappa()) * t0[j];
      const double v = j < n ? n * t1[j] : 0.0;
      pg[j] = sg * (u - v) * scale;
      pf[j] = -sf * (u + v) * scale;
      scale *= 2.0 / b.N();
    }
  };
  std::vector<double> g1, f1, g2, f2;
  expand(b1, g1, f1);
  expand(b2, g2, f2);
  const double s = 1.0 / b1.N() + 1.0 / b2.N();
  double acc = 0.0;
  for (size_t j = 0; j < g1.size(); ++j) {
    for (size_t l = 0; l < g2.size(); ++l) {
      const double mu = 2.0 * g + double(j + l) + 1.0;
      acc += (g1[j] * g2[l] + sign * f1[j] * f2[l]) * std::exp(std::lgamma(mu) - mu * std::log(s));
    }
  }
  return std::exp(b1.ln_norm() + b2.ln_norm() + g * (std::log(2.0 / b1.N()) + std::log(2.0 / b2.N()))) * acc;
}

double beta_bound_continuum(const QuantumNumbers& qb, const QuantumNumbers& qc, const PhysicalContext& ctx) {
  return bound_continuum(qb, qc, ctx, -1);
}

double overlap_bound_continuum(const QuantumNumbers& qb, const QuantumNumbers& qc, const PhysicalContext& ctx) {
  return bound_continuum(qb, qc, ctx, +1);
}

double beta_discretized(const QuantumNumbers& qb, const MomentumBin& bin, int kappa, const PhysicalContext& ctx,
                        BinRule rule, int nodes) {
  if (!(bin.width > 0.0) || !(bin.lo() > 0.0)) throw ConfigError("invalid momentum bin");
  if (qb.kappa != kappa) return 0.0;
  auto at = [&](double p) {
    return beta_bound_continuum(qb, QuantumNumbers::continuum(kappa, qb.m, p, bin.eps), ctx);
  };
  if (rule == BinRule::Midpoint) return std::sqrt(bin.width) * at(bin.center);
  // low-|p| negative bins oscillate fast in p (Coulomb phase ~ aZ/p): double the rule until it settles
  const double half = 0.5 * bin.width;
  auto integrate = [&](int n) {
    const auto q = specfun::gauss_legendre(n);
    double acc = 0.0;
    for (int k = 0; k < n; ++k) acc += q.w[k] * at(bin.center + half * q.x[k]);
    return acc * half / std::sqrt(bin.width);
  };
  double prev = integrate(nodes);
  for (int n = 2 * nodes; n <= 512; n *= 2) {
    const double cur = integrate(n);
    if (std::abs(cur - prev) <= 1e-9 * std::abs(cur) + 1e-12) return cur;
    prev = cur;
  }
  return prev;
}

double beta_continuum_diagonal(const MomentumBin& bin, const PhysicalContext& ctx) {
  if (!(bin.width > 0.0) || !(bin.lo() > 0.0)) throw ConfigError("invalid momentum bin");
  const double a = ctx.aZ();
  return bin.eps * (std::asinh(a * bin.hi()) - std::asinh(a * bin.lo())) / (a * bin.width);
}

double z_negative_diagonal(const MomentumBin& bin, const PhysicalContext& ctx) {
  if (bin.eps != -1) throw ConfigError("z_negative_diagonal needs a negative-energy bin");
  // S_ii = 2 eps beta_ii = -2 beta_ii for eps = -1.
  const double arg = 2.0 - 2.0 * beta_continuum_diagonal(bin, ctx);
  if (!(arg > 0.0)) throw SingularBinError("2 + xi <= 0 on a negative-energy bin");
  return 1.0 / std::sqrt(arg);
}

double quadrature_oracle(const QuantumNumbers& q1, const QuantumNumbers& q2, const PhysicalContext& ctx,
                         const OracleOptions& opt) {
  if (q1.kind == Kind::Continuum && q2.kind == Kind::Continuum)
    throw std::invalid_argument("quadrature_oracle: continuum-continuum integrals are not finite");
  if (!same_channel(q1, q2)) return 0.0;
  const QuantumNumbers& qb = q1.kind == Kind::Bound ? q1 : q2;
  const QuantumNumbers& qo = q1.kind == Kind::Bound ? q2 : q1;
  const BoundState b(qb, ctx);
  const bool cont = qo.kind == Kind::Continuum;
  std::optional<BoundState> b2;
  std::optional<ContinuumState> cs;
  auto reach = [](const BoundState& s) { return 2.0 * s.N() * s.N() + 60.0 * s.N() + 40.0; };
  double r_end = reach(b);
  double L = 1.0;
  bool rays = false;
  if (cont) {
    cs.emplace(qo.p, qo.eps, qo.kappa, ctx);
    L = std::min(1.0, 2.0 * kPi / qo.p);
    const double r0 = cs->asymptotic_threshold() / (2.0 * qo.p);
    if (r0 < r_end) {
      r_end = r0;
      rays = true;
    }
  } else {
    b2.emplace(qo, ctx);
    r_end = std::min(r_end, reach(*b2));
  }

  // Real segment [0, r_end]: Gauss-Legendre panels, 16 and 24 nodes.
  const double L0 = 0.25 * std::min(L, 0.25 * b.N());
  const int panels = std::max(1, int(std::ceil((r_end - L0) / L)));
  const double h = (r_end - L0) / panels;
  const auto& lo = legendre_rule(16);
  const auto& hi = legendre_rule(24);
  struct Node {
    double r, w16, w24;
  };
  std::vector<Node> nodes;
  nodes.reserve(size_t(panels + 1) * 40);
  auto add_panel = [&](auto map) {
    const size_t first = nodes.size();
    for (int k = 0; k < 16; ++k) {
      const auto [r, jac] = map(lo.x[k]);
      nodes.push_back({r, lo.w[k] * jac, 0.0});
    }
    for (int k = 0; k < 24; ++k) {
      const auto [r, jac] = map(hi.x[k]);
      nodes.push_back({r, 0.0, hi.w[k] * jac});
    }
    std::sort(nodes.begin() + first, nodes.end(), [](const Node& x, const Node& y) { return x.r < y.r; });
  };
  // r = L0 u^3 on the first panel smooths the r^{2 gamma} behaviour at the origin.
  add_panel([&](double x) {
    const double u = 0.5 * (x + 1.0);
    return std::pair{L0 * u * u * u, 1.5 * L0 * u * u};
  });
  for (int p = 0; p < panels; ++p) {
    const double a = L0 + p * h;
    add_panel([&](double x) { return std::pair{a + 0.5 * h * (x + 1.0), 0.5 * h}; });
  }
  std::vector<double> r(nodes.size()), og(nodes.size()), of(nodes.size());
  for (size_t i = 0; i < nodes.size(); ++i) r[i] = nodes[i].r;
  if (cont) {
    cs->sweep(r, og.data(), of.data());
  } else {
    for (size_t i = 0; i < r.size(); ++i) b2->eval(r[i], og[i], of[i]);
  }
  double lo_sum = 0.0, hi_sum = 0.0, scale = 0.0;
  for (size_t i = 0; i < r.size(); ++i) {
    double bg, bf;
    b.eval(r[i], bg, bf);
    const double F = bg * og[i] + opt.sign * bf * of[i];
    lo_sum += nodes[i].w16 * F;
    hi_sum += nodes[i].w24 * F;
    scale += nodes[i].w24 * std::abs(F);
  }

  // Beyond r_end the outgoing and incoming parts are integrated along the
  // steepest-descent rays of e^{(+-ik - 1/N) r}, Gauss-Laguerre in the decay variable.
  if (rays) {
    const double k = qo.p, N = b.N();
    const cplx I(0.0, 1.0);
    auto ray = [&](const specfun::Quadrature& q, bool outgoing) {
      const cplx mu(1.0 / N, outgoing ? -k : k);
      const cplx d = std::conj(mu) / std::abs(mu);
      cplx acc = 0.0;
      for (size_t j = 0; j < q.x.size(); ++j) {
        const cplx rr = r_end + q.x[j] / std::abs(mu) * d;
        cplx bg, bf;
        bound_complex(b, rr, bg, bf);
        const auto t = outgoing ? cs->asymptotic_outgoing(2.0 * k * rr) : cs->asymptotic_incoming(2.0 * k * rr);
        const cplx G = 0.5 * cs->amp_g() * (t.first + t.second);
        const cplx F = cs->amp_f() / (2.0 * I) * (t.first - t.second);
        acc += q.w[j] * std::exp(q.x[j]) * (bg * G + double(opt.sign) * bf * F);
      }
      return acc * d / std::abs(mu);
    };
    const auto& g48 = laguerre_decay_rule(48);
    const auto& g64 = laguerre_decay_rule(64);
    const cplx t48 = ray(g48, true) + ray(g48, false);
    const cplx t64 = ray(g64, true) + ray(g64, false);
    lo_sum += t48.real();
    hi_sum += t64.real();
    scale += std::abs(t64) + std::abs(t64.imag());
    if (std::abs(t64.imag()) > opt.tol * std::max(std::abs(hi_sum), 1e-3 * scale))
      throw InsufficientGridError("quadrature_oracle: complex residue on the rays");
  }
  if (std::abs(hi_sum - lo_sum) > opt.tol * std::max(std::abs(hi_sum), 1e-3 * scale))
    throw InsufficientGridError("quadrature_oracle: rules disagree beyond tolerance");
  return hi_sum;
}

double quadrature_oracle(const RadialPair& a, const RadialPair& b, const std::vector<double>& weights, int sign,
                         double tol) {
  const size_t n = a.r.size();
  if (b.r.size() != n || weights.size() != n || a.rg.size() != n || b.rg.size() != n)
    throw std::invalid_argument("quadrature_oracle: grid mismatch");
  for (size_t i = 0; i < n; ++i)
    if (a.r[i] != b.r[i]) throw std::invalid_argument("quadrature_oracle: grid mismatch");
  std::vector<double> F(n);
  for (size_t i = 0; i < n; ++i) F[i] = a.rg[i] * b.rg[i] + sign * a.rf[i] * b.rf[i];
  double fine = 0.0, coarse = 0.0, scale = 0.0;
  for (size_t i = 0; i < n; ++i) {
    fine += weights[i] * F[i];
    scale += weights[i] * std::abs(F[i]);
    if (i % 2 == 0) {
      double w = weights[i];
      if (i > 0) w += 0.5 * weights[i - 1];
      if (i + 1 < n) w += 0.5 * weights[i + 1];
      if (i + 2 == n) w += 0.5 * weights[i + 1];  // last odd point has no right neighbour
      coarse += w * F[i];
    }
  }
  // Fine-rule error estimated as a quarter of the coarse discrepancy.
  if (0.25 * std::abs(fine - coarse) > tol * std::max(std::abs(fine), scale))
    throw InsufficientGridError("quadrature_oracle: grid too coarse for the requested tolerance");
  return fine;
}

SymmetricMatrixTable build_beta(const basis::BasisSet& bs, const BetaOptions& opt) {
  SymmetricMatrixTable t(bs.layout);
  const int nb = bs.layout.n_bound, dim = bs.layout.dim();
  const auto& ctx = bs.ctx;
  std::vector<BoundState> states;
  states.reserve(nb);
  for (int i = 0; i < nb; ++i) states.emplace_back(bs.labels[i], ctx);
  const auto rule = laguerre_rule(bs.labels[nb - 1].n_r, states[0].gamma());
  for (int i = 0; i < nb; ++i)
    for (int j = 0; j <= i; ++j) t.set(i, j, bound_pair(states[i], states[j], rule, -1));
  const int nc = dim - nb;
  parallel_for(nc, opt.threads, [&](int c) {
    const int j = nb + c;
    for (int i = 0; i < nb; ++i)
      t.set(i, j, beta_discretized(bs.labels[i], bs.bin_of(j), bs.seed.kappa, ctx, opt.rule));
  });
  for (int j = nb; j < dim; ++j) t.set(j, j, beta_continuum_diagonal(bs.bin_of(j), ctx));
  t.set_provenance(Block::Positive, Block::Positive, Provenance::Model);
  t.set_provenance(Block::Negative, Block::Negative, Provenance::Model);
  t.set_provenance(Block::Positive, Block::Negative, Provenance::Model);
  return t;
}

double continuum_offdiagonal_estimate(const basis::BasisSet& b, int i, int j) {
  if (!b.has_radial()) throw std::logic_error("continuum_offdiagonal_estimate needs radial samples");
  const auto& w = b.grid.w;
  double acc = 0.0;
  for (size_t k = 0; k < w.size(); ++k) acc += w[k] * (b.rg(i, k) * b.rg(j, k) - b.rf(i, k) * b.rf(j, k));
  return acc;
}

}  // namespace dirac::matelem
