#include "dirac/basis.hpp"

#include "dirac/parallel.hpp"
#include "dirac/specfun.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace dirac::basis {

using hydrogenic::BoundState;
using hydrogenic::ConfigError;
using hydrogenic::ContinuumState;

namespace {

std::string fmt(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

uint64_t fnv1a(const std::string& s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// Gregory end weights (exact for cubics) for n intervals of unit width.
std::vector<double> gregory(size_t n) {
  std::vector<double> w(n + 1, 1.0);
  if (n < 6) {
    w.front() = w.back() = 0.5;
    return w;
  }
  const double e[3] = {3.0 / 8.0, 7.0 / 6.0, 23.0 / 24.0};
  for (int k = 0; k < 3; ++k) {
    w[k] = e[k];
    w[n - k] = e[k];
  }
  return w;
}

}  // namespace

BasisConfig BasisConfig::paper() { return BasisConfig{}; }

BasisConfig BasisConfig::desk() {
  BasisConfig c;
  c.n_bound = 20;
  c.n_pos = 128;
  c.n_neg = 256;
  c.r_max = 120.0;
  return c;
}

void BasisConfig::validate() const {
  if (n_bound < 1) throw ConfigError("basis needs at least one bound state");
  if (n_pos < 0 || n_neg < 0) throw ConfigError("continuum bin counts must be nonnegative");
  if (!(dp > 0.0)) throw ConfigError("momentum step must be positive");
  if (!(p_lower > 0.0)) throw ConfigError("momentum lower limit must be positive");
  if (convention == BinConvention::Center && !(p_lower - 0.5 * dp > 0.0))
    throw ConfigError("first bin would reach p <= 0");
  if (gl_nodes < 1 || gl_nodes > 128) throw ConfigError("bin quadrature order out of range");
  if (!(r_min > 0.0) || !(r_log_end > r_min) || !(r_max > r_log_end))
    throw ConfigError("radial grid needs 0 < r_min < r_log_end < r_max");
  if (!(step_fraction > 0.0) || step_fraction > 1.0) throw ConfigError("step fraction must be in (0, 1]");
}

double BasisConfig::k_max() const {
  const double first = convention == BinConvention::Center ? p_lower : p_lower + 0.5 * dp;
  const int n = std::max({n_pos, n_neg, 1});
  return first + (n - 0.5) * dp;
}

std::string BasisConfig::hash() const {
  std::ostringstream s;
  s << n_bound << ',' << n_pos << ',' << n_neg << ',' << fmt(dp) << ',' << fmt(p_lower) << ','
    << (convention == BinConvention::Center ? 'c' : 'e') << ',' << gl_nodes << ',' << fmt(r_min) << ','
    << fmt(r_log_end) << ',' << fmt(r_max) << ',' << fmt(step_fraction);
  return hex(fnv1a(s.str()));
}

std::pair<MomentumGrid, MomentumGrid> build_momentum_grids(const BasisConfig& cfg) {
  cfg.validate();
  const double first = cfg.convention == BinConvention::Center ? cfg.p_lower : cfg.p_lower + 0.5 * cfg.dp;
  auto make = [&](int n, int eps) {
    MomentumGrid g;
    g.dp = cfg.dp;
    g.eps = eps;
    g.centers.resize(n);
    for (int i = 0; i < n; ++i) g.centers[i] = first + i * cfg.dp;
    return g;
  };
  return {make(cfg.n_pos, 1), make(cfg.n_neg, -1)};
}

std::string RadialGrid::hash() const {
  uint64_t h = 1469598103934665603ull;
  auto mix = [&](double v) {
    const uint64_t bits = std::bit_cast<uint64_t>(v);
    for (int k = 0; k < 8; ++k) {
      h ^= (bits >> (8 * k)) & 0xff;
      h *= 1099511628211ull;
    }
  };
  for (size_t i = 0; i < r.size(); ++i) {
    mix(r[i]);
    mix(w[i]);
  }
  return hex(h);
}

RadialGrid make_radial_grid(double r_min, double r_log_end, double r_max, double step) {
  if (!(r_min > 0.0) || !(r_log_end > r_min) || !(r_max > r_log_end) || !(step > 0.0))
    throw ConfigError("invalid radial grid parameters");
  RadialGrid g;
  const size_t nu = std::max<size_t>(6, size_t(std::ceil((r_max - r_log_end) / step)));
  const double h = (r_max - r_log_end) / nu;
  const double span = std::log(r_log_end / r_min);
  const size_t nl = std::max<size_t>(6, size_t(std::ceil(span * r_log_end / h)));
  const double dt = span / nl;
  const auto wl = gregory(nl);
  const auto wu = gregory(nu);
  g.r.reserve(nl + nu + 1);
  g.w.reserve(nl + nu + 1);
  const double t0 = std::log(r_min);
  for (size_t i = 0; i < nl; ++i) {
    const double r = std::exp(t0 + i * dt);
    g.r.push_back(r);
    g.w.push_back(wl[i] * dt * r);
  }
  g.uniform_begin = g.r.size();
  for (size_t i = 0; i <= nu; ++i) {
    g.r.push_back(i == nu ? r_max : r_log_end + i * h);
    g.w.push_back(wu[i] * h);
  }
  g.w[g.uniform_begin] += wl[nl] * dt * r_log_end;
  g.step = h;
  return g;
}

RadialGrid make_radial_grid(const BasisConfig& cfg) {
  cfg.validate();
  const double step = cfg.step_fraction * 2.0 * std::numbers::pi / cfg.k_max();
  return make_radial_grid(cfg.r_min, cfg.r_log_end, cfg.r_max, step);
}

void eigendifferential(const MomentumBin& bin, int kappa, const PhysicalContext& ctx,
                       const std::vector<double>& grid, int nodes, double* rg, double* rf) {
  if (!(bin.width > 0.0) || !(bin.lo() > 0.0) || (bin.eps != 1 && bin.eps != -1))
    throw ConfigError("invalid momentum bin");
  const auto q = specfun::gauss_legendre(nodes);
  const size_t n = grid.size();
  std::fill(rg, rg + n, 0.0);
  std::fill(rf, rf + n, 0.0);
  std::vector<double> tg(n), tf(n);
  const double half = 0.5 * bin.width;
  const double scale = half / std::sqrt(bin.width);
  for (int k = 0; k < nodes; ++k) {
    ContinuumState st(bin.center + half * q.x[k], bin.eps, kappa, ctx);
    st.sweep(grid, tg.data(), tf.data());
    const double w = scale * q.w[k];
    for (size_t i = 0; i < n; ++i) {
      rg[i] += w * tg[i];
      rf[i] += w * tf[i];
    }
  }
}

RadialPair eigendifferential(const MomentumBin& bin, int kappa, const PhysicalContext& ctx,
                             const std::vector<double>& grid, int nodes) {
  RadialPair rp;
  rp.r = grid;
  rp.rg.resize(grid.size());
  rp.rf.resize(grid.size());
  eigendifferential(bin, kappa, ctx, grid, nodes, rp.rg.data(), rp.rf.data());
  rp.energy = hydrogenic::continuum_energy(bin.center, bin.eps, ctx);
  rp.label = QuantumNumbers::continuum(kappa, 0.5, bin.center, bin.eps);
  return rp;
}

Block BlockLayout::block_of(int i) const {
  if (i < 0 || i >= dim()) throw std::out_of_range("basis index out of range");
  if (i < n_bound) return Block::Bound;
  if (i < n_bound + n_pos) return Block::Positive;
  return Block::Negative;
}

int first_radial_number(int kappa) { return kappa > 0 ? 1 : 0; }

BasisSet assemble_basis(const QuantumNumbers& seed, const BasisConfig& cfg, const PhysicalContext& ctx,
                        bool with_radial, int threads) {
  cfg.validate();
  if (seed.kind != hydrogenic::Kind::Bound) throw ConfigError("seed must be a bound state");
  seed.validate(ctx);
  const int n0 = first_radial_number(seed.kappa);
  if (seed.n_r - n0 >= cfg.n_bound) throw ConfigError("seed lies outside the bound block");

  BasisSet b;
  b.ctx = ctx;
  b.seed = seed;
  b.config = cfg;
  b.layout = {cfg.n_bound, cfg.n_pos, cfg.n_neg};
  b.seed_index = seed.n_r - n0;
  const int dim = b.layout.dim();
  b.labels.reserve(dim);
  b.energies.reserve(dim);
  b.eps.reserve(dim);
  for (int i = 0; i < cfg.n_bound; ++i) {
    auto q = QuantumNumbers::bound(seed.kappa, seed.m, n0 + i);
    b.labels.push_back(q);
    b.energies.push_back(hydrogenic::bound_energy(q, ctx));
    b.eps.push_back(1);
  }
  const auto [gp, gn] = build_momentum_grids(cfg);
  for (const auto* g : {&gp, &gn}) {
    for (size_t i = 0; i < g->size(); ++i) {
      const auto bin = g->bin(i);
      b.bins.push_back(bin);
      b.labels.push_back(QuantumNumbers::continuum(seed.kappa, seed.m, bin.center, bin.eps));
      b.energies.push_back(hydrogenic::continuum_energy(bin.center, bin.eps, ctx));
      b.eps.push_back(bin.eps);
    }
  }
  b.grid = make_radial_grid(cfg);
  if (with_radial) sample_radial(b, threads);
  return b;
}

void sample_radial(BasisSet& b, int threads) {
  const int dim = b.layout.dim();
  const size_t nr = b.grid.size();
  b.rg.resize(dim, nr);
  b.rf.resize(dim, nr);
  parallel_for(dim, threads, [&](int i) { sample_state(b, i, b.grid.r, b.rg.row(i).data(), b.rf.row(i).data()); });
}

void sample_state(const BasisSet& b, int i, const std::vector<double>& r, double* rg, double* rf) {
  if (i < 0 || i >= b.layout.dim()) throw std::out_of_range("sample_state: index");
  if (i < b.layout.n_bound) {
    BoundState st(b.labels[i], b.ctx);
    for (size_t k = 0; k < r.size(); ++k) st.eval(r[k], rg[k], rf[k]);
  } else {
    eigendifferential(b.bin_of(i), b.seed.kappa, b.ctx, r, b.config.gl_nodes, rg, rf);
  }
}

Eigen::MatrixXd gram_matrix(const BasisSet& b) {
  if (!b.has_radial()) throw std::logic_error("gram_matrix needs radial samples");
  const Eigen::Map<const Eigen::VectorXd> w(b.grid.w.data(), b.grid.w.size());
  const Eigen::VectorXd sw = w.cwiseSqrt();
  const RowMatrix G = b.rg * sw.asDiagonal();
  const RowMatrix F = b.rf * sw.asDiagonal();
  Eigen::MatrixXd out(b.layout.dim(), b.layout.dim());
  out.setZero();
  out.selfadjointView<Eigen::Lower>().rankUpdate(G);
  out.selfadjointView<Eigen::Lower>().rankUpdate(F);
  return out.selfadjointView<Eigen::Lower>();
}

std::string cache_key(const BasisSet& b) {
  std::ostringstream s;
  s << fmt(b.ctx.Z_effective) << ',' << fmt(b.ctx.alpha) << ',' << b.seed.kappa << ',' << b.config.hash() << ','
    << b.grid.hash();
  return hex(fnv1a(s.str()));
}

namespace {

std::string cache_header(const BasisSet& b) {
  std::ostringstream s;
  s << "{\"format\":\"dirac-radial\",\"version\":1,\"key\":\"" << cache_key(b) << "\",\"Z\":"
    << fmt(b.ctx.Z_effective) << ",\"kappa\":" << b.seed.kappa << ",\"states\":" << b.layout.dim()
    << ",\"radii\":" << b.grid.size() << ",\"arrays\":[\"r\",\"rg\",\"rf\"],\"dtype\":\"<f8\",\"order\":\"row\"}";
  return s.str();
}

void write_le(std::ostream& os, const double* p, size_t n) {
  if constexpr (std::endian::native == std::endian::little) {
    os.write(reinterpret_cast<const char*>(p), std::streamsize(n * sizeof(double)));
  } else {
    for (size_t i = 0; i < n; ++i) {
      uint64_t v = __builtin_bswap64(std::bit_cast<uint64_t>(p[i]));
      os.write(reinterpret_cast<const char*>(&v), 8);
    }
  }
}

bool read_le(std::istream& is, double* p, size_t n) {
  is.read(reinterpret_cast<char*>(p), std::streamsize(n * sizeof(double)));
  if (!is) return false;
  if constexpr (std::endian::native != std::endian::little) {
    for (size_t i = 0; i < n; ++i) p[i] = std::bit_cast<double>(__builtin_bswap64(std::bit_cast<uint64_t>(p[i])));
  }
  return true;
}

}  // namespace

bool save_radial_cache(const BasisSet& b, const std::string& path) {
  if (!b.has_radial()) return false;
  std::ofstream os(path, std::ios::binary);
  if (!os) return false;
  os << cache_header(b) << '\n';
  write_le(os, b.grid.r.data(), b.grid.size());
  for (const auto* m : {&b.rg, &b.rf}) write_le(os, m->data(), size_t(m->size()));
  return bool(os);
}

bool load_radial_cache(BasisSet& b, const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) return false;
  std::string header;
  if (!std::getline(is, header) || header != cache_header(b)) return false;
  const size_t nr = b.grid.size();
  const int dim = b.layout.dim();
  std::vector<double> r(nr);
  if (!read_le(is, r.data(), nr) || r != b.grid.r) return false;
  RowMatrix g(dim, nr), f(dim, nr);
  for (auto* m : {&g, &f})
    if (!read_le(is, m->data(), size_t(m->size()))) return false;
  b.rg = std::move(g);
  b.rf = std::move(f);
  return true;
}

}  // namespace dirac::basis
