#include "doctest.h"

#include "dirac/basis.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>

using namespace dirac;
using namespace dirac::basis;
using hydrogenic::QuantumNumbers;

namespace {

double integrate(const RadialGrid& g, const std::vector<double>& f) {
  double s = 0.0;
  for (size_t i = 0; i < g.size(); ++i) s += g.w[i] * f[i];
  return s;
}

// Norm of an eigendifferential missing beyond R from the sinc^2 envelope.
double truncation_law(double dp, double R) {
  return 2.0 / (std::numbers::pi * dp * R) - 2.0 * std::sin(dp * R) / (std::numbers::pi * dp * dp * R * R);
}

}  // namespace

TEST_CASE("momentum grids") {
  auto [gp, gn] = build_momentum_grids(BasisConfig::paper());
  CHECK(gp.size() == 512);
  CHECK(gn.size() == 1024);
  CHECK(gp.centers.front() == doctest::Approx(0.1));
  CHECK(gp.bin(0).lo() == doctest::Approx(0.05));
  CHECK(gp.centers.back() == doctest::Approx(51.2).epsilon(1e-12));
  CHECK(gn.centers.back() == doctest::Approx(102.4).epsilon(1e-12));
  CHECK(gp.eps == 1);
  CHECK(gn.eps == -1);
  for (size_t i = 1; i < gn.size(); ++i) CHECK(gn.bin(i).lo() == doctest::Approx(gn.bin(i - 1).hi()));

  auto cfg = BasisConfig::paper();
  cfg.dp = 0.05;
  cfg.n_pos *= 2;
  cfg.n_neg *= 2;
  cfg.p_lower = 0.075;
  auto [hp, hn] = build_momentum_grids(cfg);
  CHECK(hp.size() == 1024);
  CHECK(hp.bin(0).lo() == doctest::Approx(0.05));
  CHECK(hn.bin(hn.size() - 1).hi() == doctest::Approx(gn.bin(gn.size() - 1).hi()));

  cfg = BasisConfig::paper();
  cfg.convention = BinConvention::Edge;
  auto [ep, en] = build_momentum_grids(cfg);
  CHECK(ep.bin(0).lo() == doctest::Approx(0.1));
  CHECK(ep.centers.front() == doctest::Approx(0.15));

  cfg = BasisConfig::paper();
  cfg.dp = -0.1;
  CHECK_THROWS_AS(build_momentum_grids(cfg), hydrogenic::ConfigError);
  cfg = BasisConfig::paper();
  cfg.p_lower = 0.04;
  CHECK_THROWS_AS(cfg.validate(), hydrogenic::ConfigError);
}

TEST_CASE("radial grid weights") {
  const auto g = make_radial_grid(1e-6, 1.0, 60.0, 0.01);
  CHECK(g.r.front() == doctest::Approx(1e-6));
  CHECK(g.r.back() == doctest::Approx(60.0));
  for (size_t i = 1; i < g.size(); ++i) CHECK(g.r[i] > g.r[i - 1]);
  std::vector<double> f(g.size()), h(g.size());
  for (size_t i = 0; i < g.size(); ++i) {
    const double r = g.r[i];
    f[i] = r * r * std::exp(-r);
    h[i] = std::pow(r, 1.5) * std::exp(-2.0 * r);
  }
  CHECK(integrate(g, f) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(integrate(g, h) == doctest::Approx(std::tgamma(2.5) / std::pow(2.0, 2.5)).epsilon(1e-9));

  const auto p = make_radial_grid(BasisConfig::paper());
  CHECK(p.step <= 0.1 * 2.0 * std::numbers::pi / 102.4 + 1e-15);
  CHECK(p.size() > 30000);
  CHECK(p.hash() == make_radial_grid(BasisConfig::paper()).hash());
  CHECK(p.hash() != make_radial_grid(BasisConfig::desk()).hash());
}

TEST_CASE("assembled basis layout") {
  const auto ctx = hydrogenic::PhysicalContext::make(92.0);
  const auto b = assemble_basis(QuantumNumbers::bound(-1, 0.5, 0), BasisConfig::paper(), ctx);
  CHECK(b.layout.dim() == 1576);
  CHECK(b.layout.n_plus() == 552);
  CHECK(b.seed_index == 0);
  CHECK(b.labels[39].n_r == 39);
  CHECK(b.labels[39].principal() == 40);
  CHECK(b.layout.block_of(39) == Block::Bound);
  CHECK(b.layout.block_of(40) == Block::Positive);
  CHECK(b.layout.block_of(552) == Block::Negative);
  CHECK(b.eps[551] == 1);
  CHECK(b.eps[552] == -1);
  CHECK(b.bin_of(40).center == doctest::Approx(0.1));
  CHECK(b.energies[552] < -1.0);
  CHECK(b.energies[40] > 1.0);
  for (const auto& q : b.labels) {
    CHECK(q.kappa == -1);
    CHECK(q.m == 0.5);
  }
  CHECK_FALSE(b.has_radial());

  const auto p = assemble_basis(QuantumNumbers::bound(1, 0.5, 1), BasisConfig::desk(), ctx);
  CHECK(p.labels.front().principal() == 2);
  CHECK(p.labels[19].principal() == 21);
  CHECK(p.seed_index == 0);
  const auto p3 = assemble_basis(QuantumNumbers::bound(-2, 1.5, 0), BasisConfig::desk(), ctx);
  CHECK(p3.labels.front().principal() == 2);

  CHECK_THROWS_AS(assemble_basis(QuantumNumbers::bound(-1, 0.5, 45), BasisConfig::paper(), ctx),
                  hydrogenic::ConfigError);
  CHECK_THROWS_AS(assemble_basis(QuantumNumbers::continuum(-1, 0.5, 1.0, 1), BasisConfig::paper(), ctx),
                  hydrogenic::ConfigError);
}

TEST_CASE("eigendifferential norm follows the sinc envelope") {
  const auto ctx = hydrogenic::PhysicalContext::make(92.0);
  const double R = 200.0, dp = 0.1;
  const auto g = make_radial_grid(1e-6, 1.0, R, 0.004);
  for (double p : {2.0, 7.3, 20.0}) {
    for (int eps : {1, -1}) {
      const auto a = eigendifferential({p, dp, eps}, -1, ctx, g.r);
      std::vector<double> d(g.size());
      for (size_t i = 0; i < g.size(); ++i) d[i] = a.rg[i] * a.rg[i] + a.rf[i] * a.rf[i];
      CHECK(integrate(g, d) == doctest::Approx(1.0 - truncation_law(dp, R)).epsilon(1.5e-3));
      // neighbours and bound states stay orthogonal within the truncation scale
      const auto b = eigendifferential({p + dp, dp, eps}, -1, ctx, g.r);
      for (size_t i = 0; i < g.size(); ++i) d[i] = a.rg[i] * b.rg[i] + a.rf[i] * b.rf[i];
      CHECK(std::abs(integrate(g, d)) < 0.02);
      const auto s = hydrogenic::BoundState(QuantumNumbers::bound(-1, 0.5, 0), ctx).sample(g.r);
      for (size_t i = 0; i < g.size(); ++i) d[i] = a.rg[i] * s.rg[i] + a.rf[i] * s.rf[i];
      CHECK(std::abs(integrate(g, d)) < 1e-6);
    }
  }
}

TEST_CASE("eigendifferential bin quadrature converged") {
  const auto ctx = hydrogenic::PhysicalContext::make(47.0);
  const std::vector<double> r = {0.01, 0.3, 2.0, 15.0, 80.0};
  for (double p : {0.1, 3.0, 51.2}) {
    const auto a = eigendifferential({p, 0.1, -1}, -1, ctx, r, 16);
    const auto b = eigendifferential({p, 0.1, -1}, -1, ctx, r, 32);
    for (size_t i = 0; i < r.size(); ++i) {
      CHECK(a.rg[i] == doctest::Approx(b.rg[i]).epsilon(1e-8).scale(1e-6));
      CHECK(a.rf[i] == doctest::Approx(b.rf[i]).epsilon(1e-8).scale(1e-6));
    }
  }
}

TEST_CASE("sampled basis, gram bound block and cache round trip") {
  const auto ctx = hydrogenic::PhysicalContext::make(24.0);
  auto cfg = BasisConfig::desk();
  cfg.n_bound = 6;
  cfg.n_pos = 8;
  cfg.n_neg = 8;
  cfg.r_max = 120.0;
  cfg.step_fraction = 0.002;
  auto b = assemble_basis(QuantumNumbers::bound(-1, 0.5, 0), cfg, ctx, true, 2);
  REQUIRE(b.has_radial());
  const auto G = gram_matrix(b);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) CHECK(G(i, j) == doctest::Approx(i == j ? 1.0 : 0.0).scale(1.0).epsilon(1e-8));

  std::vector<double> sg(b.grid.size()), sf(b.grid.size());
  sample_state(b, 9, b.grid.r, sg.data(), sf.data());
  const size_t mid = b.grid.size() / 2;
  CHECK(sg[mid] == b.rg(9, mid));
  CHECK(sf[10] == b.rf(9, 10));

  const auto serial = assemble_basis(QuantumNumbers::bound(-1, 0.5, 0), cfg, ctx, true, 1);
  CHECK((serial.rg.array() == b.rg.array()).all());

  const auto path = std::filesystem::temp_directory_path() / ("dirac_cache_test_" + cache_key(b) + ".bin");
  REQUIRE(save_radial_cache(b, path.string()));
  auto c = assemble_basis(QuantumNumbers::bound(-1, 0.5, 0), cfg, ctx, false);
  REQUIRE(load_radial_cache(c, path.string()));
  CHECK((c.rg.array() == b.rg.array()).all());
  CHECK((c.rf.array() == b.rf.array()).all());

  auto other = cfg;
  other.n_neg = 9;
  auto d = assemble_basis(QuantumNumbers::bound(-1, 0.5, 0), other, ctx, false);
  CHECK(cache_key(d) != cache_key(b));
  CHECK_FALSE(load_radial_cache(d, path.string()));
  std::filesystem::remove(path);
  CHECK_FALSE(load_radial_cache(d, path.string()));
}

TEST_CASE("config hash tracks every field") {
  auto a = BasisConfig::paper();
  auto b = a;
  CHECK(a.hash() == b.hash());
  b.gl_nodes = 24;
  CHECK(a.hash() != b.hash());
  b = a;
  b.convention = BinConvention::Edge;
  CHECK(a.hash() != b.hash());
}
