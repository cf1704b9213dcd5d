#include "doctest.h"

#include "dirac/matelem.hpp"

#include <cmath>
#include <random>
#include <sstream>

using namespace dirac;
using namespace dirac::matelem;
using hydrogenic::PhysicalContext;
using hydrogenic::QuantumNumbers;

namespace {

QuantumNumbers s_state(int n_r) { return QuantumNumbers::bound(-1, 0.5, n_r); }

}  // namespace

TEST_CASE("bound-bound table values") {
  // frozen from an independent 50-digit evaluation of the same integrals
  struct Row {
    double Z, n3, n5, n10;
  };
  const Row rows[] = {{1.0, -3.680746e-6, -1.979841e-6, -7.923391e-7},
                      {92.0, -3.161448e-2, -1.649000e-2, -6.415175e-3}};
  for (const auto& row : rows) {
    const auto ctx = PhysicalContext::make(row.Z);
    CHECK(beta_bound_bound(s_state(0), s_state(0), ctx) ==
          doctest::Approx(std::sqrt(1.0 - ctx.aZ() * ctx.aZ())).epsilon(1e-13));
    CHECK(beta_bound_bound(s_state(0), s_state(3), ctx) == doctest::Approx(row.n3).epsilon(1e-6));
    CHECK(beta_bound_bound(s_state(0), s_state(5), ctx) == doctest::Approx(row.n5).epsilon(1e-6));
    CHECK(beta_bound_bound(s_state(0), s_state(10), ctx) == doctest::Approx(row.n10).epsilon(1e-6));
  }
  const double expect[] = {0.984544, 0.939344, 0.841662};
  const double Zs[] = {24.0, 47.0, 74.0};
  for (int k = 0; k < 3; ++k)
    CHECK(beta_bound_bound(s_state(0), s_state(0), PhysicalContext::make(Zs[k])) ==
          doctest::Approx(expect[k]).epsilon(2e-6));
}

TEST_CASE("diagonal equals the energy") {
  for (double Z : {1.0, 92.0}) {
    const auto ctx = PhysicalContext::make(Z);
    for (int kappa : {-1, 1, -2}) {
      const int n0 = kappa > 0 ? 1 : 0;
      for (int nr = n0; nr < n0 + 40; ++nr) {
        const auto q = QuantumNumbers::bound(kappa, 0.5, nr);
        CHECK(std::abs(beta_bound_bound(q, q, ctx) - hydrogenic::bound_energy(q, ctx)) < 1e-12);
        CHECK(overlap_bound_bound(q, q, ctx) == doctest::Approx(1.0).epsilon(1e-12));
      }
    }
    const auto q1 = s_state(0);
    CHECK(std::abs(beta_bound_bound(q1, q1, ctx) - std::sqrt(1 - ctx.aZ() * ctx.aZ())) < 1e-12);
  }
}

TEST_CASE("bound-bound: Euler path, orthogonality, selection rule") {
  const auto ctx = PhysicalContext::make(74.0);
  // the expanded-polynomial path cancels badly beyond n_r ~ 6
  for (int a = 0; a < 6; ++a)
    for (int b = 0; b < 6; ++b) {
      CHECK(beta_bound_bound_euler(s_state(a), s_state(b), ctx) ==
            doctest::Approx(beta_bound_bound(s_state(a), s_state(b), ctx)).epsilon(5e-8));
      if (a != b) CHECK(std::abs(overlap_bound_bound(s_state(a), s_state(b), ctx)) < 1e-13);
    }
  CHECK(beta_bound_bound(s_state(0), QuantumNumbers::bound(1, 0.5, 1), ctx) == 0.0);
  CHECK(beta_bound_bound(s_state(0), QuantumNumbers::bound(-1, -0.5, 1), ctx) == 0.0);
  CHECK(beta_bound_bound(s_state(2), s_state(5), ctx) == beta_bound_bound(s_state(5), s_state(2), ctx));
}

TEST_CASE("bound-bound decay with n") {
  const auto ctx = PhysicalContext::make(92.0);
  // least-squares slope of log|beta| against log n over n = 5..40
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (int n = 5; n <= 40; ++n, ++m) {
    const double x = std::log(double(n)), y = std::log(std::abs(beta_bound_bound(s_state(0), s_state(n - 1), ctx)));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  CHECK(slope == doctest::Approx(-1.5).epsilon(0.2 / 1.5));
}

TEST_CASE("bound-continuum against the radial oracle") {
  for (double Z : {1.0, 92.0}) {
    const auto ctx = PhysicalContext::make(Z);
    for (int nr : {0, 3, 17}) {
      for (double p : {0.1, 1.0, 9.35, 102.4}) {
        for (int eps : {1, -1}) {
          const auto qc = QuantumNumbers::continuum(-1, 0.5, p, eps);
          const double a = beta_bound_continuum(s_state(nr), qc, ctx);
          const double o = quadrature_oracle(s_state(nr), qc, ctx);
          CHECK(std::abs(a - o) <= 1e-7 * std::abs(o) + 1e-15);
          CHECK(std::abs(overlap_bound_continuum(s_state(nr), qc, ctx)) < 1e-9 * (1.0 + std::abs(a)));
        }
      }
    }
  }
  const auto ctx = PhysicalContext::make(92.0);
  CHECK(quadrature_oracle(s_state(0), s_state(0), PhysicalContext::make(1.0)) ==
        doctest::Approx(0.99997337).epsilon(1e-7));
  OracleOptions plus;
  plus.sign = 1;
  plus.tol = 1e-8;
  CHECK(std::abs(quadrature_oracle(s_state(0), s_state(1), ctx, plus)) < 1e-8);
  CHECK(quadrature_oracle(s_state(4), s_state(7), ctx) ==
        doctest::Approx(beta_bound_bound(s_state(4), s_state(7), ctx)).epsilon(1e-10));
  CHECK_THROWS(quadrature_oracle(QuantumNumbers::continuum(-1, 0.5, 1.0, 1),
                                 QuantumNumbers::continuum(-1, 0.5, 2.0, 1), ctx));
}

TEST_CASE("bound-continuum shape") {
  const auto ctx = PhysicalContext::make(92.0);
  auto beta = [&](int nr, double p, int eps) {
    return beta_bound_continuum(s_state(nr), QuantumNumbers::continuum(-1, 0.5, p, eps), ctx);
  };
  // one signed extremum on a log sweep; returns (peak |beta|, p at peak)
  auto sweep = [&](int nr, int eps) {
    std::vector<double> p, v;
    for (double x = 0.01; x < 40.0; x *= 1.05) {
      p.push_back(x);
      v.push_back(beta(nr, x, eps));
    }
    int turns = 0;
    for (size_t i = 2; i < v.size(); ++i)
      if ((v[i] - v[i - 1]) * (v[i - 1] - v[i - 2]) < 0) ++turns;
    CHECK(turns == 1);
    size_t k = 0;
    for (size_t i = 0; i < v.size(); ++i)
      if (std::abs(v[i]) > std::abs(v[k])) k = i;
    CHECK(std::abs(v.back()) < 0.05 * std::abs(v[k]));
    return std::pair{std::abs(v[k]), p[k]};
  };
  const auto neg = sweep(0, -1);
  CHECK(neg.second == doctest::Approx(1.6).epsilon(0.1));
  double last = 1e9;
  for (int nr : {0, 1, 2, 4}) {
    const auto pos = sweep(nr, 1);
    CHECK(neg.first > 2.5 * pos.first);
    CHECK(pos.second < last);
    last = pos.second;
  }
  // both vanish towards K = 0; the negative branch is Coulomb suppressed by exp(pi y / 2)
  CHECK(std::abs(beta(0, 1e-3, 1)) < std::abs(beta(0, 1e-2, 1)));
  CHECK(std::abs(beta(0, 0.1, -1)) < 1e-12);
  for (double p : {1.0, 1.7, 3.0, 10.0}) CHECK(std::abs(beta(0, p, -1)) > 2.0 * std::abs(beta(0, p, 1)));
}

TEST_CASE("discretized elements") {
  const auto ctx = PhysicalContext::make(92.0);
  const basis::MomentumBin bin{1.0, 0.1, -1};
  const double direct = beta_bound_continuum(s_state(0), QuantumNumbers::continuum(-1, 0.5, 1.0, -1), ctx);
  CHECK(beta_discretized(s_state(0), bin, -1, ctx) == doctest::Approx(std::sqrt(0.1) * direct).epsilon(1e-14));
  CHECK(beta_discretized(s_state(0), bin, 1, ctx) == 0.0);
  CHECK(beta_discretized(s_state(0), bin, -2, ctx, BinRule::Quadrature) == 0.0);
  // midpoint limit of the bin average
  for (double p : {2.0, 10.0}) {
    double prev = 1.0;
    for (double dp : {0.1, 0.05, 0.025}) {
      const basis::MomentumBin b{p, dp, 1};
      const double ratio = beta_discretized(s_state(0), b, -1, ctx, BinRule::Quadrature) /
                           beta_discretized(s_state(0), b, -1, ctx, BinRule::Midpoint);
      CHECK(std::abs(ratio - 1.0) < 1e-3 * dp * dp / 0.01);
      CHECK(std::abs(ratio - 1.0) <= prev);
      prev = std::abs(ratio - 1.0);
    }
  }
  // low-p negative bins oscillate strongly in p; the bin rule stays converged
  const basis::MomentumBin low{0.1, 0.1, -1};
  CHECK(beta_discretized(s_state(39), low, -1, ctx, BinRule::Quadrature, 16) ==
        doctest::Approx(beta_discretized(s_state(39), low, -1, ctx, BinRule::Quadrature, 64)).epsilon(1e-7));
  CHECK_THROWS_AS(beta_discretized(s_state(0), basis::MomentumBin{0.02, 0.1, 1}, -1, ctx), hydrogenic::ConfigError);
}

TEST_CASE("continuum diagonals") {
  const auto ctx = PhysicalContext::make(92.0);
  const double a = ctx.aZ();
  CHECK(beta_continuum_diagonal({1e-4, 1e-5, 1}, ctx) == doctest::Approx(1.0));
  CHECK(beta_continuum_diagonal({1e-4, 1e-5, -1}, ctx) == doctest::Approx(-1.0));
  CHECK(beta_continuum_diagonal({1.0, 0.1, -1}, ctx) ==
        doctest::Approx(-1.0 / std::sqrt(1.0 + a * a)).epsilon(2e-3));
  // bin average of 1/W by brute force
  double s = 0.0;
  const int n = 20000;
  for (int k = 0; k < n; ++k) {
    const double p = 0.95 + (k + 0.5) * 0.1 / n;
    s += 1.0 / std::sqrt(1.0 + a * a * p * p);
  }
  CHECK(beta_continuum_diagonal({1.0, 0.1, -1}, ctx) == doctest::Approx(-s / n).epsilon(1e-9));
  CHECK(beta_continuum_diagonal({102.4, 0.1, 1}, ctx) < 0.02);

  CHECK(z_negative_diagonal({1e5, 0.1, -1}, ctx) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-4));
  const double z = z_negative_diagonal({0.1, 0.1, -1}, ctx);
  CHECK(z == doctest::Approx(1.0 / std::sqrt(2.0 - 2.0 * beta_continuum_diagonal({0.1, 0.1, -1}, ctx))).epsilon(1e-15));
  CHECK(z > 0.49);
  CHECK(z < 0.51);
  CHECK_THROWS_AS(z_negative_diagonal({1.0, 0.1, 1}, ctx), hydrogenic::ConfigError);
}

TEST_CASE("beta table assembly") {
  const auto ctx = PhysicalContext::make(92.0);
  auto cfg = basis::BasisConfig::desk();
  cfg.n_bound = 5;
  cfg.n_pos = 12;
  cfg.n_neg = 20;
  const auto b = basis::assemble_basis(s_state(0), cfg, ctx);
  const auto t = build_beta(b);
  BetaOptions par;
  par.threads = 3;
  const auto t3 = build_beta(b, par);
  CHECK(t.all_finite());
  CHECK(t.dim() == 37);
  for (int i = 0; i < t.dim(); ++i)
    for (int j = 0; j < t.dim(); ++j) {
      CHECK(t(i, j) == t(j, i));
      CHECK(t(i, j) == t3(i, j));
    }
  CHECK(t(0, 0) == doctest::Approx(std::sqrt(1.0 - ctx.aZ() * ctx.aZ())).epsilon(1e-13));
  CHECK(t(6, 7) == 0.0);
  CHECK(t(30, 8) == 0.0);
  CHECK(t(30, 30) == beta_continuum_diagonal(b.bin_of(30), ctx));
  CHECK(t(2, 20) == beta_discretized(s_state(2), b.bin_of(20), -1, ctx));
  for (int i = 0; i < t.dim(); ++i) {
    CHECK(t(i, i) > -1.0);
    CHECK(t(i, i) <= 1.0);
  }
  CHECK(t.provenance(basis::Block::Bound, basis::Block::Negative) == Provenance::Analytic);
  CHECK(t.provenance(basis::Block::Negative, basis::Block::Negative) == Provenance::Model);
  const auto blk = t.block(basis::Block::Bound, basis::Block::Negative);
  CHECK(blk.rows() == 5);
  CHECK(blk.cols() == 20);
  CHECK(blk(1, 3) == t(1, 20));

  std::ostringstream os;
  t.write_csv(os, 1e-300);
  const std::string csv = os.str();
  CHECK(csv.rfind("i,j,value,block\n", 0) == 0);
  CHECK(csv.find("\n0,0,") != std::string::npos);
  CHECK(csv.find(",bound-neg\n") != std::string::npos);
  std::ostringstream again;
  t3.write_csv(again, 1e-300);
  CHECK(again.str() == csv);
}

TEST_CASE("random oracle pairs") {
  std::mt19937_64 rng(20240917);
  std::uniform_int_distribution<int> nr(0, 39);
  std::uniform_real_distribution<double> lp(std::log(0.1), std::log(102.4));
  const auto ctx = PhysicalContext::make(47.0);
  for (int k = 0; k < 12; ++k) {
    const double p = std::exp(lp(rng));
    const auto qc = QuantumNumbers::continuum(-1, 0.5, p, k % 2 ? 1 : -1);
    const auto qb = s_state(nr(rng));
    CHECK(beta_bound_continuum(qb, qc, ctx) == doctest::Approx(quadrature_oracle(qb, qc, ctx)).epsilon(1e-6));
  }
}
