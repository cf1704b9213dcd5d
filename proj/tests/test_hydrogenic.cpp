#include "doctest.h"

#include "dirac/hydrogenic.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

using namespace dirac::hydrogenic;

namespace {

// Trapezoid in t = ln r; smooth integrands converge geometrically.
template <class F>
double log_quad(F f, double rmax = 2500.0, int n = 40000) {
  const double t0 = std::log(1e-9), t1 = std::log(rmax);
  const double h = (t1 - t0) / n;
  double s = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double r = std::exp(t0 + i * h);
    s += (i == 0 || i == n ? 0.5 : 1.0) * f(r) * r;
  }
  return s * h;
}

double overlap(const BoundState& a, const BoundState& b, double sign) {
  return log_quad([&](double r) {
    double g1, f1, g2, f2;
    a.eval(r, g1, f1);
    b.eval(r, g2, f2);
    return g1 * g2 + sign * f1 * f2;
  });
}

}  // namespace

TEST_CASE("kappa_of") {
  CHECK(kappa_of(0.5, 0) == -1);
  CHECK(kappa_of(0.5, 1) == 1);
  CHECK(kappa_of(1.5, 1) == -2);
  CHECK(kappa_of(2.5, 2) == -3);
  CHECK_THROWS_AS(kappa_of(1.5, 0), ConfigError);
}

TEST_CASE("context validation") {
  CHECK_THROWS_AS(PhysicalContext::make(140.0), ConfigError);
  CHECK_THROWS_AS(PhysicalContext::make(0.0), ConfigError);
  const auto ctx = PhysicalContext::make(92.0);
  CHECK_THROWS_AS(QuantumNumbers::bound(1, 0.5, 0).validate(ctx), ConfigError);
  CHECK_THROWS_AS(QuantumNumbers::bound(0, 0.5, 0).validate(ctx), ConfigError);
  CHECK_THROWS_AS(QuantumNumbers::continuum(-1, 0.5, -1.0, 1).validate(ctx), ConfigError);
  CHECK_NOTHROW(QuantumNumbers::bound(-2, 1.5, 0).validate(ctx));
}

TEST_CASE("bound energies") {
  for (double Z : {1.0, 24.0, 92.0}) {
    const auto ctx = PhysicalContext::make(Z);
    CHECK(bound_energy(QuantumNumbers::bound(-1, 0.5, 0), ctx) ==
          doctest::Approx(std::sqrt(1 - ctx.aZ() * ctx.aZ())).epsilon(1e-15));
  }
  CHECK(bound_energy(QuantumNumbers::bound(-1, 0.5, 0), PhysicalContext::make(92)) ==
        doctest::Approx(0.7412).epsilon(1e-4));
  const auto c1 = PhysicalContext::make(1);
  const double a = c1.aZ();
  const double w2 = bound_energy(QuantumNumbers::bound(-1, 0.5, 1), c1);
  CHECK(std::abs(w2 - (1 - a * a / 8)) < 2 * std::pow(a, 4));
  for (double Z : {1.0, 92.0})
    for (int kappa : {-1, 1, -2}) {
      const auto ctx = PhysicalContext::make(Z);
      double prev = 0.0;
      for (int nr = kappa > 0 ? 1 : 0; nr < 40; ++nr) {
        const double w = bound_energy(QuantumNumbers::bound(kappa, 0.5, nr), ctx);
        CHECK(w > prev);
        CHECK(w < 1.0);
        prev = w;
      }
    }
}

TEST_CASE("bound normalization and orthogonality") {
  const auto ctx = PhysicalContext::make(92);
  const BoundState s10(QuantumNumbers::bound(-1, 0.5, 9), ctx);
  CHECK(overlap(s10, s10, 1.0) == doctest::Approx(1.0).epsilon(1e-8));
  for (int kappa : {-1, 1, -2}) {
    const int lo = kappa > 0 ? 1 : 0;
    for (int n1 = lo; n1 < lo + 12; n1 += 3)
      for (int n2 = n1; n2 < lo + 12; n2 += 2) {
        const BoundState b1(QuantumNumbers::bound(kappa, 0.5, n1), ctx);
        const BoundState b2(QuantumNumbers::bound(kappa, 0.5, n2), ctx);
        CHECK(std::abs(overlap(b1, b2, 1.0) - (n1 == n2 ? 1.0 : 0.0)) < 1e-7);
      }
  }
}

TEST_CASE("1S structure and small-component ratio") {
  const auto c1 = PhysicalContext::make(1);
  const BoundState s(QuantumNumbers::bound(-1, 0.5, 0), c1);
  const double ng = log_quad([&](double r) { double g, f; s.eval(r, g, f); return g * g; });
  const double nf = log_quad([&](double r) { double g, f; s.eval(r, g, f); return f * f; });
  CHECK(nf / ng == doctest::Approx(1.33e-5).epsilon(0.01));
  // rg proportional to e^{-r}(2r)^gamma for n_r = 0
  double g1, f1, g2, f2;
  s.eval(0.3, g1, f1);
  s.eval(1.7, g2, f2);
  const double gm = s.gamma();
  CHECK(g1 / g2 == doctest::Approx(std::exp(-0.3 + 1.7) * std::pow(0.3 / 1.7, gm)).epsilon(1e-13));
  CHECK(f1 < 0.0);
  for (double Z : {1.0, 24.0, 47.0, 74.0, 92.0}) {
    const auto ctx = PhysicalContext::make(Z);
    const BoundState b(QuantumNumbers::bound(-1, 0.5, 0), ctx);
    double mg = 0, mf = 0;
    for (double r = 1e-4; r < 30; r *= 1.01) {
      double g, f;
      b.eval(r, g, f);
      mg = std::max(mg, std::abs(g / r));
      mf = std::max(mf, std::abs(f / r));
    }
    CHECK(mf <= 3 * ctx.aZ() * mg);
  }
}

TEST_CASE("continuum sweep agrees with pointwise evaluation") {
  const auto ctx = PhysicalContext::make(92);
  std::vector<double> r;
  for (int i = 0; i < 120; ++i) r.push_back(1e-6 * std::pow(1e6, i / 119.0));
  for (double x = 1.05; x < 200; x += 0.37) r.push_back(x);
  std::vector<double> g(r.size()), f(r.size());
  for (double p : {0.06, 0.3, 2.0, 40.0, 101.0})
    for (int eps : {1, -1})
      for (int kappa : {-1, 1, -2}) {
        const ContinuumState s(p, eps, kappa, ctx);
        s.sweep(r, g.data(), f.data());
        for (size_t i = 0; i < r.size(); i += 37) {
          double a, b;
          s.eval(r[i], a, b);
          const double scale = std::hypot(a, b);
          CHECK(std::hypot(a - g[i], b - f[i]) <= 1e-9 * scale + 1e-300);
        }
      }
}

TEST_CASE("continuum magnitudes") {
  const auto ctx = PhysicalContext::make(92);
  auto ratio = [&](double p, int eps) {
    const ContinuumState s(p, eps, -1, ctx);
    double mg = 0, mf = 0;
    for (double r = 0.01; r < 100; r += 0.01) {
      double g, f;
      s.eval(r, g, f);
      mg = std::max(mg, std::abs(g));
      mf = std::max(mf, std::abs(f));
    }
    return mf / mg;
  };
  const double small_pos = ratio(0.2, 1);
  CHECK(small_pos < 2 * ctx.aZ() * 0.2 + 0.05);
  CHECK(ratio(0.2, -1) > 1.0 / small_pos / 4);
  CHECK(ratio(0.2, -1) > 5.0);
  // Large p: amplitudes of g and f approach each other.
  const ContinuumState big(200.0, 1, -1, ctx);
  CHECK(big.asym_amp_f() / big.asym_amp_g() > 0.97);
  CHECK(big.asym_amp_g() == doctest::Approx(std::sqrt((std::abs(big.energy()) + 1) / (std::numbers::pi * std::abs(big.energy())))));
}

TEST_CASE("asymptotic forms") {
  // Least-squares amplitude over one period around kr = 200.
  auto amp_err = [](double Z, double p, int eps, double& eg, double& ef) {
    const auto ctx = PhysicalContext::make(Z);
    const ContinuumState s(p, eps, -1, ctx);
    const int n = 64;
    Eigen::MatrixXd m(n, 2);
    Eigen::VectorXd bg(n), bf(n);
    for (int i = 0; i < n; ++i) {
      const double r = 200.0 / p + (i - n / 2) * (2 * std::numbers::pi / p) / n;
      double g, f;
      s.eval(r, g, f);
      const double th = s.phase(r);
      m(i, 0) = std::cos(th);
      m(i, 1) = std::sin(th);
      bg(i) = g;
      bf(i) = f;
    }
    eg = m.colPivHouseholderQr().solve(bg).norm() / s.asym_amp_g() - 1;
    ef = m.colPivHouseholderQr().solve(bf).norm() / s.asym_amp_f() - 1;
    return s.y();
  };
  for (double Z : {1.0, 47.0, 92.0})
    for (double p : {5.0, 20.0, 50.0})
      for (int eps : {1, -1}) {
        double eg, ef;
        amp_err(Z, p, eps, eg, ef);
        CHECK(std::abs(eg) <= 1e-3);
        CHECK(std::abs(ef) <= 1e-3);
      }
  // Below p ~ 2.5 the leading 1/r correction y/(2kr) exceeds 1e-3.
  for (double p : {0.5, 1.0}) {
    double eg, ef;
    const double y = amp_err(92, p, 1, eg, ef);
    CHECK(std::abs(eg) == doctest::Approx(std::abs(y) / 400.0 * 0.98).epsilon(0.2));
  }
  const auto ctx = PhysicalContext::make(47);
  const ContinuumState s(3.0, -1, -1, ctx);
  const double d = s.phase(90.0) - s.phase(30.0);
  CHECK(d == doctest::Approx(s.y() * std::log(3.0) + 3.0 * 60.0).epsilon(1e-14));
  double g, f;
  continuum_asymptotic(QuantumNumbers::continuum(-1, 0.5, 3.0, -1), ctx, 77.0, g, f);
  double g2, f2;
  s.asymptotic(77.0, g2, f2);
  CHECK(g == g2);
  CHECK(f == f2);
}

TEST_CASE("radial pair containers") {
  const auto ctx = PhysicalContext::make(24);
  const std::vector<double> grid = {0.1, 0.5, 1.0, 3.0};
  const auto b = bound_radial(QuantumNumbers::bound(-1, 0.5, 2), ctx, grid);
  CHECK(b.rg.size() == 4);
  CHECK(b.energy == doctest::Approx(bound_energy(QuantumNumbers::bound(-1, 0.5, 2), ctx)));
  const auto c = continuum_radial(QuantumNumbers::continuum(-1, 0.5, 1.0, -1), ctx, grid);
  for (double v : c.rg) CHECK(std::isfinite(v));
  CHECK(c.energy < -1.0);
  CHECK_THROWS_AS(bound_radial(QuantumNumbers::bound(-1, 0.5, 0), ctx, {1.0, 0.5}), ConfigError);
}
