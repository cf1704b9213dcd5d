#include <benchmark/benchmark.h>

#include "dirac/basis.hpp"
#include "dirac/eriksen.hpp"
#include "dirac/matelem.hpp"
#include "dirac/specfun.hpp"

#include <complex>

using namespace dirac;
using hydrogenic::PhysicalContext;
using hydrogenic::QuantumNumbers;

static basis::BasisSet desk_basis() {
  return basis::assemble_basis(QuantumNumbers::bound(-1, 0.5, 0), basis::BasisConfig::desk(),
                               PhysicalContext::make(92.0));
}

static void BM_KummerComplex(benchmark::State& state) {
  const double x = double(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(specfun::kummer_complex({1.9, -0.7}, {4.8, 0.0}, {0.0, 2.0 * x}));
}
BENCHMARK(BM_KummerComplex)->Arg(1)->Arg(8)->Arg(40)->Arg(200);

static void BM_BetaBoundBound(benchmark::State& state) {
  const auto ctx = PhysicalContext::make(92.0);
  const auto a = QuantumNumbers::bound(-1, 0.5, 0);
  const auto b = QuantumNumbers::bound(-1, 0.5, int(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(matelem::beta_bound_bound(a, b, ctx));
}
BENCHMARK(BM_BetaBoundBound)->Arg(1)->Arg(10)->Arg(39);

static void BM_BetaBoundContinuum(benchmark::State& state) {
  const auto ctx = PhysicalContext::make(92.0);
  const auto qb = QuantumNumbers::bound(-1, 0.5, int(state.range(0)));
  const auto qc = QuantumNumbers::continuum(-1, 0.5, 1.6, -1);
  for (auto _ : state) benchmark::DoNotOptimize(matelem::beta_bound_continuum(qb, qc, ctx));
}
BENCHMARK(BM_BetaBoundContinuum)->Arg(0)->Arg(10)->Arg(39);

static void BM_QuadratureOracle(benchmark::State& state) {
  const auto ctx = PhysicalContext::make(92.0);
  const auto qb = QuantumNumbers::bound(-1, 0.5, 3);
  const auto qc = QuantumNumbers::continuum(-1, 0.5, 2.0, 1);
  for (auto _ : state) benchmark::DoNotOptimize(matelem::quadrature_oracle(qb, qc, ctx));
}
BENCHMARK(BM_QuadratureOracle)->Unit(benchmark::kMillisecond);

static void BM_Eigendifferential(benchmark::State& state) {
  const auto b = desk_basis();
  const auto bin = b.bin_of(b.layout.n_bound + int(state.range(0)));
  std::vector<double> g(b.grid.size()), f(b.grid.size());
  for (auto _ : state) {
    basis::eigendifferential(bin, -1, b.ctx, b.grid.r, 16, g.data(), f.data());
    benchmark::DoNotOptimize(g.data());
  }
  state.counters["radii"] = double(b.grid.size());
}
BENCHMARK(BM_Eigendifferential)->Arg(0)->Arg(100)->Unit(benchmark::kMillisecond);

static void BM_BuildBeta(benchmark::State& state) {
  const auto b = desk_basis();
  for (auto _ : state) benchmark::DoNotOptimize(matelem::build_beta(b));
}
BENCHMARK(BM_BuildBeta)->Unit(benchmark::kMillisecond);

static void BM_BuildZ(benchmark::State& state) {
  const auto b = desk_basis();
  const auto S = eriksen::build_S(b, matelem::build_beta(b));
  for (auto _ : state) benchmark::DoNotOptimize(eriksen::build_Z(S));
}
BENCHMARK(BM_BuildZ)->Unit(benchmark::kMillisecond);

static void BM_Synthesize(benchmark::State& state) {
  auto cfg = basis::BasisConfig::desk();
  cfg.n_bound = 8;
  cfg.n_pos = 32;
  cfg.n_neg = 64;
  cfg.r_max = 60.0;
  const auto b = basis::assemble_basis(QuantumNumbers::bound(-1, 0.5, 0), cfg, PhysicalContext::make(92.0));
  const auto beta = matelem::build_beta(b);
  const auto Z = eriksen::build_Z(eriksen::build_S(b, beta));
  auto res = eriksen::eriksen_amplitudes(b, beta, Z);
  for (auto _ : state) {
    eriksen::synthesize(b, res);
    benchmark::DoNotOptimize(res.upper.data());
  }
  state.counters["states"] = double(b.layout.dim());
}
BENCHMARK(BM_Synthesize)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
