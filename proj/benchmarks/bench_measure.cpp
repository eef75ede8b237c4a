#include <benchmark/benchmark.h>

#include "noetherlab/builtins.hpp"
#include "noetherlab/quadrature.hpp"
#include "noetherlab/transport.hpp"

using namespace noetherlab;

namespace {

// After the first iteration this is the cached lookup.
void BM_GaussHermiteRule(benchmark::State& state) {
  const int order = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(gauss_hermite(order));
}
BENCHMARK(BM_GaussHermiteRule)->Arg(20)->Arg(80)->Arg(200);

void BM_PairGaussHermite(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const DensityMeasure nu = DensityMeasure::standard_gaussian(n);
  const TestFunction phi = gaussian_poly(Vector::Constant(n, 0.2), 1.0);
  const PairingEngine e = PairingEngine::gauss_hermite(static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(pair(nu, phi, e));
}
BENCHMARK(BM_PairGaussHermite)->Args({1, 80})->Args({2, 40})->Args({3, 20});

void BM_PairMonteCarlo(benchmark::State& state) {
  const DensityMeasure nu = DensityMeasure::standard_gaussian(2);
  const TestFunction phi = gaussian_poly(Vector::Constant(2, 0.2), 1.0);
  const PairingEngine e = PairingEngine::monte_carlo(100000, 7, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(pair(nu, phi, e));
}
BENCHMARK(BM_PairMonteCarlo)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_WeakDerivativeFd(benchmark::State& state) {
  const DensityMeasure nu = DensityMeasure::standard_gaussian(2);
  const VectorField k = sine_field(2, 0.3);
  const TestFunction phi = gaussian_poly(Vector::Constant(2, 0.2), 1.0);
  const PairingEngine e = PairingEngine::gauss_hermite(40);
  for (auto _ : state) benchmark::DoNotOptimize(weak_derivative_fd(nu, k, phi, e, 1e-4));
}
BENCHMARK(BM_WeakDerivativeFd);

void BM_AnalyticWeakDerivative(benchmark::State& state) {
  const DensityMeasure nu = DensityMeasure::standard_gaussian(2);
  const VectorField k = sine_field(2, 0.3);
  const TestFunction phi = gaussian_poly(Vector::Constant(2, 0.2), 1.0);
  const PairingEngine e = PairingEngine::gauss_hermite(40);
  for (auto _ : state) benchmark::DoNotOptimize(analytic_weak_derivative(nu, k, phi, e));
}
BENCHMARK(BM_AnalyticWeakDerivative);

}  // namespace

BENCHMARK_MAIN();
