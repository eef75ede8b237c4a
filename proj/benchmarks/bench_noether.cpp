#include <benchmark/benchmark.h>

#include "noetherlab/builtins.hpp"
#include "noetherlab/noether.hpp"

using namespace noetherlab;

namespace {

NoetherProblem rotation_problem() {
  return {weighted_lagrangian(2, 2), quadratic_configuration(), rotation_family(2, true),
          DensityMeasure::standard_gaussian(2)};
}

void BM_Theorem1Evaluate(benchmark::State& state) {
  const NoetherProblem pb = rotation_problem();
  const Vector delta = Vector::Ones(1);
  const Vector x = Vector::LinSpaced(2, 0.3, -0.4);
  const auto variant = state.range(0) == 0 ? Theorem1Variant::paper_literal : Theorem1Variant::transport_corrected;
  for (auto _ : state) benchmark::DoNotOptimize(theorem1_evaluate(pb, delta, x, variant));
}
BENCHMARK(BM_Theorem1Evaluate)->Arg(0)->Arg(1);

void BM_Theorem1Pairing(benchmark::State& state) {
  const NoetherProblem pb = rotation_problem();
  const TestFunction phi = gaussian_poly(Vector::LinSpaced(2, 0.3, -0.2), 1.0);
  const PairingEngine e = PairingEngine::gauss_hermite(40);
  for (auto _ : state) {
    benchmark::DoNotOptimize(theorem1_pairing(pb, Vector::Ones(1), phi, e, Theorem1Variant::transport_corrected));
  }
}
BENCHMARK(BM_Theorem1Pairing);

// The oracle inverts the transformed graph by Newton at every node.
void BM_FamilyWeakDerivativeFd(benchmark::State& state) {
  const NoetherProblem pb = rotation_problem();
  const TestFunction phi = gaussian_poly(Vector::LinSpaced(2, 0.3, -0.2), 1.0);
  const PairingEngine e = PairingEngine::gauss_hermite(static_cast<int>(state.range(0)));
  const auto frame = FamilyFrame::pullback;
  for (auto _ : state) benchmark::DoNotOptimize(family_weak_derivative_fd(pb, Vector::Ones(1), phi, e, 1e-4, frame));
}
BENCHMARK(BM_FamilyWeakDerivativeFd)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
