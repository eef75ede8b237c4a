#include <benchmark/benchmark.h>

#include "noetherlab/builtins.hpp"
#include "noetherlab/pathspace.hpp"

using namespace noetherlab;

namespace {

FeynmanWeight harmonic_weight(int steps, double eps) {
  const LatticePathSpace s(1, steps, 1.0);
  const DiscreteAction a = discretize_action(s, Hamiltonian::harmonic(1), Vector::Constant(1, 0.3));
  return make_feynman_weight(a, InitialData::plane_wave(Vector::Constant(1, 0.5)), eps);
}

void BM_FresnelClosedForm(benchmark::State& state) {
  const int steps = static_cast<int>(state.range(0));
  const FeynmanWeight w = harmonic_weight(steps, 0.1);
  const TestFunction phi = TestFunction::one(2 * steps);
  for (auto _ : state) benchmark::DoNotOptimize(fresnel_closed_form(w, phi));
  state.SetLabel("M=" + std::to_string(2 * steps));
}
BENCHMARK(BM_FresnelClosedForm)->Arg(1)->Arg(2)->Arg(8)->Arg(32);

void BM_FresnelSeparable(benchmark::State& state) {
  const int steps = static_cast<int>(state.range(0));
  const FeynmanWeight w = harmonic_weight(steps, 0.1);
  const TestFunction phi = TestFunction::one(2 * steps);
  for (auto _ : state) benchmark::DoNotOptimize(fresnel_separable_quadrature(w, phi));
  state.SetLabel("M=" + std::to_string(2 * steps));
}
BENCHMARK(BM_FresnelSeparable)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_AnomalyTerm(benchmark::State& state) {
  const LatticePathSpace s(1, static_cast<int>(state.range(0)), 1.0);
  const TransformationFamily f = desk_generator_family(s);
  const Vector path = unit_increment_path(s);
  const Vector delta = Vector::Ones(1);
  for (auto _ : state) benchmark::DoNotOptimize(anomaly_term(s, f, delta, path));
  state.SetLabel("M=" + std::to_string(s.dim()));
}
BENCHMARK(BM_AnomalyTerm)->Arg(4)->Arg(16)->Arg(64);

void BM_DiscreteActionGradient(benchmark::State& state) {
  const LatticePathSpace s(2, static_cast<int>(state.range(0)), 1.0);
  const DiscreteAction a = discretize_action(s, Hamiltonian::quartic(2, 1.0), Vector::Zero(2));
  const Vector path = Vector::LinSpaced(s.dim(), -1.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(a.gradient(path));
}
BENCHMARK(BM_DiscreteActionGradient)->Arg(8)->Arg(64);

}  // namespace

BENCHMARK_MAIN();
