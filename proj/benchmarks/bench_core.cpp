#include <benchmark/benchmark.h>

#include "echosim/ensemble.hpp"
#include "echosim/noise.hpp"
#include "echosim/perturbation.hpp"
#include "echosim/propagator.hpp"

namespace {

using namespace echosim;

NoiseParams reference_noise() {
  NoiseParams p;
  p.phi_amp = 0.08;
  p.gamma = 1.0 / 4.587;
  p.dt = 1e-3;
  p.seed = 7;
  p.n_steps = 4750;
  return p;
}

void BM_SamplePath(benchmark::State& state) {
  const NoiseParams noise = reference_noise();
  std::uint64_t stream = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_path(noise, stream++));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(noise.n_steps));
}
BENCHMARK(BM_SamplePath);

void BM_IntegrateChi(benchmark::State& state) {
  const PulseParams pulse{1.0, 4.75, WavevectorTag::K1};
  const PhasePath path = sample_path(reference_noise(), 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(integrate_chi(pulse, path));
  }
  state.SetItemsProcessed(state.iterations() * 4750);
}
BENCHMARK(BM_IntegrateChi);

void BM_DirectUnitary(benchmark::State& state) {
  const PulseParams pulse{1.0, 4.75, WavevectorTag::K1};
  const PhasePath path = sample_path(reference_noise(), 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(direct_unitary(pulse, path));
  }
  state.SetItemsProcessed(state.iterations() * 4750);
}
BENCHMARK(BM_DirectUnitary);

void BM_LinearizedChiPath(benchmark::State& state) {
  const PulseParams pulse{1.0, 4.75, WavevectorTag::K1};
  const PhasePath path = sample_path(reference_noise(), 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(linearized_chi_path(pulse, path));
  }
  state.SetItemsProcessed(state.iterations() * 4750);
}
BENCHMARK(BM_LinearizedChiPath);

void BM_StrengthFactor(benchmark::State& state) {
  const ChiParams chi{-4.7, 0.03, -0.06};
  const ChiParams zeta{-4.8, -0.05, 0.04};
  for (auto _ : state) {
    benchmark::DoNotOptimize(strength_factor(chi, zeta, 1.0));
  }
}
BENCHMARK(BM_StrengthFactor);

void BM_RunEnsemble(benchmark::State& state) {
  RunSpec spec;
  spec.echo.tau = 5.0;
  spec.echo.t_grid = {5.0};
  spec.echo.pulse1 = {1.0, 4.75, WavevectorTag::K1};
  spec.echo.pulse2 = {1.0, 4.75, WavevectorTag::K2};
  spec.noise = reference_noise();
  spec.n_repeats = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_ensemble(spec, static_cast<int>(state.range(1))));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RunEnsemble)->Args({64, 1})->Args({64, 2});

}  // namespace

BENCHMARK_MAIN();
