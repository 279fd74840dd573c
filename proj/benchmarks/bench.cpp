#include <benchmark/benchmark.h>

#include <random>

#include "duks/landau.hpp"
#include "duks/noise.hpp"
#include "duks/rng.hpp"
#include "duks/solver.hpp"
#include "duks/spectrum.hpp"

namespace {

using namespace duks;

SpectralField random_field(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  SpectralField f(n);
  f.set(0, {g(rng), 0.0});
  for (int k = 1; k <= n; ++k) f.set(k, Complex{g(rng), g(rng)} / (1.0 + k * k));
  return f;
}

void BM_Convolve(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const SpectralField a = random_field(n, 1), b = random_field(n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(convolve(a, b));
  state.SetComplexityN(n);
}
BENCHMARK(BM_Convolve)->RangeMultiplier(2)->Range(8, 128)->Complexity(benchmark::oNSquared);

void BM_StepV(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ExponentialEuler stepper(n, 0.1, 0.01);
  SpectralField v = random_field(n, 3) * 0.01;
  const SpectralField z = random_field(n, 4) * 0.01;
  for (auto _ : state) {
    v = stepper.step(v, z);
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(BM_StepV)->Arg(16)->Arg(32)->Arg(64);

void BM_Philox(benchmark::State& state) {
  Philox4x32::Counter c{0, 0, 0, 0};
  const Philox4x32::Key key{0x12345678, 0x9abcdef0};
  for (auto _ : state) {
    c = Philox4x32::generate(c, key);
    benchmark::DoNotOptimize(c);
  }
}
BENCHMARK(BM_Philox);

void BM_StandardNormalPair(benchmark::State& state) {
  const NoiseKey key{1, 0};
  std::uint64_t step = 0;
  for (auto _ : state) benchmark::DoNotOptimize(standard_normal_pair(key, 2, step++));
}
BENCHMARK(BM_StandardNormalPair);

void BM_AdvanceOU(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const NoiseScaling s = NoiseScaling::standard(0.1);
  OULattice z(n, {1, 0});
  for (auto _ : state) {
    z.advance(s, 0.01);
    benchmark::DoNotOptimize(z.values());
  }
}
BENCHMARK(BM_AdvanceOU)->Arg(16)->Arg(32)->Arg(64);

void BM_AmplitudeStep(benchmark::State& state) {
  const SlowNoise quiet{};
  AmplitudeState s = make_amplitude_state(0.0, {1.0, 0.0}, {0.5, 0.0}, quiet);
  for (auto _ : state) {
    s = step_amplitudes(s, quiet, quiet, 1e-4);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_AmplitudeStep);

}  // namespace
BENCHMARK_MAIN();
