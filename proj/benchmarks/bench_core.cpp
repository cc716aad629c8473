#include <benchmark/benchmark.h>

#include "rightmost/lattice.hpp"
#include "rightmost/qsd.hpp"
#include "rightmost/rightmost_view.hpp"
#include "rightmost/rng.hpp"

namespace {

using namespace rightmost;

void BM_GenerateLayer(benchmark::State& state) {
  const SimParams params{0.4, 100, static_cast<int>(state.range(0)), 1};
  const Window window = window_for(params);
  const BernoulliWord bonds(params.p);
  std::uint64_t key = 0;
  for (auto _ : state) benchmark::DoNotOptimize(generate_layer(bonds, window, 0, ++key));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GenerateLayer)->Arg(64)->Arg(256)->Arg(1024);

void BM_StepForward(benchmark::State& state) {
  const SimParams params{0.6, 100, static_cast<int>(state.range(0)), 1};
  const Environment env = sample_environment(params, 0);
  const LevelConfig start = initial_config(InitialCondition::full(), env.window);
  for (auto _ : state) {
    LevelConfig c = start;
    for (int k = 0; k < env.levels(); ++k) c = step_forward(c, env.layer(k));
    benchmark::DoNotOptimize(c);
  }
  state.SetItemsProcessed(state.iterations() * env.levels());
}
BENCHMARK(BM_StepForward)->Arg(64)->Arg(256)->Arg(1024);

void BM_ZetaTrial(benchmark::State& state) {
  const SimParams params{0.4, 100, 256, 3};
  std::int64_t t = 0;
  for (auto _ : state) {
    const Environment env = sample_environment(params, t++);
    benchmark::DoNotOptimize(run_zeta_chain(env, InitialCondition::full()));
  }
}
BENCHMARK(BM_ZetaTrial);

void BM_BuildKernel(benchmark::State& state) {
  const TruncatedStateSpace space{static_cast<int>(state.range(0)), Truncation::Project};
  for (auto _ : state) benchmark::DoNotOptimize(build_kernel(0.4, space));
}
BENCHMARK(BM_BuildKernel)->DenseRange(6, 10, 2)->Unit(benchmark::kMillisecond);

void BM_Yaglom(benchmark::State& state) {
  const Kernel k = build_kernel(0.4, TruncatedStateSpace{static_cast<int>(state.range(0)), Truncation::Project});
  for (auto _ : state) benchmark::DoNotOptimize(yaglom(k));
}
BENCHMARK(BM_Yaglom)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
