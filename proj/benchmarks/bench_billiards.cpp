#include <benchmark/benchmark.h>

#include "billiards/billiard.hpp"
#include "billiards/chain.hpp"
#include "billiards/measure.hpp"
#include "billiards/numerics.hpp"
#include "billiards/rng.hpp"
#include "billiards/surface.hpp"

namespace {

using namespace billiards;

void BM_central_angle(benchmark::State& state) {
  const CircleTable table = make_table(SurfaceKind::hyperbolic, 1.0);
  double theta = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(central_angle(table, theta));
    theta += 1e-6;
    if (theta > 3.0) theta = 0.1;
  }
}
BENCHMARK(BM_central_angle);

void BM_chord_oracle(benchmark::State& state) {
  const CircleTable table = make_table(SurfaceKind::hyperbolic, 1.0);
  double theta = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(chord_oracle(table, theta));
    theta += 1e-4;
    if (theta > 3.0) theta = 0.1;
  }
}
BENCHMARK(BM_chord_oracle);

void BM_branch_distribution(benchmark::State& state) {
  const FeresParams params = make_params(1, 8);
  double theta = 0.01;
  for (auto _ : state) {
    benchmark::DoNotOptimize(branch_distribution(params, theta));
    theta += 1e-5;
    if (theta > 3.1) theta = 0.01;
  }
}
BENCHMARK(BM_branch_distribution);

void BM_random_step(benchmark::State& state) {
  const CircleTable table = make_table(SurfaceKind::flat, 1.0);
  const FeresParams params = make_params(0.5);
  Xoshiro256PlusPlus rng(7);
  PhasePoint point{0.0, 1.0};
  for (auto _ : state) {
    point = random_step(table, params, point, rng.uniform01()).point;
    benchmark::DoNotOptimize(point);
  }
}
BENCHMARK(BM_random_step);

void BM_evolve_kernel(benchmark::State& state) {
  const FeresParams params = make_params(0.5);
  AngleHistogram hist = liouville_histogram(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    hist = evolve_kernel(params, hist);
    benchmark::DoNotOptimize(hist.mass.data());
  }
}
BENCHMARK(BM_evolve_kernel)->Arg(500)->Arg(2000);

void BM_enumerate_states(benchmark::State& state) {
  const FeresParams params = make_params(1, 100);
  for (auto _ : state) {
    benchmark::DoNotOptimize(enumerate_states(params, 0.011));
  }
}
BENCHMARK(BM_enumerate_states);

void BM_stationary(benchmark::State& state) {
  const FeresParams params = make_params(1, 100);
  const ChainStates states = enumerate_states(params, 0.011);
  const StochasticMatrix matrix = build_matrix(states, params);
  for (auto _ : state) {
    benchmark::DoNotOptimize(stationary(matrix));
  }
}
BENCHMARK(BM_stationary);

}  // namespace

BENCHMARK_MAIN();
