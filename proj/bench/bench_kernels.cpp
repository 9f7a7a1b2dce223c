// Parallel kernels against their serial twins. Run with OMP_NUM_THREADS set
// to compare thread counts; outputs are bitwise identical by construction.

#include <benchmark/benchmark.h>

#include "beamctl/beam_dynamics.hpp"
#include "beamctl/kernels.hpp"

using namespace beamctl;

namespace {

TrigSeries bench_series(int M) {
  TrigSeries s;
  for (int m = 0; m < M; ++m) {
    s.add(1.0 / (m + 1), temporal_frequency(m), Phase::Cos);
    s.add(0.5 / (m + 1), temporal_frequency(m), Phase::Sin);
  }
  return s;
}

void BM_SampleSeries(benchmark::State& state) {
  const TrigSeries s = bench_series(16);
  const int grid = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::sample_series(s, 2.0, grid));
}

void BM_SampleSeriesSerial(benchmark::State& state) {
  const TrigSeries s = bench_series(16);
  const int grid = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::sample_series_serial(s, 2.0, grid));
  }
}

void BM_Gramian(benchmark::State& state) {
  const int M = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::gramian_entries(InternalRegion{1.0 / 3.0, 8}, 2.0, M));
  }
}

void BM_GramianSerial(benchmark::State& state) {
  const int M = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        kernels::gramian_entries_serial(InternalRegion{1.0 / 3.0, 8}, 2.0, M));
  }
}

void BM_InverseBound(benchmark::State& state) {
  const auto b = kernels::open_unit_grid(0.01);
  const auto t = kernels::positive_grid(0.01, 10.0);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::inverse_bound_sweep(b, t));
}

void BM_InverseBoundSerial(benchmark::State& state) {
  const auto b = kernels::open_unit_grid(0.01);
  const auto t = kernels::positive_grid(0.01, 10.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::inverse_bound_sweep_serial(b, t));
  }
}

}  // namespace

BENCHMARK(BM_SampleSeries)->Arg(4096)->Arg(65536)->UseRealTime();
BENCHMARK(BM_SampleSeriesSerial)->Arg(4096)->Arg(65536)->UseRealTime();
BENCHMARK(BM_Gramian)->Arg(16)->Arg(64)->UseRealTime();
BENCHMARK(BM_GramianSerial)->Arg(16)->Arg(64)->UseRealTime();
BENCHMARK(BM_InverseBound)->UseRealTime();
BENCHMARK(BM_InverseBoundSerial)->UseRealTime();

BENCHMARK_MAIN();
