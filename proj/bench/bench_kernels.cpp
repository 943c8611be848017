#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "suffbench/kernels.hpp"

namespace {

std::vector<double> random_values(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d;
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

void softmax_serial(benchmark::State& state) {
  auto logits = random_values(static_cast<std::size_t>(state.range(0)) * 4, 1);
  for (auto _ : state) benchmark::DoNotOptimize(suffbench::kernels::softmax_rows_serial(logits, 4));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void softmax_parallel(benchmark::State& state) {
  auto logits = random_values(static_cast<std::size_t>(state.range(0)) * 4, 1);
  for (auto _ : state) benchmark::DoNotOptimize(suffbench::kernels::softmax_rows_parallel(logits, 4));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

// 1536 matches common hosted embedding sizes
void cosine_serial(benchmark::State& state) {
  const std::size_t dim = 1536, rows = static_cast<std::size_t>(state.range(0));
  auto a = random_values(rows * dim, 2), b = random_values(rows * dim, 3);
  for (auto _ : state) benchmark::DoNotOptimize(suffbench::kernels::cosine_rows_serial(a, b, dim));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void cosine_parallel(benchmark::State& state) {
  const std::size_t dim = 1536, rows = static_cast<std::size_t>(state.range(0));
  auto a = random_values(rows * dim, 2), b = random_values(rows * dim, 3);
  for (auto _ : state) benchmark::DoNotOptimize(suffbench::kernels::cosine_rows_parallel(a, b, dim));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(softmax_serial)->Arg(1 << 10)->Arg(1 << 16);
BENCHMARK(softmax_parallel)->Arg(1 << 10)->Arg(1 << 16);
BENCHMARK(cosine_serial)->Arg(64)->Arg(4096);
BENCHMARK(cosine_parallel)->Arg(64)->Arg(4096);

BENCHMARK_MAIN();
