// Copyright 2026 The PeKit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Serial vs OpenMP kernels. Set OMP_NUM_THREADS to vary the thread count.

#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "pekit/kernels.hpp"

namespace {

using namespace pekit::kernels;

std::vector<std::uint8_t> random_mask(int side) {
  std::mt19937 rng(7);
  std::bernoulli_distribution bit(0.4);
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(side) * side);
  for (auto& b : bits) b = bit(rng) ? 1 : 0;
  return bits;
}

std::vector<float> random_matrix(std::size_t rows, std::size_t dim) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<float> u(-1.0f, 1.0f);
  std::vector<float> m(rows * dim);
  for (auto& v : m) v = u(rng);
  return m;
}

template <bool Parallel>
void BM_PatchCoverage(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const auto bits = random_mask(side);
  for (auto _ : state) {
    auto grid = Parallel ? omp::patch_coverage(bits, side, side, 32, 32)
                         : serial::patch_coverage(bits, side, side, 32, 32);
    benchmark::DoNotOptimize(grid.covered.data());
  }
  state.SetItemsProcessed(state.iterations() * side * side);
}

template <bool Parallel>
void BM_MeanRows(benchmark::State& state) {
  const std::size_t rows = static_cast<std::size_t>(state.range(0));
  const std::size_t dim = 1024;
  const auto m = random_matrix(rows, dim);
  std::vector<std::size_t> idx(rows);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (auto _ : state) {
    auto mean = Parallel ? omp::mean_rows(m, dim, idx) : serial::mean_rows(m, dim, idx);
    benchmark::DoNotOptimize(mean.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(rows * dim));
}

template <bool Parallel>
void BM_DotRows(benchmark::State& state) {
  const std::size_t rows = static_cast<std::size_t>(state.range(0));
  const std::size_t dim = 768;
  const auto m = random_matrix(rows, dim);
  const auto q = random_matrix(1, dim);
  std::vector<double> out(rows);
  for (auto _ : state) {
    if (Parallel) {
      omp::dot_rows(m, dim, q, out);
    } else {
      serial::dot_rows(m, dim, q, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(rows * dim));
}

BENCHMARK(BM_PatchCoverage<false>)->Arg(256)->Arg(1024)->Arg(2048);
BENCHMARK(BM_PatchCoverage<true>)->Arg(256)->Arg(1024)->Arg(2048);
BENCHMARK(BM_MeanRows<false>)->Arg(64)->Arg(1024);
BENCHMARK(BM_MeanRows<true>)->Arg(64)->Arg(1024);
BENCHMARK(BM_DotRows<false>)->Arg(1000)->Arg(10000);
BENCHMARK(BM_DotRows<true>)->Arg(1000)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
