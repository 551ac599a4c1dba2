/*
 * Copyright 2026 The distforest Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include "distforest/cohort_io.hpp"
#include "distforest/forest.hpp"

namespace {

using namespace distforest;

const Dataset& cohort() {
  static const Dataset data = synth_cohort(CohortMarginals::reference(), 333, 7);
  return data;
}

ForestConfig config(std::size_t trees) {
  ForestConfig c;
  c.num_trees = trees;
  c.seed = 11;
  return c;
}

void BM_FitForestSerial(benchmark::State& state) {
  const auto c = config(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fit_forest_serial(cohort(), c));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FitForestSerial)->Arg(200)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_FitForestParallel(benchmark::State& state) {
  const auto c = config(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fit_forest(cohort(), c));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FitForestParallel)->Arg(200)->Arg(2000)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_OobWeightsSerial(benchmark::State& state) {
  static const Forest forest = fit_forest(cohort(), config(2000));
  for (auto _ : state) benchmark::DoNotOptimize(oob_weights_all_serial(forest, cohort()));
}
BENCHMARK(BM_OobWeightsSerial)->Unit(benchmark::kMillisecond);

void BM_OobWeightsParallel(benchmark::State& state) {
  static const Forest forest = fit_forest(cohort(), config(2000));
  for (auto _ : state) benchmark::DoNotOptimize(oob_weights_all(forest, cohort()));
}
BENCHMARK(BM_OobWeightsParallel)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
