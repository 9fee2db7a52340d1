/* Copyright 2026 The Mono3D Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <benchmark/benchmark.h>

#include "mono3d/assignment.h"
#include "mono3d/rng.h"

namespace mono3d {
namespace {

void BM_MinCostMatching(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(3);
  CostMatrix cost(n, n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) cost.at(r, c) = rng.uniform();
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(min_cost_matching(cost));
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_MinCostMatching)->RangeMultiplier(4)->Range(4, 256)->Complexity();

}  // namespace
}  // namespace mono3d
