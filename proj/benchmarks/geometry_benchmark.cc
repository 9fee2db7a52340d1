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

#include <vector>

#include <benchmark/benchmark.h>

#include "mono3d/geometry.h"
#include "mono3d/rng.h"

namespace mono3d {
namespace {

std::vector<Box3D> random_boxes(int n, uint64_t seed) {
  Rng rng(seed);
  std::vector<Box3D> boxes;
  for (int i = 0; i < n; ++i) {
    Box3D b;
    b.center = {rng.uniform(-2, 2), 1.0, rng.uniform(10, 14)};
    b.dims = {rng.uniform(1.5, 2.0), 1.5, rng.uniform(3.5, 4.5)};
    b.yaw = rng.uniform(-kPi, kPi);
    boxes.push_back(b);
  }
  return boxes;
}

void BM_BevIou(benchmark::State& state) {
  const auto boxes = random_boxes(256, 1);
  size_t i = 0;
  for (auto _ : state) {
    const Box3D& a = boxes[i % boxes.size()];
    const Box3D& b = boxes[(i * 7 + 3) % boxes.size()];
    benchmark::DoNotOptimize(bev_iou(a, b));
    ++i;
  }
}
BENCHMARK(BM_BevIou);

void BM_Iou3d(benchmark::State& state) {
  const auto boxes = random_boxes(256, 2);
  size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        iou_3d(boxes[i % boxes.size()], boxes[(i * 5 + 1) % boxes.size()]));
    ++i;
  }
}
BENCHMARK(BM_Iou3d);

}  // namespace
}  // namespace mono3d
