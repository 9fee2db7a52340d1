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

#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "mono3d/metrics.h"
#include "mono3d/rng.h"

namespace mono3d {
namespace {

std::vector<EvalFrame> random_frames(int frames, uint64_t seed) {
  Rng rng(seed);
  std::vector<EvalFrame> out;
  for (int f = 0; f < frames; ++f) {
    EvalFrame frame;
    frame.frame_id = std::to_string(f);
    for (int g = 0; g < 6; ++g) {
      ObjectAnnotation a;
      a.type = "Car";
      const double x = rng.uniform(0, 1000);
      const double y = rng.uniform(100, 250);
      a.box2d = {x, y, x + rng.uniform(40, 150), y + rng.uniform(40, 100)};
      a.box3d = Box3D{{rng.uniform(-10, 10), 1.0, rng.uniform(5, 50)},
                      {1.7, 1.5, 4.0},
                      rng.uniform(-kPi, kPi)};
      frame.gts.push_back(a);
      ObjectAnnotation p = a;
      p.box2d.left += rng.normal(0, 5);
      p.box3d->center.z += rng.normal(0, 0.5);
      p.score = rng.uniform();
      frame.preds.push_back(p);
    }
    out.push_back(std::move(frame));
  }
  return out;
}

void BM_Ap40(benchmark::State& state) {
  const auto frames = random_frames(static_cast<int>(state.range(0)), 5);
  const EvalConfig cfg;
  const auto mode = static_cast<EvalMode>(state.range(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        ap40(frames, "Car", DifficultyBand::kModerate, mode, cfg));
  }
}
BENCHMARK(BM_Ap40)->Args({100, 0})->Args({100, 1})->Args({100, 2});

}  // namespace
}  // namespace mono3d
