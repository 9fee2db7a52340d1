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

#include "mono3d/dense_codec.h"
#include "mono3d/synthetic.h"

namespace mono3d {
namespace {

const std::vector<std::string> kClasses = {"Car", "Pedestrian", "Cyclist"};

Scene bench_scene(int objects) {
  SceneConfig cfg;
  cfg.seed = 11;
  cfg.min_objects = objects;
  cfg.max_objects = objects;
  return generate_scene(cfg);
}

void BM_EncodeFrame(benchmark::State& state) {
  const Scene scene = bench_scene(static_cast<int>(state.range(0)));
  const CodecConfig codec;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        encode_frame(scene.objects, scene.camera, kClasses, codec));
  }
}
BENCHMARK(BM_EncodeFrame)->Arg(1)->Arg(8);

void BM_DecodeDetections(benchmark::State& state) {
  const Scene scene = bench_scene(static_cast<int>(state.range(0)));
  const CodecConfig codec;
  const EncodeResult enc =
      encode_frame(scene.objects, scene.camera, kClasses, codec);
  for (auto _ : state) {
    benchmark::DoNotOptimize(decode_detections(enc.maps, scene.camera, codec));
  }
}
BENCHMARK(BM_DecodeDetections)->Arg(1)->Arg(8);

}  // namespace
}  // namespace mono3d
