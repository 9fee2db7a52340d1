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

#include "mono3d/synthetic.h"

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "mono3d/errors.h"

namespace mono3d {
namespace {

const std::vector<std::string> kClasses = {"Car", "Pedestrian", "Cyclist"};

SceneConfig Config(uint64_t seed) {
  SceneConfig c;
  c.seed = seed;
  return c;
}

TEST(GenerateScene, DeterministicPerSeed) {
  const Scene a = generate_scene(Config(11));
  const Scene b = generate_scene(Config(11));
  ASSERT_EQ(a.objects.size(), b.objects.size());
  EXPECT_EQ(a.camera, b.camera);
  for (size_t i = 0; i < a.objects.size(); ++i) {
    EXPECT_EQ(a.objects[i].box, b.objects[i].box);
    EXPECT_EQ(a.objects[i].class_id, b.objects[i].class_id);
  }
  const Scene c = generate_scene(Config(12));
  EXPECT_FALSE(c.camera == a.camera && c.objects.size() == a.objects.size() &&
               c.objects[0].box == a.objects[0].box);
}

TEST(GenerateScene, ObjectsRespectConstraints) {
  const SceneConfig cfg = Config(0);
  Rng rng(2024);
  for (int s = 0; s < 1000; ++s) {
    const Scene scene = generate_scene(cfg, rng);
    ASSERT_GE(static_cast<int>(scene.objects.size()), cfg.min_objects);
    ASSERT_LE(static_cast<int>(scene.objects.size()), cfg.max_objects);
    EXPECT_GE(scene.camera.fx, cfg.min_fx);
    EXPECT_LE(scene.camera.fx, cfg.max_fx);
    std::vector<PixelPoint> centers;
    for (const SceneObject& o : scene.objects) {
      const double z = o.box.center.z;
      ASSERT_GE(z, cfg.min_depth);
      ASSERT_LE(z, cfg.max_depth);
      const PixelPoint p = project_point(scene.camera, o.box.center);
      ASSERT_GE(p.u, 0.0);
      ASSERT_LT(p.u, cfg.image_width);
      ASSERT_GE(p.v, 0.0);
      ASSERT_LT(p.v, cfg.image_height);
      const DimRange& r = cfg.dim_ranges[o.class_id];
      EXPECT_GE(o.box.dims.w, r.min.w);
      EXPECT_LE(o.box.dims.l, r.max.l);
      for (const PixelPoint& q : centers) {
        EXPECT_GE(std::max(std::abs(p.u - q.u), std::abs(p.v - q.v)),
                  cfg.min_center_separation_px);
      }
      centers.push_back(p);
    }
  }
}

TEST(GenerateScene, FrameCarriesAnnotations) {
  const Scene scene = generate_scene(Config(3));
  const UnifiedFrame f = scene_to_frame(scene, "000003", kClasses);
  EXPECT_EQ(f.frame_id, "000003");
  EXPECT_EQ(f.camera, scene.camera);
  ASSERT_EQ(f.annotations.size(), scene.objects.size());
  for (size_t i = 0; i < f.annotations.size(); ++i) {
    EXPECT_EQ(f.annotations[i].type, kClasses[scene.objects[i].class_id]);
    EXPECT_EQ(*f.annotations[i].box3d, scene.objects[i].box);
  }
  EXPECT_EQ(scene_boxes2d(scene).size(), scene.objects.size());
}

TEST(GenerateScene, ImpossibleConfigThrows) {
  SceneConfig cfg = Config(1);
  cfg.min_objects = cfg.max_objects = 8;
  cfg.image_width = 16;
  cfg.image_height = 16;
  cfg.max_attempts = 50;
  EXPECT_THROW(generate_scene(cfg), DomainError);
}

TEST(SimulateDetector, ZeroNoiseMatchesEncoder) {
  const SceneConfig cfg = Config(0);
  const CodecConfig codec;
  for (uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    const Scene scene = generate_scene(cfg, rng);
    const SimulationResult sim = simulate_detector(
        scene, kClasses, cfg, noise_profile("zero"), codec, rng);
    const EncodeResult enc =
        encode_frame(scene.objects, scene.camera, kClasses, codec);
    EXPECT_EQ(sim.maps, enc.maps);
    EXPECT_EQ(sim.rendered.size(), scene.objects.size());
    EXPECT_TRUE(sim.dropped.empty());
  }
}

TEST(SimulateDetector, DropEverything) {
  const SceneConfig cfg = Config(0);
  NoiseConfig noise;
  noise.drop_probability = 1.0;
  Rng rng(8);
  const Scene scene = generate_scene(cfg, rng);
  const SimulationResult sim =
      simulate_detector(scene, kClasses, cfg, noise, CodecConfig{}, rng);
  EXPECT_EQ(sim.dropped.size(), scene.objects.size());
  EXPECT_TRUE(decode_detections(sim.maps, scene.camera, CodecConfig{}).empty());
}

TEST(SimulateDetector, FalsePositiveCountFollowsRate) {
  const SceneConfig cfg = Config(0);
  NoiseConfig noise;
  noise.false_positive_rate = 3.0;
  CodecConfig codec;
  codec.score_threshold = 0.05;
  int requested = 0, decoded_fp = 0;
  for (uint64_t frame = 0; frame < 100; ++frame) {
    Rng rng(stream_seed(77, frame));
    const Scene scene = generate_scene(cfg, rng);
    const SimulationResult sim =
        simulate_detector(scene, kClasses, cfg, noise, codec, rng);
    requested += sim.false_positives_requested;
    const auto dets = decode_detections(sim.maps, scene.camera, codec);
    ASSERT_EQ(dets.size(), sim.rendered.size());
    decoded_fp += static_cast<int>(dets.size() - scene.objects.size());
  }
  // Poisson(300) central 99% interval.
  EXPECT_GE(requested, 256);
  EXPECT_LE(requested, 346);
  EXPECT_GE(decoded_fp, 256);
  EXPECT_LE(decoded_fp, requested);
}

TEST(PerturbObject, JitterMatchesConfiguredSigma) {
  NoiseConfig noise;
  noise.center_sigma = 0.2;
  noise.depth_rel_sigma = 0.05;
  noise.yaw_sigma = 0.1;
  noise.dim_rel_sigma = 0.04;
  SceneObject base;
  base.box = {{1.0, 1.5, 20.0}, {1.6, 1.5, 4.0}, 0.5};
  Rng rng(31);
  const int n = 10000;
  double sx = 0, sz = 0, syaw = 0, sl = 0;
  for (int i = 0; i < n; ++i) {
    const Box3D b = perturb_object(base, noise, rng).box;
    sx += std::pow(b.center.x - 1.0, 2);
    sz += std::pow(b.center.z / 20.0 - 1.0, 2);
    syaw += std::pow(b.yaw - 0.5, 2);
    sl += std::pow(b.dims.l / 4.0 - 1.0, 2);
  }
  EXPECT_NEAR(std::sqrt(sx / n), 0.2, 0.02);
  EXPECT_NEAR(std::sqrt(sz / n), 0.05, 0.005);
  EXPECT_NEAR(std::sqrt(syaw / n), 0.1, 0.01);
  EXPECT_NEAR(std::sqrt(sl / n), 0.04, 0.004);

  const Box3D same = perturb_object(base, NoiseConfig{}, rng).box;
  EXPECT_EQ(same, base.box);
}

TEST(NoiseProfile, NamesAndValidation) {
  EXPECT_EQ(noise_profile("zero").false_positive_rate, 0.0);
  EXPECT_GT(noise_profile("default").false_positive_rate, 0.0);
  EXPECT_GT(noise_profile("corrupt").mislocalization_rate, 0.0);
  EXPECT_THROW(noise_profile("loud"), ConfigError);
  NoiseConfig bad;
  bad.drop_probability = 1.5;
  EXPECT_THROW(bad.validate(), ConfigError);
  SceneConfig cfg;
  cfg.min_objects = 5;
  cfg.max_objects = 2;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

}  // namespace
}  // namespace mono3d
