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

// Synthetic scenes and a simulated pre-trained detector.
//
// The simulator stands in for a trained network: it perturbs ground truth,
// drops objects, adds mis-localized detections and false positives, and
// renders the result as dense detection maps. Every output is a pure
// function of the configuration and the seed.

#ifndef MONO3D_SYNTHETIC_H_
#define MONO3D_SYNTHETIC_H_

#include <cstdint>
#include <string>
#include <vector>

#include "mono3d/annotation.h"
#include "mono3d/dense_codec.h"
#include "mono3d/geometry.h"
#include "mono3d/pseudo_labeler.h"
#include "mono3d/rng.h"

namespace mono3d {

struct DimRange {
  Dims3 min;
  Dims3 max;
};

struct SceneConfig {
  uint64_t seed = 0;
  int min_objects = 1;
  int max_objects = 8;
  std::vector<std::string> class_names = {"Car", "Pedestrian", "Cyclist"};
  std::vector<double> class_weights = {0.6, 0.2, 0.2};
  // Indexed like class_names.
  std::vector<DimRange> dim_ranges = {
      {{1.5, 1.4, 3.4}, {1.9, 1.7, 4.6}},
      {{0.5, 1.5, 0.5}, {0.8, 1.9, 1.0}},
      {{0.5, 1.6, 1.5}, {0.8, 1.9, 1.9}}};
  double min_depth = 5.0;
  double max_depth = 50.0;
  int image_width = 1242;
  int image_height = 375;
  // f_y = f_x; the principal point sits at the image center.
  double min_fx = 600.0;
  double max_fx = 1000.0;
  // Chebyshev distance between projected centers, pixels.
  double min_center_separation_px = 12.0;
  // Largest 2D IoU between objects of the same class.
  double max_same_class_iou = 0.3;
  // Placement attempts per object before giving up.
  int max_attempts = 1000;

  void validate() const;
};

struct Scene {
  CameraIntrinsics camera;
  std::vector<SceneObject> objects;
};

// Throws DomainError when an object cannot be placed within max_attempts.
Scene generate_scene(const SceneConfig& config, Rng& rng);
// Uses Rng(config.seed).
Scene generate_scene(const SceneConfig& config);

// Projected, image-clipped 2D boxes of the scene objects.
std::vector<LabeledBox2D> scene_boxes2d(const Scene& scene);

UnifiedFrame scene_to_frame(const Scene& scene, const std::string& frame_id,
                            const std::vector<std::string>& class_names);

struct ScoreModel {
  double true_min = 1.0;
  double true_max = 1.0;
  double false_positive_min = 0.05;
  double false_positive_max = 0.4;
};

struct NoiseConfig {
  double center_sigma = 0.0;     // meters, applied to x and y
  double depth_rel_sigma = 0.0;  // relative
  double yaw_sigma = 0.0;        // radians
  double dim_rel_sigma = 0.0;    // relative
  double drop_probability = 0.0;
  double false_positive_rate = 0.0;  // Poisson mean per frame
  // Probability that a kept object is re-placed elsewhere in the image.
  double mislocalization_rate = 0.0;
  // Injected corruptions keep 2D IoU below this with every same-class
  // ground-truth box.
  double corruption_max_iou = 0.4;
  ScoreModel scores;

  void validate() const;
};

// "zero", "default" or "corrupt". Throws ConfigError.
NoiseConfig noise_profile(const std::string& name);

enum class DetectionSource { kTrue, kMislocalized, kFalsePositive };

struct SimulatedDetection {
  DetectionSource source = DetectionSource::kTrue;
  // Scene object index; -1 for false positives.
  int object_index = -1;
  SceneObject object;
  double score = 1.0;
  PixelPoint center;
};

struct SimulationResult {
  DenseDetectionMaps maps;
  // Everything rendered into the maps, in render order.
  std::vector<SimulatedDetection> rendered;
  std::vector<int> dropped;
  int false_positives_requested = 0;
};

// Jitter only; no drop or relocation.
SceneObject perturb_object(const SceneObject& object, const NoiseConfig& noise,
                           Rng& rng);

SimulationResult simulate_detector(const Scene& scene,
                                   const std::vector<std::string>& class_names,
                                   const SceneConfig& scene_config,
                                   const NoiseConfig& noise,
                                   const CodecConfig& codec, Rng& rng);

}  // namespace mono3d

#endif  // MONO3D_SYNTHETIC_H_
