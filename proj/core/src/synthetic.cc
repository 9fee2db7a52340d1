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

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "mono3d/errors.h"

namespace mono3d {
namespace {

bool all_corners_in_front(const Box3D& box) {
  const auto corners = box3d_corners(box);
  return std::all_of(corners.begin(), corners.end(),
                     [](const Vec3& p) { return p.z > 0.0; });
}

bool center_in_image(const CameraIntrinsics& camera, const PixelPoint& p) {
  return p.u >= 0.0 && p.v >= 0.0 && p.u < camera.width &&
         p.v < camera.height;
}

double chebyshev(const PixelPoint& a, const PixelPoint& b) {
  return std::max(std::abs(a.u - b.u), std::abs(a.v - b.v));
}

void check_range(double lo, double hi, const char* what) {
  if (!(std::isfinite(lo) && std::isfinite(hi) && lo <= hi)) {
    throw ConfigError(std::string("empty range: ") + what);
  }
}

void check_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ConfigError(std::string(what) + " must lie in [0, 1]");
  }
}

void check_sigma(double s, const char* what) {
  if (!(s >= 0.0) || !std::isfinite(s)) {
    throw ConfigError(std::string(what) + " must be finite and >= 0");
  }
}

// A random object of `class_id` whose center lands inside the image.
SceneObject sample_object(const SceneConfig& cfg,
                          const CameraIntrinsics& camera, int class_id,
                          Rng& rng) {
  const DimRange& range = cfg.dim_ranges[class_id];
  SceneObject obj;
  obj.class_id = class_id;
  const double u = rng.uniform(0.0, camera.width);
  const double v = rng.uniform(0.0, camera.height);
  const double z = rng.uniform(cfg.min_depth, cfg.max_depth);
  obj.box.center = unproject(camera, u, v, z);
  obj.box.dims = {rng.uniform(range.min.w, range.max.w),
                  rng.uniform(range.min.h, range.max.h),
                  rng.uniform(range.min.l, range.max.l)};
  obj.box.yaw = wrap_angle(rng.uniform(-kPi, kPi));
  return obj;
}

// Moves `obj` to a fresh random position and depth, keeping class, size
// and yaw.
SceneObject relocate(const SceneObject& obj, const SceneConfig& cfg,
                     const CameraIntrinsics& camera, Rng& rng) {
  SceneObject out = obj;
  const double u = rng.uniform(0.0, camera.width);
  const double v = rng.uniform(0.0, camera.height);
  const double z = rng.uniform(cfg.min_depth, cfg.max_depth);
  out.box.center = unproject(camera, u, v, z);
  return out;
}

}  // namespace

void SceneConfig::validate() const {
  if (min_objects < 0 || max_objects < min_objects) {
    throw ConfigError("object count range is empty");
  }
  if (class_names.empty()) throw ConfigError("no classes");
  if (class_weights.size() != class_names.size() ||
      dim_ranges.size() != class_names.size()) {
    throw ConfigError("class weights and dim ranges must match classes");
  }
  double total = 0.0;
  for (double w : class_weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw ConfigError("class weights must be finite and >= 0");
    }
    total += w;
  }
  if (!(total > 0.0)) throw ConfigError("class weights sum to zero");
  for (const DimRange& r : dim_ranges) {
    check_range(r.min.w, r.max.w, "width");
    check_range(r.min.h, r.max.h, "height");
    check_range(r.min.l, r.max.l, "length");
    if (!(r.min.w > 0.0 && r.min.h > 0.0 && r.min.l > 0.0)) {
      throw ConfigError("dimensions must be positive");
    }
  }
  check_range(min_depth, max_depth, "depth");
  if (!(min_depth > 0.0)) throw ConfigError("depth range must be positive");
  if (image_width <= 0 || image_height <= 0) {
    throw ConfigError("image size must be positive");
  }
  check_range(min_fx, max_fx, "f_x");
  if (!(min_fx > 0.0)) throw ConfigError("f_x range must be positive");
  if (!(min_center_separation_px >= 0.0)) {
    throw ConfigError("center separation must be >= 0");
  }
  if (!(max_same_class_iou > 0.0 && max_same_class_iou <= 1.0)) {
    throw ConfigError("max_same_class_iou must lie in (0, 1]");
  }
  if (max_attempts <= 0) throw ConfigError("max_attempts must be positive");
}

Scene generate_scene(const SceneConfig& config, Rng& rng) {
  config.validate();
  Scene scene;
  const double fx = rng.uniform(config.min_fx, config.max_fx);
  scene.camera = {fx,
                  fx,
                  config.image_width / 2.0,
                  config.image_height / 2.0,
                  config.image_width,
                  config.image_height};

  const int count = rng.uniform_int(config.min_objects, config.max_objects);
  std::vector<PixelPoint> centers;
  std::vector<Box2D> boxes;
  for (int i = 0; i < count; ++i) {
    const int class_id = rng.categorical(config.class_weights);
    bool placed = false;
    for (int attempt = 0; attempt < config.max_attempts && !placed;
         ++attempt) {
      SceneObject obj = sample_object(config, scene.camera, class_id, rng);
      if (!all_corners_in_front(obj.box)) continue;
      const PixelPoint c = project_point(scene.camera, obj.box.center);
      if (!center_in_image(scene.camera, c)) continue;
      const Box2D b = projected_box2d(scene.camera, obj.box);
      if (!b.valid()) continue;
      bool ok = true;
      for (size_t j = 0; j < scene.objects.size() && ok; ++j) {
        if (chebyshev(c, centers[j]) < config.min_center_separation_px) {
          ok = false;
        } else if (scene.objects[j].class_id == class_id &&
                   iou_2d(b, boxes[j]) >= config.max_same_class_iou) {
          ok = false;
        }
      }
      if (!ok) continue;
      scene.objects.push_back(obj);
      centers.push_back(c);
      boxes.push_back(b);
      placed = true;
    }
    if (!placed) {
      throw DomainError("could not place object " + std::to_string(i) +
                        " after " + std::to_string(config.max_attempts) +
                        " attempts");
    }
  }
  return scene;
}

Scene generate_scene(const SceneConfig& config) {
  Rng rng(config.seed);
  return generate_scene(config, rng);
}

std::vector<LabeledBox2D> scene_boxes2d(const Scene& scene) {
  std::vector<LabeledBox2D> out;
  out.reserve(scene.objects.size());
  for (const SceneObject& obj : scene.objects) {
    out.push_back({obj.class_id, projected_box2d(scene.camera, obj.box)});
  }
  return out;
}

UnifiedFrame scene_to_frame(const Scene& scene, const std::string& frame_id,
                            const std::vector<std::string>& class_names) {
  UnifiedFrame frame;
  frame.frame_id = frame_id;
  frame.dataset = "synthetic";
  frame.camera = scene.camera;
  frame.annotation_level = AnnotationLevel::k3D;
  for (const SceneObject& obj : scene.objects) {
    ObjectAnnotation ann;
    ann.type = class_names.at(obj.class_id);
    ann.alpha =
        observation_angle(obj.box.yaw, obj.box.center.x, obj.box.center.z);
    ann.box2d = projected_box2d(scene.camera, obj.box);
    ann.box3d = obj.box;
    frame.annotations.push_back(std::move(ann));
  }
  return frame;
}

void NoiseConfig::validate() const {
  check_sigma(center_sigma, "center_sigma");
  check_sigma(depth_rel_sigma, "depth_rel_sigma");
  check_sigma(yaw_sigma, "yaw_sigma");
  check_sigma(dim_rel_sigma, "dim_rel_sigma");
  check_probability(drop_probability, "drop_probability");
  check_probability(mislocalization_rate, "mislocalization_rate");
  check_sigma(false_positive_rate, "false_positive_rate");
  if (!(corruption_max_iou > 0.0 && corruption_max_iou <= 1.0)) {
    throw ConfigError("corruption_max_iou must lie in (0, 1]");
  }
  check_range(scores.true_min, scores.true_max, "true scores");
  check_range(scores.false_positive_min, scores.false_positive_max,
              "false-positive scores");
  check_probability(scores.true_min, "true_min");
  check_probability(scores.true_max, "true_max");
  check_probability(scores.false_positive_min, "false_positive_min");
  check_probability(scores.false_positive_max, "false_positive_max");
  if (!(scores.true_min > 0.0 && scores.false_positive_min > 0.0)) {
    throw ConfigError("scores must be positive");
  }
}

NoiseConfig noise_profile(const std::string& name) {
  NoiseConfig n;
  if (name == "zero") return n;
  if (name == "default") {
    n.center_sigma = 0.1;
    n.depth_rel_sigma = 0.03;
    n.yaw_sigma = 0.05;
    n.dim_rel_sigma = 0.05;
    n.drop_probability = 0.1;
    n.false_positive_rate = 1.0;
    n.mislocalization_rate = 0.05;
    n.scores.true_min = 0.5;
    n.scores.true_max = 1.0;
    return n;
  }
  if (name == "corrupt") {
    n.false_positive_rate = 3.0;
    n.mislocalization_rate = 0.2;
    return n;
  }
  throw ConfigError("unknown noise profile: " + name);
}

SceneObject perturb_object(const SceneObject& object, const NoiseConfig& noise,
                           Rng& rng) {
  SceneObject out = object;
  Box3D& b = out.box;
  if (noise.center_sigma > 0.0) {
    b.center.x += rng.normal(0.0, noise.center_sigma);
    b.center.y += rng.normal(0.0, noise.center_sigma);
  }
  if (noise.depth_rel_sigma > 0.0) {
    b.center.z *= 1.0 + rng.normal(0.0, noise.depth_rel_sigma);
  }
  if (noise.yaw_sigma > 0.0) {
    b.yaw = wrap_angle(b.yaw + rng.normal(0.0, noise.yaw_sigma));
  }
  if (noise.dim_rel_sigma > 0.0) {
    constexpr double kMinScale = 0.1;
    b.dims.w *= std::max(kMinScale, 1.0 + rng.normal(0.0, noise.dim_rel_sigma));
    b.dims.h *= std::max(kMinScale, 1.0 + rng.normal(0.0, noise.dim_rel_sigma));
    b.dims.l *= std::max(kMinScale, 1.0 + rng.normal(0.0, noise.dim_rel_sigma));
  }
  return out;
}

SimulationResult simulate_detector(const Scene& scene,
                                   const std::vector<std::string>& class_names,
                                   const SceneConfig& scene_config,
                                   const NoiseConfig& noise,
                                   const CodecConfig& codec, Rng& rng) {
  noise.validate();
  codec.validate();
  scene_config.validate();
  const CameraIntrinsics& camera = scene.camera;
  SimulationResult result{
      DenseDetectionMaps::zeros(class_names, camera.width, camera.height,
                                codec.stride),
      {}, {}, 0};
  result.maps.supervised_heads.fill(true);

  const auto draw_true_score = [&] {
    if (noise.scores.true_min == noise.scores.true_max) {
      return noise.scores.true_min;
    }
    return rng.uniform(noise.scores.true_min, noise.scores.true_max);
  };

  std::vector<Box2D> gt_boxes;
  for (const SceneObject& obj : scene.objects) {
    gt_boxes.push_back(projected_box2d(camera, obj.box));
  }

  // True detections first, in scene order.
  std::vector<int> relocated;
  for (size_t i = 0; i < scene.objects.size(); ++i) {
    if (noise.drop_probability > 0.0 && rng.bernoulli(noise.drop_probability)) {
      result.dropped.push_back(static_cast<int>(i));
      continue;
    }
    if (noise.mislocalization_rate > 0.0 &&
        rng.bernoulli(noise.mislocalization_rate)) {
      relocated.push_back(static_cast<int>(i));
      continue;
    }
    const SceneObject obj = perturb_object(scene.objects[i], noise, rng);
    const double score = draw_true_score();
    if (!all_corners_in_front(obj.box)) {
      result.dropped.push_back(static_cast<int>(i));
      continue;
    }
    const RenderTarget target = make_render_target(obj, camera, codec, score);
    if (!render_target(result.maps, target, codec)) {
      result.dropped.push_back(static_cast<int>(i));
      continue;
    }
    result.rendered.push_back({DetectionSource::kTrue, static_cast<int>(i),
                               obj, score, target.center});
  }

  // Corruptions are placed away from every rendered center and from every
  // same-class ground-truth box, and must leave all rendered peaks intact.
  const auto place = [&](SceneObject candidate_base, DetectionSource source,
                         int object_index, double score) {
    for (int attempt = 0; attempt < scene_config.max_attempts; ++attempt) {
      SceneObject obj =
          source == DetectionSource::kFalsePositive
              ? sample_object(scene_config, camera, candidate_base.class_id,
                              rng)
              : relocate(candidate_base, scene_config, camera, rng);
      if (!all_corners_in_front(obj.box)) continue;
      const RenderTarget target = make_render_target(obj, camera, codec, score);
      if (!center_in_image(camera, target.center) || !target.box2d.valid()) {
        continue;
      }
      bool ok = true;
      for (const SimulatedDetection& d : result.rendered) {
        if (chebyshev(target.center, d.center) <
            scene_config.min_center_separation_px) {
          ok = false;
          break;
        }
      }
      for (size_t j = 0; j < scene.objects.size() && ok; ++j) {
        if (scene.objects[j].class_id == obj.class_id &&
            iou_2d(target.box2d, gt_boxes[j]) >= noise.corruption_max_iou) {
          ok = false;
        }
      }
      if (!ok) continue;

      DenseDetectionMaps trial = result.maps;
      if (!render_target(trial, target, codec)) continue;
      const auto survives = [&](const PixelPoint& c, int class_id,
                                double peak) {
        const int x = static_cast<int>(std::floor(c.u / codec.stride));
        const int y = static_cast<int>(std::floor(c.v / codec.stride));
        return trial.heatmap.at(class_id, y, x) == peak &&
               is_peak(trial.heatmap, class_id, y, x);
      };
      if (!survives(target.center, obj.class_id, score)) continue;
      for (const SimulatedDetection& d : result.rendered) {
        if (d.object.class_id == obj.class_id &&
            !survives(d.center, d.object.class_id, d.score)) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      result.maps = std::move(trial);
      result.rendered.push_back({source, object_index, obj, score,
                                 target.center});
      return true;
    }
    return false;
  };

  for (int i : relocated) {
    const double score = draw_true_score();
    if (!place(scene.objects[i], DetectionSource::kMislocalized, i, score)) {
      result.dropped.push_back(i);
    }
  }
  std::sort(result.dropped.begin(), result.dropped.end());

  result.false_positives_requested =
      noise.false_positive_rate > 0.0 ? rng.poisson(noise.false_positive_rate)
                                      : 0;
  for (int k = 0; k < result.false_positives_requested; ++k) {
    SceneObject base;
    base.class_id = rng.categorical(scene_config.class_weights);
    const double score = rng.uniform(noise.scores.false_positive_min,
                                     noise.scores.false_positive_max);
    place(base, DetectionSource::kFalsePositive, -1, score);
  }
  return result;
}

}  // namespace mono3d
