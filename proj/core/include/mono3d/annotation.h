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

// Annotation records shared by the dataset readers, the evaluator and the
// synthetic generator.

#ifndef MONO3D_ANNOTATION_H_
#define MONO3D_ANNOTATION_H_

#include <optional>
#include <string>
#include <vector>

#include "mono3d/geometry.h"

namespace mono3d {

enum class AnnotationLevel { k3D, k2DOnly };

const char* annotation_level_name(AnnotationLevel level);
// Accepts "3d" and "2d" (case-insensitive). Throws ConfigError.
AnnotationLevel parse_annotation_level(const std::string& text);

// One labeled (or predicted) object. `box3d` holds the geometric center;
// KITTI's bottom-center convention is converted at parse time.
struct ObjectAnnotation {
  std::string type;
  double truncation = 0.0;
  int occlusion = 0;
  std::optional<double> alpha;
  Box2D box2d;
  std::optional<Box3D> box3d;
  std::optional<double> score;
  // Ground-truth pitch and roll for benchmarks that annotate them; KITTI
  // rows leave them at 0.
  double pitch = 0.0;
  double roll = 0.0;

  bool is_dont_care() const { return type == "DontCare"; }
  bool operator==(const ObjectAnnotation&) const = default;
};

struct UnifiedFrame {
  std::string frame_id;
  std::string dataset;
  CameraIntrinsics camera;
  std::vector<ObjectAnnotation> annotations;
  AnnotationLevel annotation_level = AnnotationLevel::k3D;

  bool operator==(const UnifiedFrame&) const = default;
};

}  // namespace mono3d

#endif  // MONO3D_ANNOTATION_H_
