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

// Selective training for datasets with different annotated class sets.
//
// Every frame carries the class set its source dataset labels. The heatmap
// focal loss and the regression losses only see classes in that set, so a
// dataset that never labels "Tram" never teaches the model that trams are
// background.

#ifndef MONO3D_JOINT_TRAINING_H_
#define MONO3D_JOINT_TRAINING_H_

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "mono3d/annotation.h"
#include "mono3d/dense_codec.h"
#include "mono3d/geometry.h"

namespace mono3d {

struct DatasetManifest {
  std::string name;
  std::vector<std::string> annotated_classes;
  CameraIntrinsics camera;
  AnnotationLevel annotation_level = AnnotationLevel::k3D;

  void validate() const;
};

DatasetManifest manifest_from_json(const nlohmann::json& j);
nlohmann::json manifest_to_json(const DatasetManifest& manifest);
DatasetManifest load_manifest(const std::filesystem::path& path);

// Ordered class list; a class's index is its heatmap channel.
class ClassRegistry {
 public:
  ClassRegistry() = default;
  // Throws ConfigError on empty or duplicate names.
  explicit ClassRegistry(std::vector<std::string> names);

  // Union of the manifests' classes in order of first appearance.
  static ClassRegistry union_of(std::span<const DatasetManifest> manifests);

  int size() const { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& names() const { return names_; }
  std::optional<int> find(std::string_view name) const;
  // Throws ConfigError for unknown names.
  int index_of(std::string_view name) const;

 private:
  std::vector<std::string> names_;
};

class ClassMask {
 public:
  ClassMask() = default;
  explicit ClassMask(std::vector<bool> bits) : bits_(std::move(bits)) {}
  static ClassMask all(int size, bool value) {
    return ClassMask(std::vector<bool>(size, value));
  }

  int size() const { return static_cast<int>(bits_.size()); }
  bool operator[](int i) const { return bits_[i]; }
  void set(int i, bool value) { bits_[i] = value; }
  bool none() const;
  bool operator==(const ClassMask&) const = default;

 private:
  std::vector<bool> bits_;
};

// mask[i] is true iff registry class i is annotated by the manifest.
// Throws ConfigError when the manifest names a class the registry lacks.
ClassMask class_mask(const DatasetManifest& manifest,
                     const ClassRegistry& registry);

struct FocalTerms {
  double sum = 0.0;
  int num_peaks = 0;
};

// Unnormalized penalty-reduced focal loss over masked-in channels; peaks are
// target cells equal to 1.
FocalTerms focal_loss_terms(const Planes& pred, const Planes& target,
                            const ClassMask& mask);

// Penalty-reduced focal loss (alpha 2, beta 4) over masked-in channels,
// divided by max(1, peaks in masked-in channels). Throws ShapeError.
double masked_focal_loss(const Planes& pred, const Planes& target,
                         const ClassMask& mask);

// Mean L1 over the channels of every supervised regression head, at target
// cells whose object class is masked in. 0 when no such cell exists.
double masked_regression_loss(const DenseDetectionMaps& pred,
                              const DenseDetectionMaps& target,
                              const ClassMask& mask);

using HeadWeights = std::array<double, kNumHeads>;
inline constexpr HeadWeights kUnitHeadWeights = {1, 1, 1, 1, 1, 1};

struct LossBreakdown {
  double total = 0.0;
  // Indexed by Head. Regression heads use the per-head mean L1; heads the
  // target does not supervise, or with zero weight, are exactly 0.
  std::array<double, kNumHeads> per_head{};

  double operator[](Head h) const { return per_head[static_cast<int>(h)]; }
};

LossBreakdown joint_loss(const DenseDetectionMaps& pred,
                         const DenseDetectionMaps& target,
                         const ClassMask& mask, const HeadWeights& weights);

}  // namespace mono3d

#endif  // MONO3D_JOINT_TRAINING_H_
