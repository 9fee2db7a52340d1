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

#include "mono3d/joint_training.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_set>

#include "mono3d/errors.h"

namespace mono3d {
namespace {

constexpr double kFocalAlpha = 2.0;
constexpr double kFocalBeta = 4.0;
// Guards log(0) when a prediction saturates on the wrong side.
constexpr double kLogFloor = 1e-300;

void check_mask(const ClassMask& mask, int channels) {
  if (mask.size() != channels) {
    throw ShapeError("class mask has " + std::to_string(mask.size()) +
                     " entries for " + std::to_string(channels) + " classes");
  }
}

void check_maps(const DenseDetectionMaps& pred,
                const DenseDetectionMaps& target, const ClassMask& mask) {
  if (!pred.same_layout(target)) {
    throw ShapeError("prediction and target maps differ in layout");
  }
  check_mask(mask, target.num_classes());
}

struct L1Sum {
  double sum = 0.0;
  int cells = 0;
};

L1Sum head_l1(const DenseDetectionMaps& pred, const DenseDetectionMaps& target,
              const ClassMask& mask, Head head) {
  L1Sum out;
  const Planes& p = pred.head(head);
  const Planes& t = target.head(head);
  const int w = target.width();
  for (size_t cell = 0; cell < target.supervised_class.size(); ++cell) {
    const int cls = target.supervised_class[cell];
    if (cls < 0 || !mask[cls]) continue;
    const int y = static_cast<int>(cell) / w;
    const int x = static_cast<int>(cell) % w;
    for (int c = 0; c < t.channels(); ++c) {
      out.sum += std::abs(p.at(c, y, x) - t.at(c, y, x));
    }
    ++out.cells;
  }
  return out;
}

}  // namespace

void DatasetManifest::validate() const {
  if (name.empty()) throw ConfigError("manifest name is empty");
  if (annotated_classes.empty()) {
    throw ConfigError("manifest '" + name + "' annotates no classes");
  }
  camera.validate();
}

DatasetManifest manifest_from_json(const nlohmann::json& j) {
  DatasetManifest m;
  try {
    m.name = j.at("name").get<std::string>();
    m.annotated_classes =
        j.at("annotated_classes").get<std::vector<std::string>>();
    m.camera.fx = j.at("f_x").get<double>();
    m.camera.fy = j.at("f_y").get<double>();
    m.camera.cx = j.at("c_x").get<double>();
    m.camera.cy = j.at("c_y").get<double>();
    m.camera.width = j.at("width").get<int>();
    m.camera.height = j.at("height").get<int>();
    if (j.contains("annotation_level")) {
      m.annotation_level =
          parse_annotation_level(j.at("annotation_level").get<std::string>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad dataset manifest: ") + e.what());
  }
  try {
    m.validate();
  } catch (const DomainError& e) {
    throw ConfigError("manifest '" + m.name + "': " + e.what());
  }
  return m;
}

nlohmann::json manifest_to_json(const DatasetManifest& m) {
  return {{"name", m.name},
          {"annotated_classes", m.annotated_classes},
          {"f_x", m.camera.fx},
          {"f_y", m.camera.fy},
          {"c_x", m.camera.cx},
          {"c_y", m.camera.cy},
          {"width", m.camera.width},
          {"height", m.camera.height},
          {"annotation_level", annotation_level_name(m.annotation_level)}};
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return manifest_from_json(j);
}

ClassRegistry::ClassRegistry(std::vector<std::string> names)
    : names_(std::move(names)) {
  std::unordered_set<std::string> seen;
  for (const auto& n : names_) {
    if (n.empty()) throw ConfigError("empty class name");
    if (!seen.insert(n).second) throw ConfigError("duplicate class " + n);
  }
}

ClassRegistry ClassRegistry::union_of(
    std::span<const DatasetManifest> manifests) {
  std::vector<std::string> names;
  for (const auto& m : manifests) {
    for (const auto& c : m.annotated_classes) {
      if (std::find(names.begin(), names.end(), c) == names.end()) {
        names.push_back(c);
      }
    }
  }
  return ClassRegistry(std::move(names));
}

std::optional<int> ClassRegistry::find(std::string_view name) const {
  const auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<int>(it - names_.begin());
}

int ClassRegistry::index_of(std::string_view name) const {
  const auto idx = find(name);
  if (!idx) throw ConfigError("unknown class '" + std::string(name) + "'");
  return *idx;
}

bool ClassMask::none() const {
  return std::none_of(bits_.begin(), bits_.end(), [](bool b) { return b; });
}

ClassMask class_mask(const DatasetManifest& manifest,
                     const ClassRegistry& registry) {
  ClassMask mask = ClassMask::all(registry.size(), false);
  for (const auto& name : manifest.annotated_classes) {
    mask.set(registry.index_of(name), true);
  }
  return mask;
}

FocalTerms focal_loss_terms(const Planes& pred, const Planes& target,
                            const ClassMask& mask) {
  if (!pred.same_shape(target)) {
    throw ShapeError("prediction and target heatmaps differ in shape");
  }
  check_mask(mask, target.channels());
  FocalTerms out;
  for (int c = 0; c < target.channels(); ++c) {
    if (!mask[c]) continue;
    const auto p = pred.plane(c);
    const auto t = target.plane(c);
    for (size_t i = 0; i < t.size(); ++i) {
      const double y = t[i];
      const double q = p[i];
      if (y == 1.0) {
        ++out.num_peaks;
        if (q < 1.0) {
          out.sum -= std::pow(1.0 - q, kFocalAlpha) *
                     std::log(std::max(q, kLogFloor));
        }
      } else if (q > 0.0) {
        out.sum -= std::pow(1.0 - y, kFocalBeta) * std::pow(q, kFocalAlpha) *
                   std::log(std::max(1.0 - q, kLogFloor));
      }
    }
  }
  return out;
}

double masked_focal_loss(const Planes& pred, const Planes& target,
                         const ClassMask& mask) {
  const FocalTerms terms = focal_loss_terms(pred, target, mask);
  return terms.sum / std::max(1, terms.num_peaks);
}

double masked_regression_loss(const DenseDetectionMaps& pred,
                              const DenseDetectionMaps& target,
                              const ClassMask& mask) {
  check_maps(pred, target, mask);
  double sum = 0.0;
  int cells = 0;
  int channels = 0;
  for (Head head : kAllHeads) {
    if (head == Head::kHeatmap || !target.head_supervised(head)) continue;
    const L1Sum l1 = head_l1(pred, target, mask, head);
    sum += l1.sum;
    cells = l1.cells;
    channels += regression_channels(head);
  }
  if (cells == 0 || channels == 0) return 0.0;
  return sum / (static_cast<double>(cells) * channels);
}

LossBreakdown joint_loss(const DenseDetectionMaps& pred,
                         const DenseDetectionMaps& target,
                         const ClassMask& mask, const HeadWeights& weights) {
  check_maps(pred, target, mask);
  LossBreakdown out;
  for (Head head : kAllHeads) {
    const int h = static_cast<int>(head);
    if (weights[h] < 0.0) throw ConfigError("loss weights must be >= 0");
    if (weights[h] == 0.0 || !target.head_supervised(head)) continue;
    double loss = 0.0;
    if (head == Head::kHeatmap) {
      loss = masked_focal_loss(pred.heatmap, target.heatmap, mask);
    } else {
      const L1Sum l1 = head_l1(pred, target, mask, head);
      if (l1.cells > 0) {
        loss = l1.sum / (static_cast<double>(l1.cells) *
                         regression_channels(head));
      }
    }
    out.per_head[h] = loss;
    out.total += weights[h] * loss;
  }
  return out;
}

}  // namespace mono3d
