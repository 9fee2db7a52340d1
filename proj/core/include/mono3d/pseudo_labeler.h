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

// Pseudo-3D supervision from 2D labels.
//
// A pre-trained detector is run on frames that only carry 2D boxes, with a
// very low score threshold. Its detections are matched class by class to
// the labeled boxes at minimum total (1 - IoU) cost. Pairs whose cost
// exceeds `eps` are treated as mis-detections and dropped. Each surviving
// pair supervises the heatmap at the detection's projected 3D center and the
// 2D channels with the labeled box; the 3D heads receive no supervision.

#ifndef MONO3D_PSEUDO_LABELER_H_
#define MONO3D_PSEUDO_LABELER_H_

#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mono3d/assignment.h"
#include "mono3d/dense_codec.h"
#include "mono3d/geometry.h"
#include "mono3d/joint_training.h"

namespace mono3d {

struct LabeledBox2D {
  int class_id = 0;
  Box2D box;
};

struct PseudoConfig {
  double low_score_threshold = 0.05;
  // Largest accepted matching cost (1 - IoU).
  double eps = 0.5;

  void validate() const;
};

struct PseudoLabel {
  int class_id = 0;
  // Index into the labeled boxes the label was built from.
  int gt_index = 0;
  Box2D gt_box2d;
  PixelPoint projected_center;
  double cost = 0.0;
  // Carried from the matched detection for inspection; never supervised.
  double alpha = 0.0;
  double depth = 0.0;
  Dims3 dims;
};

// Indices refer to the decoded detection list and the labeled-box list.
// matched, removed_mis_detections and the two unmatched lists partition both
// index sets.
struct MatchReport {
  std::vector<MatchPair> matched;
  std::vector<MatchPair> removed_mis_detections;
  std::vector<int> unmatched_gt;
  std::vector<int> unmatched_pred;

  nlohmann::json to_json() const;
};

// Entry (i, j) = 1 - iou_2d(preds[i].box2d, gts[j]).
CostMatrix iou_cost_matrix(std::span<const Detection> preds,
                           std::span<const Box2D> gts);

struct PseudoLabelResult {
  std::vector<PseudoLabel> labels;
  MatchReport report;
  std::vector<Detection> detections;
};

// Decodes `maps` at config.low_score_threshold (other decoding settings come
// from `codec`), matches per class and filters by eps. Labels are ordered by
// gt index.
PseudoLabelResult generate_pseudo_labels(const DenseDetectionMaps& maps,
                                         std::span<const LabeledBox2D> gt_boxes,
                                         const CameraIntrinsics& camera,
                                         const PseudoConfig& config,
                                         const CodecConfig& codec);

struct RebuildResult {
  DenseDetectionMaps maps;
  // Indices into the label list whose center fell outside the image.
  std::vector<int> skipped;
};

// Heatmap, offset and box2d targets from pseudo labels. Only those three
// heads are flagged as supervised.
RebuildResult rebuild_targets(std::span<const PseudoLabel> labels,
                              const std::vector<std::string>& class_names,
                              int image_width, int image_height,
                              const CodecConfig& codec);

// joint_loss restricted to the heatmap, offset and box2d heads.
LossBreakdown pseudo_loss(const DenseDetectionMaps& pred,
                          const DenseDetectionMaps& pseudo_targets,
                          const ClassMask& mask,
                          const HeadWeights& weights = kUnitHeadWeights);

// One JSON-lines record:
// {"frame", "class", "gt_box2d": [l, t, r, b], "center": [u, v], "cost"}.
nlohmann::json pseudo_label_record(const std::string& frame,
                                   const std::string& class_name,
                                   const PseudoLabel& label);

}  // namespace mono3d

#endif  // MONO3D_PSEUDO_LABELER_H_
