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

#include "mono3d/pseudo_labeler.h"

#include <algorithm>

#include "mono3d/errors.h"

namespace mono3d {
namespace {

nlohmann::json pairs_json(const std::vector<MatchPair>& pairs) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& p : pairs) {
    out.push_back({{"pred", p.pred}, {"gt", p.gt}, {"cost", p.cost}});
  }
  return out;
}

bool inside_image(const PixelPoint& p, const CameraIntrinsics& camera) {
  return p.u >= 0.0 && p.u < camera.width && p.v >= 0.0 &&
         p.v < camera.height;
}

}  // namespace

void PseudoConfig::validate() const {
  if (!(low_score_threshold >= 0.0 && low_score_threshold <= 1.0)) {
    throw ConfigError("low_score_threshold must lie in [0, 1]");
  }
  if (!(eps >= 0.0 && eps <= 1.0)) {
    throw ConfigError("eps must lie in [0, 1]");
  }
}

nlohmann::json MatchReport::to_json() const {
  return {{"matched", pairs_json(matched)},
          {"removed_mis_detections", pairs_json(removed_mis_detections)},
          {"unmatched_gt", unmatched_gt},
          {"unmatched_pred", unmatched_pred}};
}

CostMatrix iou_cost_matrix(std::span<const Detection> preds,
                           std::span<const Box2D> gts) {
  CostMatrix cost(static_cast<int>(preds.size()), static_cast<int>(gts.size()));
  for (size_t i = 0; i < preds.size(); ++i) {
    for (size_t j = 0; j < gts.size(); ++j) {
      cost.at(static_cast<int>(i), static_cast<int>(j)) =
          1.0 - iou_2d(preds[i].box2d, gts[j]);
    }
  }
  return cost;
}

PseudoLabelResult generate_pseudo_labels(const DenseDetectionMaps& maps,
                                         std::span<const LabeledBox2D> gt_boxes,
                                         const CameraIntrinsics& camera,
                                         const PseudoConfig& config,
                                         const CodecConfig& codec) {
  config.validate();
  CodecConfig decode_config = codec;
  decode_config.score_threshold = config.low_score_threshold;

  PseudoLabelResult result;
  result.detections = decode_detections(maps, camera, decode_config);
  const auto& dets = result.detections;
  for (const auto& gt : gt_boxes) {
    if (gt.class_id < 0 || gt.class_id >= maps.num_classes()) {
      throw ConfigError("labeled box class " + std::to_string(gt.class_id) +
                        " outside the class list");
    }
  }

  MatchReport& report = result.report;
  for (int cls = 0; cls < maps.num_classes(); ++cls) {
    std::vector<int> pred_idx;
    std::vector<int> gt_idx;
    std::vector<Detection> class_preds;
    std::vector<Box2D> class_gts;
    for (size_t i = 0; i < dets.size(); ++i) {
      if (dets[i].class_id != cls) continue;
      pred_idx.push_back(static_cast<int>(i));
      class_preds.push_back(dets[i]);
    }
    for (size_t j = 0; j < gt_boxes.size(); ++j) {
      if (gt_boxes[j].class_id != cls) continue;
      gt_idx.push_back(static_cast<int>(j));
      class_gts.push_back(gt_boxes[j].box);
    }

    std::vector<char> pred_used(pred_idx.size(), 0);
    std::vector<char> gt_used(gt_idx.size(), 0);
    for (const MatchPair& local :
         min_cost_matching(iou_cost_matrix(class_preds, class_gts))) {
      pred_used[local.pred] = 1;
      gt_used[local.gt] = 1;
      const MatchPair pair{pred_idx[local.pred], gt_idx[local.gt], local.cost};
      const Detection& det = dets[pair.pred];
      const PixelPoint center = project_point(camera, det.box3d.center);
      if (pair.cost > config.eps || !inside_image(center, camera)) {
        report.removed_mis_detections.push_back(pair);
        continue;
      }
      report.matched.push_back(pair);
      result.labels.push_back({cls, pair.gt, gt_boxes[pair.gt].box, center,
                               pair.cost, det.alpha, det.box3d.center.z,
                               det.box3d.dims});
    }
    for (size_t i = 0; i < pred_idx.size(); ++i) {
      if (!pred_used[i]) report.unmatched_pred.push_back(pred_idx[i]);
    }
    for (size_t j = 0; j < gt_idx.size(); ++j) {
      if (!gt_used[j]) report.unmatched_gt.push_back(gt_idx[j]);
    }
  }

  const auto by_gt = [](const MatchPair& a, const MatchPair& b) {
    return a.gt < b.gt;
  };
  std::sort(report.matched.begin(), report.matched.end(), by_gt);
  std::sort(report.removed_mis_detections.begin(),
            report.removed_mis_detections.end(), by_gt);
  std::sort(report.unmatched_gt.begin(), report.unmatched_gt.end());
  std::sort(report.unmatched_pred.begin(), report.unmatched_pred.end());
  std::sort(result.labels.begin(), result.labels.end(),
            [](const PseudoLabel& a, const PseudoLabel& b) {
              return a.gt_index < b.gt_index;
            });
  return result;
}

RebuildResult rebuild_targets(std::span<const PseudoLabel> labels,
                              const std::vector<std::string>& class_names,
                              int image_width, int image_height,
                              const CodecConfig& codec) {
  codec.validate();
  RebuildResult result{DenseDetectionMaps::zeros(class_names, image_width,
                                                 image_height, codec.stride),
                       {}};
  auto& heads = result.maps.supervised_heads;
  heads[static_cast<int>(Head::kHeatmap)] = true;
  heads[static_cast<int>(Head::kOffset)] = true;
  heads[static_cast<int>(Head::kBox2d)] = true;
  for (size_t i = 0; i < labels.size(); ++i) {
    RenderTarget target;
    target.class_id = labels[i].class_id;
    target.center = labels[i].projected_center;
    target.box2d = labels[i].gt_box2d;
    if (!render_target(result.maps, target, codec)) {
      result.skipped.push_back(static_cast<int>(i));
    }
  }
  return result;
}

LossBreakdown pseudo_loss(const DenseDetectionMaps& pred,
                          const DenseDetectionMaps& pseudo_targets,
                          const ClassMask& mask, const HeadWeights& weights) {
  HeadWeights restricted{};
  for (Head head : {Head::kHeatmap, Head::kOffset, Head::kBox2d}) {
    restricted[static_cast<int>(head)] = weights[static_cast<int>(head)];
  }
  return joint_loss(pred, pseudo_targets, mask, restricted);
}

nlohmann::json pseudo_label_record(const std::string& frame,
                                   const std::string& class_name,
                                   const PseudoLabel& label) {
  const Box2D& b = label.gt_box2d;
  return {{"frame", frame},
          {"class", class_name},
          {"gt_box2d", {b.left, b.top, b.right, b.bottom}},
          {"center", {label.projected_center.u, label.projected_center.v}},
          {"cost", label.cost}};
}

}  // namespace mono3d
