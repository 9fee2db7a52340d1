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

// KITTI AP40 and the Cityscapes-3D detection score family.

#ifndef MONO3D_METRICS_H_
#define MONO3D_METRICS_H_

#include <algorithm>
#include <array>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "mono3d/annotation.h"
#include "mono3d/geometry.h"

namespace mono3d {

enum class DifficultyBand { kEasy = 0, kModerate, kHard };
inline constexpr std::array<DifficultyBand, 3> kAllBands = {
    DifficultyBand::kEasy, DifficultyBand::kModerate, DifficultyBand::kHard};

struct DifficultyThresholds {
  double min_height;
  int max_occlusion;
  double max_truncation;
};

const char* band_name(DifficultyBand band);
DifficultyThresholds difficulty_thresholds(DifficultyBand band);

class BandSet {
 public:
  void insert(DifficultyBand b) { bits_ |= 1u << static_cast<int>(b); }
  bool contains(DifficultyBand b) const {
    return bits_ & (1u << static_cast<int>(b));
  }
  bool empty() const { return bits_ == 0; }
  bool operator==(const BandSet&) const = default;

 private:
  unsigned bits_ = 0;
};

// Bands whose height/occlusion/truncation limits the annotation satisfies.
// An empty set means the object is ignored ("don't care") in every band.
BandSet kitti_difficulty(const ObjectAnnotation& ann);

enum class EvalMode { k2D = 0, kBEV, k3D };
inline constexpr std::array<EvalMode, 3> kAllModes = {EvalMode::k2D,
                                                      EvalMode::kBEV,
                                                      EvalMode::k3D};
const char* mode_name(EvalMode mode);

inline constexpr int kRecallPositions = 40;

struct EvalConfig {
  // Per-class IoU threshold indexed by EvalMode.
  std::map<std::string, std::array<double, 3>> iou_thresholds = {
      {"Car", {0.7, 0.7, 0.7}},
      {"Pedestrian", {0.5, 0.5, 0.5}},
      {"Cyclist", {0.5, 0.5, 0.5}}};
  double default_iou_threshold = 0.5;

  double iou_threshold(const std::string& cls, EvalMode mode) const;
  void validate() const;
};

// Ground truth and predictions for one image. Predictions must carry scores.
struct EvalFrame {
  std::string frame_id;
  std::vector<ObjectAnnotation> gts;
  std::vector<ObjectAnnotation> preds;
  AnnotationLevel gt_level = AnnotationLevel::k3D;
};

struct ApResult {
  double ap = 0.0;
  int num_gt = 0;
  int tp = 0;
  int fp = 0;
  // Set when no ground truth was eligible; `ap` is then 0.
  bool no_ground_truth = false;
};

// One scored prediction after matching, in global ranking order.
struct ScoredOutcome {
  double score = 0.0;
  bool true_positive = false;
  int frame_rank = 0;
  int pred_rank = 0;
};

// 100/40 * sum over r in {1/40, ..., 1} of the best precision at recall
// >= r. Outcomes are ranked by descending score, then frame_rank, then
// pred_rank.
double ap40_from_outcomes(std::vector<ScoredOutcome> outcomes, int num_gt);

enum class MatchStatus { kTruePositive, kFalsePositive, kIgnored };
enum class GtRole { kEligible, kIgnored, kAbsent };

struct FrameMatch {
  // Both indexed like the prediction input.
  std::vector<MatchStatus> status;
  std::vector<int> matched_gt;
};

// Greedy matching in descending score order (ties: lower input index).
// Each eligible GT is claimed once by the unmatched eligible GT with highest
// IoU >= threshold; a prediction that only reaches an ignored GT is ignored.
// `iou(p, g)` receives prediction and GT indices.
template <typename IouFn>
FrameMatch greedy_match(std::span<const double> scores,
                        std::span<const GtRole> roles, double threshold,
                        IouFn&& iou);

// Throws MissingAnnotationError for BEV/3D evaluation of frames without 3D
// ground truth, or predictions lacking scores or 3D boxes.
ApResult ap40(std::span<const EvalFrame> frames, const std::string& cls,
              DifficultyBand band, EvalMode mode, const EvalConfig& config);

struct KittiRow {
  std::string cls;
  EvalMode mode = EvalMode::k2D;
  std::array<ApResult, 3> bands;  // Indexed by DifficultyBand.
};

struct KittiReport {
  std::vector<KittiRow> rows;
};

KittiReport kitti_eval(std::span<const EvalFrame> frames,
                       const std::vector<std::string>& classes,
                       const EvalConfig& config,
                       std::span<const EvalMode> modes = kAllModes);

struct Similarities {
  double bevcd = 0.0;
  double yawsim = 0.0;
  double prsim = 0.0;
  double sizesim = 0.0;
};

struct CityscapesConfig {
  double iou_threshold = 0.5;
  // Center distance at which BEVCD reaches 0, meters.
  double bevcd_max_distance = 10.0;
};

// Per-pair similarities in [0, 1]. Predictions have zero pitch and roll.
// Throws DomainError on non-positive dimensions.
Similarities pairwise_similarities(const Box3D& pred, const Box3D& gt,
                                   double gt_pitch, double gt_roll,
                                   double bevcd_max_distance = 10.0);

// ap * (bevcd + yawsim + prsim + sizesim) / 4, all percentages. Throws
// DomainError for inputs outside [0, 100].
double ds_score(double ap, double bevcd, double yawsim, double prsim,
                double sizesim);

// Rounds a percentage to two decimals for tables.
double round2(double value);

struct CityscapesRow {
  std::string cls;
  double ap = 0.0;
  double bevcd = 0.0;
  double yawsim = 0.0;
  double prsim = 0.0;
  double sizesim = 0.0;
  double ds = 0.0;
  int num_gt = 0;
  int tp = 0;
  bool no_ground_truth = false;
  // Set when there is no true positive; the similarity means are then 0.
  bool no_true_positives = false;
};

struct CityscapesReport {
  std::vector<CityscapesRow> rows;
};

CityscapesRow cityscapes_eval(std::span<const EvalFrame> frames,
                              const std::string& cls,
                              const CityscapesConfig& config = {});

// ------------------------------------------------------------------------
// Implementation details.

template <typename IouFn>
FrameMatch greedy_match(std::span<const double> scores,
                        std::span<const GtRole> roles, double threshold,
                        IouFn&& iou) {
  const int num_pred = static_cast<int>(scores.size());
  const int num_gt = static_cast<int>(roles.size());
  std::vector<int> order(num_pred);
  for (int i = 0; i < num_pred; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return scores[a] > scores[b]; });
  FrameMatch out{std::vector<MatchStatus>(num_pred, MatchStatus::kFalsePositive),
                 std::vector<int>(num_pred, -1)};
  std::vector<char> claimed(num_gt, 0);
  for (int p : order) {
    int best = -1;
    double best_iou = threshold;
    bool hits_ignored = false;
    for (int g = 0; g < num_gt; ++g) {
      if (roles[g] == GtRole::kAbsent) continue;
      const double overlap = iou(p, g);
      if (overlap < threshold) continue;
      if (roles[g] == GtRole::kIgnored) {
        hits_ignored = true;
      } else if (!claimed[g] && (best < 0 || overlap > best_iou)) {
        best = g;
        best_iou = overlap;
      }
    }
    if (best >= 0) {
      claimed[best] = 1;
      out.status[p] = MatchStatus::kTruePositive;
      out.matched_gt[p] = best;
    } else if (hits_ignored) {
      out.status[p] = MatchStatus::kIgnored;
    }
  }
  return out;
}

}  // namespace mono3d

#endif  // MONO3D_METRICS_H_
