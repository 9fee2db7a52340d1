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

#include "mono3d/metrics.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

#include "mono3d/errors.h"

namespace mono3d {
namespace {

// Classes whose boxes neither count for nor against the evaluated class.
bool is_neighbor_class(const std::string& cls, const std::string& other) {
  return (cls == "Car" && other == "Van") ||
         (cls == "Pedestrian" && other == "Person_sitting");
}

double mode_iou(EvalMode mode, const ObjectAnnotation& pred,
                const ObjectAnnotation& gt) {
  switch (mode) {
    case EvalMode::k2D:
      return iou_2d(pred.box2d, gt.box2d);
    case EvalMode::kBEV:
      return bev_iou(*pred.box3d, *gt.box3d);
    case EvalMode::k3D:
      return iou_3d(*pred.box3d, *gt.box3d);
  }
  return 0.0;
}

auto canonical_key(const ObjectAnnotation& a) {
  const Box3D b = a.box3d.value_or(Box3D{});
  return std::tuple(-a.score.value_or(0.0), a.box2d.left, a.box2d.top,
                    a.box2d.right, a.box2d.bottom, b.center.x, b.center.y,
                    b.center.z, b.yaw);
}

// Indices of `frames` sorted by frame id.
std::vector<int> frame_order(std::span<const EvalFrame> frames) {
  std::vector<int> order(frames.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return frames[a].frame_id < frames[b].frame_id;
  });
  return order;
}

// Predictions of class `cls`, in a permutation-independent order.
std::vector<const ObjectAnnotation*> class_predictions(const EvalFrame& frame,
                                                       const std::string& cls,
                                                       bool need_3d) {
  std::vector<const ObjectAnnotation*> preds;
  for (const auto& p : frame.preds) {
    if (p.type != cls) continue;
    if (!p.score) {
      throw MissingAnnotationError("frame " + frame.frame_id +
                                   ": prediction without a score");
    }
    if (need_3d && !p.box3d) {
      throw MissingAnnotationError("frame " + frame.frame_id +
                                   ": prediction without a 3D box");
    }
    preds.push_back(&p);
  }
  std::stable_sort(preds.begin(), preds.end(),
                   [](const ObjectAnnotation* a, const ObjectAnnotation* b) {
                     return canonical_key(*a) < canonical_key(*b);
                   });
  return preds;
}

void require_range(double v, const char* name) {
  if (!(v >= 0.0 && v <= 100.0)) {
    throw DomainError(std::string("ds_score: ") + name +
                      " must lie in [0, 100]");
  }
}

}  // namespace

const char* band_name(DifficultyBand band) {
  switch (band) {
    case DifficultyBand::kEasy:
      return "Easy";
    case DifficultyBand::kModerate:
      return "Moderate";
    case DifficultyBand::kHard:
      return "Hard";
  }
  return "?";
}

DifficultyThresholds difficulty_thresholds(DifficultyBand band) {
  switch (band) {
    case DifficultyBand::kEasy:
      return {40.0, 0, 0.15};
    case DifficultyBand::kModerate:
      return {25.0, 1, 0.30};
    case DifficultyBand::kHard:
      return {25.0, 2, 0.50};
  }
  return {0.0, 0, 0.0};
}

BandSet kitti_difficulty(const ObjectAnnotation& ann) {
  BandSet out;
  const double height = ann.box2d.height();
  for (DifficultyBand band : kAllBands) {
    const DifficultyThresholds t = difficulty_thresholds(band);
    if (height >= t.min_height && ann.occlusion <= t.max_occlusion &&
        ann.truncation <= t.max_truncation) {
      out.insert(band);
    }
  }
  return out;
}

const char* mode_name(EvalMode mode) {
  switch (mode) {
    case EvalMode::k2D:
      return "2D";
    case EvalMode::kBEV:
      return "BEV";
    case EvalMode::k3D:
      return "3D";
  }
  return "?";
}

double EvalConfig::iou_threshold(const std::string& cls, EvalMode mode) const {
  const auto it = iou_thresholds.find(cls);
  if (it == iou_thresholds.end()) return default_iou_threshold;
  return it->second[static_cast<int>(mode)];
}

void EvalConfig::validate() const {
  auto ok = [](double t) { return t > 0.0 && t <= 1.0; };
  if (!ok(default_iou_threshold)) {
    throw ConfigError("IoU thresholds must lie in (0, 1]");
  }
  for (const auto& [cls, t] : iou_thresholds) {
    for (double v : t) {
      if (!ok(v)) throw ConfigError("IoU threshold for " + cls + " out of range");
    }
  }
}

double ap40_from_outcomes(std::vector<ScoredOutcome> outcomes, int num_gt) {
  if (num_gt <= 0) return 0.0;
  std::sort(outcomes.begin(), outcomes.end(),
            [](const ScoredOutcome& a, const ScoredOutcome& b) {
              return std::tuple(-a.score, a.frame_rank, a.pred_rank) <
                     std::tuple(-b.score, b.frame_rank, b.pred_rank);
            });
  const size_t n = outcomes.size();
  std::vector<long> tp(n);
  std::vector<double> precision(n);
  long hits = 0;
  for (size_t k = 0; k < n; ++k) {
    if (outcomes[k].true_positive) ++hits;
    tp[k] = hits;
    precision[k] = static_cast<double>(hits) / static_cast<double>(k + 1);
  }
  // Best precision over every prefix at or after k.
  std::vector<double> suffix_max(n + 1, 0.0);
  for (size_t k = n; k-- > 0;) {
    suffix_max[k] = std::max(suffix_max[k + 1], precision[k]);
  }
  double sum = 0.0;
  size_t k = 0;
  for (int i = 1; i <= kRecallPositions; ++i) {
    // recall(k) >= i / 40, in integers.
    while (k < n && tp[k] * kRecallPositions < static_cast<long>(i) * num_gt) {
      ++k;
    }
    if (k == n) break;
    sum += suffix_max[k];
  }
  return 100.0 * sum / kRecallPositions;
}

ApResult ap40(std::span<const EvalFrame> frames, const std::string& cls,
              DifficultyBand band, EvalMode mode, const EvalConfig& config) {
  const bool need_3d = mode != EvalMode::k2D;
  const double threshold = config.iou_threshold(cls, mode);
  ApResult result;
  std::vector<ScoredOutcome> outcomes;
  const std::vector<int> order = frame_order(frames);
  for (size_t rank = 0; rank < order.size(); ++rank) {
    const EvalFrame& frame = frames[order[rank]];
    if (need_3d && frame.gt_level == AnnotationLevel::k2DOnly) {
      throw MissingAnnotationError("frame " + frame.frame_id +
                                   " carries 2D labels only; " +
                                   mode_name(mode) + " evaluation needs 3D");
    }
    std::vector<GtRole> roles;
    roles.reserve(frame.gts.size());
    for (const auto& gt : frame.gts) {
      GtRole role = GtRole::kAbsent;
      if (gt.type == cls) {
        role = kitti_difficulty(gt).contains(band) ? GtRole::kEligible
                                                   : GtRole::kIgnored;
      } else if (is_neighbor_class(cls, gt.type)) {
        role = GtRole::kIgnored;
      } else if (gt.is_dont_care() && !need_3d) {
        role = GtRole::kIgnored;
      }
      if (role != GtRole::kAbsent && need_3d && !gt.box3d) {
        throw MissingAnnotationError("frame " + frame.frame_id +
                                     ": ground truth without a 3D box");
      }
      if (role == GtRole::kEligible) ++result.num_gt;
      roles.push_back(role);
    }
    const auto preds = class_predictions(frame, cls, need_3d);
    std::vector<double> scores;
    scores.reserve(preds.size());
    for (const auto* p : preds) scores.push_back(*p->score);
    const FrameMatch match =
        greedy_match(scores, roles, threshold, [&](int p, int g) {
          return mode_iou(mode, *preds[p], frame.gts[g]);
        });
    for (size_t p = 0; p < preds.size(); ++p) {
      if (match.status[p] == MatchStatus::kIgnored) continue;
      const bool hit = match.status[p] == MatchStatus::kTruePositive;
      hit ? ++result.tp : ++result.fp;
      outcomes.push_back({scores[p], hit, static_cast<int>(rank),
                          static_cast<int>(p)});
    }
  }
  if (result.num_gt == 0) {
    result.no_ground_truth = true;
    return result;
  }
  result.ap = ap40_from_outcomes(std::move(outcomes), result.num_gt);
  return result;
}

KittiReport kitti_eval(std::span<const EvalFrame> frames,
                       const std::vector<std::string>& classes,
                       const EvalConfig& config,
                       std::span<const EvalMode> modes) {
  config.validate();
  KittiReport report;
  for (const auto& cls : classes) {
    for (EvalMode mode : modes) {
      KittiRow row{cls, mode, {}};
      for (DifficultyBand band : kAllBands) {
        row.bands[static_cast<int>(band)] = ap40(frames, cls, band, mode, config);
      }
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

Similarities pairwise_similarities(const Box3D& pred, const Box3D& gt,
                                   double gt_pitch, double gt_roll,
                                   double bevcd_max_distance) {
  const auto positive = [](const Dims3& d) {
    return d.w > 0.0 && d.h > 0.0 && d.l > 0.0;
  };
  if (!positive(pred.dims) || !positive(gt.dims)) {
    throw DomainError("pairwise_similarities: dimensions must be positive");
  }
  const auto cos_sim = [](double delta) { return (1.0 + std::cos(delta)) / 2.0; };
  const auto ratio = [](double a, double b) { return std::min(a / b, b / a); };
  Similarities s;
  const double d = std::hypot(pred.center.x - gt.center.x,
                              pred.center.z - gt.center.z);
  s.bevcd = std::max(0.0, 1.0 - d / bevcd_max_distance);
  s.yawsim = cos_sim(wrap_angle(pred.yaw - gt.yaw));
  s.prsim = cos_sim(gt_pitch) * cos_sim(gt_roll);
  s.sizesim = ratio(pred.dims.w, gt.dims.w) * ratio(pred.dims.h, gt.dims.h) *
              ratio(pred.dims.l, gt.dims.l);
  return s;
}

double ds_score(double ap, double bevcd, double yawsim, double prsim,
                double sizesim) {
  require_range(ap, "AP");
  require_range(bevcd, "BEVCD");
  require_range(yawsim, "YawSim");
  require_range(prsim, "PRSim");
  require_range(sizesim, "SizeSim");
  return ap * (bevcd + yawsim + prsim + sizesim) / 400.0;
}

double round2(double value) { return std::round(value * 100.0) / 100.0; }

CityscapesRow cityscapes_eval(std::span<const EvalFrame> frames,
                              const std::string& cls,
                              const CityscapesConfig& config) {
  CityscapesRow row;
  row.cls = cls;
  std::vector<ScoredOutcome> outcomes;
  Similarities sum;
  const std::vector<int> order = frame_order(frames);
  for (size_t rank = 0; rank < order.size(); ++rank) {
    const EvalFrame& frame = frames[order[rank]];
    std::vector<GtRole> roles;
    for (const auto& gt : frame.gts) {
      GtRole role = GtRole::kAbsent;
      if (gt.type == cls) {
        if (!gt.box3d) {
          throw MissingAnnotationError("frame " + frame.frame_id +
                                       ": ground truth without a 3D box");
        }
        role = GtRole::kEligible;
        ++row.num_gt;
      } else if (gt.is_dont_care()) {
        role = GtRole::kIgnored;
      }
      roles.push_back(role);
    }
    const auto preds = class_predictions(frame, cls, /*need_3d=*/true);
    std::vector<double> scores;
    for (const auto* p : preds) scores.push_back(*p->score);
    const FrameMatch match =
        greedy_match(scores, roles, config.iou_threshold, [&](int p, int g) {
          return iou_2d(preds[p]->box2d, frame.gts[g].box2d);
        });
    for (size_t p = 0; p < preds.size(); ++p) {
      if (match.status[p] == MatchStatus::kIgnored) continue;
      const bool hit = match.status[p] == MatchStatus::kTruePositive;
      outcomes.push_back({scores[p], hit, static_cast<int>(rank),
                          static_cast<int>(p)});
      if (!hit) continue;
      ++row.tp;
      const ObjectAnnotation& gt = frame.gts[match.matched_gt[p]];
      const Similarities s =
          pairwise_similarities(*preds[p]->box3d, *gt.box3d, gt.pitch, gt.roll,
                                config.bevcd_max_distance);
      sum.bevcd += s.bevcd;
      sum.yawsim += s.yawsim;
      sum.prsim += s.prsim;
      sum.sizesim += s.sizesim;
    }
  }
  row.no_ground_truth = row.num_gt == 0;
  row.ap = ap40_from_outcomes(std::move(outcomes), row.num_gt);
  if (row.tp == 0) {
    row.no_true_positives = true;
  } else {
    row.bevcd = 100.0 * sum.bevcd / row.tp;
    row.yawsim = 100.0 * sum.yawsim / row.tp;
    row.prsim = 100.0 * sum.prsim / row.tp;
    row.sizesim = 100.0 * sum.sizesim / row.tp;
  }
  row.ds = ds_score(row.ap, std::clamp(row.bevcd, 0.0, 100.0),
                    std::clamp(row.yawsim, 0.0, 100.0),
                    std::clamp(row.prsim, 0.0, 100.0),
                    std::clamp(row.sizesim, 0.0, 100.0));
  return row;
}

}  // namespace mono3d
