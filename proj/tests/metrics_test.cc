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
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "mono3d/errors.h"
#include "mono3d/report.h"
#include "mono3d/rng.h"

namespace mono3d {
namespace {

ObjectAnnotation Object(const std::string& type, Box2D box,
                        std::optional<double> score = std::nullopt) {
  ObjectAnnotation a;
  a.type = type;
  a.box2d = box;
  a.score = score;
  a.box3d = Box3D{{box.left / 100.0, 1.0, 20.0 + box.top / 10.0},
                  {1.6, 1.5, 4.0},
                  0.3};
  return a;
}

Box2D Shifted(Box2D b, double dx) {
  return {b.left + dx, b.top, b.right + dx, b.bottom};
}

// Independent AP40 oracle: enumerate score thresholds, build the PR curve,
// and take the best precision at each of the 40 recall levels.
double OracleAp40(const std::vector<EvalFrame>& frames, double threshold) {
  struct Hit {
    double score;
    bool tp;
  };
  std::vector<Hit> hits;
  int num_gt = 0;
  for (const EvalFrame& f : frames) {
    num_gt += static_cast<int>(f.gts.size());
    std::vector<int> idx(f.preds.size());
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
      return *f.preds[a].score > *f.preds[b].score;
    });
    std::vector<bool> used(f.gts.size(), false);
    for (int p : idx) {
      int best = -1;
      double best_iou = -1.0;
      for (size_t g = 0; g < f.gts.size(); ++g) {
        if (used[g]) continue;
        const double v = iou_2d(f.preds[p].box2d, f.gts[g].box2d);
        if (v >= threshold && v > best_iou) {
          best = static_cast<int>(g);
          best_iou = v;
        }
      }
      if (best >= 0) used[best] = true;
      hits.push_back({*f.preds[p].score, best >= 0});
    }
  }
  if (num_gt == 0) return 0.0;
  std::vector<double> recall, precision;
  for (const Hit& t : hits) {
    int tp = 0, n = 0;
    for (const Hit& h : hits) {
      if (h.score >= t.score) {
        ++n;
        tp += h.tp;
      }
    }
    recall.push_back(static_cast<double>(tp) / num_gt);
    precision.push_back(static_cast<double>(tp) / n);
  }
  double total = 0.0;
  for (int i = 1; i <= 40; ++i) {
    double best = 0.0;
    for (size_t k = 0; k < recall.size(); ++k) {
      if (recall[k] >= i / 40.0) best = std::max(best, precision[k]);
    }
    total += best;
  }
  return total / 40.0 * 100.0;
}

Box2D RandomBox(Rng& rng) {
  const double l = rng.uniform(0.0, 150.0);
  const double t = rng.uniform(0.0, 60.0);
  return {l, t, l + rng.uniform(40.0, 80.0), t + rng.uniform(45.0, 90.0)};
}

std::vector<EvalFrame> RandomInstance(Rng& rng) {
  std::vector<EvalFrame> frames(rng.uniform_int(1, 3));
  const int total_gt = rng.uniform_int(1, 10);
  const int total_pred = rng.uniform_int(0, 15);
  for (size_t i = 0; i < frames.size(); ++i) {
    frames[i].frame_id = std::to_string(i);
  }
  for (int i = 0; i < total_gt; ++i) {
    auto& f = frames[rng.uniform_int(0, static_cast<int>(frames.size()) - 1)];
    f.gts.push_back(Object("Pedestrian", RandomBox(rng)));
  }
  for (int i = 0; i < total_pred; ++i) {
    auto& f = frames[rng.uniform_int(0, static_cast<int>(frames.size()) - 1)];
    Box2D b = RandomBox(rng);
    if (!f.gts.empty() && rng.bernoulli(0.7)) {
      const Box2D g =
          f.gts[rng.uniform_int(0, static_cast<int>(f.gts.size()) - 1)].box2d;
      b = Shifted(g, rng.uniform(-25.0, 25.0));
    }
    f.preds.push_back(Object("Pedestrian", b, rng.uniform()));
  }
  return frames;
}

TEST(Ap40, HandCaseTpFpTp) {
  EvalFrame f;
  f.frame_id = "0";
  const Box2D a{0, 0, 50, 60}, b{100, 0, 150, 60};
  f.gts = {Object("Car", a), Object("Car", b)};
  f.preds = {Object("Car", a, 0.9), Object("Car", {300, 0, 350, 60}, 0.8),
             Object("Car", b, 0.7)};
  const ApResult r = ap40(std::span(&f, 1), "Car", DifficultyBand::kEasy,
                          EvalMode::k2D, EvalConfig{});
  EXPECT_EQ(r.num_gt, 2);
  EXPECT_EQ(r.tp, 2);
  EXPECT_EQ(r.fp, 1);
  EXPECT_EQ(round2(r.ap), 83.33);
  EXPECT_NEAR(r.ap, 20 * 1.0 / 40 * 100 + 20 * (2.0 / 3) / 40 * 100, 1e-12);
}

TEST(Ap40, PerfectAndEmptyPredictions) {
  EvalFrame f;
  f.frame_id = "a";
  f.gts = {Object("Car", {0, 0, 50, 60}), Object("Car", {100, 0, 150, 60})};
  for (const auto& g : f.gts) f.preds.push_back(Object("Car", g.box2d, 0.5));
  for (EvalMode mode : kAllModes) {
    EXPECT_DOUBLE_EQ(ap40(std::span(&f, 1), "Car", DifficultyBand::kModerate,
                          mode, EvalConfig{})
                         .ap,
                     100.0);
  }
  f.preds.clear();
  EXPECT_EQ(ap40(std::span(&f, 1), "Car", DifficultyBand::kModerate,
                 EvalMode::k2D, EvalConfig{})
                .ap,
            0.0);
}

TEST(Ap40, NoGroundTruthIsFlagged) {
  EvalFrame f;
  f.frame_id = "a";
  f.preds = {Object("Car", {0, 0, 50, 60}, 0.5)};
  const ApResult r = ap40(std::span(&f, 1), "Car", DifficultyBand::kEasy,
                          EvalMode::k2D, EvalConfig{});
  EXPECT_TRUE(r.no_ground_truth);
  EXPECT_EQ(r.ap, 0.0);
}

TEST(Ap40, MatchesPrEnumerationOracle) {
  Rng rng(20260101);
  EvalConfig config;
  for (int trial = 0; trial < 500; ++trial) {
    const std::vector<EvalFrame> frames = RandomInstance(rng);
    const double got = ap40(frames, "Pedestrian", DifficultyBand::kEasy,
                            EvalMode::k2D, config)
                           .ap;
    ASSERT_NEAR(got, OracleAp40(frames, 0.5), 1e-12) << "trial " << trial;
  }
}

TEST(Ap40, InvariantToFrameAndPredictionOrder) {
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<EvalFrame> frames = RandomInstance(rng);
    const double before = ap40(frames, "Pedestrian", DifficultyBand::kEasy,
                               EvalMode::k2D, EvalConfig{})
                              .ap;
    std::reverse(frames.begin(), frames.end());
    for (auto& f : frames) std::reverse(f.preds.begin(), f.preds.end());
    EXPECT_EQ(ap40(frames, "Pedestrian", DifficultyBand::kEasy, EvalMode::k2D,
                   EvalConfig{})
                  .ap,
              before);
  }
}

TEST(Difficulty, Examples) {
  ObjectAnnotation a;
  a.box2d = {0, 0, 10, 50};
  BandSet all = kitti_difficulty(a);
  for (DifficultyBand b : kAllBands) EXPECT_TRUE(all.contains(b));

  a.box2d = {0, 0, 10, 30};
  a.occlusion = 1;
  a.truncation = 0.2;
  BandSet mh = kitti_difficulty(a);
  EXPECT_FALSE(mh.contains(DifficultyBand::kEasy));
  EXPECT_TRUE(mh.contains(DifficultyBand::kModerate));
  EXPECT_TRUE(mh.contains(DifficultyBand::kHard));

  a.box2d = {0, 0, 10, 20};
  a.occlusion = 3;
  a.truncation = 0.9;
  EXPECT_TRUE(kitti_difficulty(a).empty());
}

TEST(Ap40, DontCareIgnoredIn2D) {
  EvalFrame f;
  f.frame_id = "0";
  const Box2D car{0, 0, 50, 60}, dc{200, 0, 260, 60};
  f.gts = {Object("Car", car), Object("DontCare", dc)};
  f.gts[1].box3d.reset();
  f.preds = {Object("Car", car, 0.5), Object("Car", dc, 0.9)};
  const ApResult r = ap40(std::span(&f, 1), "Car", DifficultyBand::kEasy,
                          EvalMode::k2D, EvalConfig{});
  EXPECT_EQ(r.ap, 100.0);
  EXPECT_EQ(r.fp, 0);
}

TEST(Ap40, NeighborClassIgnored) {
  EvalFrame f;
  f.frame_id = "0";
  const Box2D car{0, 0, 50, 60}, other{200, 0, 260, 60};
  f.gts = {Object("Car", car), Object("Van", other)};
  f.preds = {Object("Car", car, 0.5), Object("Car", other, 0.9)};
  EXPECT_EQ(ap40(std::span(&f, 1), "Car", DifficultyBand::kEasy, EvalMode::k2D,
                 EvalConfig{})
                .ap,
            100.0);
  f.gts[1].type = "Truck";
  const ApResult r = ap40(std::span(&f, 1), "Car", DifficultyBand::kEasy,
                          EvalMode::k2D, EvalConfig{});
  EXPECT_EQ(r.fp, 1);
  EXPECT_LT(r.ap, 100.0);
}

TEST(Ap40, OutOfBandGroundTruthIsIgnored) {
  EvalFrame f;
  f.frame_id = "0";
  const Box2D big{0, 0, 50, 60}, small{200, 0, 230, 30};
  f.gts = {Object("Car", big), Object("Car", small)};
  f.preds = {Object("Car", big, 0.5), Object("Car", small, 0.9)};
  const ApResult easy = ap40(std::span(&f, 1), "Car", DifficultyBand::kEasy,
                             EvalMode::k2D, EvalConfig{});
  EXPECT_EQ(easy.num_gt, 1);
  EXPECT_EQ(easy.ap, 100.0);
  const ApResult mod = ap40(std::span(&f, 1), "Car", DifficultyBand::kModerate,
                            EvalMode::k2D, EvalConfig{});
  EXPECT_EQ(mod.num_gt, 2);
  EXPECT_EQ(mod.ap, 100.0);
}

TEST(Ap40, MissingAnnotations) {
  EvalFrame f;
  f.frame_id = "0";
  f.gts = {Object("Car", {0, 0, 50, 60})};
  f.preds = {Object("Car", {0, 0, 50, 60}, 0.5)};
  f.gt_level = AnnotationLevel::k2DOnly;
  EXPECT_NO_THROW(ap40(std::span(&f, 1), "Car", DifficultyBand::kEasy,
                       EvalMode::k2D, EvalConfig{}));
  EXPECT_THROW(ap40(std::span(&f, 1), "Car", DifficultyBand::kEasy,
                    EvalMode::kBEV, EvalConfig{}),
               MissingAnnotationError);
  f.gt_level = AnnotationLevel::k3D;
  f.gts[0].box3d.reset();
  EXPECT_THROW(ap40(std::span(&f, 1), "Car", DifficultyBand::kEasy,
                    EvalMode::k3D, EvalConfig{}),
               MissingAnnotationError);
  f.gts = {Object("Car", {0, 0, 50, 60})};
  f.preds[0].box3d.reset();
  EXPECT_THROW(ap40(std::span(&f, 1), "Car", DifficultyBand::kEasy,
                    EvalMode::k3D, EvalConfig{}),
               MissingAnnotationError);
  f.preds[0].score.reset();
  EXPECT_THROW(ap40(std::span(&f, 1), "Car", DifficultyBand::kEasy,
                    EvalMode::k2D, EvalConfig{}),
               MissingAnnotationError);
}

TEST(KittiEval, ReportShapeAndRendering) {
  EvalFrame f;
  f.frame_id = "0";
  f.gts = {Object("Car", {0, 0, 50, 60}), Object("Pedestrian", {100, 0, 130, 80})};
  for (const auto& g : f.gts) f.preds.push_back(Object(g.type, g.box2d, 0.8));
  const KittiReport report =
      kitti_eval(std::span(&f, 1), {"Car", "Pedestrian"}, EvalConfig{});
  ASSERT_EQ(report.rows.size(), 6u);
  for (const auto& row : report.rows) {
    for (const ApResult& r : row.bands) EXPECT_DOUBLE_EQ(r.ap, 100.0);
  }
  const auto json = nlohmann::json::parse(render(report, ReportFormat::kJson));
  EXPECT_FALSE(json.empty());
  EXPECT_NE(render(report, ReportFormat::kText).find("Pedestrian"),
            std::string::npos);
  EXPECT_NE(render(report, ReportFormat::kCsv).find("Car"), std::string::npos);
  EXPECT_THROW(parse_report_format("xml"), ConfigError);
}

TEST(EvalConfig, RejectsBadThresholds) {
  EvalConfig c;
  c.iou_thresholds["Car"] = {0.7, 1.5, 0.7};
  EXPECT_THROW(c.validate(), ConfigError);
  EvalConfig d;
  EXPECT_DOUBLE_EQ(d.iou_threshold("Car", EvalMode::k3D), 0.7);
  EXPECT_DOUBLE_EQ(d.iou_threshold("Tram", EvalMode::k2D), 0.5);
}

struct DsRow {
  double ap, bevcd, yawsim, prsim, sizesim, ds;
};

TEST(DsScore, ReferenceRows) {
  const DsRow rows[] = {
      {36.44, 95.73, 90.12, 99.98, 75.52, 32.92},
      {61.49, 96.42, 92.27, 99.98, 81.70, 56.94},
      {11.47, 93.64, 99.87, 99.98, 64.55, 10.26},
      {25.18, 94.49, 99.93, 99.98, 77.05, 23.38},
      {0.03, 93.14, 72.42, 99.98, 52.91, 0.02},
      {2.80, 96.64, 77.63, 99.98, 64.65, 2.37},
  };
  for (const DsRow& r : rows) {
    EXPECT_NEAR(ds_score(r.ap, r.bevcd, r.yawsim, r.prsim, r.sizesim), r.ds,
                0.01);
  }
  EXPECT_EQ(round2(ds_score(36.44, 95.73, 90.12, 99.98, 75.52)), 32.92);
}

TEST(DsScore, Boundaries) {
  EXPECT_EQ(ds_score(100, 100, 100, 100, 100), 100.0);
  EXPECT_EQ(ds_score(0, 100, 100, 100, 100), 0.0);
  EXPECT_THROW(ds_score(101, 0, 0, 0, 0), DomainError);
  EXPECT_THROW(ds_score(50, -1, 0, 0, 0), DomainError);
  EXPECT_THROW(ds_score(50, 0, 0, 0, std::nan("")), DomainError);
}

TEST(Similarities, Examples) {
  const Box3D gt{{1, 1, 20}, {1.6, 1.5, 4.0}, 0.4};
  Similarities s = pairwise_similarities(gt, gt, 0.0, 0.0);
  EXPECT_EQ(s.bevcd, 1.0);
  EXPECT_EQ(s.yawsim, 1.0);
  EXPECT_EQ(s.prsim, 1.0);
  EXPECT_EQ(s.sizesim, 1.0);

  Box3D flipped = gt;
  flipped.yaw += kPi;
  EXPECT_NEAR(pairwise_similarities(flipped, gt, 0, 0).yawsim, 0.0, 1e-15);

  Box3D doubled = gt;
  doubled.dims = {3.2, 3.0, 8.0};
  EXPECT_DOUBLE_EQ(pairwise_similarities(doubled, gt, 0, 0).sizesim, 0.125);

  Box3D moved = gt;
  moved.center.x += 3.0;
  moved.center.z += 4.0;
  moved.center.y += 100.0;
  EXPECT_DOUBLE_EQ(pairwise_similarities(moved, gt, 0, 0).bevcd, 0.5);
  moved.center.z += 20.0;
  EXPECT_EQ(pairwise_similarities(moved, gt, 0, 0).bevcd, 0.0);

  EXPECT_DOUBLE_EQ(pairwise_similarities(gt, gt, kPi / 2, 0).prsim, 0.5);

  Box3D bad = gt;
  bad.dims.w = 0.0;
  EXPECT_THROW(pairwise_similarities(bad, gt, 0, 0), DomainError);
}

TEST(CityscapesEval, PerfectPredictions) {
  std::vector<EvalFrame> frames(2);
  for (int i = 0; i < 2; ++i) {
    frames[i].frame_id = std::to_string(i);
    frames[i].gts = {Object("car", {10.0 * i, 0, 60, 60}),
                     Object("truck", {200, 0, 300, 90})};
    for (const auto& g : frames[i].gts) {
      frames[i].preds.push_back(Object(g.type, g.box2d, 0.7));
    }
  }
  const CityscapesRow row = cityscapes_eval(frames, "car");
  EXPECT_EQ(row.num_gt, 2);
  EXPECT_EQ(row.tp, 2);
  for (double v : {row.ap, row.bevcd, row.yawsim, row.prsim, row.sizesim,
                   row.ds}) {
    EXPECT_DOUBLE_EQ(v, 100.0);
  }
  CityscapesReport report{{row}};
  EXPECT_NE(render(report, ReportFormat::kText).find("car"), std::string::npos);
  EXPECT_NO_THROW(nlohmann::json::parse(render(report, ReportFormat::kJson)));
}

TEST(CityscapesEval, DsFollowsComposition) {
  Rng rng(99);
  std::vector<EvalFrame> frames(3);
  for (int i = 0; i < 3; ++i) {
    frames[i].frame_id = std::to_string(i);
    for (int k = 0; k < 4; ++k) {
      ObjectAnnotation g = Object("car", RandomBox(rng));
      g.pitch = rng.uniform(-0.2, 0.2);
      frames[i].gts.push_back(g);
      ObjectAnnotation p = Object("car", Shifted(g.box2d, rng.uniform(-10, 10)),
                                  rng.uniform());
      p.box3d->yaw += rng.uniform(-1, 1);
      p.box3d->dims.l *= rng.uniform(0.8, 1.2);
      frames[i].preds.push_back(p);
    }
  }
  const CityscapesRow row = cityscapes_eval(frames, "car");
  EXPECT_GT(row.tp, 0);
  EXPECT_NEAR(row.ds,
              row.ap * (row.bevcd + row.yawsim + row.prsim + row.sizesim) / 400,
              1e-9);
  EXPECT_LT(row.prsim, 100.0);

  std::vector<EvalFrame> shuffled = frames;
  std::reverse(shuffled.begin(), shuffled.end());
  for (auto& f : shuffled) std::reverse(f.preds.begin(), f.preds.end());
  const CityscapesRow again = cityscapes_eval(shuffled, "car");
  EXPECT_EQ(again.ds, row.ds);
  EXPECT_EQ(again.sizesim, row.sizesim);
}

TEST(CityscapesEval, NoTruePositives) {
  EvalFrame f;
  f.frame_id = "0";
  f.gts = {Object("car", {0, 0, 50, 60})};
  f.preds = {Object("car", {300, 0, 350, 60}, 0.5)};
  const CityscapesRow row = cityscapes_eval(std::span(&f, 1), "car");
  EXPECT_TRUE(row.no_true_positives);
  EXPECT_EQ(row.ds, 0.0);
}

}  // namespace
}  // namespace mono3d
