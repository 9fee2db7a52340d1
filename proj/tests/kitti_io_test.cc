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

#include "mono3d/kitti_io.h"

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "mono3d/errors.h"
#include "mono3d/metrics.h"
#include "mono3d/rng.h"

namespace mono3d {
namespace {

namespace fs = std::filesystem;

constexpr char kCarLine[] =
    "Car 0.00 0 -1.58 587.01 173.33 614.12 200.12 1.65 1.67 3.64 -0.65 1.71 "
    "46.70 -1.59";

constexpr char kCalib[] =
    "P0: 7.215377e+02 0.000000e+00 6.095593e+02 0.000000e+00 0.000000e+00 "
    "7.215377e+02 1.728540e+02 0.000000e+00 0.000000e+00 0.000000e+00 "
    "1.000000e+00 0.000000e+00\n"
    "P2: 7.215377e+02 0.000000e+00 6.095593e+02 4.485728e+01 0.000000e+00 "
    "7.215377e+02 1.728540e+02 2.163791e-01 0.000000e+00 0.000000e+00 "
    "1.000000e+00 2.745884e-03\n"
    "R0_rect: 1 0 0 0 1 0 0 0 1\n";

TEST(KittiLabel, CarExample) {
  const ObjectAnnotation a = parse_kitti_label_line(kCarLine);
  EXPECT_EQ(a.type, "Car");
  EXPECT_EQ(a.occlusion, 0);
  ASSERT_TRUE(a.alpha.has_value());
  EXPECT_DOUBLE_EQ(*a.alpha, -1.58);
  EXPECT_EQ(a.box2d, (Box2D{587.01, 173.33, 614.12, 200.12}));
  ASSERT_TRUE(a.box3d.has_value());
  EXPECT_DOUBLE_EQ(a.box3d->center.z, 46.70);
  EXPECT_DOUBLE_EQ(a.box3d->center.x, -0.65);
  EXPECT_DOUBLE_EQ(a.box3d->center.y, 1.71 - 1.65 / 2);
  EXPECT_DOUBLE_EQ(a.box3d->yaw, -1.59);
  EXPECT_DOUBLE_EQ(a.box3d->dims.h, 1.65);
  EXPECT_DOUBLE_EQ(a.box3d->dims.w, 1.67);
  EXPECT_DOUBLE_EQ(a.box3d->dims.l, 3.64);
  EXPECT_FALSE(a.score.has_value());
}

TEST(KittiLabel, ScoreField) {
  const ObjectAnnotation a =
      parse_kitti_label_line(std::string(kCarLine) + " 0.87");
  ASSERT_TRUE(a.score.has_value());
  EXPECT_DOUBLE_EQ(*a.score, 0.87);
}

TEST(KittiLabel, DontCareSentinel) {
  const ObjectAnnotation a = parse_kitti_label_line(
      "DontCare -1 -1 -10 100 100 200 200 -1 -1 -1 -1000 -1000 -1000 -10");
  EXPECT_TRUE(a.is_dont_care());
  EXPECT_EQ(a.box2d, (Box2D{100, 100, 200, 200}));
  EXPECT_FALSE(a.box3d.has_value());
  EXPECT_FALSE(a.alpha.has_value());
  const ObjectAnnotation again =
      parse_kitti_label_line(format_kitti_label_line(a));
  EXPECT_EQ(again, a);
}

TEST(KittiLabel, FieldCountErrorCarriesLine) {
  const std::string good = kCarLine;
  const std::string bad = good.substr(0, good.rfind(' '));
  try {
    parse_kitti_labels(good + "\n\n" + bad + "\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
  EXPECT_THROW(parse_kitti_label_line("Car 0 0 x 1 2 3 4 1 1 1 0 0 5 0"),
               ParseError);
}

TEST(KittiLabel, RoundTripGeneratedLines) {
  Rng rng(4242);
  const char* types[] = {"Car", "Pedestrian", "Cyclist", "Van"};
  auto two = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return std::string(buf);
  };
  for (int i = 0; i < 1000; ++i) {
    std::string line = types[rng.uniform_int(0, 3)];
    for (double v : {rng.uniform(0, 1)}) line += " " + two(v);
    line += " " + std::to_string(rng.uniform_int(0, 3));
    for (double v :
         {rng.uniform(-3.14, 3.14), rng.uniform(0, 600), rng.uniform(0, 180),
          rng.uniform(600, 1240), rng.uniform(190, 375), rng.uniform(0.5, 4),
          rng.uniform(0.4, 3), rng.uniform(0.5, 12), rng.uniform(-20, 20),
          rng.uniform(-1, 3), rng.uniform(2, 80), rng.uniform(-3.14, 3.14)}) {
      line += " " + two(v);
    }
    const ObjectAnnotation a = parse_kitti_label_line(line);
    const ObjectAnnotation b =
        parse_kitti_label_line(format_kitti_label_line(a));
    EXPECT_EQ(a.type, b.type);
    EXPECT_EQ(a.occlusion, b.occlusion);
    EXPECT_EQ(a.box2d, b.box2d);
    ASSERT_TRUE(b.box3d.has_value());
    EXPECT_NEAR(a.box3d->center.y, b.box3d->center.y, 1e-6);
    EXPECT_NEAR(a.box3d->center.z, b.box3d->center.z, 1e-6);
    EXPECT_NEAR(a.box3d->yaw, b.box3d->yaw, 1e-6);
  }
}

TEST(KittiLabel, FileRoundTrip) {
  std::vector<ObjectAnnotation> anns = parse_kitti_labels(
      std::string(kCarLine) + "\n" +
      "DontCare -1 -1 -10 100 100 200 200 -1 -1 -1 -1000 -1000 -1000 -10\n");
  ASSERT_EQ(anns.size(), 2u);
  const auto again = parse_kitti_labels(format_kitti_labels(anns));
  ASSERT_EQ(again.size(), 2u);
  EXPECT_EQ(again[1], anns[1]);
  EXPECT_EQ(again[0].box2d, anns[0].box2d);
}

TEST(KittiCalib, P2Example) {
  const CameraIntrinsics c = parse_kitti_calib(kCalib);
  EXPECT_DOUBLE_EQ(c.fx, 721.5377);
  EXPECT_DOUBLE_EQ(c.fy, 721.5377);
  EXPECT_DOUBLE_EQ(c.cx, 609.5593);
  EXPECT_DOUBLE_EQ(c.cy, 172.854);
  EXPECT_EQ(c.width, kKittiImageWidth);
  EXPECT_EQ(c.height, kKittiImageHeight);
}

TEST(KittiCalib, IdentityAndErrors) {
  const CameraIntrinsics c =
      parse_kitti_calib("P2: 1 0 0 0 0 1 0 0 0 0 1 0\n", 10, 10);
  EXPECT_EQ(c.fx, 1.0);
  EXPECT_EQ(c.fy, 1.0);
  EXPECT_EQ(c.cx, 0.0);
  EXPECT_EQ(c.cy, 0.0);
  EXPECT_THROW(parse_kitti_calib(""), ParseError);
  EXPECT_THROW(parse_kitti_calib("P2: 1 0 0\n"), ParseError);
}

TEST(KittiSplit, ParseSplit) {
  EXPECT_EQ(parse_split("000001\n  000002  \n\n000003\r\n"),
            (std::vector<std::string>{"000001", "000002", "000003"}));
}

class LoadSplitTest : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() /
            ("mono3d_kitti_" + std::to_string(::testing::UnitTest::GetInstance()
                                                  ->random_seed()) +
             "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(root_);
    fs::create_directories(root_ / "label_2");
    fs::create_directories(root_ / "calib");
    for (const char* id : {"000000", "000001", "000002"}) {
      write_text_file(root_ / "label_2" / (std::string(id) + ".txt"),
                      std::string(kCarLine) + "\n");
      write_text_file(root_ / "calib" / (std::string(id) + ".txt"), kCalib);
    }
    manifest_.name = "kitti";
    manifest_.annotated_classes = {"Car"};
    manifest_.camera = {721.5377, 721.5377, 609.5593, 172.854, 1242, 375};
  }
  void TearDown() override { fs::remove_all(root_); }

  fs::path root_;
  DatasetManifest manifest_;
};

TEST_F(LoadSplitTest, LoadsAllIds) {
  const std::vector<std::string> ids = {"000002", "000000", "000001"};
  const SplitLoadResult r = load_split(root_, ids, manifest_);
  ASSERT_EQ(r.frames.size(), 3u);
  EXPECT_TRUE(r.errors.empty());
  EXPECT_EQ(r.frames[0].frame_id, "000000");
  EXPECT_EQ(r.frames[2].frame_id, "000002");
  EXPECT_EQ(r.frames[1].dataset, "kitti");
  EXPECT_EQ(r.frames[1].annotation_level, AnnotationLevel::k3D);
  EXPECT_TRUE(r.frames[1].annotations[0].box3d.has_value());
}

TEST_F(LoadSplitTest, MissingIdIsRecorded) {
  const std::vector<std::string> ids = {"000000", "000001", "000009"};
  const SplitLoadResult r = load_split(root_, ids, manifest_, 2);
  EXPECT_EQ(r.frames.size(), 2u);
  ASSERT_EQ(r.errors.size(), 1u);
  EXPECT_EQ(r.errors[0].frame_id, "000009");
}

TEST_F(LoadSplitTest, DuplicatesWarnOnce) {
  const std::vector<std::string> ids = {"000000", "000000", "000001"};
  const SplitLoadResult r = load_split(root_, ids, manifest_);
  EXPECT_EQ(r.frames.size(), 2u);
  EXPECT_EQ(r.warnings.size(), 1u);
}

TEST_F(LoadSplitTest, JobsDoNotChangeResult) {
  const std::vector<std::string> ids = {"000001", "000000", "000002"};
  const SplitLoadResult a = load_split(root_, ids, manifest_, 1);
  const SplitLoadResult b = load_split(root_, ids, manifest_, 3);
  EXPECT_EQ(a.frames, b.frames);
}

TEST_F(LoadSplitTest, TwoDimensionalManifestStrips) {
  manifest_.annotation_level = AnnotationLevel::k2DOnly;
  const std::vector<std::string> ids = {"000000"};
  const SplitLoadResult r = load_split(root_, ids, manifest_);
  ASSERT_EQ(r.frames.size(), 1u);
  EXPECT_EQ(r.frames[0].annotation_level, AnnotationLevel::k2DOnly);
  EXPECT_FALSE(r.frames[0].annotations[0].box3d.has_value());
}

TEST(StripTo2D, ClearsThreeDimensionalFieldsAndIsIdempotent) {
  UnifiedFrame f;
  f.frame_id = "x";
  for (int i = 0; i < 5; ++i) {
    ObjectAnnotation a = parse_kitti_label_line(kCarLine);
    a.box2d.left += i;
    f.annotations.push_back(a);
  }
  const UnifiedFrame s = strip_to_2d(f);
  ASSERT_EQ(s.annotations.size(), 5u);
  for (size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(s.annotations[i].box2d, f.annotations[i].box2d);
    EXPECT_FALSE(s.annotations[i].box3d.has_value());
    EXPECT_FALSE(s.annotations[i].alpha.has_value());
  }
  EXPECT_EQ(s.annotation_level, AnnotationLevel::k2DOnly);
  EXPECT_EQ(strip_to_2d(s), s);

  EvalFrame e;
  e.frame_id = s.frame_id;
  e.gts = s.annotations;
  e.gt_level = s.annotation_level;
  EXPECT_THROW(ap40(std::span(&e, 1), "Car", DifficultyBand::kEasy,
                    EvalMode::k3D, EvalConfig{}),
               MissingAnnotationError);
}

TEST(TextFiles, MissingFileIsIoError) {
  EXPECT_THROW(read_text_file("/nonexistent/mono3d/file.txt"), IoError);
}

}  // namespace
}  // namespace mono3d
