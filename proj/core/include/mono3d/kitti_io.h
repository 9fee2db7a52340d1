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

// KITTI object-benchmark label, calibration and split files.
//
// Label rows are 15 whitespace-separated fields, 16 with a trailing score:
//   type truncated occluded alpha left top right bottom h w l x y z ry [score]
// (x, y, z) is the bottom center of the box in camera coordinates. The
// parser moves it to the geometric center (y - h/2) and the writer moves it
// back. Rows without valid dimensions (the DontCare sentinel -1 -1 -1) carry
// no 3D box, and alpha -10 means "not annotated".

#ifndef MONO3D_KITTI_IO_H_
#define MONO3D_KITTI_IO_H_

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mono3d/annotation.h"
#include "mono3d/joint_training.h"

namespace mono3d {

inline constexpr int kKittiImageWidth = 1242;
inline constexpr int kKittiImageHeight = 375;

// Throws ParseError carrying `line_number` on a wrong field count or an
// unparsable number.
ObjectAnnotation parse_kitti_label_line(std::string_view line,
                                        int line_number = 0);

// Shortest round-trip decimal form of every number.
std::string format_kitti_label_line(const ObjectAnnotation& ann);

// Blank lines are skipped.
std::vector<ObjectAnnotation> parse_kitti_labels(std::string_view text);
std::string format_kitti_labels(std::span<const ObjectAnnotation> anns);

// Intrinsics from the "P2:" row of a calibration file. Calibration files do
// not record the image size, so it is passed in.
CameraIntrinsics parse_kitti_calib(std::string_view text,
                                   int width = kKittiImageWidth,
                                   int height = kKittiImageHeight);

// One frame id per line; blank lines and surrounding whitespace ignored.
std::vector<std::string> parse_split(std::string_view text);

// Throws IoError.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

struct FrameError {
  std::string frame_id;
  std::string message;
};

struct SplitLoadResult {
  // Sorted by frame id.
  std::vector<UnifiedFrame> frames;
  std::vector<FrameError> errors;
  std::vector<std::string> warnings;
};

// Loads <root>/label_2/<id>.txt and <root>/calib/<id>.txt for every id.
// Duplicate ids are loaded once (with a warning); unreadable or malformed
// frames are reported in `errors` and skipped. Frames from a 2D-only
// manifest are stripped to 2D. `jobs` worker threads parse frames; the
// result does not depend on it.
SplitLoadResult load_split(const std::filesystem::path& root,
                           std::span<const std::string> ids,
                           const DatasetManifest& manifest, int jobs = 1);

// Drops every 3D field and marks the frame 2D-only. 2D boxes are kept
// bitwise.
UnifiedFrame strip_to_2d(UnifiedFrame frame);

}  // namespace mono3d

#endif  // MONO3D_KITTI_IO_H_
