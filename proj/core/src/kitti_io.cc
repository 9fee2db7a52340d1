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

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <future>
#include <optional>
#include <set>
#include <sstream>

#include "mono3d/errors.h"

namespace mono3d {
namespace {

constexpr double kAlphaSentinel = -10.0;

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename T>
T parse_number(std::string_view token, const char* field, int line_number) {
  T value{};
  const auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw ParseError("cannot parse " + std::string(field) + " from '" +
                         std::string(token) + "'",
                     line_number);
  }
  return value;
}

std::string num(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  size_t start = 0;
  while (start <= text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

UnifiedFrame load_frame(const std::filesystem::path& root,
                        const std::string& id,
                        const DatasetManifest& manifest) {
  UnifiedFrame frame;
  frame.frame_id = id;
  frame.dataset = manifest.name;
  const auto label_path = root / "label_2" / (id + ".txt");
  const auto calib_path = root / "calib" / (id + ".txt");
  frame.camera = parse_kitti_calib(read_text_file(calib_path),
                                   manifest.camera.width,
                                   manifest.camera.height);
  frame.annotations = parse_kitti_labels(read_text_file(label_path));
  frame.annotation_level = AnnotationLevel::k3D;
  if (manifest.annotation_level == AnnotationLevel::k2DOnly) {
    frame = strip_to_2d(std::move(frame));
  }
  return frame;
}

}  // namespace

ObjectAnnotation parse_kitti_label_line(std::string_view line,
                                        int line_number) {
  const auto f = split_fields(line);
  if (f.size() != 15 && f.size() != 16) {
    throw ParseError("expected 15 or 16 fields, got " +
                         std::to_string(f.size()),
                     line_number);
  }
  ObjectAnnotation ann;
  ann.type = std::string(f[0]);
  ann.truncation = parse_number<double>(f[1], "truncated", line_number);
  ann.occlusion = parse_number<int>(f[2], "occluded", line_number);
  const double alpha = parse_number<double>(f[3], "alpha", line_number);
  if (alpha != kAlphaSentinel) ann.alpha = alpha;
  ann.box2d.left = parse_number<double>(f[4], "bbox left", line_number);
  ann.box2d.top = parse_number<double>(f[5], "bbox top", line_number);
  ann.box2d.right = parse_number<double>(f[6], "bbox right", line_number);
  ann.box2d.bottom = parse_number<double>(f[7], "bbox bottom", line_number);
  const double h = parse_number<double>(f[8], "height", line_number);
  const double w = parse_number<double>(f[9], "width", line_number);
  const double l = parse_number<double>(f[10], "length", line_number);
  const double x = parse_number<double>(f[11], "x", line_number);
  const double y = parse_number<double>(f[12], "y", line_number);
  const double z = parse_number<double>(f[13], "z", line_number);
  const double ry = parse_number<double>(f[14], "rotation_y", line_number);
  if (h > 0.0 && w > 0.0 && l > 0.0) {
    ann.box3d = Box3D{{x, y - h / 2.0, z}, {w, h, l}, ry};
  }
  if (f.size() == 16) {
    ann.score = parse_number<double>(f[15], "score", line_number);
  }
  return ann;
}

std::string format_kitti_label_line(const ObjectAnnotation& ann) {
  std::string out = ann.type;
  auto add = [&out](const std::string& s) {
    out.push_back(' ');
    out += s;
  };
  add(num(ann.truncation));
  add(std::to_string(ann.occlusion));
  add(num(ann.alpha.value_or(kAlphaSentinel)));
  add(num(ann.box2d.left));
  add(num(ann.box2d.top));
  add(num(ann.box2d.right));
  add(num(ann.box2d.bottom));
  if (ann.box3d) {
    const Box3D& b = *ann.box3d;
    add(num(b.dims.h));
    add(num(b.dims.w));
    add(num(b.dims.l));
    add(num(b.center.x));
    add(num(b.center.y + b.dims.h / 2.0));
    add(num(b.center.z));
    add(num(b.yaw));
  } else {
    out += " -1 -1 -1 -1000 -1000 -1000 -10";
  }
  if (ann.score) add(num(*ann.score));
  return out;
}

std::vector<ObjectAnnotation> parse_kitti_labels(std::string_view text) {
  std::vector<ObjectAnnotation> out;
  int n = 0;
  for (std::string_view line : split_lines(text)) {
    ++n;
    if (split_fields(line).empty()) continue;
    out.push_back(parse_kitti_label_line(line, n));
  }
  return out;
}

std::string format_kitti_labels(std::span<const ObjectAnnotation> anns) {
  std::string out;
  for (const auto& a : anns) {
    out += format_kitti_label_line(a);
    out.push_back('\n');
  }
  return out;
}

CameraIntrinsics parse_kitti_calib(std::string_view text, int width,
                                   int height) {
  int n = 0;
  for (std::string_view line : split_lines(text)) {
    ++n;
    const auto f = split_fields(line);
    if (f.empty() || f[0] != "P2:") continue;
    if (f.size() != 13) {
      throw ParseError("P2 row needs 12 numbers, got " +
                           std::to_string(f.size() - 1),
                       n);
    }
    double p[12];
    for (int i = 0; i < 12; ++i) p[i] = parse_number<double>(f[i + 1], "P2", n);
    CameraIntrinsics camera{p[0], p[5], p[2], p[6], width, height};
    return camera;
  }
  throw ParseError("calibration has no P2 row");
}

std::vector<std::string> parse_split(std::string_view text) {
  std::vector<std::string> ids;
  for (std::string_view line : split_lines(text)) {
    const auto f = split_fields(line);
    if (!f.empty()) ids.emplace_back(f[0]);
  }
  return ids;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("cannot write " + path.string());
}

SplitLoadResult load_split(const std::filesystem::path& root,
                           std::span<const std::string> ids,
                           const DatasetManifest& manifest, int jobs) {
  SplitLoadResult result;
  std::set<std::string> unique;
  for (const auto& id : ids) {
    if (!unique.insert(id).second) {
      result.warnings.push_back("duplicate frame id " + id + " ignored");
    }
  }
  const std::vector<std::string> sorted(unique.begin(), unique.end());

  struct Slot {
    std::optional<UnifiedFrame> frame;
    std::string error;
  };
  std::vector<Slot> slots(sorted.size());
  auto work = [&](size_t begin, size_t step) {
    for (size_t i = begin; i < sorted.size(); i += step) {
      try {
        slots[i].frame = load_frame(root, sorted[i], manifest);
      } catch (const std::exception& e) {
        slots[i].error = e.what();
      }
    }
  };
  const size_t workers = std::max(1, jobs);
  std::vector<std::future<void>> pending;
  for (size_t w = 1; w < workers; ++w) {
    pending.push_back(std::async(std::launch::async, work, w, workers));
  }
  work(0, workers);
  for (auto& f : pending) f.get();

  for (size_t i = 0; i < sorted.size(); ++i) {
    if (slots[i].frame) {
      result.frames.push_back(std::move(*slots[i].frame));
    } else {
      result.errors.push_back({sorted[i], slots[i].error});
    }
  }
  return result;
}

UnifiedFrame strip_to_2d(UnifiedFrame frame) {
  for (auto& a : frame.annotations) {
    a.box3d.reset();
    a.alpha.reset();
    a.pitch = 0.0;
    a.roll = 0.0;
  }
  frame.annotation_level = AnnotationLevel::k2DOnly;
  return frame;
}

}  // namespace mono3d
