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

#include "mono3d/unified_frame.h"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "mono3d/errors.h"
#include "mono3d/kitti_io.h"

namespace mono3d {

const char* annotation_level_name(AnnotationLevel level) {
  return level == AnnotationLevel::k3D ? "3d" : "2d";
}

AnnotationLevel parse_annotation_level(const std::string& text) {
  std::string lower = text;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lower == "3d") return AnnotationLevel::k3D;
  if (lower == "2d" || lower == "2d-only") return AnnotationLevel::k2DOnly;
  throw ConfigError("unknown annotation level '" + text + "'");
}

nlohmann::json camera_to_json(const CameraIntrinsics& c) {
  return {{"f_x", c.fx}, {"f_y", c.fy},         {"c_x", c.cx},
          {"c_y", c.cy}, {"width", c.width}, {"height", c.height}};
}

CameraIntrinsics camera_from_json(const nlohmann::json& j) {
  return {j.at("f_x").get<double>(), j.at("f_y").get<double>(),
          j.at("c_x").get<double>(), j.at("c_y").get<double>(),
          j.at("width").get<int>(),  j.at("height").get<int>()};
}

nlohmann::json annotation_to_json(const ObjectAnnotation& a) {
  nlohmann::json j = {
      {"type", a.type},
      {"truncation", a.truncation},
      {"occlusion", a.occlusion},
      {"box2d", {a.box2d.left, a.box2d.top, a.box2d.right, a.box2d.bottom}}};
  if (a.alpha) j["alpha"] = *a.alpha;
  if (a.box3d) {
    const Box3D& b = *a.box3d;
    j["box3d"] = {{"center", {b.center.x, b.center.y, b.center.z}},
                  {"dims", {b.dims.w, b.dims.h, b.dims.l}},
                  {"yaw", b.yaw}};
  }
  if (a.score) j["score"] = *a.score;
  if (a.pitch != 0.0) j["pitch"] = a.pitch;
  if (a.roll != 0.0) j["roll"] = a.roll;
  return j;
}

ObjectAnnotation annotation_from_json(const nlohmann::json& j) {
  ObjectAnnotation a;
  a.type = j.at("type").get<std::string>();
  a.truncation = j.value("truncation", 0.0);
  a.occlusion = j.value("occlusion", 0);
  const auto box = j.at("box2d").get<std::vector<double>>();
  if (box.size() != 4) throw ParseError("box2d needs 4 numbers");
  a.box2d = {box[0], box[1], box[2], box[3]};
  if (j.contains("alpha")) a.alpha = j.at("alpha").get<double>();
  if (j.contains("box3d")) {
    const auto& b = j.at("box3d");
    const auto c = b.at("center").get<std::vector<double>>();
    const auto d = b.at("dims").get<std::vector<double>>();
    if (c.size() != 3 || d.size() != 3) {
      throw ParseError("box3d center and dims need 3 numbers each");
    }
    a.box3d = Box3D{{c[0], c[1], c[2]}, {d[0], d[1], d[2]},
                    b.at("yaw").get<double>()};
  }
  if (j.contains("score")) a.score = j.at("score").get<double>();
  a.pitch = j.value("pitch", 0.0);
  a.roll = j.value("roll", 0.0);
  return a;
}

nlohmann::json frame_to_json(const UnifiedFrame& f) {
  nlohmann::json anns = nlohmann::json::array();
  for (const auto& a : f.annotations) anns.push_back(annotation_to_json(a));
  return {{"frame_id", f.frame_id},
          {"dataset", f.dataset},
          {"camera", camera_to_json(f.camera)},
          {"annotation_level", annotation_level_name(f.annotation_level)},
          {"annotations", anns}};
}

UnifiedFrame frame_from_json(const nlohmann::json& j) {
  try {
    UnifiedFrame f;
    f.frame_id = j.at("frame_id").get<std::string>();
    f.dataset = j.value("dataset", std::string());
    f.camera = camera_from_json(j.at("camera"));
    f.annotation_level = parse_annotation_level(
        j.value("annotation_level", std::string("3d")));
    for (const auto& a : j.at("annotations")) {
      f.annotations.push_back(annotation_from_json(a));
    }
    return f;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad UnifiedFrame: ") + e.what());
  } catch (const ConfigError& e) {
    throw ParseError(std::string("bad UnifiedFrame: ") + e.what());
  }
}

std::vector<UnifiedFrame> load_unified_frames(
    const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  std::vector<UnifiedFrame> frames;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return frames;
  try {
    if (text[first] == '[') {
      for (const auto& j : nlohmann::json::parse(text)) {
        frames.push_back(frame_from_json(j));
      }
      return frames;
    }
    std::istringstream in(text);
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
      ++n;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      try {
        frames.push_back(frame_from_json(nlohmann::json::parse(line)));
      } catch (const ParseError& e) {
        throw ParseError(e.what(), n);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return frames;
}

void save_unified_frames(const std::filesystem::path& path,
                         std::span<const UnifiedFrame> frames) {
  std::string out;
  for (const auto& f : frames) {
    out += frame_to_json(f).dump();
    out.push_back('\n');
  }
  write_text_file(path, out);
}

}  // namespace mono3d
