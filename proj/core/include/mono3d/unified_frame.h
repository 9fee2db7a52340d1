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

// JSON form of UnifiedFrame, the interchange record between tools. The
// schema is documented in docs/unified_frame_schema.md.

#ifndef MONO3D_UNIFIED_FRAME_H_
#define MONO3D_UNIFIED_FRAME_H_

#include <filesystem>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "mono3d/annotation.h"

namespace mono3d {

nlohmann::json camera_to_json(const CameraIntrinsics& camera);
CameraIntrinsics camera_from_json(const nlohmann::json& j);

nlohmann::json annotation_to_json(const ObjectAnnotation& ann);
ObjectAnnotation annotation_from_json(const nlohmann::json& j);

nlohmann::json frame_to_json(const UnifiedFrame& frame);
// Throws ParseError on missing or mistyped fields.
UnifiedFrame frame_from_json(const nlohmann::json& j);

// Reads either a JSON array of frames or JSON lines (one frame per line).
std::vector<UnifiedFrame> load_unified_frames(const std::filesystem::path& path);
// Writes JSON lines.
void save_unified_frames(const std::filesystem::path& path,
                         std::span<const UnifiedFrame> frames);

}  // namespace mono3d

#endif  // MONO3D_UNIFIED_FRAME_H_
