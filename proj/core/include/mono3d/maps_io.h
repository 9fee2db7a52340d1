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

// MDDM binary container for DenseDetectionMaps.
//
// Layout, all integers little-endian:
//   bytes 0-3   magic "MDDM"
//   u32         version (1)
//   u32         C  number of classes
//   u32         H  grid height
//   u32         W  grid width
//   u32         stride
//   u32         number of f32 planes that follow (C + 13)
//   f32[...]    row-major H x W planes in the order
//               heatmap[C], offset[2], box2d[4], depth[1], orientation[2],
//               dims[3], supervised_class[1] (-1 for unsupervised cells)
//
// Class names, image size and the supervised-head flags live in a JSON
// sidecar next to the container (<stem>.json). Values are stored as f32, so
// a save/load cycle rounds every channel to single precision.

#ifndef MONO3D_MAPS_IO_H_
#define MONO3D_MAPS_IO_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "mono3d/dense_codec.h"

namespace mono3d {

inline constexpr uint32_t kMddmVersion = 1;
inline constexpr int kMddmExtraPlanes = 13;

std::string encode_mddm(const DenseDetectionMaps& maps);

// The sidecar supplies class names, image size and head flags. Throws
// ParseError on a malformed container or a sidecar that disagrees with it.
DenseDetectionMaps decode_mddm(std::string_view bytes,
                               const nlohmann::json& sidecar);

// Sidecar describing `maps`; `extra` keys (camera, config echo) are merged
// in.
nlohmann::json maps_sidecar(const DenseDetectionMaps& maps,
                            const nlohmann::json& extra = nlohmann::json::object());

struct LoadedMaps {
  DenseDetectionMaps maps;
  nlohmann::json sidecar;
};

// Writes <stem>.mddm and <stem>.json. Throws IoError.
void save_maps(const std::filesystem::path& stem,
               const DenseDetectionMaps& maps,
               const nlohmann::json& extra = nlohmann::json::object());

// Reads a container and the sidecar with the same stem.
LoadedMaps load_maps(const std::filesystem::path& mddm_path);

}  // namespace mono3d

#endif  // MONO3D_MAPS_IO_H_
