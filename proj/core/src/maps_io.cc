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

#include "mono3d/maps_io.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include "mono3d/errors.h"

namespace mono3d {
namespace {

constexpr char kMagic[4] = {'M', 'D', 'D', 'M'};
constexpr size_t kHeaderBytes = 4 + 6 * 4;

void put_u32(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f32(std::string& out, double value) {
  put_u32(out, std::bit_cast<uint32_t>(static_cast<float>(value)));
}

uint32_t get_u32(std::string_view bytes, size_t pos) {
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<uint32_t>(static_cast<unsigned char>(bytes[pos + i]))
         << (8 * i);
  }
  return v;
}

double get_f32(std::string_view bytes, size_t pos) {
  return std::bit_cast<float>(get_u32(bytes, pos));
}

void put_planes(std::string& out, const Planes& planes) {
  for (double v : planes.data()) put_f32(out, v);
}

size_t get_planes(std::string_view bytes, size_t pos, Planes& planes) {
  for (double& v : planes.data()) {
    v = get_f32(bytes, pos);
    pos += 4;
  }
  return pos;
}

}  // namespace

std::string encode_mddm(const DenseDetectionMaps& maps) {
  const uint32_t c = maps.num_classes();
  const uint32_t h = maps.height();
  const uint32_t w = maps.width();
  std::string out;
  out.reserve(kHeaderBytes +
              (c + kMddmExtraPlanes) * static_cast<size_t>(h) * w * 4);
  out.append(kMagic, 4);
  put_u32(out, kMddmVersion);
  put_u32(out, c);
  put_u32(out, h);
  put_u32(out, w);
  put_u32(out, static_cast<uint32_t>(maps.stride));
  put_u32(out, c + kMddmExtraPlanes);
  for (Head head : kAllHeads) put_planes(out, maps.head(head));
  for (int cls : maps.supervised_class) put_f32(out, cls);
  return out;
}

DenseDetectionMaps decode_mddm(std::string_view bytes,
                               const nlohmann::json& sidecar) {
  if (bytes.size() < kHeaderBytes || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw ParseError("not an MDDM container");
  }
  const uint32_t version = get_u32(bytes, 4);
  if (version != kMddmVersion) {
    throw ParseError("unsupported MDDM version " + std::to_string(version));
  }
  const uint32_t c = get_u32(bytes, 8);
  const uint32_t h = get_u32(bytes, 12);
  const uint32_t w = get_u32(bytes, 16);
  const uint32_t stride = get_u32(bytes, 20);
  const uint32_t planes = get_u32(bytes, 24);
  if (planes != c + kMddmExtraPlanes) {
    throw ParseError("MDDM plane count does not match class count");
  }
  const size_t expected =
      kHeaderBytes + static_cast<size_t>(planes) * h * w * 4;
  if (bytes.size() != expected) {
    throw ParseError("MDDM payload size mismatch: expected " +
                     std::to_string(expected) + " bytes, got " +
                     std::to_string(bytes.size()));
  }

  std::vector<std::string> names;
  int image_width = 0;
  int image_height = 0;
  try {
    names = sidecar.at("class_names").get<std::vector<std::string>>();
    image_width = sidecar.at("image_width").get<int>();
    image_height = sidecar.at("image_height").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad MDDM sidecar: ") + e.what());
  }
  if (names.size() != c) {
    throw ParseError("sidecar class list does not match container");
  }
  DenseDetectionMaps maps =
      DenseDetectionMaps::zeros(std::move(names), image_width, image_height,
                                static_cast<int>(stride));
  if (static_cast<uint32_t>(maps.height()) != h ||
      static_cast<uint32_t>(maps.width()) != w) {
    throw ParseError("sidecar image size does not match container grid");
  }
  size_t pos = kHeaderBytes;
  for (Head head : kAllHeads) pos = get_planes(bytes, pos, maps.head(head));
  for (int& cls : maps.supervised_class) {
    cls = static_cast<int>(get_f32(bytes, pos));
    pos += 4;
  }
  if (sidecar.contains("supervised_heads")) {
    for (const auto& name : sidecar.at("supervised_heads")) {
      for (Head head : kAllHeads) {
        if (name.get<std::string>() == head_name(head)) {
          maps.supervised_heads[static_cast<int>(head)] = true;
        }
      }
    }
  }
  return maps;
}

nlohmann::json maps_sidecar(const DenseDetectionMaps& maps,
                            const nlohmann::json& extra) {
  nlohmann::json j = extra.is_object() ? extra : nlohmann::json::object();
  j["format"] = "MDDM";
  j["version"] = kMddmVersion;
  j["class_names"] = maps.class_names;
  j["image_width"] = maps.image_width;
  j["image_height"] = maps.image_height;
  j["stride"] = maps.stride;
  nlohmann::json channels = nlohmann::json::array();
  for (const auto& name : maps.class_names) channels.push_back("heatmap/" + name);
  for (Head head : kAllHeads) {
    for (int i = 0; i < regression_channels(head); ++i) {
      channels.push_back(std::string(head_name(head)) + "/" + std::to_string(i));
    }
  }
  channels.push_back("supervised_class");
  j["channels"] = channels;
  nlohmann::json heads = nlohmann::json::array();
  for (Head head : kAllHeads) {
    if (maps.head_supervised(head)) heads.push_back(head_name(head));
  }
  j["supervised_heads"] = heads;
  return j;
}

void save_maps(const std::filesystem::path& stem,
               const DenseDetectionMaps& maps, const nlohmann::json& extra) {
  auto mddm_path = stem;
  mddm_path += ".mddm";
  auto json_path = stem;
  json_path += ".json";
  {
    std::ofstream out(mddm_path, std::ios::binary);
    const std::string bytes = encode_mddm(maps);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("cannot write " + mddm_path.string());
  }
  std::ofstream out(json_path);
  out << maps_sidecar(maps, extra).dump(2) << '\n';
  if (!out) throw IoError("cannot write " + json_path.string());
}

LoadedMaps load_maps(const std::filesystem::path& mddm_path) {
  std::ifstream in(mddm_path, std::ios::binary);
  if (!in) throw IoError("cannot open " + mddm_path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  auto json_path = mddm_path;
  json_path.replace_extension(".json");
  std::ifstream side(json_path);
  if (!side) throw IoError("missing sidecar " + json_path.string());
  nlohmann::json sidecar;
  try {
    sidecar = nlohmann::json::parse(side);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(json_path.string() + ": " + e.what());
  }
  LoadedMaps loaded{decode_mddm(buf.str(), sidecar), sidecar};
  return loaded;
}

}  // namespace mono3d
