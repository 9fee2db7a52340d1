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

#include "mono3d/dense_codec.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>
#include <utility>

#include "mono3d/errors.h"

namespace mono3d {

Planes::Planes(int channels, int height, int width, double fill)
    : channels_(channels),
      height_(height),
      width_(width),
      data_(static_cast<size_t>(channels) * height * width, fill) {
  if (channels < 0 || height < 0 || width < 0) {
    throw ShapeError("negative plane dimensions");
  }
}

std::span<double> Planes::plane(int c) {
  return std::span<double>(data_).subspan(c * plane_size(), plane_size());
}

std::span<const double> Planes::plane(int c) const {
  return std::span<const double>(data_).subspan(c * plane_size(),
                                                plane_size());
}

const char* head_name(Head head) {
  switch (head) {
    case Head::kHeatmap:
      return "heatmap";
    case Head::kOffset:
      return "offset";
    case Head::kBox2d:
      return "box2d";
    case Head::kDepth:
      return "depth";
    case Head::kOrientation:
      return "orientation";
    case Head::kDims:
      return "dims";
  }
  return "unknown";
}

int regression_channels(Head head) {
  switch (head) {
    case Head::kHeatmap:
      return 0;
    case Head::kOffset:
      return 2;
    case Head::kBox2d:
      return 4;
    case Head::kDepth:
      return 1;
    case Head::kOrientation:
      return 2;
    case Head::kDims:
      return 3;
  }
  return 0;
}

DenseDetectionMaps DenseDetectionMaps::zeros(
    std::vector<std::string> class_names, int image_width, int image_height,
    int stride) {
  if (stride < 1) throw ConfigError("stride must be >= 1");
  if (image_width <= 0 || image_height <= 0) {
    throw ConfigError("image size must be positive");
  }
  DenseDetectionMaps maps;
  maps.stride = stride;
  maps.image_width = image_width;
  maps.image_height = image_height;
  const int h = (image_height + stride - 1) / stride;
  const int w = (image_width + stride - 1) / stride;
  maps.heatmap = Planes(static_cast<int>(class_names.size()), h, w);
  maps.class_names = std::move(class_names);
  maps.offset = Planes(regression_channels(Head::kOffset), h, w);
  maps.box2d = Planes(regression_channels(Head::kBox2d), h, w);
  maps.depth = Planes(regression_channels(Head::kDepth), h, w);
  maps.orientation = Planes(regression_channels(Head::kOrientation), h, w);
  maps.dims = Planes(regression_channels(Head::kDims), h, w);
  maps.supervised_class.assign(static_cast<size_t>(h) * w, -1);
  return maps;
}

Planes& DenseDetectionMaps::head(Head h) {
  return const_cast<Planes&>(std::as_const(*this).head(h));
}

const Planes& DenseDetectionMaps::head(Head h) const {
  switch (h) {
    case Head::kHeatmap:
      return heatmap;
    case Head::kOffset:
      return offset;
    case Head::kBox2d:
      return box2d;
    case Head::kDepth:
      return depth;
    case Head::kOrientation:
      return orientation;
    case Head::kDims:
      return dims;
  }
  return heatmap;
}

bool DenseDetectionMaps::same_layout(const DenseDetectionMaps& other) const {
  if (class_names != other.class_names || stride != other.stride ||
      image_width != other.image_width || image_height != other.image_height ||
      supervised_class.size() != other.supervised_class.size()) {
    return false;
  }
  for (Head h : kAllHeads) {
    if (!head(h).same_shape(other.head(h))) return false;
  }
  return true;
}

void CodecConfig::validate() const {
  if (stride < 1) throw ConfigError("stride must be >= 1");
  if (!(fx0 > 0.0)) throw ConfigError("fx0 must be positive");
  if (top_k < 1) throw ConfigError("top_k must be >= 1");
  if (!(score_threshold >= 0.0 && score_threshold <= 1.0)) {
    throw ConfigError("score_threshold must lie in [0, 1]");
  }
  if (!(min_overlap > 0.0 && min_overlap < 1.0)) {
    throw ConfigError("min_overlap must lie in (0, 1)");
  }
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// 1 / sigmoid(z_o) - 1 == exp(-z_o); the exponential form keeps full
// precision for large |z_o|.
double depth_decode(double z_o, double fx, const CodecConfig& config) {
  return std::exp(-z_o) * fx / config.fx0;
}

double depth_encode(double z, double fx, const CodecConfig& config) {
  if (!(z > 0.0)) throw DomainError("depth_encode: depth must be positive");
  if (!(fx > 0.0)) throw DomainError("depth_encode: fx must be positive");
  return -std::log(z * config.fx0 / fx);
}

double gaussian_radius(double h_cells, double w_cells, double min_overlap) {
  if (!(h_cells > 0.0) || !(w_cells > 0.0)) {
    throw DomainError("gaussian_radius: box size must be positive");
  }
  if (!(min_overlap > 0.0 && min_overlap < 1.0)) {
    throw DomainError("gaussian_radius: min_overlap must lie in (0, 1)");
  }
  const double m = min_overlap;
  const double sum = h_cells + w_cells;
  const double area = h_cells * w_cells;

  // Small positive root of each quadratic, in conjugate form so the result
  // does not cancel as min_overlap approaches 1.
  // One corner inside, one outside.
  const double c1 = area * (1.0 - m) / (1.0 + m);
  const double r1 = 2.0 * c1 / (sum + std::sqrt(sum * sum - 4.0 * c1));
  // Both corners inside.
  const double b2 = 2.0 * sum;
  const double c2 = (1.0 - m) * area;
  const double r2 = 2.0 * c2 / (b2 + std::sqrt(b2 * b2 - 16.0 * c2));
  // Both corners outside.
  const double a3 = 4.0 * m;
  const double b3 = 2.0 * m * sum;
  const double c3 = (m - 1.0) * area;
  const double r3 = -2.0 * c3 / (b3 + std::sqrt(b3 * b3 - 4.0 * a3 * c3));

  return std::max(0.0, std::min({r1, r2, r3}));
}

void draw_gaussian(Planes& heatmap, int channel, int cell_x, int cell_y,
                   int radius, double peak) {
  const int h = heatmap.height();
  const int w = heatmap.width();
  if (radius <= 0) {
    double& v = heatmap.at(channel, cell_y, cell_x);
    v = std::max(v, peak);
    return;
  }
  const double sigma = radius / 3.0;
  const double denom = 2.0 * sigma * sigma;
  const int y0 = std::max(0, cell_y - radius);
  const int y1 = std::min(h - 1, cell_y + radius);
  const int x0 = std::max(0, cell_x - radius);
  const int x1 = std::min(w - 1, cell_x + radius);
  for (int y = y0; y <= y1; ++y) {
    const int dy = y - cell_y;
    for (int x = x0; x <= x1; ++x) {
      const int dx = x - cell_x;
      const double g = peak * std::exp(-(dx * dx + dy * dy) / denom);
      double& v = heatmap.at(channel, y, x);
      v = std::max(v, g);
    }
  }
}

int heatmap_radius(const Box2D& box2d, const CodecConfig& config) {
  const double w = box2d.width() / config.stride;
  const double h = box2d.height() / config.stride;
  if (!(w > 0.0) || !(h > 0.0)) return 0;
  return static_cast<int>(
      std::floor(gaussian_radius(h, w, config.min_overlap)));
}

bool render_target(DenseDetectionMaps& maps, const RenderTarget& target,
                   const CodecConfig& config) {
  const double u = target.center.u;
  const double v = target.center.v;
  if (!(u >= 0.0 && u < maps.image_width && v >= 0.0 &&
        v < maps.image_height)) {
    return false;
  }
  if (target.class_id < 0 || target.class_id >= maps.num_classes()) {
    throw ConfigError("class id " + std::to_string(target.class_id) +
                      " outside the class list");
  }
  const double s = maps.stride;
  const double cx = u / s;
  const double cy = v / s;
  const int ix = std::min(static_cast<int>(std::floor(cx)), maps.width() - 1);
  const int iy = std::min(static_cast<int>(std::floor(cy)), maps.height() - 1);

  draw_gaussian(maps.heatmap, target.class_id, ix, iy,
                heatmap_radius(target.box2d, config), target.peak);

  maps.offset.at(0, iy, ix) = cx - ix;
  maps.offset.at(1, iy, ix) = cy - iy;
  maps.box2d.at(0, iy, ix) = (u - target.box2d.left) / s;
  maps.box2d.at(1, iy, ix) = (v - target.box2d.top) / s;
  maps.box2d.at(2, iy, ix) = (target.box2d.right - u) / s;
  maps.box2d.at(3, iy, ix) = (target.box2d.bottom - v) / s;
  if (target.targets_3d) {
    const auto& t = *target.targets_3d;
    maps.depth.at(0, iy, ix) = t.depth_out;
    maps.orientation.at(0, iy, ix) = std::sin(t.alpha);
    maps.orientation.at(1, iy, ix) = std::cos(t.alpha);
    maps.dims.at(0, iy, ix) = t.dims.w;
    maps.dims.at(1, iy, ix) = t.dims.h;
    maps.dims.at(2, iy, ix) = t.dims.l;
  }
  maps.supervised_class[static_cast<size_t>(iy) * maps.width() + ix] =
      target.class_id;
  return true;
}

RenderTarget make_render_target(const SceneObject& object,
                                const CameraIntrinsics& camera,
                                const CodecConfig& config, double peak) {
  const Box3D& box = object.box;
  RenderTarget target;
  target.class_id = object.class_id;
  target.center = project_point(camera, box.center);
  target.box2d = projected_box2d(camera, box);
  target.peak = peak;
  target.targets_3d = RenderTarget::Targets3D{
      depth_encode(box.center.z, camera.fx, config),
      observation_angle(box.yaw, box.center.x, box.center.z), box.dims};
  return target;
}

EncodeResult encode_frame(std::span<const SceneObject> objects,
                          const CameraIntrinsics& camera,
                          const std::vector<std::string>& class_names,
                          const CodecConfig& config) {
  config.validate();
  camera.validate();
  EncodeResult result{DenseDetectionMaps::zeros(class_names, camera.width,
                                                camera.height, config.stride),
                      {}};
  result.maps.supervised_heads.fill(true);

  for (size_t i = 0; i < objects.size(); ++i) {
    const SceneObject& obj = objects[i];
    const Box3D& box = obj.box;
    const auto corners = box3d_corners(box);
    const bool in_front =
        std::all_of(corners.begin(), corners.end(),
                    [](const Vec3& p) { return p.z > 0.0; });
    if (!in_front) {
      result.skipped.push_back(static_cast<int>(i));
      continue;
    }
    if (!render_target(result.maps, make_render_target(obj, camera, config),
                       config)) {
      result.skipped.push_back(static_cast<int>(i));
    }
  }
  return result;
}

bool is_peak(const Planes& heatmap, int channel, int y, int x) {
  const double center = heatmap.at(channel, y, x);
  for (int dy = -1; dy <= 1; ++dy) {
    const int ny = y + dy;
    if (ny < 0 || ny >= heatmap.height()) continue;
    for (int dx = -1; dx <= 1; ++dx) {
      const int nx = x + dx;
      if ((dx == 0 && dy == 0) || nx < 0 || nx >= heatmap.width()) continue;
      const double n = heatmap.at(channel, ny, nx);
      const bool earlier = dy < 0 || (dy == 0 && dx < 0);
      if (earlier ? !(center > n) : !(center >= n)) return false;
    }
  }
  return true;
}

std::vector<Detection> decode_detections(const DenseDetectionMaps& maps,
                                         const CameraIntrinsics& camera,
                                         const CodecConfig& config) {
  struct Peak {
    double score;
    int class_id;
    int cell;
  };
  std::vector<Peak> peaks;
  const int h = maps.height();
  const int w = maps.width();
  for (int c = 0; c < maps.num_classes(); ++c) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const double s = maps.heatmap.at(c, y, x);
        if (!(s >= config.score_threshold) || s <= 0.0) continue;
        if (is_peak(maps.heatmap, c, y, x)) peaks.push_back({s, c, y * w + x});
      }
    }
  }
  std::sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) {
    return std::tuple(-a.score, a.class_id, a.cell) <
           std::tuple(-b.score, b.class_id, b.cell);
  });
  if (peaks.size() > static_cast<size_t>(config.top_k)) {
    peaks.resize(config.top_k);
  }

  std::vector<Detection> out;
  out.reserve(peaks.size());
  const double s = maps.stride;
  for (const Peak& p : peaks) {
    const int y = p.cell / w;
    const int x = p.cell % w;
    const double z = depth_decode(maps.depth.at(0, y, x), camera.fx, config);
    if (!std::isfinite(z) || !(z > 0.0)) continue;
    Detection d;
    d.class_id = p.class_id;
    d.score = p.score;
    d.cell_index = p.cell;
    d.center = {(x + maps.offset.at(0, y, x)) * s,
                (y + maps.offset.at(1, y, x)) * s};
    d.box2d = {d.center.u - maps.box2d.at(0, y, x) * s,
               d.center.v - maps.box2d.at(1, y, x) * s,
               d.center.u + maps.box2d.at(2, y, x) * s,
               d.center.v + maps.box2d.at(3, y, x) * s};
    d.box3d.center = unproject(camera, d.center.u, d.center.v, z);
    d.box3d.dims = {maps.dims.at(0, y, x), maps.dims.at(1, y, x),
                    maps.dims.at(2, y, x)};
    d.alpha = std::atan2(maps.orientation.at(0, y, x),
                         maps.orientation.at(1, y, x));
    d.box3d.yaw = yaw_from_alpha(d.alpha, d.box3d.center.x, z);
    out.push_back(d);
  }
  return out;
}

}  // namespace mono3d
