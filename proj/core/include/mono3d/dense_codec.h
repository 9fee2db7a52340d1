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

// Dense detection maps and the codec between object lists and maps.
//
// Maps live on a grid `stride` times coarser than the image. Each object is
// a heatmap peak at the cell holding its projected 3D center; regression
// channels at that cell carry the sub-cell offset, the 2D box edges, the raw
// depth output and the orientation/dimension targets.
//
// Depth uses the focal-normalized transform
//     z = (1 / sigmoid(z_o) - 1) * f_x / f_x0
// so a fixed network output maps to depth proportional to the focal length.

#ifndef MONO3D_DENSE_CODEC_H_
#define MONO3D_DENSE_CODEC_H_

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mono3d/geometry.h"

namespace mono3d {

// Row-major C x H x W buffer of doubles.
class Planes {
 public:
  Planes() = default;
  Planes(int channels, int height, int width, double fill = 0.0);

  int channels() const { return channels_; }
  int height() const { return height_; }
  int width() const { return width_; }
  size_t plane_size() const { return static_cast<size_t>(height_) * width_; }

  double& at(int c, int y, int x) { return data_[index(c, y, x)]; }
  double at(int c, int y, int x) const { return data_[index(c, y, x)]; }

  std::span<double> plane(int c);
  std::span<const double> plane(int c) const;
  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  bool same_shape(const Planes& other) const {
    return channels_ == other.channels_ && height_ == other.height_ &&
           width_ == other.width_;
  }
  bool operator==(const Planes&) const = default;

 private:
  size_t index(int c, int y, int x) const {
    return (static_cast<size_t>(c) * height_ + y) * width_ + x;
  }

  int channels_ = 0;
  int height_ = 0;
  int width_ = 0;
  std::vector<double> data_;
};

// Output heads of the detector. The heatmap head has one channel per class.
enum class Head { kHeatmap = 0, kOffset, kBox2d, kDepth, kOrientation, kDims };
inline constexpr int kNumHeads = 6;
inline constexpr std::array<Head, kNumHeads> kAllHeads = {
    Head::kHeatmap, Head::kOffset,      Head::kBox2d,
    Head::kDepth,   Head::kOrientation, Head::kDims};

const char* head_name(Head head);
// Channel count of a regression head; 0 for the heatmap.
int regression_channels(Head head);

struct DenseDetectionMaps {
  std::vector<std::string> class_names;
  int stride = 1;
  int image_width = 0;
  int image_height = 0;

  Planes heatmap;      // C: per-class center likelihood in [0, 1].
  Planes offset;       // 2: sub-cell (dx, dy) of the center, in cells.
  Planes box2d;        // 4: distances from the center to the left, top,
                       //    right and bottom box edges, in cells.
  Planes depth;        // 1: unconstrained depth output z_o.
  Planes orientation;  // 2: (sin alpha, cos alpha).
  Planes dims;         // 3: (w, h, l) in meters.

  // H x W. Class id of the object whose regression targets were written to
  // the cell, -1 elsewhere.
  std::vector<int> supervised_class;
  // Which heads carry targets. Pseudo-label targets leave the 3D heads unset.
  std::array<bool, kNumHeads> supervised_heads{};

  // All-zero maps with grid size ceil(image / stride).
  static DenseDetectionMaps zeros(std::vector<std::string> class_names,
                                  int image_width, int image_height,
                                  int stride);

  int num_classes() const { return static_cast<int>(class_names.size()); }
  int height() const { return heatmap.height(); }
  int width() const { return heatmap.width(); }

  Planes& head(Head h);
  const Planes& head(Head h) const;
  bool head_supervised(Head h) const {
    return supervised_heads[static_cast<int>(h)];
  }

  // True when class list, stride, image size and every plane agree.
  bool same_layout(const DenseDetectionMaps& other) const;
  bool operator==(const DenseDetectionMaps&) const = default;
};

struct CodecConfig {
  int stride = 4;
  double fx0 = 500.0;
  int top_k = 100;
  double score_threshold = 0.25;
  double min_overlap = 0.7;

  // Throws ConfigError on out-of-range fields.
  void validate() const;
};

struct SceneObject {
  int class_id = 0;
  Box3D box;
};

struct Detection {
  int class_id = 0;
  double score = 0.0;
  Box2D box2d;
  Box3D box3d;
  double alpha = 0.0;
  // Projected 3D center in pixels, as decoded from the peak cell and offset.
  PixelPoint center;
  // Row-major index of the peak cell within its class plane.
  int cell_index = 0;
};

// Numerically stable logistic function.
double sigmoid(double x);

double depth_decode(double z_o, double fx, const CodecConfig& config);
// Inverse of depth_decode. Throws DomainError for z <= 0 or fx <= 0.
double depth_encode(double z, double fx, const CodecConfig& config);

// Largest center displacement (in cells) for which a box of the given size
// keeps IoU >= min_overlap with its shifted copy, minimized over the three
// corner-displacement cases.
double gaussian_radius(double h_cells, double w_cells, double min_overlap);

// Renders a peak of height `peak` into `heatmap` channel `channel`, taking
// the elementwise max with existing content. sigma = radius / 3; radius 0
// writes only the center cell.
void draw_gaussian(Planes& heatmap, int channel, int cell_x, int cell_y,
                   int radius, double peak);

// One object to render. The 3D fields are written only when `targets_3d`
// is set.
struct RenderTarget {
  struct Targets3D {
    double depth_out = 0.0;
    double alpha = 0.0;
    Dims3 dims;
  };

  int class_id = 0;
  PixelPoint center;
  Box2D box2d;
  double peak = 1.0;
  std::optional<Targets3D> targets_3d;
};

// Writes a heatmap splat and the regression targets at the center cell.
// Returns false (and writes nothing) when the center is outside the image.
bool render_target(DenseDetectionMaps& maps, const RenderTarget& target,
                   const CodecConfig& config);

// Target for a ground-truth 3D object: center and 2D box from projection,
// 3D targets from the box. Throws DomainError when a corner lies at or
// behind the camera.
RenderTarget make_render_target(const SceneObject& object,
                                const CameraIntrinsics& camera,
                                const CodecConfig& config, double peak = 1.0);

// Heatmap radius used for a 2D box, in whole cells.
int heatmap_radius(const Box2D& box2d, const CodecConfig& config);

struct EncodeResult {
  DenseDetectionMaps maps;
  // Indices into the input list of objects whose center projects outside
  // the image.
  std::vector<int> skipped;
};

// Renders ground-truth targets for a frame. Every head is flagged as
// supervised.
EncodeResult encode_frame(std::span<const SceneObject> objects,
                          const CameraIntrinsics& camera,
                          const std::vector<std::string>& class_names,
                          const CodecConfig& config);

// True when cell (x, y) of `channel` is a 3x3 local maximum: >= every
// neighbor later in raster order and > every earlier one.
bool is_peak(const Planes& heatmap, int channel, int y, int x);

// Peaks with score >= config.score_threshold, at most config.top_k, sorted by
// descending score then (class_id, cell_index).
std::vector<Detection> decode_detections(const DenseDetectionMaps& maps,
                                         const CameraIntrinsics& camera,
                                         const CodecConfig& config);

}  // namespace mono3d

#endif  // MONO3D_DENSE_CODEC_H_
