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

// Pinhole camera geometry, angle conventions and box overlaps.
//
// Camera frame: x right, y down, z forward. Boxes rotate about the camera y
// axis; at yaw 0 the box length runs along +x and its width along z. All
// angles are radians.

#ifndef MONO3D_GEOMETRY_H_
#define MONO3D_GEOMETRY_H_

#include <array>
#include <numbers>
#include <vector>

namespace mono3d {

inline constexpr double kPi = std::numbers::pi;

struct CameraIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;

  // Throws DomainError when the invariants (positive focal lengths,
  // principal point inside the image) are violated.
  void validate() const;

  bool operator==(const CameraIntrinsics&) const = default;
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  bool operator==(const Vec3&) const = default;
};

struct Dims3 {
  double w = 0.0;
  double h = 0.0;
  double l = 0.0;

  bool operator==(const Dims3&) const = default;
};

// `center` is the geometric center of the cuboid.
struct Box3D {
  Vec3 center;
  Dims3 dims;
  double yaw = 0.0;

  double volume() const { return dims.w * dims.h * dims.l; }
  bool operator==(const Box3D&) const = default;
};

struct Box2D {
  double left = 0.0;
  double top = 0.0;
  double right = 0.0;
  double bottom = 0.0;

  double width() const { return right - left; }
  double height() const { return bottom - top; }
  double area() const;
  bool valid() const { return left < right && top < bottom; }
  bool operator==(const Box2D&) const = default;
};

struct PixelPoint {
  double u = 0.0;
  double v = 0.0;
};

struct BevPoint {
  double x = 0.0;
  double z = 0.0;
};

// Polygon overlap areas below this (m^2) are treated as zero.
inline constexpr double kAreaEpsilon = 1e-9;

// Maps any finite angle into (-pi, pi]. Values already inside the interval
// are returned unchanged, so wrap_angle is bitwise idempotent.
double wrap_angle(double angle);

// alpha = wrap(theta - atan(x / z)). Throws DomainError for z <= 0.
double observation_angle(double theta, double x, double z);

// Inverse of observation_angle: wrap(alpha + atan(x / z)).
double yaw_from_alpha(double alpha, double x, double z);

PixelPoint project_point(const CameraIntrinsics& camera, const Vec3& point);
Vec3 unproject(const CameraIntrinsics& camera, double u, double v, double z);

// Corner order: bottom face (y + h/2) counter-clockwise in BEV, then the top
// face in the same order.
std::array<Vec3, 8> box3d_corners(const Box3D& box);
std::array<BevPoint, 4> bev_corners(const Box3D& box);

// Tight image-space rectangle around the projected corners, clipped to the
// image. Throws DomainError when a corner lies at or behind the camera.
Box2D projected_box2d(const CameraIntrinsics& camera, const Box3D& box);

double iou_2d(const Box2D& a, const Box2D& b);

// Signed shoelace area; positive for counter-clockwise vertex order.
double polygon_area(const std::vector<BevPoint>& polygon);

// Sutherland-Hodgman clip of `subject` against the convex `clip` polygon.
// Both inputs must be counter-clockwise.
std::vector<BevPoint> clip_convex_polygon(const std::vector<BevPoint>& subject,
                                          const std::vector<BevPoint>& clip);

double bev_intersection_area(const Box3D& a, const Box3D& b);
double bev_iou(const Box3D& a, const Box3D& b);
double iou_3d(const Box3D& a, const Box3D& b);

}  // namespace mono3d

#endif  // MONO3D_GEOMETRY_H_
