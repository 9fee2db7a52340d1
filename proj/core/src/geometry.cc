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

#include "mono3d/geometry.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <tuple>

#include "mono3d/errors.h"

namespace mono3d {
namespace {

void require_in_front(double z, const char* op) {
  if (!(z > 0.0)) {
    throw DomainError(std::string(op) + ": z must be positive, got " +
                      std::to_string(z));
  }
}

// Which side of the directed edge a->b the point lies on; > 0 is left.
double edge_side(const BevPoint& a, const BevPoint& b, const BevPoint& p) {
  return (b.x - a.x) * (p.z - a.z) - (b.z - a.z) * (p.x - a.x);
}

BevPoint edge_intersection(const BevPoint& p, const BevPoint& q,
                           const BevPoint& a, const BevPoint& b) {
  const double sp = edge_side(a, b, p);
  const double sq = edge_side(a, b, q);
  const double t = sp / (sp - sq);
  return {p.x + t * (q.x - p.x), p.z + t * (q.z - p.z)};
}

}  // namespace

void CameraIntrinsics::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) {
    throw DomainError("camera focal lengths must be positive");
  }
  if (width <= 0 || height <= 0) {
    throw DomainError("camera image size must be positive");
  }
  if (cx < 0.0 || cx > width || cy < 0.0 || cy > height) {
    throw DomainError("camera principal point lies outside the image");
  }
}

double Box2D::area() const {
  return valid() ? width() * height() : 0.0;
}

double wrap_angle(double angle) {
  if (angle > -kPi && angle <= kPi) return angle;
  double r = std::remainder(angle, 2.0 * kPi);
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

double observation_angle(double theta, double x, double z) {
  require_in_front(z, "observation_angle");
  return wrap_angle(theta - std::atan(x / z));
}

double yaw_from_alpha(double alpha, double x, double z) {
  require_in_front(z, "yaw_from_alpha");
  return wrap_angle(alpha + std::atan(x / z));
}

PixelPoint project_point(const CameraIntrinsics& camera, const Vec3& point) {
  require_in_front(point.z, "project_point");
  return {camera.fx * point.x / point.z + camera.cx,
          camera.fy * point.y / point.z + camera.cy};
}

Vec3 unproject(const CameraIntrinsics& camera, double u, double v, double z) {
  require_in_front(z, "unproject");
  return {(u - camera.cx) * z / camera.fx, (v - camera.cy) * z / camera.fy, z};
}

std::array<BevPoint, 4> bev_corners(const Box3D& box) {
  const double c = std::cos(box.yaw);
  const double s = std::sin(box.yaw);
  const double hl = box.dims.l / 2.0;
  const double hw = box.dims.w / 2.0;
  const std::array<BevPoint, 4> local = {
      BevPoint{hl, -hw}, BevPoint{hl, hw}, BevPoint{-hl, hw},
      BevPoint{-hl, -hw}};
  std::array<BevPoint, 4> out;
  for (size_t i = 0; i < 4; ++i) {
    // Rotation about +y: x' = c x + s z, z' = -s x + c z.
    out[i] = {box.center.x + c * local[i].x + s * local[i].z,
              box.center.z - s * local[i].x + c * local[i].z};
  }
  return out;
}

std::array<Vec3, 8> box3d_corners(const Box3D& box) {
  const auto bev = bev_corners(box);
  const double y_bottom = box.center.y + box.dims.h / 2.0;
  const double y_top = box.center.y - box.dims.h / 2.0;
  std::array<Vec3, 8> out;
  for (size_t i = 0; i < 4; ++i) {
    out[i] = {bev[i].x, y_bottom, bev[i].z};
    out[i + 4] = {bev[i].x, y_top, bev[i].z};
  }
  return out;
}

Box2D projected_box2d(const CameraIntrinsics& camera, const Box3D& box) {
  Box2D out{std::numeric_limits<double>::infinity(),
            std::numeric_limits<double>::infinity(),
            -std::numeric_limits<double>::infinity(),
            -std::numeric_limits<double>::infinity()};
  for (const Vec3& corner : box3d_corners(box)) {
    const PixelPoint p = project_point(camera, corner);
    out.left = std::min(out.left, p.u);
    out.right = std::max(out.right, p.u);
    out.top = std::min(out.top, p.v);
    out.bottom = std::max(out.bottom, p.v);
  }
  out.left = std::clamp(out.left, 0.0, static_cast<double>(camera.width));
  out.right = std::clamp(out.right, 0.0, static_cast<double>(camera.width));
  out.top = std::clamp(out.top, 0.0, static_cast<double>(camera.height));
  out.bottom = std::clamp(out.bottom, 0.0, static_cast<double>(camera.height));
  return out;
}

double iou_2d(const Box2D& a, const Box2D& b) {
  const double iw = std::min(a.right, b.right) - std::max(a.left, b.left);
  const double ih = std::min(a.bottom, b.bottom) - std::max(a.top, b.top);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

double polygon_area(const std::vector<BevPoint>& polygon) {
  const size_t n = polygon.size();
  if (n < 3) return 0.0;
  double twice = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const BevPoint& p = polygon[i];
    const BevPoint& q = polygon[(i + 1) % n];
    twice += p.x * q.z - q.x * p.z;
  }
  return twice / 2.0;
}

std::vector<BevPoint> clip_convex_polygon(const std::vector<BevPoint>& subject,
                                          const std::vector<BevPoint>& clip) {
  std::vector<BevPoint> output = subject;
  const size_t n = clip.size();
  for (size_t e = 0; e < n && !output.empty(); ++e) {
    const BevPoint& a = clip[e];
    const BevPoint& b = clip[(e + 1) % n];
    std::vector<BevPoint> input;
    input.swap(output);
    for (size_t i = 0; i < input.size(); ++i) {
      const BevPoint& cur = input[i];
      const BevPoint& prev = input[(i + input.size() - 1) % input.size()];
      const bool cur_in = edge_side(a, b, cur) >= 0.0;
      const bool prev_in = edge_side(a, b, prev) >= 0.0;
      if (cur_in) {
        if (!prev_in) output.push_back(edge_intersection(prev, cur, a, b));
        output.push_back(cur);
      } else if (prev_in) {
        output.push_back(edge_intersection(prev, cur, a, b));
      }
    }
  }
  return output;
}

double bev_intersection_area(const Box3D& a, const Box3D& b) {
  // Clipping a against b and b against a differ in the last bits; fix the
  // order so the result is symmetric.
  const auto key = [](const Box3D& x) {
    return std::tuple(x.center.x, x.center.z, x.dims.l, x.dims.w, x.yaw);
  };
  const bool swap = key(b) < key(a);
  const auto ca = bev_corners(swap ? b : a);
  const auto cb = bev_corners(swap ? a : b);
  const std::vector<BevPoint> pa(ca.begin(), ca.end());
  const std::vector<BevPoint> pb(cb.begin(), cb.end());
  if (std::abs(polygon_area(pa)) <= kAreaEpsilon ||
      std::abs(polygon_area(pb)) <= kAreaEpsilon) {
    return 0.0;
  }
  const double area = polygon_area(clip_convex_polygon(pa, pb));
  return area <= kAreaEpsilon ? 0.0 : area;
}

double bev_iou(const Box3D& a, const Box3D& b) {
  const double area_a = a.dims.w * a.dims.l;
  const double area_b = b.dims.w * b.dims.l;
  if (!(area_a > kAreaEpsilon) || !(area_b > kAreaEpsilon)) return 0.0;
  const double inter = bev_intersection_area(a, b);
  return std::clamp(inter / (area_a + area_b - inter), 0.0, 1.0);
}

double iou_3d(const Box3D& a, const Box3D& b) {
  const double vol_a = a.volume();
  const double vol_b = b.volume();
  if (!(vol_a > 0.0) || !(vol_b > 0.0)) return 0.0;
  const double y_overlap =
      std::min(a.center.y + a.dims.h / 2.0, b.center.y + b.dims.h / 2.0) -
      std::max(a.center.y - a.dims.h / 2.0, b.center.y - b.dims.h / 2.0);
  if (y_overlap <= 0.0) return 0.0;
  const double inter = bev_intersection_area(a, b) * y_overlap;
  if (inter <= 0.0) return 0.0;
  return std::clamp(inter / (vol_a + vol_b - inter), 0.0, 1.0);
}

}  // namespace mono3d
