// Copyright 2026 The GunPose Authors
// SPDX-License-Identifier: Apache-2.0

#include "gunpose/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gunpose/error.hpp"

namespace gunpose {

namespace {
constexpr double kMinVectorNorm = 1e-9;
constexpr double kMinPolygonArea = 1e-9;

bool on_segment(const Point& p, const Point& a, const Point& b) noexcept {
  const double cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
  if (cross != 0.0) return false;
  return p.x >= std::min(a.x, b.x) && p.x <= std::max(a.x, b.x) && p.y >= std::min(a.y, b.y) &&
         p.y <= std::max(a.y, b.y);
}
}  // namespace

double Vector::norm() const noexcept { return std::sqrt(dx * dx + dy * dy); }

Point center(const BBox& box) noexcept { return {box.cx, box.cy}; }

double euclidean(const Point& p, const Point& q) noexcept {
  const double dx = p.x - q.x;
  const double dy = p.y - q.y;
  return std::sqrt(dx * dx + dy * dy);
}

double iou(const BBox& a, const BBox& b) noexcept {
  const double ax1 = a.left(), ay1 = a.top(), ax2 = a.right(), ay2 = a.bottom();
  const double bx1 = b.left(), by1 = b.top(), bx2 = b.right(), by2 = b.bottom();
  const double iw = std::min(ax2, bx2) - std::max(ax1, bx1);
  const double ih = std::min(ay2, by2) - std::max(ay1, by1);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  const double area_a = (ax2 - ax1) * (ay2 - ay1);
  const double area_b = (bx2 - bx1) * (by2 - by1);
  return inter / (area_a + area_b - inter);
}

double dynamic_threshold(const BBox& gun, double alpha, SizeMode mode) {
  if (!(alpha > 0.0)) throw ConfigError("alpha must be > 0");
  const double size = mode == SizeMode::kWidth ? gun.w : std::max(gun.w, gun.h);
  return alpha * size;
}

bool point_in_box(const Point& p, const BBox& box) noexcept {
  return std::abs(p.x - box.cx) <= box.w / 2 && std::abs(p.y - box.cy) <= box.h / 2;
}

double angle_deg(const Vector& u, const Vector& v) {
  if (u.norm() <= kMinVectorNorm || v.norm() <= kMinVectorNorm)
    throw GeometryError("angle undefined for a near-zero vector");
  // atan2 stays well conditioned near 0 and 180 degrees, unlike acos.
  const double cross = u.dx * v.dy - u.dy * v.dx;
  const double dot = u.dx * v.dx + u.dy * v.dy;
  return std::atan2(std::abs(cross), dot) * (180.0 / std::numbers::pi);
}

double polygon_area(std::span<const Point> poly) noexcept {
  double twice = 0.0;
  for (size_t i = 0, n = poly.size(); i < n; ++i) {
    const Point& a = poly[i];
    const Point& b = poly[(i + 1) % n];
    twice += a.x * b.y - b.x * a.y;
  }
  return twice / 2;
}

bool point_in_polygon(const Point& p, std::span<const Point> poly) {
  if (poly.size() < 3) throw GeometryError("polygon needs at least 3 vertices");
  if (std::abs(polygon_area(poly)) <= kMinPolygonArea) throw GeometryError("degenerate polygon");
  bool inside = false;
  for (size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Point& a = poly[i];
    const Point& b = poly[j];
    if (on_segment(p, a, b)) return true;
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

}  // namespace gunpose
