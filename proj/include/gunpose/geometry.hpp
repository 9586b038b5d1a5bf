// Copyright 2026 The GunPose Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>

#include "gunpose/model.hpp"

namespace gunpose {

struct Vector {
  double dx = 0.0;
  double dy = 0.0;

  double norm() const noexcept;
  Vector operator-() const noexcept { return {-dx, -dy}; }
  bool operator==(const Vector&) const = default;
};

struct Point {
  double x = 0.0;
  double y = 0.0;

  Vector operator-(const Point& o) const noexcept { return {x - o.x, y - o.y}; }
  bool operator==(const Point&) const = default;
};

// What "gun size" means for the dynamic proximity threshold.
enum class SizeMode { kWidth, kMaxSide };

Point center(const BBox& box) noexcept;

double euclidean(const Point& p, const Point& q) noexcept;

// Intersection over union. Zero for disjoint boxes, exactly 1 for a box with itself.
double iou(const BBox& a, const BBox& b) noexcept;

// alpha * gun.w (or alpha * max(w, h) with SizeMode::kMaxSide).
// Throws ConfigError when alpha <= 0.
double dynamic_threshold(const BBox& gun, double alpha, SizeMode mode = SizeMode::kWidth);

// Boundary inclusive.
bool point_in_box(const Point& p, const BBox& box) noexcept;

// Unsigned angle between two vectors in degrees, in [0,180].
// Throws GeometryError if either vector has norm <= 1e-9.
double angle_deg(const Vector& u, const Vector& v);

// Signed shoelace area; positive for counter-clockwise in a y-up frame.
double polygon_area(std::span<const Point> poly) noexcept;

// Even-odd ray casting with the boundary counted as inside.
// Throws GeometryError for fewer than 3 vertices or |area| <= 1e-9.
bool point_in_polygon(const Point& p, std::span<const Point> poly);

}  // namespace gunpose
