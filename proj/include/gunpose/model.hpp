// Copyright 2026 The GunPose Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gunpose {

// Coordinates everywhere are normalized to [0,1], origin top-left, y down.
// Pixel coordinates only appear at file-format boundaries.

inline constexpr int kGunClass = 0;
inline constexpr int kPersonClass = 1;
inline constexpr int kNumPoseLandmarks = 33;

// Boxes whose clamped width or height is below this are dropped.
inline constexpr double kMinBoxExtent = 1e-6;

struct BBox {
  int class_id = kGunClass;
  double cx = 0.0;
  double cy = 0.0;
  double w = 0.0;
  double h = 0.0;
  double confidence = 1.0;  ///< 1.0 for ground truth

  double left() const noexcept { return cx - w / 2; }
  double right() const noexcept { return cx + w / 2; }
  double top() const noexcept { return cy - h / 2; }
  double bottom() const noexcept { return cy + h / 2; }
  double area() const noexcept { return w * h; }

  static BBox from_corners(int class_id, double x1, double y1, double x2, double y2,
                           double confidence = 1.0);

  bool operator==(const BBox&) const = default;
};

// Clamps the box corners to the frame. Returns nullopt if the clamped box is
// thinner than kMinBoxExtent in either direction.
std::optional<BBox> clamp_to_frame(const BBox& box);

// MediaPipe pose topology: index in [0,32].
struct Landmark {
  int index = 0;
  double x = 0.0;
  double y = 0.0;
  double visibility = 0.0;

  bool operator==(const Landmark&) const = default;
};

// Sparse skeleton; undetected joints are simply absent.
struct Pose {
  std::vector<Landmark> landmarks;
  std::optional<BBox> person_box;

  const Landmark* find(int index) const noexcept;

  bool operator==(const Pose&) const = default;
};

struct Scene {
  std::string image_id;
  int width_px = 640;
  int height_px = 640;
  std::vector<BBox> guns;
  std::vector<BBox> persons;
  std::vector<Pose> poses;

  bool operator==(const Scene&) const = default;
};

class ClassMap {
 public:
  ClassMap();  // {"gun", "person"}
  explicit ClassMap(std::vector<std::string> names);

  std::optional<int> id_of(std::string_view name) const;
  const std::string& name_of(int id) const;
  bool contains(int id) const noexcept { return id >= 0 && id < size(); }
  int size() const noexcept { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& names() const noexcept { return names_; }

  // Parses a comma separated list such as "gun,person".
  static ClassMap parse(std::string_view csv);

 private:
  std::vector<std::string> names_;
};

// Reports every violated invariant; an empty result means the scene is valid.
std::vector<std::string> validate_scene(const Scene& scene);

}  // namespace gunpose
