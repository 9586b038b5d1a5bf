// Copyright 2026 The GunPose Authors
// SPDX-License-Identifier: Apache-2.0

#include "gunpose/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "gunpose/error.hpp"

namespace gunpose {

namespace {

// Corners may exceed the frame by 6-decimal label rounding.
constexpr double kCornerSlack = 1e-6;

void check_box(const BBox& b, const std::string& name, int expected_class,
               std::vector<std::string>& out) {
  auto finite = [](double v) { return std::isfinite(v); };
  const size_t before = out.size();
  if (expected_class >= 0 && b.class_id != expected_class)
    out.push_back(fmt::format("{}.class_id must be {} (got {})", name, expected_class, b.class_id));
  if (!finite(b.cx) || b.cx < 0.0 || b.cx > 1.0)
    out.push_back(fmt::format("{}.cx must be in [0,1] (got {})", name, b.cx));
  if (!finite(b.cy) || b.cy < 0.0 || b.cy > 1.0)
    out.push_back(fmt::format("{}.cy must be in [0,1] (got {})", name, b.cy));
  if (!finite(b.w) || !(b.w > 0.0))
    out.push_back(fmt::format("{}.w must be > 0", name));
  else if (b.w > 1.0)
    out.push_back(fmt::format("{}.w must be <= 1 (got {})", name, b.w));
  if (!finite(b.h) || !(b.h > 0.0))
    out.push_back(fmt::format("{}.h must be > 0", name));
  else if (b.h > 1.0)
    out.push_back(fmt::format("{}.h must be <= 1 (got {})", name, b.h));
  if (!finite(b.confidence) || b.confidence < 0.0 || b.confidence > 1.0)
    out.push_back(fmt::format("{}.confidence must be in [0,1] (got {})", name, b.confidence));
  if (out.size() == before) {
    if (b.left() < -kCornerSlack || b.top() < -kCornerSlack || b.right() > 1.0 + kCornerSlack ||
        b.bottom() > 1.0 + kCornerSlack)
      out.push_back(fmt::format("{} corners must lie in [0,1] (got [{}, {}, {}, {}])", name,
                                b.left(), b.top(), b.right(), b.bottom()));
  }
}

}  // namespace

BBox BBox::from_corners(int class_id, double x1, double y1, double x2, double y2,
                        double confidence) {
  return BBox{class_id, (x1 + x2) / 2, (y1 + y2) / 2, x2 - x1, y2 - y1, confidence};
}

std::optional<BBox> clamp_to_frame(const BBox& box) {
  if (box.left() >= 0.0 && box.top() >= 0.0 && box.right() <= 1.0 && box.bottom() <= 1.0) {
    if (box.w < kMinBoxExtent || box.h < kMinBoxExtent) return std::nullopt;
    return box;
  }
  const double x1 = std::clamp(box.left(), 0.0, 1.0);
  const double y1 = std::clamp(box.top(), 0.0, 1.0);
  const double x2 = std::clamp(box.right(), 0.0, 1.0);
  const double y2 = std::clamp(box.bottom(), 0.0, 1.0);
  if (x2 - x1 < kMinBoxExtent || y2 - y1 < kMinBoxExtent) return std::nullopt;
  return BBox::from_corners(box.class_id, x1, y1, x2, y2, box.confidence);
}

const Landmark* Pose::find(int index) const noexcept {
  for (const auto& lm : landmarks)
    if (lm.index == index) return &lm;
  return nullptr;
}

ClassMap::ClassMap() : names_{"gun", "person"} {}

ClassMap::ClassMap(std::vector<std::string> names) : names_(std::move(names)) {
  if (names_.empty()) throw ConfigError("class map must not be empty");
  std::set<std::string> seen;
  for (const auto& n : names_) {
    if (n.empty()) throw ConfigError("class map contains an empty name");
    if (!seen.insert(n).second) throw ConfigError("duplicate class name '" + n + "'");
  }
}

std::optional<int> ClassMap::id_of(std::string_view name) const {
  for (int i = 0; i < size(); ++i)
    if (names_[i] == name) return i;
  return std::nullopt;
}

const std::string& ClassMap::name_of(int id) const {
  if (!contains(id)) throw ConfigError(fmt::format("class id {} not in class map", id));
  return names_[id];
}

ClassMap ClassMap::parse(std::string_view csv) {
  std::vector<std::string> names;
  size_t start = 0;
  while (start <= csv.size()) {
    size_t end = csv.find(',', start);
    if (end == std::string_view::npos) end = csv.size();
    std::string item(csv.substr(start, end - start));
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    names.push_back(item);
    start = end + 1;
  }
  return ClassMap(std::move(names));
}

std::vector<std::string> validate_scene(const Scene& scene) {
  std::vector<std::string> out;
  if (scene.width_px <= 0)
    out.push_back(fmt::format("width_px must be > 0 (got {})", scene.width_px));
  if (scene.height_px <= 0)
    out.push_back(fmt::format("height_px must be > 0 (got {})", scene.height_px));
  for (size_t i = 0; i < scene.guns.size(); ++i)
    check_box(scene.guns[i], fmt::format("guns[{}]", i), kGunClass, out);
  for (size_t i = 0; i < scene.persons.size(); ++i)
    check_box(scene.persons[i], fmt::format("persons[{}]", i), kPersonClass, out);
  for (size_t p = 0; p < scene.poses.size(); ++p) {
    const auto& pose = scene.poses[p];
    if (pose.landmarks.size() > static_cast<size_t>(kNumPoseLandmarks))
      out.push_back(fmt::format("poses[{}] has {} landmarks (max {})", p, pose.landmarks.size(),
                                kNumPoseLandmarks));
    std::set<int> seen;
    for (size_t k = 0; k < pose.landmarks.size(); ++k) {
      const auto& lm = pose.landmarks[k];
      const auto name = fmt::format("poses[{}].landmarks[{}]", p, k);
      if (lm.index < 0 || lm.index >= kNumPoseLandmarks)
        out.push_back(fmt::format("{}.index must be in [0,32] (got {})", name, lm.index));
      if (!seen.insert(lm.index).second)
        out.push_back(fmt::format("{}.index {} is duplicated", name, lm.index));
      if (!std::isfinite(lm.x) || !std::isfinite(lm.y))
        out.push_back(fmt::format("{} position must be finite", name));
      if (!(lm.visibility >= 0.0 && lm.visibility <= 1.0))
        out.push_back(fmt::format("{}.visibility must be in [0,1] (got {})", name, lm.visibility));
    }
    if (pose.person_box)
      check_box(*pose.person_box, fmt::format("poses[{}].person_box", p), -1, out);
  }
  return out;
}

}  // namespace gunpose
