// Copyright 2026 The GunPose Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gunpose/geometry.hpp"
#include "gunpose/model.hpp"

namespace gunpose {

enum class Rule { kProximity, kOverlap, kAim, kZone };
inline constexpr Rule kAllRules[] = {Rule::kProximity, Rule::kOverlap, Rule::kAim, Rule::kZone};

std::string_view rule_name(Rule rule) noexcept;
std::optional<Rule> rule_from_name(std::string_view name) noexcept;

enum class Combinator { kAny, kAll };

// MediaPipe pose indices the rules look at.
namespace landmark {
inline constexpr int kNose = 0;
inline constexpr int kLeftShoulder = 11;
inline constexpr int kRightShoulder = 12;
inline constexpr int kLeftElbow = 13;
inline constexpr int kRightElbow = 14;
inline constexpr int kLeftWrist = 15;
inline constexpr int kRightWrist = 16;
inline constexpr int kLeftHip = 23;
inline constexpr int kRightHip = 24;
// Wrists, pinkies, index fingers and thumbs.
inline constexpr int kHandSet[] = {15, 16, 17, 18, 19, 20, 21, 22};
}  // namespace landmark

struct ThreatConfig {
  double alpha = 0.5;  ///< proximity threshold = alpha * gun size
  double gun_conf_min = 0.25;
  double visibility_min = 0.5;
  double aim_angle_max_deg = 30.0;
  double head_radius_factor = 0.6;  ///< of the nose to shoulder-midpoint distance
  Combinator combinator = Combinator::kAny;
  std::vector<Rule> enabled_rules = {Rule::kProximity, Rule::kOverlap};
  SizeMode size_mode = SizeMode::kWidth;
  // Scale y by height/width before any rule geometry (off: plain normalized space).
  bool aspect_correct = false;

  bool enabled(Rule rule) const noexcept;

  // Throws ConfigError describing the first violated constraint.
  void validate() const;

  // Key-value text, one "key = value" per line, '#' comments. Unknown keys are errors.
  static ThreatConfig parse(std::string_view text);
  // Applies a single override; throws ConfigError on unknown keys or bad values.
  void set(std::string_view key, std::string_view value);
  std::string to_text() const;
};

struct RuleResult {
  Rule rule = Rule::kProximity;
  bool fired = false;
  std::map<std::string, double> evidence;
  std::vector<int> landmarks_used;

  bool operator==(const RuleResult&) const = default;
};

struct ThreatVerdict {
  int gun_index = 0;
  std::optional<int> person_index;  ///< index into Scene::poses
  bool threat = false;
  std::vector<RuleResult> rules;

  bool operator==(const ThreatVerdict&) const = default;
};

struct GunAssignment {
  int gun_index = 0;
  std::optional<int> pose_index;

  bool operator==(const GunAssignment&) const = default;
};

struct HandPoint {
  int index = 0;
  Point point;
};

// Visible hand landmarks of a pose, in landmark-list order.
std::vector<HandPoint> hand_points(const Pose& pose, const ThreatConfig& cfg);

// Pairs every gun passing the confidence gate with the pose whose nearest
// visible hand point is closest to the gun center. Ties go to the lowest pose
// index; guns with no candidate pose get no pose.
std::vector<GunAssignment> associate(const Scene& scene, const ThreatConfig& cfg);

// The rules. `y_scale` multiplies every y coordinate first (aspect correction).
RuleResult rule_proximity(const BBox& gun, const Pose& pose, const ThreatConfig& cfg,
                          double y_scale = 1.0);
RuleResult rule_overlap(const BBox& gun, const Pose& pose, const ThreatConfig& cfg,
                        double y_scale = 1.0);
RuleResult rule_aim(const BBox& gun, const Pose& pose, const ThreatConfig& cfg,
                    double y_scale = 1.0);
RuleResult rule_zone(const BBox& gun, const Pose& pose, const ThreatConfig& cfg,
                     double y_scale = 1.0);

// One verdict per gun at or above cfg.gun_conf_min, in gun order.
// Throws ConfigError before evaluating anything if cfg is invalid.
std::vector<ThreatVerdict> classify_scene(const Scene& scene, const ThreatConfig& cfg);

// classify_scene over many scenes. The OpenMP version schedules scenes
// dynamically over `workers` threads (0 = runtime default); results are
// identical to the serial reference.
std::vector<std::vector<ThreatVerdict>> classify_batch(std::span<const Scene> scenes,
                                                       const ThreatConfig& cfg, int workers = 0);
std::vector<std::vector<ThreatVerdict>> classify_batch_serial(std::span<const Scene> scenes,
                                                              const ThreatConfig& cfg);

// One JSON object per verdict, one per line.
std::string verdicts_to_jsonl(const std::string& image_id, std::span<const ThreatVerdict> verdicts);
// Parses lines produced by verdicts_to_jsonl, grouped by image id.
std::map<std::string, std::vector<ThreatVerdict>> verdicts_from_jsonl(std::string_view text);

}  // namespace gunpose
