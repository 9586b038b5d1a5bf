// Copyright 2026 The GunPose Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gunpose/model.hpp"
#include "gunpose/threat.hpp"

namespace gunpose {

inline constexpr char kThreatLabel[] = "Threat Detected!";

// MediaPipe 33-point pose connections.
const std::vector<std::pair<int, int>>& pose_connections();

struct OverlaySpec {
  bool draw_boxes = true;
  bool draw_skeleton = true;
  bool draw_labels = true;
  std::uint32_t threat_color = 0xFF0000;  ///< 0xRRGGBB
  std::uint32_t safe_color = 0x00C000;
  std::uint32_t person_color = 0x3070FF;
  std::uint32_t skeleton_color = 0xFFD000;
  double visibility_min = 0.5;  ///< both endpoints must reach this for an edge
  double stroke_width = 3.0;
  double label_height = 16.0;   ///< font size in pixels
  std::vector<std::pair<int, int>> skeleton_edges = pose_connections();
};

// SVG 1.1 overlay, width_px x height_px. Guns in index order (threat colour
// plus a "Threat Detected!" label when the verdict says so), then person
// boxes, then skeleton edges pose by pose. Throws Error for a verdict whose
// gun index is not in the scene.
std::string render_overlay(const Scene& scene, std::span<const ThreatVerdict> verdicts,
                           const OverlaySpec& spec = {});

}  // namespace gunpose
