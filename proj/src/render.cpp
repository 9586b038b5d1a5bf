// Copyright 2026 The GunPose Authors
// SPDX-License-Identifier: Apache-2.0

#include "gunpose/render.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "gunpose/error.hpp"

namespace gunpose {

const std::vector<std::pair<int, int>>& pose_connections() {
  static const std::vector<std::pair<int, int>> kEdges = {
      {0, 1},   {1, 2},   {2, 3},   {3, 7},   {0, 4},   {4, 5},   {5, 6},   {6, 8},   {9, 10},
      {11, 12}, {11, 13}, {13, 15}, {15, 17}, {15, 19}, {15, 21}, {17, 19}, {12, 14}, {14, 16},
      {16, 18}, {16, 20}, {16, 22}, {18, 20}, {11, 23}, {12, 24}, {23, 24}, {23, 25}, {24, 26},
      {25, 27}, {26, 28}, {27, 29}, {28, 30}, {29, 31}, {30, 32}, {27, 31}, {28, 32}};
  return kEdges;
}

namespace {

std::string color(std::uint32_t rgb) { return fmt::format("#{:06x}", rgb & 0xFFFFFF); }

std::string escape_xml(std::string_view s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += ch;
    }
  }
  return out;
}

void rect(std::string& out, const BBox& b, int w, int h, std::uint32_t rgb, double stroke) {
  fmt::format_to(std::back_inserter(out),
                 "  <rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"none\" "
                 "stroke=\"{}\" stroke-width=\"{:.1f}\"/>\n",
                 b.left() * w, b.top() * h, b.w * w, b.h * h, color(rgb), stroke);
}

// Liang-Barsky clip of the segment to [lo, hi_x] x [lo, hi_y]; false if nothing is left.
bool clip_segment(double& x1, double& y1, double& x2, double& y2, double lo, double hi_x, double hi_y) {
  const double dx = x2 - x1, dy = y2 - y1;
  double t0 = 0.0, t1 = 1.0;
  const double p[4] = {-dx, dx, -dy, dy};
  const double q[4] = {x1 - lo, hi_x - x1, y1 - lo, hi_y - y1};
  for (int i = 0; i < 4; ++i) {
    if (p[i] == 0.0) {
      if (q[i] < 0.0) return false;
      continue;
    }
    const double t = q[i] / p[i];
    if (p[i] < 0.0)
      t0 = std::max(t0, t);
    else
      t1 = std::min(t1, t);
    if (t0 > t1) return false;
  }
  const double ox = x1, oy = y1;
  x1 = ox + t0 * dx, y1 = oy + t0 * dy;
  x2 = ox + t1 * dx, y2 = oy + t1 * dy;
  return true;
}

}  // namespace

std::string render_overlay(const Scene& scene, std::span<const ThreatVerdict> verdicts, const OverlaySpec& spec) {
  const int w = scene.width_px, h = scene.height_px;
  std::vector<char> threat(scene.guns.size(), 0);
  for (const auto& v : verdicts) {
    if (v.gun_index < 0 || v.gun_index >= static_cast<int>(scene.guns.size()))
      throw Error(fmt::format("{}: verdict refers to gun {} but the scene has {} guns", scene.image_id, v.gun_index,
                              scene.guns.size()));
    if (v.threat) threat[v.gun_index] = 1;
  }

  std::string out;
  fmt::format_to(std::back_inserter(out),
                 "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
                 "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{}\" height=\"{}\" "
                 "viewBox=\"0 0 {} {}\">\n"
                 "  <title>{}</title>\n",
                 w, h, w, h, escape_xml(scene.image_id));

  for (size_t g = 0; g < scene.guns.size(); ++g) {
    const BBox& b = scene.guns[g];
    if (spec.draw_boxes) rect(out, b, w, h, threat[g] ? spec.threat_color : spec.safe_color, spec.stroke_width);
    if (threat[g] && spec.draw_labels) {
      // Above the box, or just inside it when the box touches the top edge.
      double y = b.top() * h - 4.0;
      if (y < spec.label_height) y = b.top() * h + spec.label_height;
      fmt::format_to(std::back_inserter(out),
                     "  <text x=\"{:.2f}\" y=\"{:.2f}\" fill=\"{}\" font-family=\"sans-serif\" "
                     "font-size=\"{:.0f}\" font-weight=\"bold\">{}</text>\n",
                     b.left() * w, y, color(spec.threat_color), spec.label_height, kThreatLabel);
    }
  }
  if (spec.draw_boxes)
    for (const auto& b : scene.persons) rect(out, b, w, h, spec.person_color, spec.stroke_width);

  if (spec.draw_skeleton) {
    for (const auto& pose : scene.poses) {
      for (const auto& [a, b] : spec.skeleton_edges) {
        const Landmark* la = pose.find(a);
        const Landmark* lb = pose.find(b);
        if (!la || !lb || la->visibility < spec.visibility_min || lb->visibility < spec.visibility_min) continue;
        // Off-frame joints are legal; keep the drawing inside the padded viewbox.
        double x1 = la->x * w, y1 = la->y * h, x2 = lb->x * w, y2 = lb->y * h;
        const double pad = spec.label_height;
        if (!clip_segment(x1, y1, x2, y2, -pad, w + pad, h + pad)) continue;
        fmt::format_to(std::back_inserter(out),
                       "  <line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"{}\" "
                       "stroke-width=\"{:.1f}\"/>\n",
                       x1, y1, x2, y2, color(spec.skeleton_color), spec.stroke_width * 0.75);
      }
    }
  }
  out += "</svg>\n";
  return out;
}

}  // namespace gunpose
