// Copyright 2026 The GunPose Authors
// SPDX-License-Identifier: Apache-2.0

#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>

#include <unistd.h>

#include <fmt/format.h>

#include "gunpose/bundle.hpp"

namespace fs = std::filesystem;

namespace gunpose::harness {

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

BBox random_box(Rng& rng, int class_id, double min_side, double max_side) {
  BBox b;
  b.class_id = class_id;
  b.w = uniform(rng, min_side, max_side);
  b.h = uniform(rng, min_side, max_side);
  b.cx = uniform(rng, b.w / 2, 1 - b.w / 2);
  b.cy = uniform(rng, b.h / 2, 1 - b.h / 2);
  b.confidence = 1.0;
  return b;
}

namespace {

// Upright skeleton offsets (x, y) from the hip midpoint, in units of body height.
// Person faces the camera, so the left side is at larger x.
const std::pair<double, double> kSkeleton[kNumPoseLandmarks] = {
    {0.00, -0.85},                                                  // nose
    {0.02, -0.88},  {0.03, -0.88},  {0.04, -0.88},                  // left eye
    {-0.02, -0.88}, {-0.03, -0.88}, {-0.04, -0.88},                 // right eye
    {0.06, -0.86},  {-0.06, -0.86},                                 // ears
    {0.02, -0.81},  {-0.02, -0.81},                                 // mouth
    {0.12, -0.70},  {-0.12, -0.70},                                 // shoulders
    {0.16, -0.45},  {-0.16, -0.45},                                 // elbows
    {0.18, -0.22},  {-0.18, -0.22},                                 // wrists
    {0.19, -0.18},  {-0.19, -0.18},                                 // pinkies
    {0.18, -0.17},  {-0.18, -0.17},                                 // index
    {0.16, -0.19},  {-0.16, -0.19},                                 // thumbs
    {0.08, 0.00},   {-0.08, 0.00},                                  // hips
    {0.09, 0.35},   {-0.09, 0.35},                                  // knees
    {0.09, 0.68},   {-0.09, 0.68},                                  // ankles
    {0.08, 0.71},   {-0.08, 0.71},                                  // heels
    {0.12, 0.74},   {-0.12, 0.74},                                  // foot index
};

Pose standing_pose(double hip_x, double hip_y, double height, double visibility) {
  Pose pose;
  for (int i = 0; i < kNumPoseLandmarks; ++i)
    pose.landmarks.push_back({i, hip_x + kSkeleton[i].first * height, hip_y + kSkeleton[i].second * height,
                              visibility});
  pose.person_box = BBox::from_corners(kPersonClass, hip_x - 0.22 * height, hip_y - 0.95 * height,
                                       hip_x + 0.22 * height, hip_y + 0.76 * height, 0.9);
  if (auto c = clamp_to_frame(*pose.person_box)) pose.person_box = c;
  return pose;
}

// Moves one arm (wrist plus the three finger points) so the wrist lands on `target`.
void move_hand(Pose& pose, int wrist, Point target) {
  const int fingers[2][3] = {{17, 19, 21}, {18, 20, 22}};
  const auto* w = pose.find(wrist);
  const double dx = target.x - w->x, dy = target.y - w->y;
  const int side = wrist == landmark::kLeftWrist ? 0 : 1;
  const int elbow = wrist == landmark::kLeftWrist ? landmark::kLeftElbow : landmark::kRightElbow;
  for (auto& lm : pose.landmarks) {
    const bool finger = std::find(std::begin(fingers[side]), std::end(fingers[side]), lm.index) != std::end(fingers[side]);
    if (lm.index == wrist || finger) {
      lm.x += dx;
      lm.y += dy;
    } else if (lm.index == elbow) {
      lm.x += dx / 2;
      lm.y += dy / 2;
    }
  }
}

}  // namespace

Scene random_threat_scene(Rng& rng, const std::string& id) {
  Scene s;
  s.image_id = id;
  s.width_px = 640;
  s.height_px = 640;
  const int n_guns = uniform_int(rng, 0, 3);
  for (int g = 0; g < n_guns; ++g) {
    BBox b = random_box(rng, kGunClass, 0.03, 0.25);
    b.confidence = uniform(rng, 0.0, 1.0);
    s.guns.push_back(b);
  }
  const int n_poses = uniform_int(rng, 0, 3);
  for (int p = 0; p < n_poses; ++p) {
    Pose pose;
    const double ax = uniform(rng, 0.1, 0.9), ay = uniform(rng, 0.1, 0.9);
    for (int i = 0; i < kNumPoseLandmarks; ++i) {
      if (uniform(rng, 0, 1) < 0.15) continue;  // sparse skeletons
      pose.landmarks.push_back({i, ax + uniform(rng, -0.3, 0.3), ay + uniform(rng, -0.3, 0.3), uniform(rng, 0, 1)});
    }
    // Drag a hand onto a gun half of the time.
    if (!s.guns.empty() && uniform(rng, 0, 1) < 0.5) {
      const BBox& g = s.guns[uniform_int(rng, 0, n_guns - 1)];
      for (auto& lm : pose.landmarks)
        if (lm.index >= 15 && lm.index <= 22 && uniform(rng, 0, 1) < 0.5) {
          lm.x = g.cx + uniform(rng, -0.7, 0.7) * g.w;
          lm.y = g.cy + uniform(rng, -0.7, 0.7) * g.h;
        }
    }
    s.persons.push_back(random_box(rng, kPersonClass, 0.1, 0.6));
    s.poses.push_back(std::move(pose));
  }
  return s;
}

Raster random_raster(Rng& rng, int width, int height) {
  Raster r(width, height);
  for (auto& px : r.pixels()) {
    const auto v = rng();
    px = {static_cast<std::uint8_t>(v), static_cast<std::uint8_t>(v >> 8), static_cast<std::uint8_t>(v >> 16)};
  }
  return r;
}

// ---------------------------------------------------------------------------

double iou_oracle(const BBox& a, const BBox& b) {
  auto overlap = [](double ca, double wa, double cb, double wb) {
    return std::max(0.0, std::min({wa, wb, (wa + wb) / 2 - std::abs(ca - cb)}));
  };
  const double inter = overlap(a.cx, a.w, b.cx, b.w) * overlap(a.cy, a.h, b.cy, b.h);
  return inter / (a.w * a.h + b.w * b.h - inter);
}

double euclidean_oracle(const Point& p, const Point& q) { return std::hypot(p.x - q.x, p.y - q.y); }

double angle_oracle(const Vector& u, const Vector& v) {
  double d = std::abs(std::atan2(u.dy, u.dx) - std::atan2(v.dy, v.dx));
  if (d > std::numbers::pi) d = 2 * std::numbers::pi - d;
  return d * 180.0 / std::numbers::pi;
}

int winding_number(const Point& p, std::span<const Point> poly) {
  auto is_left = [](const Point& a, const Point& b, const Point& c) {
    return (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
  };
  int wn = 0;
  for (size_t i = 0; i < poly.size(); ++i) {
    const Point& a = poly[i];
    const Point& b = poly[(i + 1) % poly.size()];
    if (a.y <= p.y) {
      if (b.y > p.y && is_left(a, b, p) > 0) ++wn;
    } else if (b.y <= p.y && is_left(a, b, p) < 0) {
      --wn;
    }
  }
  return wn;
}

std::vector<Point> random_star_polygon(Rng& rng, int vertices) {
  std::vector<double> angles(vertices);
  for (auto& a : angles) a = uniform(rng, 0, 2 * std::numbers::pi);
  std::sort(angles.begin(), angles.end());
  const double cx = uniform(rng, 0.3, 0.7), cy = uniform(rng, 0.3, 0.7);
  std::vector<Point> poly;
  for (double a : angles) {
    const double r = uniform(rng, 0.05, 0.3);
    poly.push_back({cx + r * std::cos(a), cy + r * std::sin(a)});
  }
  return poly;
}

std::optional<double> ap_oracle(std::span<const ImageDetections> images, int class_id, double iou_min) {
  struct Hit {
    double conf;
    bool tp;
  };
  std::vector<Hit> hits;
  int num_gt = 0;
  for (const auto& img : images) {
    std::vector<BBox> preds, gts;
    for (const auto& b : img.predictions)
      if (b.class_id == class_id) preds.push_back(b);
    for (const auto& b : img.ground_truth)
      if (b.class_id == class_id) gts.push_back(b);
    num_gt += static_cast<int>(gts.size());
    // Selection by repeated scan for the highest remaining confidence.
    std::vector<bool> used_pred(preds.size()), used_gt(gts.size());
    for (size_t round = 0; round < preds.size(); ++round) {
      size_t best = preds.size();
      for (size_t i = 0; i < preds.size(); ++i)
        if (!used_pred[i] && (best == preds.size() || preds[i].confidence > preds[best].confidence)) best = i;
      used_pred[best] = true;
      int match = -1;
      double match_iou = -1;
      for (size_t g = 0; g < gts.size(); ++g) {
        if (used_gt[g]) continue;
        const double o = iou(preds[best], gts[g]);
        if (o >= iou_min && o > match_iou) match = static_cast<int>(g), match_iou = o;
      }
      if (match >= 0) used_gt[match] = true;
      hits.push_back({preds[best].confidence, match >= 0});
    }
  }
  if (num_gt == 0) return std::nullopt;
  std::stable_sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) { return a.conf > b.conf; });

  // Every cutoff of the ranked list is a point on the PR curve.
  std::vector<std::pair<double, double>> curve;  // (recall, precision)
  int tp = 0;
  for (size_t i = 0; i < hits.size(); ++i) {
    tp += hits[i].tp;
    curve.push_back({static_cast<double>(tp) / num_gt, static_cast<double>(tp) / static_cast<double>(i + 1)});
  }
  double sum = 0;
  for (int k = 0; k <= 100; ++k) {
    const double r = k / 100.0;
    double best = 0;
    for (const auto& [rec, prec] : curve)
      if (rec >= r) best = std::max(best, prec);
    sum += best;
  }
  return sum / 101;
}

// ---------------------------------------------------------------------------

Scene wrist_gun_scene(Point wrist, double gun_conf) {
  Scene s;
  s.image_id = "wrist_gun";
  s.guns.push_back({kGunClass, 0.5, 0.5, 0.2, 0.1, gun_conf});
  Pose pose;
  pose.landmarks.push_back({landmark::kLeftWrist, wrist.x, wrist.y, 0.9});
  s.poses.push_back(pose);
  return s;
}

bool synthetic_is_threat(int i) { return i % 2 == 0; }

Scene synthetic_scene(int i) {
  Scene s;
  s.image_id = fmt::format("scene{:02d}", i);
  s.width_px = 640;
  s.height_px = 640;
  const double jitter = 0.01 * (i % 5);
  const double height = 0.55 + 0.02 * (i % 4);
  const double gun_conf = 0.55 + 0.04 * (i % 10);
  if (synthetic_is_threat(i)) {
    // Person holding the gun out to their right.
    Pose pose = standing_pose(0.45 + jitter, 0.5, height, 0.95);
    const Point grip{0.45 + jitter - 0.3 * height, 0.5 - 0.35 * height};
    s.guns.push_back({kGunClass, grip.x - 0.01, grip.y, 0.09, 0.05, gun_conf});
    move_hand(pose, landmark::kRightWrist, grip);
    s.persons.push_back(*pose.person_box);
    s.poses.push_back(pose);
  } else {
    // Person on the left, gun lying on a table to the right.
    Pose pose = standing_pose(0.28 + jitter, 0.5, height, 0.95);
    s.guns.push_back({kGunClass, 0.78 - jitter, 0.62, 0.1, 0.05, gun_conf});
    s.persons.push_back(*pose.person_box);
    s.poses.push_back(pose);
  }
  return s;
}

std::vector<Scene> overlay_fixture_scenes() {
  std::vector<Scene> out;
  out.push_back(synthetic_scene(0));
  out.back().image_id = "armed";
  out.push_back(synthetic_scene(1));
  out.back().image_id = "table";

  // Two people, one of them armed, plus a second gun nobody touches.
  Scene two;
  two.image_id = "two_people";
  Pose armed = standing_pose(0.3, 0.55, 0.5, 0.9);
  const Point grip{0.3 - 0.15, 0.55 - 0.175};
  two.guns.push_back({kGunClass, grip.x, grip.y, 0.08, 0.04, 0.8});
  move_hand(armed, landmark::kRightWrist, grip);
  Pose bystander = standing_pose(0.7, 0.55, 0.5, 0.9);
  two.guns.push_back({kGunClass, 0.92, 0.9, 0.08, 0.04, 0.7});
  two.persons = {*armed.person_box, *bystander.person_box};
  two.poses = {armed, bystander};
  out.push_back(two);

  // Partial detection: only the nose was found.
  Scene partial;
  partial.image_id = "partial";
  partial.guns.push_back({kGunClass, 0.5, 0.6, 0.1, 0.05, 0.9});
  Pose nose_only;
  nose_only.landmarks.push_back({landmark::kNose, 0.5, 0.3, 0.9});
  partial.poses.push_back(nose_only);
  out.push_back(partial);

  // Low-confidence gun under the gate, and an empty scene.
  Scene faint = synthetic_scene(2);
  faint.image_id = "faint";
  faint.guns[0].confidence = 0.1;
  out.push_back(faint);
  Scene empty;
  empty.image_id = "empty";
  out.push_back(empty);
  return out;
}

const std::map<std::string, std::pair<int, int>>& golden_via_sizes() {
  static const std::map<std::string, std::pair<int, int>> sizes = {
      {"cam00.ppm", {64, 48}},  {"cam01.ppm", {80, 80}},  {"cam02.ppm", {100, 60}}, {"cam03.ppm", {48, 96}},
      {"cam04.ppm", {120, 90}}, {"cam05.ppm", {64, 64}},  {"cam06.ppm", {90, 50}},  {"cam07.ppm", {72, 128}},
      {"cam08.ppm", {40, 40}},  {"cam09.ppm", {160, 90}},
  };
  return sizes;
}

fs::path test_data_dir() { return GUNPOSE_TEST_DATA_DIR; }

// ---------------------------------------------------------------------------

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("gunpose_" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::map<std::string, std::string> read_tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  if (!fs::exists(root)) return out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    out[fs::relative(e.path(), root).generic_string()] = ss.str();
  }
  return out;
}

void write_scene_bundle(const fs::path& dir, std::span<const Scene> scenes, bool with_images) {
  for (size_t i = 0; i < scenes.size(); ++i) {
    Sample s{scenes[i], std::nullopt};
    if (with_images) {
      Rng rng(1000 + i);
      s.raster = random_raster(rng, scenes[i].width_px, scenes[i].height_px);
    }
    write_bundle_sample(dir, s, ClassMap{});
  }
}

}  // namespace gunpose::harness
