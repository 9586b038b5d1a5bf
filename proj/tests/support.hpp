// Copyright 2026 The GunPose Authors
// SPDX-License-Identifier: Apache-2.0

// Shared fixtures, random generators and independent oracles for the tests.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "gunpose/augment.hpp"
#include "gunpose/eval.hpp"
#include "gunpose/geometry.hpp"
#include "gunpose/model.hpp"
#include "gunpose/threat.hpp"

namespace gunpose::harness {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi);
int uniform_int(Rng& rng, int lo, int hi);  // inclusive

// A box lying fully inside the frame.
BBox random_box(Rng& rng, int class_id = kGunClass, double min_side = 0.02, double max_side = 0.4);

// Guns with random confidences and up to three full skeletons, some with
// hands placed close to a gun so every rule fires now and then.
Scene random_threat_scene(Rng& rng, const std::string& id);

// Random raster with independent channels.
Raster random_raster(Rng& rng, int width, int height);

// --- oracles ---------------------------------------------------------------

double iou_oracle(const BBox& a, const BBox& b);
double euclidean_oracle(const Point& p, const Point& q);
double angle_oracle(const Vector& u, const Vector& v);
// Winding number around p; nonzero means inside.
int winding_number(const Point& p, std::span<const Point> poly);
// Star-shaped simple polygon around (cx, cy).
std::vector<Point> random_star_polygon(Rng& rng, int vertices);

// Greedy matching and PR integration written out from the definitions.
std::optional<double> ap_oracle(std::span<const ImageDetections> images, int class_id, double iou_min);

// --- fixtures --------------------------------------------------------------

// Gun {.5,.5,.2,.1} at confidence .9 and one pose with the left wrist at `wrist`.
Scene wrist_gun_scene(Point wrist, double gun_conf = 0.9);

// Scene i of the end-to-end bundle; even i are threats by construction.
Scene synthetic_scene(int i);
bool synthetic_is_threat(int i);

// Per-gun overlay scenes: armed person, unarmed bystander, gun on a table.
std::vector<Scene> overlay_fixture_scenes();

// Image sizes of the golden VIA project, keyed by filename.
const std::map<std::string, std::pair<int, int>>& golden_via_sizes();
std::filesystem::path test_data_dir();

// --- filesystem ------------------------------------------------------------

// Fresh empty directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& name);
// Relative path -> file bytes for every regular file below `root`.
std::map<std::string, std::string> read_tree(const std::filesystem::path& root);
void write_scene_bundle(const std::filesystem::path& dir, std::span<const Scene> scenes, bool with_images);

}  // namespace gunpose::harness
