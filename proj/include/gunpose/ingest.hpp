// Copyright 2026 The GunPose Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gunpose/model.hpp"

namespace gunpose {

// ---------------------------------------------------------------------------
// YOLO label files: one object per line, "class cx cy w h[ conf]".
// ---------------------------------------------------------------------------

// Throws ParseError carrying the 1-based line number of the first bad line.
std::vector<BBox> parse_yolo_labels(std::string_view text, const ClassMap& class_map = {});

// Coordinates are printed with exactly 6 decimals, LF line endings.
std::string write_yolo_labels(std::span<const BBox> boxes, bool include_conf = false);

// ---------------------------------------------------------------------------
// VGG Image Annotator 2.x project export.
// ---------------------------------------------------------------------------

struct ViaRegion {
  double x = 0.0;  ///< pixel top-left
  double y = 0.0;
  double width = 0.0;
  double height = 0.0;
  std::map<std::string, std::string> attributes;

  bool operator==(const ViaRegion&) const = default;
};

struct ViaImage {
  std::string filename;
  std::vector<ViaRegion> regions;
};

struct ViaProject {
  // Keyed by image id (filename without extension).
  std::map<std::string, ViaImage> images;
  std::vector<std::string> warnings;
};

// Accepts either a full project ({"_via_img_metadata": {...}}) or the bare
// metadata object produced by "export annotations as json". Non-rect shapes are
// skipped with a warning. Throws ParseError on malformed JSON or a region
// without shape_attributes (the message names the image).
ViaProject parse_via_project(std::string_view json_text);

// Pixel rect -> normalized box, clamped to the frame. The class name is read
// from `attributes[attribute_key]`, defaulting to "gun" when the key is absent.
// Throws Error for unknown classes, bad dimensions or a region entirely off-frame.
BBox via_to_bbox(const ViaRegion& region, int width_px, int height_px,
                 const ClassMap& class_map = {}, std::string_view attribute_key = "label");

// ---------------------------------------------------------------------------
// Pose interchange:
// {"image_id": str, "width_px": int, "height_px": int,
//  "poses": [{"landmarks": [{"i": int, "x": float, "y": float, "v": float}, ...],
//             "person_box": {"cx":..,"cy":..,"w":..,"h":..}   (optional)}]}
// ---------------------------------------------------------------------------

struct PoseDocument {
  std::string image_id;
  int width_px = 0;
  int height_px = 0;
  std::vector<Pose> poses;

  bool operator==(const PoseDocument&) const = default;
};

PoseDocument parse_pose_file(std::string_view json_text);
std::string write_pose_file(const PoseDocument& doc);

// Lossless JSON form of a whole scene (doubles round-trip exactly).
std::string scene_to_json(const Scene& scene);
Scene scene_from_json(std::string_view json_text);

// ---------------------------------------------------------------------------
// Orientation and resize remapping of annotations.
// ---------------------------------------------------------------------------

class ExifOrientation {
 public:
  // Throws Error unless 1 <= code <= 8.
  explicit ExifOrientation(int code);
  int code() const noexcept { return code_; }
  // Codes 5..8 exchange the image axes.
  bool swaps_axes() const noexcept { return code_ >= 5; }

 private:
  int code_;
};

// Maps a normalized point of the stored image to the upright image.
//   1 identity            2 (1-x, y)      3 (1-x, 1-y)    4 (x, 1-y)
//   5 (y, x)              6 (1-y, x)      7 (1-y, 1-x)    8 (y, 1-x)
void orient_point(ExifOrientation orientation, double& x, double& y) noexcept;

Scene apply_exif_orientation(const Scene& scene, ExifOrientation orientation);

// Stretch resize leaves every normalized coordinate untouched; only the
// pixel dimensions change. Throws Error for non-positive dimensions.
Scene stretch_resize_remap(const Scene& scene, int new_width_px, int new_height_px);

// ---------------------------------------------------------------------------
// Image header probing (no pixel decoding).
// ---------------------------------------------------------------------------

struct ImageSize {
  int width = 0;
  int height = 0;
};

// PPM (P6/P3), PNG and baseline/progressive JPEG. nullopt if unrecognized.
std::optional<ImageSize> probe_image_size(std::span<const std::uint8_t> bytes);

// EXIF orientation tag of a JPEG's APP1 segment, nullopt if absent.
std::optional<int> read_jpeg_exif_orientation(std::span<const std::uint8_t> bytes);

}  // namespace gunpose
