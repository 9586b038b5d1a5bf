// Copyright 2026 The GunPose Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gunpose/ingest.hpp"
#include "gunpose/model.hpp"
#include "gunpose/raster.hpp"

namespace gunpose {

// An annotated image; the raster is optional (annotation-only augmentation).
// When present its size must equal the scene's pixel dimensions.
struct Sample {
  Scene scene;
  std::optional<Raster> raster;

  bool operator==(const Sample&) const = default;
};

// MediaPipe left/right counterpart of a pose landmark (nose maps to itself).
int mirror_landmark(int index) noexcept;

// Mirrors x and exchanges left/right landmark roles.
Sample hflip(const Sample& sample);

// Rotation about the image center in pixel space, counter-clockwise on screen
// for positive angles. Boxes become the axis-aligned hull of their rotated
// corners, clamped to the frame; boxes clamped away are dropped. The raster is
// resampled nearest-neighbour with black outside the source.
Sample rotate(const Sample& sample, double theta_deg, int workers = 1);

// Zoom about the image center; factor < 1 pads with black.
// Throws Error for factor <= 0.
Sample scale(const Sample& sample, double factor, int workers = 1);

// Raster kernels. The `_serial` variants are the single-threaded references.
Raster rotate_raster(const Raster& src, double theta_deg, int workers = 0);
Raster rotate_raster_serial(const Raster& src, double theta_deg);
Raster scale_raster(const Raster& src, double factor, int workers = 0);
Raster flip_raster(const Raster& src);
// Pixel-level counterpart of apply_exif_orientation.
Raster orient_raster(const Raster& src, ExifOrientation orientation);

// Per pixel: RGB -> HSV, h = (h + hue_delta) mod 1, s and v scaled and
// clamped to [0,1], back to RGB. hue_delta is in turns.
Rgb hsv_adjust_pixel(Rgb px, double hue_delta, double sat_factor, double val_factor) noexcept;
Raster hsv_adjust(const Raster& src, double hue_delta, double sat_factor, double val_factor,
                  int workers = 0);
Raster hsv_adjust_serial(const Raster& src, double hue_delta, double sat_factor, double val_factor);

struct AugmentSpec {
  double fliplr_prob = 0.5;
  double degrees_max = 10.0;
  double scale_lo = 0.9;
  double scale_hi = 1.1;
  double hue_delta_max = 0.015;  ///< turns
  double sat_factor_max = 0.7;   ///< saturation gain drawn from 1 +- this
  double val_factor_max = 0.4;   ///< brightness gain drawn from 1 +- this
  std::uint64_t seed = 0;

  void validate() const;
  // "key = value" text; keys as the field names, plus scale_range = lo,hi.
  static AugmentSpec parse(std::string_view text);
  void set(std::string_view key, std::string_view value);
  std::string to_text() const;
};

struct AugmentDraw {
  bool flip = false;
  double theta_deg = 0.0;
  double scale = 1.0;
  double hue_delta = 0.0;
  double sat_factor = 1.0;
  double val_factor = 1.0;

  // Compact tag appended to augmented image ids.
  std::string summary() const;
};

// Deterministic draw for one item: seeded by (spec.seed, item_index) only.
AugmentDraw draw_augmentation(const AugmentSpec& spec, std::uint64_t item_index);

// flip -> rotate -> scale -> hsv. The output id is "<id>_<summary>".
Sample apply_augmentation(const Sample& sample, const AugmentDraw& draw, int workers = 1);

std::vector<Sample> augment_batch(std::span<const Sample> samples, const AugmentSpec& spec,
                                  int workers = 0);
std::vector<Sample> augment_batch_serial(std::span<const Sample> samples, const AugmentSpec& spec);

}  // namespace gunpose
