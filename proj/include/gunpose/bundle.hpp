// Copyright 2026 The GunPose Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "gunpose/augment.hpp"
#include "gunpose/model.hpp"

namespace gunpose {

// Scene bundle layout:
//   <dir>/labels/<id>.txt   YOLO labels (guns and persons, optional confidence)
//   <dir>/poses/<id>.json   pose interchange document (optional)
//   <dir>/images/<id>.<ext> image (optional; .ppm rasters are loaded for augmentation)
// Image size comes from the pose document, else the image header, else 640x640.

std::string read_text_file(const std::filesystem::path& path);
std::vector<std::uint8_t> read_binary_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);
void write_binary_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

// Sorted stems of regular files with `extension` (e.g. ".txt") in `dir`.
std::vector<std::string> list_stems(const std::filesystem::path& dir, const std::string& extension);

// Sorted union of label and pose stems. Throws Error if `dir` is not a directory.
std::vector<std::string> list_bundle_ids(const std::filesystem::path& dir);

// Throws ParseError/Error on malformed files.
Sample load_bundle_sample(const std::filesystem::path& dir, const std::string& id, const ClassMap& class_map,
                          bool load_raster);

// Writes labels (with a confidence column if any box has confidence != 1),
// the pose document, and images/<id>.ppm when a raster is present.
void write_bundle_sample(const std::filesystem::path& dir, const Sample& sample, const ClassMap& class_map);

}  // namespace gunpose
