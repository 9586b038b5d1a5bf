// Copyright 2026 The GunPose Authors
// SPDX-License-Identifier: Apache-2.0

#include "gunpose/bundle.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>

#include <fmt/format.h>

#include "gunpose/error.hpp"
#include "gunpose/ingest.hpp"

namespace fs = std::filesystem;

namespace gunpose {

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(fmt::format("cannot open '{}'", path.string()));
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<std::uint8_t> read_binary_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(fmt::format("cannot open '{}'", path.string()));
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_text_file(const fs::path& path, std::string_view text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(fmt::format("cannot write '{}'", path.string()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(fmt::format("write to '{}' failed", path.string()));
}

void write_binary_file(const fs::path& path, std::span<const std::uint8_t> bytes) {
  write_text_file(path, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

std::vector<std::string> list_stems(const fs::path& dir, const std::string& extension) {
  std::vector<std::string> out;
  if (!fs::is_directory(dir)) return out;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == extension) out.push_back(entry.path().stem().string());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> list_bundle_ids(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error(fmt::format("scene bundle '{}' is not a directory", dir.string()));
  auto ids = list_stems(dir / "labels", ".txt");
  const auto poses = list_stems(dir / "poses", ".json");
  ids.insert(ids.end(), poses.begin(), poses.end());
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

namespace {

std::optional<fs::path> find_image(const fs::path& dir, const std::string& id) {
  const fs::path images = dir / "images";
  if (!fs::is_directory(images)) return std::nullopt;
  for (const char* ext : {".ppm", ".png", ".jpg", ".jpeg", ".PPM", ".PNG", ".JPG", ".JPEG"}) {
    fs::path p = images / (id + ext);
    if (fs::is_regular_file(p)) return p;
  }
  return std::nullopt;
}

}  // namespace

Sample load_bundle_sample(const fs::path& dir, const std::string& id, const ClassMap& class_map, bool load_raster) {
  Sample sample;
  Scene& scene = sample.scene;
  scene.image_id = id;

  const auto gun_id = class_map.id_of("gun");
  const auto person_id = class_map.id_of("person");
  const fs::path label_path = dir / "labels" / (id + ".txt");
  if (fs::exists(label_path)) {
    std::vector<BBox> boxes;
    try {
      boxes = parse_yolo_labels(read_text_file(label_path), class_map);
    } catch (const ParseError& e) {
      throw ParseError(fmt::format("{}: {}", label_path.string(), e.what()), e.line());
    }
    for (BBox b : boxes) {
      if (gun_id && b.class_id == *gun_id) {
        b.class_id = kGunClass;
        scene.guns.push_back(b);
      } else if (person_id && b.class_id == *person_id) {
        b.class_id = kPersonClass;
        scene.persons.push_back(b);
      }
    }
  }

  std::optional<ImageSize> size;
  const fs::path pose_path = dir / "poses" / (id + ".json");
  if (fs::exists(pose_path)) {
    PoseDocument doc;
    try {
      doc = parse_pose_file(read_text_file(pose_path));
    } catch (const ParseError& e) {
      throw ParseError(fmt::format("{}: {}", pose_path.string(), e.what()));
    }
    scene.poses = std::move(doc.poses);
    size = ImageSize{doc.width_px, doc.height_px};
  }

  const auto image_path = find_image(dir, id);
  if (image_path) {
    const auto bytes = read_binary_file(*image_path);
    if (load_raster && image_path->extension() == ".ppm") sample.raster = read_ppm(bytes);
    if (!size) size = probe_image_size(bytes);
  }
  if (size) {
    scene.width_px = size->width;
    scene.height_px = size->height;
  }
  if (sample.raster && (sample.raster->width() != scene.width_px || sample.raster->height() != scene.height_px))
    throw Error(fmt::format("{}: image is {}x{} but the pose file says {}x{}", id, sample.raster->width(),
                            sample.raster->height(), scene.width_px, scene.height_px));
  return sample;
}

void write_bundle_sample(const fs::path& dir, const Sample& sample, const ClassMap& class_map) {
  const Scene& scene = sample.scene;
  std::vector<BBox> boxes;
  bool with_conf = false;
  auto add = [&](const std::vector<BBox>& src, const char* name) {
    if (src.empty()) return;
    const auto id = class_map.id_of(name);
    if (!id) throw Error(fmt::format("class map has no '{}' class", name));
    for (BBox b : src) {
      b.class_id = *id;
      with_conf = with_conf || b.confidence != 1.0;
      boxes.push_back(b);
    }
  };
  add(scene.guns, "gun");
  add(scene.persons, "person");
  write_text_file(dir / "labels" / (scene.image_id + ".txt"), write_yolo_labels(boxes, with_conf));
  write_text_file(dir / "poses" / (scene.image_id + ".json"),
                  write_pose_file(PoseDocument{scene.image_id, scene.width_px, scene.height_px, scene.poses}));
  if (sample.raster) write_binary_file(dir / "images" / (scene.image_id + ".ppm"), write_ppm(*sample.raster));
}

}  // namespace gunpose
