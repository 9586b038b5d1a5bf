// Copyright 2026 The GunPose Authors
// SPDX-License-Identifier: Apache-2.0

#include "gunpose/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "gunpose/error.hpp"
#include "json.hpp"

namespace gunpose {

using ojson = nlohmann::ordered_json;

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view tok, T& out) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  const char* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::string stem_of(const std::string& filename) {
  auto slash = filename.find_last_of("/\\");
  std::string base = slash == std::string::npos ? filename : filename.substr(slash + 1);
  auto dot = base.find_last_of('.');
  return dot == std::string::npos || dot == 0 ? base : base.substr(0, dot);
}

double json_number(const ojson& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_number())
    throw ParseError(fmt::format("{}: missing numeric field '{}'", where, key));
  return it->get<double>();
}

ojson box_to_json(const BBox& b, bool with_class) {
  ojson j;
  if (with_class) j["class"] = b.class_id;
  j["cx"] = b.cx;
  j["cy"] = b.cy;
  j["w"] = b.w;
  j["h"] = b.h;
  j["conf"] = b.confidence;
  return j;
}

BBox box_from_json(const ojson& j, int default_class, const std::string& where) {
  if (!j.is_object()) throw ParseError(where + ": box must be an object");
  BBox b;
  b.class_id = j.contains("class") ? j.at("class").get<int>() : default_class;
  b.cx = json_number(j, "cx", where);
  b.cy = json_number(j, "cy", where);
  b.w = json_number(j, "w", where);
  b.h = json_number(j, "h", where);
  b.confidence = j.contains("conf") ? json_number(j, "conf", where) : 1.0;
  return b;
}

ojson pose_to_json(const Pose& pose) {
  ojson lms = ojson::array();
  for (const auto& lm : pose.landmarks)
    lms.push_back(ojson{{"i", lm.index}, {"x", lm.x}, {"y", lm.y}, {"v", lm.visibility}});
  ojson j{{"landmarks", std::move(lms)}};
  if (pose.person_box) j["person_box"] = box_to_json(*pose.person_box, false);
  return j;
}

Pose pose_from_json(const ojson& j, const std::string& where) {
  if (!j.is_object() || !j.contains("landmarks") || !j["landmarks"].is_array())
    throw ParseError(where + ": pose must be an object with a 'landmarks' array");
  Pose pose;
  std::set<int> seen;
  int k = 0;
  for (const auto& lj : j["landmarks"]) {
    const auto lw = fmt::format("{}.landmarks[{}]", where, k++);
    if (!lj.is_object() || !lj.contains("i") || !lj["i"].is_number_integer())
      throw ParseError(lw + ": missing integer field 'i'");
    Landmark lm;
    lm.index = lj["i"].get<int>();
    if (lm.index < 0 || lm.index >= kNumPoseLandmarks)
      throw ParseError(fmt::format("{}: landmark index {} outside [0,32]", lw, lm.index));
    if (!seen.insert(lm.index).second)
      throw ParseError(fmt::format("{}: duplicate landmark index {}", lw, lm.index));
    lm.x = json_number(lj, "x", lw);
    lm.y = json_number(lj, "y", lw);
    lm.visibility = json_number(lj, "v", lw);
    if (!(lm.visibility >= 0.0 && lm.visibility <= 1.0))
      throw ParseError(fmt::format("{}: visibility {} outside [0,1]", lw, lm.visibility));
    pose.landmarks.push_back(lm);
  }
  if (j.contains("person_box") && !j["person_box"].is_null())
    pose.person_box = box_from_json(j["person_box"], kPersonClass, where + ".person_box");
  return pose;
}

ojson parse_json(std::string_view text, const char* what) {
  try {
    return ojson::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(fmt::format("{}: invalid JSON: {}", what, e.what()));
  }
}

}  // namespace

// ---------------------------------------------------------------------------

std::vector<BBox> parse_yolo_labels(std::string_view text, const ClassMap& class_map) {
  std::vector<BBox> out;
  int line_no = 0;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const auto tokens = split_ws(line);
    if (tokens.empty()) continue;

    auto fail = [&](const std::string& why) {
      throw ParseError(fmt::format("line {}: {}", line_no, why), line_no);
    };
    if (tokens.size() != 5 && tokens.size() != 6)
      fail(fmt::format("expected 5 or 6 fields, got {}", tokens.size()));
    BBox b;
    if (!parse_number(tokens[0], b.class_id)) fail(fmt::format("bad class id '{}'", tokens[0]));
    if (!class_map.contains(b.class_id)) fail(fmt::format("class id {} not in class map", b.class_id));
    double vals[5] = {0, 0, 0, 0, 1.0};
    for (size_t t = 1; t < tokens.size(); ++t)
      if (!parse_number(tokens[t], vals[t - 1]) || !std::isfinite(vals[t - 1]))
        fail(fmt::format("non-numeric field '{}'", tokens[t]));
    b.cx = vals[0];
    b.cy = vals[1];
    b.w = vals[2];
    b.h = vals[3];
    b.confidence = vals[4];
    if (b.cx < 0 || b.cx > 1 || b.cy < 0 || b.cy > 1) fail("center outside [0,1]");
    if (b.w <= 0) fail(b.w < 0 ? "negative width" : "zero width");
    if (b.h <= 0) fail(b.h < 0 ? "negative height" : "zero height");
    if (b.w > 1 || b.h > 1) fail("extent greater than 1");
    if (b.confidence < 0 || b.confidence > 1) fail("confidence outside [0,1]");
    out.push_back(b);
  }
  return out;
}

std::string write_yolo_labels(std::span<const BBox> boxes, bool include_conf) {
  std::string out;
  for (const auto& b : boxes) {
    fmt::format_to(std::back_inserter(out), "{} {:.6f} {:.6f} {:.6f} {:.6f}", b.class_id, b.cx,
                   b.cy, b.w, b.h);
    if (include_conf) fmt::format_to(std::back_inserter(out), " {:.6f}", b.confidence);
    out.push_back('\n');
  }
  return out;
}

// ---------------------------------------------------------------------------

ViaProject parse_via_project(std::string_view json_text) {
  const ojson root = parse_json(json_text, "VIA project");
  if (!root.is_object()) throw ParseError("VIA project: top level must be an object");
  const ojson& meta = root.contains("_via_img_metadata") ? root["_via_img_metadata"] : root;
  if (!meta.is_object()) throw ParseError("VIA project: _via_img_metadata must be an object");

  ViaProject project;
  for (const auto& [key, entry] : meta.items()) {
    if (!entry.is_object()) throw ParseError(fmt::format("VIA image '{}': entry must be an object", key));
    ViaImage image;
    image.filename = entry.contains("filename") && entry["filename"].is_string()
                         ? entry["filename"].get<std::string>()
                         : key;
    const std::string id = stem_of(image.filename);

    // VIA 2.x stores regions as an array, 1.x as an object keyed by index.
    std::vector<const ojson*> regions;
    if (entry.contains("regions")) {
      for (const auto& r : entry["regions"]) regions.push_back(&r);
    }
    int k = 0;
    for (const ojson* rp : regions) {
      const ojson& r = *rp;
      const int region_no = k++;
      if (!r.is_object() || !r.contains("shape_attributes") || !r["shape_attributes"].is_object())
        throw ParseError(fmt::format("VIA image '{}': region {} has no shape_attributes", id, region_no));
      const ojson& shape = r["shape_attributes"];
      const std::string name = shape.value("name", std::string{});
      if (name != "rect") {
        project.warnings.push_back(fmt::format("image '{}': region {} has shape '{}', skipped", id,
                                               region_no, name.empty() ? "?" : name));
        continue;
      }
      const auto where = fmt::format("VIA image '{}' region {}", id, region_no);
      ViaRegion region;
      region.x = json_number(shape, "x", where);
      region.y = json_number(shape, "y", where);
      region.width = json_number(shape, "width", where);
      region.height = json_number(shape, "height", where);
      if (!(region.width > 0) || !(region.height > 0))
        throw ParseError(where + ": rect width and height must be > 0");
      if (region.x < 0 || region.y < 0) {
        project.warnings.push_back(where + ": negative origin clamped to 0");
        if (region.x < 0) region.width += region.x, region.x = 0;
        if (region.y < 0) region.height += region.y, region.y = 0;
        if (region.width <= 0 || region.height <= 0) {
          project.warnings.push_back(where + ": region entirely outside the image, skipped");
          continue;
        }
      }
      if (r.contains("region_attributes") && r["region_attributes"].is_object()) {
        for (const auto& [ak, av] : r["region_attributes"].items()) {
          if (av.is_string())
            region.attributes[ak] = av.get<std::string>();
          else if (av.is_object()) {
            // Checkbox attributes: {"gun": true}
            for (const auto& [ok, ov] : av.items())
              if (ov.is_boolean() && ov.get<bool>()) region.attributes[ak] = ok;
          } else if (!av.is_null()) {
            region.attributes[ak] = av.dump();
          }
        }
      }
      image.regions.push_back(std::move(region));
    }
    if (project.images.count(id))
      throw ParseError(fmt::format("VIA project: image id '{}' appears twice", id));
    project.images.emplace(id, std::move(image));
  }
  return project;
}

BBox via_to_bbox(const ViaRegion& region, int width_px, int height_px, const ClassMap& class_map,
                 std::string_view attribute_key) {
  if (width_px <= 0 || height_px <= 0)
    throw Error(fmt::format("image dimensions must be positive (got {}x{})", width_px, height_px));
  std::string label = "gun";
  if (auto it = region.attributes.find(std::string(attribute_key)); it != region.attributes.end())
    label = it->second;
  const auto cls = class_map.id_of(label);
  if (!cls) throw Error(fmt::format("unknown class '{}'", label));
  BBox b;
  b.class_id = *cls;
  b.cx = (region.x + region.width / 2) / width_px;
  b.cy = (region.y + region.height / 2) / height_px;
  b.w = region.width / width_px;
  b.h = region.height / height_px;
  b.confidence = 1.0;
  auto clamped = clamp_to_frame(b);
  if (!clamped) throw Error("region lies outside the image");
  return *clamped;
}

// ---------------------------------------------------------------------------

PoseDocument parse_pose_file(std::string_view json_text) {
  const ojson root = parse_json(json_text, "pose file");
  if (!root.is_object()) throw ParseError("pose file: top level must be an object");
  PoseDocument doc;
  if (root.contains("image_id")) {
    if (!root["image_id"].is_string()) throw ParseError("pose file: image_id must be a string");
    doc.image_id = root["image_id"].get<std::string>();
  }
  for (const char* key : {"width_px", "height_px"}) {
    if (!root.contains(key) || !root[key].is_number_integer() || root[key].get<long long>() <= 0)
      throw ParseError(fmt::format("pose file: '{}' must be a positive integer", key));
  }
  doc.width_px = root["width_px"].get<int>();
  doc.height_px = root["height_px"].get<int>();
  if (!root.contains("poses") || !root["poses"].is_array())
    throw ParseError("pose file: missing 'poses' array");
  int p = 0;
  for (const auto& pj : root["poses"]) doc.poses.push_back(pose_from_json(pj, fmt::format("poses[{}]", p++)));
  return doc;
}

std::string write_pose_file(const PoseDocument& doc) {
  ojson poses = ojson::array();
  for (const auto& pose : doc.poses) poses.push_back(pose_to_json(pose));
  ojson root{{"image_id", doc.image_id},
             {"width_px", doc.width_px},
             {"height_px", doc.height_px},
             {"poses", std::move(poses)}};
  return root.dump(1) + "\n";
}

std::string scene_to_json(const Scene& scene) {
  ojson guns = ojson::array(), persons = ojson::array(), poses = ojson::array();
  for (const auto& b : scene.guns) guns.push_back(box_to_json(b, true));
  for (const auto& b : scene.persons) persons.push_back(box_to_json(b, true));
  for (const auto& p : scene.poses) poses.push_back(pose_to_json(p));
  ojson root{{"image_id", scene.image_id},   {"width_px", scene.width_px},
             {"height_px", scene.height_px}, {"guns", std::move(guns)},
             {"persons", std::move(persons)}, {"poses", std::move(poses)}};
  return root.dump();
}

Scene scene_from_json(std::string_view json_text) {
  const ojson root = parse_json(json_text, "scene");
  if (!root.is_object()) throw ParseError("scene: top level must be an object");
  Scene s;
  try {
    s.image_id = root.at("image_id").get<std::string>();
    s.width_px = root.at("width_px").get<int>();
    s.height_px = root.at("height_px").get<int>();
    int i = 0;
    for (const auto& b : root.at("guns")) s.guns.push_back(box_from_json(b, kGunClass, fmt::format("guns[{}]", i++)));
    i = 0;
    for (const auto& b : root.at("persons"))
      s.persons.push_back(box_from_json(b, kPersonClass, fmt::format("persons[{}]", i++)));
    i = 0;
    for (const auto& p : root.at("poses")) s.poses.push_back(pose_from_json(p, fmt::format("poses[{}]", i++)));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(fmt::format("scene: {}", e.what()));
  }
  return s;
}

// ---------------------------------------------------------------------------

ExifOrientation::ExifOrientation(int code) : code_(code) {
  if (code < 1 || code > 8) throw Error(fmt::format("EXIF orientation must be in 1..8 (got {})", code));
}

void orient_point(ExifOrientation orientation, double& x, double& y) noexcept {
  const double ox = x, oy = y;
  switch (orientation.code()) {
    case 1: break;
    case 2: x = 1 - ox; break;
    case 3: x = 1 - ox; y = 1 - oy; break;
    case 4: y = 1 - oy; break;
    case 5: x = oy; y = ox; break;
    case 6: x = 1 - oy; y = ox; break;
    case 7: x = 1 - oy; y = 1 - ox; break;
    case 8: x = oy; y = 1 - ox; break;
  }
}

namespace {
BBox orient_box(ExifOrientation o, BBox b) {
  orient_point(o, b.cx, b.cy);
  if (o.swaps_axes()) std::swap(b.w, b.h);
  return b;
}
}  // namespace

Scene apply_exif_orientation(const Scene& scene, ExifOrientation orientation) {
  if (orientation.code() == 1) return scene;
  Scene out = scene;
  if (orientation.swaps_axes()) std::swap(out.width_px, out.height_px);
  for (auto& b : out.guns) b = orient_box(orientation, b);
  for (auto& b : out.persons) b = orient_box(orientation, b);
  for (auto& pose : out.poses) {
    for (auto& lm : pose.landmarks) orient_point(orientation, lm.x, lm.y);
    if (pose.person_box) pose.person_box = orient_box(orientation, *pose.person_box);
  }
  return out;
}

Scene stretch_resize_remap(const Scene& scene, int new_width_px, int new_height_px) {
  if (new_width_px <= 0 || new_height_px <= 0)
    throw Error(fmt::format("resize dimensions must be positive (got {}x{})", new_width_px, new_height_px));
  Scene out = scene;
  out.width_px = new_width_px;
  out.height_px = new_height_px;
  return out;
}

// ---------------------------------------------------------------------------

namespace {

std::uint32_t be32(std::span<const std::uint8_t> b, size_t at) {
  return (std::uint32_t{b[at]} << 24) | (std::uint32_t{b[at + 1]} << 16) |
         (std::uint32_t{b[at + 2]} << 8) | std::uint32_t{b[at + 3]};
}

std::uint16_t be16(std::span<const std::uint8_t> b, size_t at) {
  return static_cast<std::uint16_t>((b[at] << 8) | b[at + 1]);
}

std::optional<ImageSize> probe_ppm(std::span<const std::uint8_t> b) {
  size_t i = 2;
  int vals[2] = {0, 0};
  for (int& v : vals) {
    while (i < b.size()) {
      if (b[i] == '#') {
        while (i < b.size() && b[i] != '\n') ++i;
      } else if (std::isspace(b[i])) {
        ++i;
      } else {
        break;
      }
    }
    if (i >= b.size() || !std::isdigit(b[i])) return std::nullopt;
    while (i < b.size() && std::isdigit(b[i])) v = v * 10 + (b[i++] - '0');
  }
  if (vals[0] <= 0 || vals[1] <= 0) return std::nullopt;
  return ImageSize{vals[0], vals[1]};
}

// Iterates JPEG marker segments; `visit(marker, payload_offset, payload_len)`
// returns true to stop.
template <typename Visit>
void walk_jpeg(std::span<const std::uint8_t> b, Visit visit) {
  size_t i = 2;
  while (i + 4 <= b.size()) {
    if (b[i] != 0xFF) return;
    const std::uint8_t marker = b[i + 1];
    if (marker == 0xFF) {
      ++i;
      continue;
    }
    if (marker == 0xD8 || (marker >= 0xD0 && marker <= 0xD7) || marker == 0x01) {
      i += 2;
      continue;
    }
    if (marker == 0xD9 || marker == 0xDA) return;
    const size_t len = be16(b, i + 2);
    if (len < 2 || i + 2 + len > b.size()) return;
    if (visit(marker, i + 4, len - 2)) return;
    i += 2 + len;
  }
}

}  // namespace

std::optional<ImageSize> probe_image_size(std::span<const std::uint8_t> b) {
  if (b.size() >= 3 && b[0] == 'P' && (b[1] == '6' || b[1] == '3')) return probe_ppm(b);
  static constexpr std::uint8_t kPng[8] = {0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};
  if (b.size() >= 24 && std::equal(kPng, kPng + 8, b.begin())) {
    const auto w = be32(b, 16), h = be32(b, 20);
    if (w == 0 || h == 0 || w > 1u << 30 || h > 1u << 30) return std::nullopt;
    return ImageSize{static_cast<int>(w), static_cast<int>(h)};
  }
  if (b.size() >= 4 && b[0] == 0xFF && b[1] == 0xD8) {
    std::optional<ImageSize> size;
    walk_jpeg(b, [&](std::uint8_t m, size_t at, size_t len) {
      const bool sof = m >= 0xC0 && m <= 0xCF && m != 0xC4 && m != 0xC8 && m != 0xCC;
      if (sof && len >= 5) {
        const int h = be16(b, at + 1), w = be16(b, at + 3);
        if (w > 0 && h > 0) size = ImageSize{w, h};
        return true;
      }
      return false;
    });
    return size;
  }
  return std::nullopt;
}

std::optional<int> read_jpeg_exif_orientation(std::span<const std::uint8_t> b) {
  if (b.size() < 4 || b[0] != 0xFF || b[1] != 0xD8) return std::nullopt;
  std::optional<int> result;
  walk_jpeg(b, [&](std::uint8_t m, size_t at, size_t len) {
    static constexpr char kExif[6] = {'E', 'x', 'i', 'f', 0, 0};
    if (m != 0xE1 || len < 14 || !std::equal(kExif, kExif + 6, b.begin() + at)) return false;
    const auto tiff = b.subspan(at + 6, len - 6);
    bool little;
    if (tiff[0] == 'I' && tiff[1] == 'I')
      little = true;
    else if (tiff[0] == 'M' && tiff[1] == 'M')
      little = false;
    else
      return true;
    auto u16 = [&](size_t o) -> std::uint32_t {
      return little ? (tiff[o] | (tiff[o + 1] << 8)) : ((tiff[o] << 8) | tiff[o + 1]);
    };
    auto u32 = [&](size_t o) -> std::uint32_t {
      return little ? (u16(o) | (u16(o + 2) << 16)) : ((u16(o) << 16) | u16(o + 2));
    };
    const std::uint32_t ifd = u32(4);
    if (ifd + 2 > tiff.size()) return true;
    const std::uint32_t count = u16(ifd);
    for (std::uint32_t e = 0; e < count; ++e) {
      const size_t entry = ifd + 2 + 12 * size_t{e};
      if (entry + 12 > tiff.size()) break;
      if (u16(entry) == 0x0112) {
        const int v = static_cast<int>(u16(entry + 8));
        if (v >= 1 && v <= 8) result = v;
        break;
      }
    }
    return true;
  });
  return result;
}

}  // namespace gunpose
