// Copyright 2026 The GunPose Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>

#include "gunpose/augment.hpp"
#include "gunpose/bundle.hpp"
#include "gunpose/error.hpp"
#include "gunpose/ingest.hpp"
#include "gunpose/raster.hpp"
#include "support.hpp"

using namespace gunpose;
using gunpose::harness::Rng;
using gunpose::harness::uniform;

// ---- YOLO ----

TEST(YoloParse, SingleLine) {
  const auto boxes = parse_yolo_labels("0 0.500000 0.500000 0.200000 0.100000");
  ASSERT_EQ(boxes.size(), 1u);
  EXPECT_EQ(boxes[0], (BBox{0, 0.5, 0.5, 0.2, 0.1, 1.0}));
}

TEST(YoloParse, EmptyAndBlankLines) {
  EXPECT_TRUE(parse_yolo_labels("").empty());
  const auto b = parse_yolo_labels("\n1 0.1 0.2 0.1 0.1 0.75\r\n\n   \n0 0.5 0.5 0.2 0.2\n");
  ASSERT_EQ(b.size(), 2u);
  EXPECT_EQ(b[0].class_id, 1);
  EXPECT_EQ(b[0].confidence, 0.75);
  EXPECT_EQ(b[1].confidence, 1.0);
}

TEST(YoloParse, NegativeWidth) {
  try {
    parse_yolo_labels("0 0.5 0.5 -0.1 0.1");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 1);
    EXPECT_NE(std::string(e.what()).find("line 1"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("width"), std::string::npos);
  }
}

TEST(YoloParse, MalformedLinesNameTheLine) {
  const char* bad[] = {
      "0 0.5 0.5 0.1",          // too few
      "0 0.5 0.5 0.1 0.1 1 7",  // too many
      "0 0.5 abc 0.1 0.1",      // non-numeric
      "5 0.5 0.5 0.1 0.1",      // class outside map
      "0 1.5 0.5 0.1 0.1",      // center outside frame
      "0 0.5 0.5 0.1 0",        // zero height
      "0 0.5 0.5 0.1 0.1 1.2",  // confidence
      "0.5 0.5 0.5 0.1 0.1",    // fractional class
  };
  for (const char* line : bad) {
    const std::string text = std::string("0 0.5 0.5 0.1 0.1\n") + line + "\n";
    try {
      parse_yolo_labels(text);
      ADD_FAILURE() << "accepted: " << line;
    } catch (const ParseError& e) {
      EXPECT_EQ(e.line(), 2) << line;
    }
  }
}

TEST(YoloWrite, Format) {
  const std::vector<BBox> boxes = {{0, 0.5, 0.5, 0.2, 0.1, 1.0}};
  EXPECT_EQ(write_yolo_labels(boxes), "0 0.500000 0.500000 0.200000 0.100000\n");
  EXPECT_EQ(write_yolo_labels({}), "");
  const std::vector<BBox> scored = {{1, 0.25, 0.75, 0.5, 0.125, 0.3}};
  EXPECT_EQ(write_yolo_labels(scored, true), "1 0.250000 0.750000 0.500000 0.125000 0.300000\n");
}

TEST(YoloWrite, RoundTripWithinHalfMicro) {
  Rng rng(21);
  std::vector<BBox> boxes;
  for (int i = 0; i < 100; ++i) {
    BBox b = harness::random_box(rng, i % 2, 1e-3, 1.0);
    b.confidence = uniform(rng, 0, 1);
    boxes.push_back(b);
  }
  const auto back = parse_yolo_labels(write_yolo_labels(boxes, true));
  ASSERT_EQ(back.size(), boxes.size());
  for (size_t i = 0; i < boxes.size(); ++i) {
    EXPECT_EQ(back[i].class_id, boxes[i].class_id);
    EXPECT_LE(std::abs(back[i].cx - boxes[i].cx), 5e-7);
    EXPECT_LE(std::abs(back[i].cy - boxes[i].cy), 5e-7);
    EXPECT_LE(std::abs(back[i].w - boxes[i].w), 5e-7);
    EXPECT_LE(std::abs(back[i].h - boxes[i].h), 5e-7);
    EXPECT_LE(std::abs(back[i].confidence - boxes[i].confidence), 5e-7);
  }
}

// ---- VIA ----

namespace {
const char* kOneRect = R"({"_via_img_metadata": {"a.jpg123": {"filename": "a.jpg", "size": 123,
  "regions": [{"shape_attributes": {"name": "rect", "x": 10, "y": 20, "width": 30, "height": 40},
               "region_attributes": {"label": "gun"}}]}}})";
}

TEST(ViaParse, OneRect) {
  const auto p = parse_via_project(kOneRect);
  ASSERT_EQ(p.images.size(), 1u);
  const auto& img = p.images.at("a");
  EXPECT_EQ(img.filename, "a.jpg");
  ASSERT_EQ(img.regions.size(), 1u);
  EXPECT_EQ(img.regions[0].x, 10);
  EXPECT_EQ(img.regions[0].height, 40);
  EXPECT_EQ(img.regions[0].attributes.at("label"), "gun");
  EXPECT_TRUE(p.warnings.empty());
}

TEST(ViaParse, PolygonSkippedWithWarning) {
  const auto p = parse_via_project(R"({"_via_img_metadata": {"b": {"filename": "b.png", "regions": [
    {"shape_attributes": {"name": "polygon", "all_points_x": [1,2,3], "all_points_y": [1,5,1]}, "region_attributes": {}},
    {"shape_attributes": {"name": "rect", "x": 1, "y": 1, "width": 2, "height": 2}, "region_attributes": {}}]}}})");
  EXPECT_EQ(p.images.at("b").regions.size(), 1u);
  ASSERT_EQ(p.warnings.size(), 1u);
  EXPECT_NE(p.warnings[0].find("polygon"), std::string::npos);
}

TEST(ViaParse, EmptyMetadata) {
  EXPECT_TRUE(parse_via_project(R"({"_via_img_metadata": {}})").images.empty());
  EXPECT_TRUE(parse_via_project("{}").images.empty());
}

TEST(ViaParse, MissingShapeAttributesNamesImage) {
  try {
    parse_via_project(R"({"_via_img_metadata": {"x": {"filename": "img7.jpg", "regions": [{"region_attributes": {}}]}}})");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("img7"), std::string::npos);
  }
}

TEST(ViaParse, CheckboxAttribute) {
  const auto p = parse_via_project(R"({"_via_img_metadata": {"c": {"filename": "c.jpg", "regions": [
    {"shape_attributes": {"name": "rect", "x": 1, "y": 1, "width": 2, "height": 2},
     "region_attributes": {"label": {"person": true, "gun": false}}}]}}})");
  EXPECT_EQ(p.images.at("c").regions[0].attributes.at("label"), "person");
}

TEST(ViaToBbox, Examples) {
  ViaRegion r{10, 20, 30, 40, {{"label", "gun"}}};
  const BBox b = via_to_bbox(r, 100, 100);
  EXPECT_EQ(b.class_id, 0);
  EXPECT_DOUBLE_EQ(b.cx, 0.25);
  EXPECT_DOUBLE_EQ(b.cy, 0.4);
  EXPECT_DOUBLE_EQ(b.w, 0.3);
  EXPECT_DOUBLE_EQ(b.h, 0.4);
  EXPECT_EQ(b.confidence, 1.0);

  const BBox full = via_to_bbox({0, 0, 640, 640, {{"label", "person"}}}, 640, 640);
  EXPECT_EQ(full, (BBox{1, 0.5, 0.5, 1.0, 1.0, 1.0}));

  EXPECT_THROW(via_to_bbox({0, 0, 5, 5, {{"label", "knife"}}}, 10, 10), Error);
  EXPECT_THROW(via_to_bbox(r, 0, 100), Error);
}

TEST(ViaToBbox, MissingLabelFallsBackToGun) {
  EXPECT_EQ(via_to_bbox({0, 0, 5, 5, {}}, 10, 10).class_id, 0);
  EXPECT_EQ(via_to_bbox({0, 0, 5, 5, {{"cls", "person"}}}, 10, 10, ClassMap{}, "cls").class_id, 1);
}

TEST(ViaToBbox, ClampsOverhang) {
  const BBox b = via_to_bbox({90, 0, 20, 10, {}}, 100, 100);
  EXPECT_NEAR(b.right(), 1.0, 1e-12);
  EXPECT_NEAR(b.w, 0.1, 1e-12);
}

TEST(ViaToBbox, CommutesWithStretchResize) {
  Rng rng(22);
  for (int i = 0; i < 100; ++i) {
    const int w = harness::uniform_int(rng, 50, 2000), h = harness::uniform_int(rng, 50, 2000);
    ViaRegion r;
    r.width = uniform(rng, 1, w / 2.0);
    r.height = uniform(rng, 1, h / 2.0);
    r.x = uniform(rng, 0, w - r.width);
    r.y = uniform(rng, 0, h - r.height);
    Scene s;
    s.width_px = w;
    s.height_px = h;
    s.guns.push_back(via_to_bbox(r, w, h));
    // remap after conversion
    const BBox after = stretch_resize_remap(s, 640, 640).guns[0];
    // scale the pixel rect first, then convert
    const double sx = 640.0 / w, sy = 640.0 / h;
    const ViaRegion scaled{r.x * sx, r.y * sy, r.width * sx, r.height * sy, {}};
    const BBox before = via_to_bbox(scaled, 640, 640);
    EXPECT_NEAR(after.cx, before.cx, 1e-12);
    EXPECT_NEAR(after.cy, before.cy, 1e-12);
    EXPECT_NEAR(after.w, before.w, 1e-12);
    EXPECT_NEAR(after.h, before.h, 1e-12);
  }
}

// ---- pose interchange ----

TEST(PoseFile, TwoLandmarks) {
  const auto doc = parse_pose_file(R"({"image_id": "a", "width_px": 640, "height_px": 480, "poses": [
    {"landmarks": [{"i": 15, "x": 0.4, "y": 0.5, "v": 0.9}, {"i": 16, "x": 0.6, "y": 0.5, "v": 0.8}]}]})");
  EXPECT_EQ(doc.image_id, "a");
  EXPECT_EQ(doc.width_px, 640);
  EXPECT_EQ(doc.height_px, 480);
  ASSERT_EQ(doc.poses.size(), 1u);
  EXPECT_EQ(doc.poses[0].landmarks.size(), 2u);
}

TEST(PoseFile, Errors) {
  EXPECT_THROW(parse_pose_file(R"({"image_id": "a", "width_px": 1, "height_px": 1, "poses": [
    {"landmarks": [{"i": 40, "x": 0.4, "y": 0.5, "v": 0.9}]}]})"), ParseError);
  EXPECT_THROW(parse_pose_file(R"({"image_id": "a", "width_px": 1, "height_px": 1, "poses": [
    {"landmarks": [{"i": 3, "x": 0.4, "y": 0.5, "v": 0.9}, {"i": 3, "x": 0.1, "y": 0.5, "v": 0.9}]}]})"), ParseError);
  EXPECT_THROW(parse_pose_file(R"({"image_id": "a", "width_px": 1, "height_px": 1, "poses": [
    {"landmarks": [{"i": 3, "x": 0.4, "y": 0.5, "v": -0.1}]}]})"), ParseError);
  EXPECT_THROW(parse_pose_file("{not json"), ParseError);
}

TEST(PoseFile, EmptyPoses) {
  EXPECT_TRUE(parse_pose_file(R"({"image_id": "a", "width_px": 2, "height_px": 2, "poses": []})").poses.empty());
}

TEST(PoseFile, RoundTrip) {
  Rng rng(23);
  for (int i = 0; i < 50; ++i) {
    const Scene s = harness::random_threat_scene(rng, "rt" + std::to_string(i));
    PoseDocument doc{s.image_id, s.width_px, s.height_px, s.poses};
    if (!doc.poses.empty()) doc.poses[0].person_box = BBox{1, 0.5, 0.5, 0.3, 0.6, 0.77};
    EXPECT_EQ(parse_pose_file(write_pose_file(doc)), doc);
  }
}

TEST(SceneJson, RoundTrip) {
  Rng rng(24);
  for (int i = 0; i < 50; ++i) {
    const Scene s = harness::random_threat_scene(rng, "s" + std::to_string(i));
    EXPECT_EQ(scene_from_json(scene_to_json(s)), s);
  }
}

// ---- orientation and resize ----

namespace {
Scene one_box_scene(double cx, double cy, double w, double h) {
  Scene s;
  s.width_px = 640;
  s.height_px = 480;
  s.guns.push_back({0, cx, cy, w, h, 0.8});
  Pose p;
  p.landmarks.push_back({15, cx, cy, 0.9});
  s.poses.push_back(p);
  return s;
}
}  // namespace

TEST(Exif, Examples) {
  const Scene s = one_box_scene(0.25, 0.4, 0.1, 0.2);
  EXPECT_EQ(apply_exif_orientation(s, ExifOrientation(1)), s);
  const Scene r3 = apply_exif_orientation(s, ExifOrientation(3));
  EXPECT_DOUBLE_EQ(r3.guns[0].cx, 0.75);
  EXPECT_DOUBLE_EQ(r3.guns[0].cy, 0.6);
  EXPECT_EQ(r3.guns[0].w, 0.1);
  EXPECT_EQ(r3.guns[0].h, 0.2);
  const Scene r6 = apply_exif_orientation(s, ExifOrientation(6));
  EXPECT_EQ(r6.width_px, 480);
  EXPECT_EQ(r6.height_px, 640);
  EXPECT_DOUBLE_EQ(r6.poses[0].landmarks[0].x, 1 - 0.4);
  EXPECT_DOUBLE_EQ(r6.poses[0].landmarks[0].y, 0.25);
  EXPECT_EQ(r6.guns[0].w, 0.2);
  EXPECT_EQ(r6.guns[0].h, 0.1);
  EXPECT_THROW(ExifOrientation(0), Error);
  EXPECT_THROW(ExifOrientation(9), Error);
}

TEST(Exif, PairsComposeToIdentityOnDyadicGrid) {
  // Values on a 2^-10 grid make 1 - x exact, so compositions are exact too.
  Rng rng(25);
  for (int i = 0; i < 200; ++i) {
    auto g = [&] { return harness::uniform_int(rng, 64, 960) / 1024.0; };
    const Scene s = one_box_scene(g(), g(), 0.0625, 0.125);
    auto twice = [&](int a, int b) {
      return apply_exif_orientation(apply_exif_orientation(s, ExifOrientation(a)), ExifOrientation(b));
    };
    EXPECT_EQ(twice(3, 3), s);
    EXPECT_EQ(twice(2, 2), s);
    EXPECT_EQ(twice(4, 4), s);
    EXPECT_EQ(twice(6, 8), s);
    EXPECT_EQ(twice(8, 6), s);
    EXPECT_EQ(twice(5, 5), s);
    EXPECT_EQ(twice(7, 7), s);
  }
}

TEST(Exif, PairsComposeToIdentityWithinRounding) {
  Rng rng(26);
  for (int i = 0; i < 500; ++i) {
    Scene s = one_box_scene(uniform(rng, 0.1, 0.9), uniform(rng, 0.1, 0.9), 0.05, 0.07);
    for (auto [a, b] : {std::pair{3, 3}, {2, 2}, {4, 4}, {6, 8}, {8, 6}, {5, 5}, {7, 7}}) {
      const Scene t = apply_exif_orientation(apply_exif_orientation(s, ExifOrientation(a)), ExifOrientation(b));
      EXPECT_EQ(t.width_px, s.width_px);
      EXPECT_NEAR(t.guns[0].cx, s.guns[0].cx, 1.2e-16);
      EXPECT_NEAR(t.guns[0].cy, s.guns[0].cy, 1.2e-16);
      EXPECT_EQ(t.guns[0].w, s.guns[0].w);
      EXPECT_NEAR(t.poses[0].landmarks[0].x, s.poses[0].landmarks[0].x, 1.2e-16);
    }
  }
}

TEST(Exif, Code6MatchesPixelRemap) {
  Rng rng(27);
  const int W = 7, H = 5;
  const Raster src = harness::random_raster(rng, W, H);
  // Upright image of a sensor that stored it rotated: turn clockwise.
  Raster expect(H, W);
  for (int y = 0; y < W; ++y)
    for (int x = 0; x < H; ++x) expect.at(x, y) = src.at(y, H - 1 - x);
  EXPECT_EQ(orient_raster(src, ExifOrientation(6)), expect);

  // Pixel centers move with their pixels.
  for (int v = 0; v < H; ++v)
    for (int u = 0; u < W; ++u) {
      double x = (u + 0.5) / W, y = (v + 0.5) / H;
      orient_point(ExifOrientation(6), x, y);
      const int ou = static_cast<int>(std::floor(x * H)), ov = static_cast<int>(std::floor(y * W));
      EXPECT_EQ(expect.at(ou, ov), src.at(u, v));
    }
}

TEST(Exif, AllCodesMovePixelsWithPoints) {
  Rng rng(28);
  const int W = 6, H = 4;
  const Raster src = harness::random_raster(rng, W, H);
  for (int code = 1; code <= 8; ++code) {
    const ExifOrientation o(code);
    const Raster out = orient_raster(src, o);
    ASSERT_EQ(out.width(), o.swaps_axes() ? H : W);
    for (int v = 0; v < H; ++v)
      for (int u = 0; u < W; ++u) {
        double x = (u + 0.5) / W, y = (v + 0.5) / H;
        orient_point(o, x, y);
        EXPECT_EQ(out.at(static_cast<int>(x * out.width()), static_cast<int>(y * out.height())), src.at(u, v))
            << "code " << code;
      }
  }
}

TEST(StretchResize, NormalizedIdentity) {
  Rng rng(29);
  Scene s = harness::random_threat_scene(rng, "r");
  s.width_px = 1920;
  s.height_px = 1080;
  const Scene r = stretch_resize_remap(s, 640, 640);
  EXPECT_EQ(r.width_px, 640);
  EXPECT_EQ(r.height_px, 640);
  EXPECT_EQ(r.guns, s.guns);
  EXPECT_EQ(r.persons, s.persons);
  EXPECT_EQ(r.poses, s.poses);
  EXPECT_EQ(stretch_resize_remap(r, 640, 640), r);
  EXPECT_THROW(stretch_resize_remap(s, 0, 640), Error);
}

// ---- image headers ----

TEST(ImageProbe, PpmPngJpeg) {
  const auto ppm = write_ppm(Raster(13, 7));
  const auto size = probe_image_size(ppm);
  ASSERT_TRUE(size);
  EXPECT_EQ(size->width, 13);
  EXPECT_EQ(size->height, 7);

  std::vector<std::uint8_t> png = {0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A, 0, 0, 0, 13, 'I', 'H', 'D', 'R',
                                   0, 0, 2, 128, 0, 0, 1, 224, 8, 2, 0, 0, 0};
  const auto ps = probe_image_size(png);
  ASSERT_TRUE(ps);
  EXPECT_EQ(ps->width, 640);
  EXPECT_EQ(ps->height, 480);

  // SOI, APP1 Exif with orientation 6 (big-endian TIFF), SOF0 1024x768.
  std::vector<std::uint8_t> jpg = {0xFF, 0xD8, 0xFF, 0xE1, 0x00, 0x22, 'E', 'x', 'i', 'f', 0, 0,
                                   'M', 'M', 0, 42, 0, 0, 0, 8, 0, 1, 0x01, 0x12, 0, 3, 0, 0, 0, 1, 0, 6, 0, 0,
                                   0, 0, 0, 0, 0xFF, 0xC0, 0, 11, 8, 0x03, 0x00, 0x04, 0x00, 1, 1, 0x11, 0,
                                   0xFF, 0xD9};
  const auto js = probe_image_size(jpg);
  ASSERT_TRUE(js);
  EXPECT_EQ(js->width, 1024);
  EXPECT_EQ(js->height, 768);
  EXPECT_EQ(read_jpeg_exif_orientation(jpg), 6);
  EXPECT_EQ(read_jpeg_exif_orientation(png), std::nullopt);

  const std::vector<std::uint8_t> junk = {'h', 'e', 'l', 'l', 'o'};
  EXPECT_FALSE(probe_image_size(junk));
}

TEST(Ppm, RoundTripAndErrors) {
  Rng rng(30);
  const Raster r = harness::random_raster(rng, 9, 4);
  EXPECT_EQ(read_ppm(write_ppm(r)), r);
  const std::string p3 = "P3\n1 1\n255\n0 0 0\n";
  EXPECT_THROW(read_ppm(std::vector<std::uint8_t>(p3.begin(), p3.end())), ParseError);
  const std::string deep = "P6\n1 1\n65535\n\0\0\0\0\0\0";
  EXPECT_THROW(read_ppm(std::vector<std::uint8_t>(deep.begin(), deep.end())), ParseError);
  const std::string shortp = "P6\n2 2\n255\nabc";
  EXPECT_THROW(read_ppm(std::vector<std::uint8_t>(shortp.begin(), shortp.end())), ParseError);
}

// ---- bundles ----

TEST(Bundle, WriteLoadRoundTrip) {
  const auto dir = harness::scratch_dir("bundle_rt");
  std::vector<Scene> scenes = {harness::synthetic_scene(0), harness::synthetic_scene(1)};
  harness::write_scene_bundle(dir, scenes, true);
  EXPECT_EQ(list_bundle_ids(dir), (std::vector<std::string>{"scene00", "scene01"}));
  const Sample s = load_bundle_sample(dir, "scene00", ClassMap{}, true);
  ASSERT_TRUE(s.raster);
  EXPECT_EQ(s.raster->width(), 640);
  EXPECT_EQ(s.scene.poses, scenes[0].poses);
  ASSERT_EQ(s.scene.guns.size(), 1u);
  EXPECT_NEAR(s.scene.guns[0].cx, scenes[0].guns[0].cx, 5e-7);
  EXPECT_NEAR(s.scene.guns[0].confidence, scenes[0].guns[0].confidence, 5e-7);
  EXPECT_EQ(s.scene.persons.size(), 1u);
}

TEST(Bundle, DimensionsFallBackToImageThenDefault) {
  const auto dir = harness::scratch_dir("bundle_dims");
  write_text_file(dir / "labels" / "a.txt", "0 0.5 0.5 0.1 0.1\n");
  write_binary_file(dir / "images" / "a.ppm", write_ppm(Raster(33, 21)));
  write_text_file(dir / "labels" / "b.txt", "0 0.5 0.5 0.1 0.1\n");
  const Sample a = load_bundle_sample(dir, "a", ClassMap{}, false);
  EXPECT_EQ(a.scene.width_px, 33);
  EXPECT_EQ(a.scene.height_px, 21);
  const Sample b = load_bundle_sample(dir, "b", ClassMap{}, false);
  EXPECT_EQ(b.scene.width_px, 640);
  EXPECT_THROW(list_bundle_ids(dir / "nope"), Error);
}
