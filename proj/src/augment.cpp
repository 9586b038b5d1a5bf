// Copyright 2026 The GunPose Authors
// SPDX-License-Identifier: Apache-2.0

#include "gunpose/augment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <random>

#include <fmt/format.h>

#include "gunpose/error.hpp"
#include "gunpose/kvconfig.hpp"
#include "gunpose/parallel.hpp"

namespace gunpose {

int mirror_landmark(int index) noexcept {
  // 1..6 are the eyes (inner, center, outer), then ear, mouth corner pairs and
  // alternating left/right limb joints from the shoulders down.
  if (index >= 1 && index <= 3) return index + 3;
  if (index >= 4 && index <= 6) return index - 3;
  if (index >= 7 && index <= 32) return index % 2 == 1 ? index + 1 : index - 1;
  return index;
}

namespace {

void check_raster(const Sample& s) {
  if (s.raster && (s.raster->width() != s.scene.width_px || s.raster->height() != s.scene.height_px))
    throw Error(fmt::format("{}: raster is {}x{} but scene is {}x{}", s.scene.image_id, s.raster->width(),
                            s.raster->height(), s.scene.width_px, s.scene.height_px));
}

// sin/cos in degrees, exact at multiples of 90.
void sincos_deg(double theta, double& s, double& c) {
  double t = std::fmod(theta, 360.0);
  if (t < 0) t += 360.0;
  if (t == 0.0) s = 0.0, c = 1.0;
  else if (t == 90.0) s = 1.0, c = 0.0;
  else if (t == 180.0) s = 0.0, c = -1.0;
  else if (t == 270.0) s = -1.0, c = 0.0;
  else {
    const double r = t * std::numbers::pi / 180.0;
    s = std::sin(r);
    c = std::cos(r);
  }
}

// Maps every annotation coordinate through `point` (normalized -> normalized)
// and every box through the hull of its mapped corners.
template <typename PointMap>
Scene remap_scene(const Scene& scene, PointMap point) {
  auto map_box = [&](const BBox& b) -> std::optional<BBox> {
    double xs[4] = {b.left(), b.right(), b.left(), b.right()};
    double ys[4] = {b.top(), b.top(), b.bottom(), b.bottom()};
    for (int i = 0; i < 4; ++i) point(xs[i], ys[i]);
    const auto [x1, x2] = std::minmax_element(xs, xs + 4);
    const auto [y1, y2] = std::minmax_element(ys, ys + 4);
    return clamp_to_frame(BBox::from_corners(b.class_id, *x1, *y1, *x2, *y2, b.confidence));
  };
  auto map_boxes = [&](const std::vector<BBox>& in) {
    std::vector<BBox> out;
    for (const auto& b : in)
      if (auto m = map_box(b)) out.push_back(*m);
    return out;
  };
  Scene out = scene;
  out.guns = map_boxes(scene.guns);
  out.persons = map_boxes(scene.persons);
  for (auto& pose : out.poses) {
    for (auto& lm : pose.landmarks) point(lm.x, lm.y);
    if (pose.person_box) pose.person_box = map_box(*pose.person_box);
  }
  return out;
}

// Nearest-neighbour inverse warp: `source(u, v, sx, sy)` receives the pixel
// center of destination pixel (u, v) and writes the source position.
template <typename SourceOf>
Raster warp(const Raster& src, int workers, SourceOf source) {
  Raster dst(src.width(), src.height());
  parallel_for(src.height(), workers, [&](std::ptrdiff_t v) {
    for (int u = 0; u < src.width(); ++u) {
      double sx, sy;
      source(u + 0.5, v + 0.5, sx, sy);
      const double fx = std::floor(sx), fy = std::floor(sy);
      if (fx >= 0 && fy >= 0 && fx < src.width() && fy < src.height())
        dst.at(u, static_cast<int>(v)) = src.at(static_cast<int>(fx), static_cast<int>(fy));
    }
  });
  return dst;
}

Raster rotate_raster_impl(const Raster& src, double theta_deg, int workers) {
  double s, c;
  sincos_deg(theta_deg, s, c);
  const double hx = src.width() / 2.0, hy = src.height() / 2.0;
  return warp(src, workers, [&](double x, double y, double& sx, double& sy) {
    const double dx = x - hx, dy = y - hy;
    sx = hx + c * dx - s * dy;
    sy = hy + s * dx + c * dy;
  });
}

}  // namespace

Raster flip_raster(const Raster& src) {
  Raster dst = src;
  for (int y = 0; y < src.height(); ++y)
    for (int x = 0; x < src.width(); ++x) dst.at(x, y) = src.at(src.width() - 1 - x, y);
  return dst;
}

Sample hflip(const Sample& sample) {
  check_raster(sample);
  Sample out = sample;
  for (auto* boxes : {&out.scene.guns, &out.scene.persons})
    for (auto& b : *boxes) b.cx = 1 - b.cx;
  for (auto& pose : out.scene.poses) {
    for (auto& lm : pose.landmarks) {
      lm.x = 1 - lm.x;
      lm.index = mirror_landmark(lm.index);
    }
    if (pose.person_box) pose.person_box->cx = 1 - pose.person_box->cx;
  }
  if (out.raster) out.raster = flip_raster(*sample.raster);
  return out;
}

Raster rotate_raster_serial(const Raster& src, double theta_deg) { return rotate_raster_impl(src, theta_deg, 1); }

Raster rotate_raster(const Raster& src, double theta_deg, int workers) {
  return rotate_raster_impl(src, theta_deg, workers);
}

Sample rotate(const Sample& sample, double theta_deg, int workers) {
  check_raster(sample);
  if (std::fmod(theta_deg, 360.0) == 0.0) return sample;
  double s, c;
  sincos_deg(theta_deg, s, c);
  const double w = sample.scene.width_px, h = sample.scene.height_px;
  Sample out;
  out.scene = remap_scene(sample.scene, [&](double& x, double& y) {
    const double dx = x * w - w / 2, dy = y * h - h / 2;
    x = (w / 2 + c * dx + s * dy) / w;
    y = (h / 2 - s * dx + c * dy) / h;
  });
  if (sample.raster) out.raster = rotate_raster(*sample.raster, theta_deg, workers);
  return out;
}

Raster scale_raster(const Raster& src, double factor, int workers) {
  if (!(factor > 0.0)) throw Error(fmt::format("scale factor must be > 0 (got {})", factor));
  const double hx = src.width() / 2.0, hy = src.height() / 2.0;
  return warp(src, workers, [&](double x, double y, double& sx, double& sy) {
    sx = hx + (x - hx) / factor;
    sy = hy + (y - hy) / factor;
  });
}

Sample scale(const Sample& sample, double factor, int workers) {
  if (!(factor > 0.0)) throw Error(fmt::format("scale factor must be > 0 (got {})", factor));
  check_raster(sample);
  if (factor == 1.0) return sample;
  Sample out;
  out.scene = remap_scene(sample.scene, [&](double& x, double& y) {
    x = 0.5 + factor * (x - 0.5);
    y = 0.5 + factor * (y - 0.5);
  });
  if (sample.raster) out.raster = scale_raster(*sample.raster, factor, workers);
  return out;
}

Raster orient_raster(const Raster& src, ExifOrientation orientation) {
  const bool swap = orientation.swaps_axes();
  const int w = swap ? src.height() : src.width();
  const int h = swap ? src.width() : src.height();
  Raster dst(w, h);
  for (int y = 0; y < src.height(); ++y) {
    for (int x = 0; x < src.width(); ++x) {
      double nx = (x + 0.5) / src.width(), ny = (y + 0.5) / src.height();
      orient_point(orientation, nx, ny);
      const int dx = std::clamp(static_cast<int>(std::floor(nx * w)), 0, w - 1);
      const int dy = std::clamp(static_cast<int>(std::floor(ny * h)), 0, h - 1);
      dst.at(dx, dy) = src.at(x, y);
    }
  }
  return dst;
}

// ---------------------------------------------------------------------------
// Colour

namespace {

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(v * 255.0), 0L, 255L));
}

}  // namespace

Rgb hsv_adjust_pixel(Rgb px, double hue_delta, double sat_factor, double val_factor) noexcept {
  const double r = px.r / 255.0, g = px.g / 255.0, b = px.b / 255.0;
  const double mx = std::max({r, g, b}), mn = std::min({r, g, b});
  const double delta = mx - mn;
  double h = 0.0;
  if (delta > 0) {
    if (mx == r)
      h = (g - b) / delta;
    else if (mx == g)
      h = 2.0 + (b - r) / delta;
    else
      h = 4.0 + (r - g) / delta;
    h /= 6.0;
    if (h < 0) h += 1.0;
  }
  double s = mx > 0 ? delta / mx : 0.0;
  double v = mx;

  h = std::fmod(h + hue_delta, 1.0);
  if (h < 0) h += 1.0;
  s = std::clamp(s * sat_factor, 0.0, 1.0);
  v = std::clamp(v * val_factor, 0.0, 1.0);

  const double h6 = h * 6.0;
  const double sector = std::floor(h6);
  const double f = h6 - sector;
  const double p = v * (1 - s), q = v * (1 - s * f), t = v * (1 - s * (1 - f));
  double rr, gg, bb;
  switch (static_cast<int>(sector) % 6) {
    case 0: rr = v, gg = t, bb = p; break;
    case 1: rr = q, gg = v, bb = p; break;
    case 2: rr = p, gg = v, bb = t; break;
    case 3: rr = p, gg = q, bb = v; break;
    case 4: rr = t, gg = p, bb = v; break;
    default: rr = v, gg = p, bb = q; break;
  }
  return {to_byte(rr), to_byte(gg), to_byte(bb)};
}

Raster hsv_adjust_serial(const Raster& src, double hue_delta, double sat_factor, double val_factor) {
  if (hue_delta == 0.0 && sat_factor == 1.0 && val_factor == 1.0) return src;
  Raster dst = src;
  for (auto& px : dst.pixels()) px = hsv_adjust_pixel(px, hue_delta, sat_factor, val_factor);
  return dst;
}

Raster hsv_adjust(const Raster& src, double hue_delta, double sat_factor, double val_factor, int workers) {
  if (hue_delta == 0.0 && sat_factor == 1.0 && val_factor == 1.0) return src;
  Raster dst = src;
  auto px = dst.pixels();
  const std::ptrdiff_t rows = src.height(), w = src.width();
  parallel_for(rows, workers, [&](std::ptrdiff_t y) {
    for (std::ptrdiff_t x = 0; x < w; ++x) px[y * w + x] = hsv_adjust_pixel(px[y * w + x], hue_delta, sat_factor, val_factor);
  });
  return dst;
}

// ---------------------------------------------------------------------------
// Spec and batch

void AugmentSpec::validate() const {
  if (!(fliplr_prob >= 0.0 && fliplr_prob <= 1.0))
    throw ConfigError(fmt::format("fliplr_prob must be in [0,1] (got {})", fliplr_prob));
  if (!(degrees_max >= 0.0)) throw ConfigError(fmt::format("degrees_max must be >= 0 (got {})", degrees_max));
  if (!(scale_lo > 0.0 && scale_lo <= scale_hi))
    throw ConfigError(fmt::format("scale_range must satisfy 0 < lo <= hi (got {},{})", scale_lo, scale_hi));
  if (!(hue_delta_max >= 0.0) || !(sat_factor_max >= 0.0) || !(val_factor_max >= 0.0))
    throw ConfigError("hsv ranges must be >= 0");
}

void AugmentSpec::set(std::string_view key, std::string_view value) {
  if (key == "fliplr_prob") {
    fliplr_prob = parse_double_value(key, value);
  } else if (key == "degrees_max") {
    degrees_max = parse_double_value(key, value);
  } else if (key == "scale_range") {
    const auto comma = value.find(',');
    if (comma == std::string_view::npos) throw ConfigError("scale_range: expected 'lo,hi'");
    auto trim = [](std::string_view s) {
      while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
      while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
      return s;
    };
    scale_lo = parse_double_value(key, trim(value.substr(0, comma)));
    scale_hi = parse_double_value(key, trim(value.substr(comma + 1)));
  } else if (key == "scale_lo") {
    scale_lo = parse_double_value(key, value);
  } else if (key == "scale_hi") {
    scale_hi = parse_double_value(key, value);
  } else if (key == "hue_delta_max") {
    hue_delta_max = parse_double_value(key, value);
  } else if (key == "sat_factor_max") {
    sat_factor_max = parse_double_value(key, value);
  } else if (key == "val_factor_max") {
    val_factor_max = parse_double_value(key, value);
  } else if (key == "seed") {
    std::uint64_t v = 0;
    const char* end = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(value.data(), end, v);
    if (ec != std::errc() || ptr != end) throw ConfigError(fmt::format("seed: '{}' is not a 64-bit unsigned integer", value));
    seed = v;
  } else {
    throw ConfigError(fmt::format("unknown augment key '{}'", key));
  }
}

AugmentSpec AugmentSpec::parse(std::string_view text) {
  AugmentSpec spec;
  for (const auto& kv : parse_key_values(text)) {
    try {
      spec.set(kv.key, kv.value);
    } catch (const ConfigError& e) {
      throw ConfigError(fmt::format("line {}: {}", kv.line, e.what()));
    }
  }
  spec.validate();
  return spec;
}

std::string AugmentSpec::to_text() const {
  return fmt::format(
      "fliplr_prob = {}\ndegrees_max = {}\nscale_range = {},{}\nhue_delta_max = {}\n"
      "sat_factor_max = {}\nval_factor_max = {}\nseed = {}\n",
      fliplr_prob, degrees_max, scale_lo, scale_hi, hue_delta_max, sat_factor_max, val_factor_max, seed);
}

std::string AugmentDraw::summary() const {
  return fmt::format("f{}_r{:+.2f}_x{:.3f}_h{:+.3f}_s{:.2f}_v{:.2f}", flip ? 1 : 0, theta_deg, scale, hue_delta,
                     sat_factor, val_factor);
}

AugmentDraw draw_augmentation(const AugmentSpec& spec, std::uint64_t item_index) {
  std::seed_seq seq{static_cast<std::uint32_t>(spec.seed), static_cast<std::uint32_t>(spec.seed >> 32),
                    static_cast<std::uint32_t>(item_index), static_cast<std::uint32_t>(item_index >> 32)};
  std::mt19937_64 gen(seq);
  // Explicit mapping keeps draws identical across standard libraries.
  auto unit = [&] { return static_cast<double>(gen() >> 11) * 0x1.0p-53; };
  auto symmetric = [&] { return 2.0 * unit() - 1.0; };

  const double u_flip = unit();
  const double u_theta = symmetric();
  const double u_scale = unit();
  const double u_hue = symmetric();
  const double u_sat = symmetric();
  const double u_val = symmetric();

  AugmentDraw d;
  d.flip = u_flip < spec.fliplr_prob;
  d.theta_deg = spec.degrees_max == 0.0 ? 0.0 : u_theta * spec.degrees_max;
  d.scale = spec.scale_lo == spec.scale_hi ? spec.scale_lo : spec.scale_lo + (spec.scale_hi - spec.scale_lo) * u_scale;
  d.hue_delta = spec.hue_delta_max == 0.0 ? 0.0 : u_hue * spec.hue_delta_max;
  d.sat_factor = std::max(0.0, 1.0 + u_sat * spec.sat_factor_max);
  d.val_factor = std::max(0.0, 1.0 + u_val * spec.val_factor_max);
  return d;
}

Sample apply_augmentation(const Sample& sample, const AugmentDraw& draw, int workers) {
  Sample out = draw.flip ? hflip(sample) : sample;
  out = rotate(out, draw.theta_deg, workers);
  out = scale(out, draw.scale, workers);
  if (out.raster) out.raster = hsv_adjust(*out.raster, draw.hue_delta, draw.sat_factor, draw.val_factor, workers);
  out.scene.image_id = sample.scene.image_id + "_" + draw.summary();
  return out;
}

std::vector<Sample> augment_batch_serial(std::span<const Sample> samples, const AugmentSpec& spec) {
  spec.validate();
  std::vector<Sample> out;
  out.reserve(samples.size());
  for (size_t i = 0; i < samples.size(); ++i)
    out.push_back(apply_augmentation(samples[i], draw_augmentation(spec, i), 1));
  return out;
}

std::vector<Sample> augment_batch(std::span<const Sample> samples, const AugmentSpec& spec, int workers) {
  spec.validate();
  std::vector<Sample> out(samples.size());
  // Items are the parallel unit; kernels inside stay single-threaded.
  parallel_for(static_cast<std::ptrdiff_t>(samples.size()), workers, [&](std::ptrdiff_t i) {
    out[i] = apply_augmentation(samples[i], draw_augmentation(spec, static_cast<std::uint64_t>(i)), 1);
  });
  return out;
}

}  // namespace gunpose
