// Copyright 2026 The GunPose Authors
// SPDX-License-Identifier: Apache-2.0

#include "gunpose/raster.hpp"

#include <cctype>
#include <cstring>

#include <fmt/format.h>

#include "gunpose/error.hpp"

namespace gunpose {

Raster::Raster(int width, int height, Rgb fill) : width_(width), height_(height) {
  if (width <= 0 || height <= 0) throw Error(fmt::format("raster dimensions must be positive (got {}x{})", width, height));
  pixels_.assign(static_cast<size_t>(width) * height, fill);
}

Raster read_ppm(std::span<const std::uint8_t> b) {
  if (b.size() < 2 || b[0] != 'P' || b[1] != '6') throw ParseError("PPM: expected P6 magic");
  size_t i = 2;
  long vals[3] = {0, 0, 0};
  for (long& v : vals) {
    while (i < b.size()) {
      if (b[i] == '#') {
        while (i < b.size() && b[i] != '\n') ++i;
      } else if (std::isspace(b[i])) {
        ++i;
      } else {
        break;
      }
    }
    if (i >= b.size() || !std::isdigit(b[i])) throw ParseError("PPM: malformed header");
    while (i < b.size() && std::isdigit(b[i])) {
      v = v * 10 + (b[i++] - '0');
      if (v > (1L << 30)) throw ParseError("PPM: header value too large");
    }
  }
  if (i >= b.size() || !std::isspace(b[i])) throw ParseError("PPM: malformed header");
  ++i;  // exactly one whitespace byte precedes the raster
  if (vals[2] != 255) throw ParseError(fmt::format("PPM: only maxval 255 is supported (got {})", vals[2]));
  if (vals[0] <= 0 || vals[1] <= 0) throw ParseError("PPM: non-positive dimensions");
  Raster r(static_cast<int>(vals[0]), static_cast<int>(vals[1]));
  const size_t need = r.pixels().size() * 3;
  if (b.size() - i < need) throw ParseError("PPM: truncated pixel data");
  std::memcpy(r.pixels().data(), b.data() + i, need);
  return r;
}

std::vector<std::uint8_t> write_ppm(const Raster& raster) {
  const std::string header = fmt::format("P6\n{} {}\n255\n", raster.width(), raster.height());
  std::vector<std::uint8_t> out(header.begin(), header.end());
  const auto* px = reinterpret_cast<const std::uint8_t*>(raster.pixels().data());
  out.insert(out.end(), px, px + raster.pixels().size() * 3);
  return out;
}

}  // namespace gunpose
