// Copyright 2026 The attrib-sanity Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ATTRIB_PNG_H_
#define ATTRIB_PNG_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "attrib/bytes.h"

namespace attrib {

using Rgb = std::array<std::uint8_t, 3>;

// 8-bit RGB image, row-major, 3 bytes per pixel.
class Raster {
 public:
  Raster() = default;
  Raster(std::size_t width, std::size_t height, Rgb fill = {0, 0, 0});

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  const std::vector<std::uint8_t>& pixels() const { return pixels_; }

  std::uint8_t* at(std::size_t x, std::size_t y) {
    return &pixels_[(y * width_ + x) * 3];
  }
  const std::uint8_t* at(std::size_t x, std::size_t y) const {
    return &pixels_[(y * width_ + x) * 3];
  }
  Rgb Get(std::size_t x, std::size_t y) const {
    const std::uint8_t* p = at(x, y);
    return {p[0], p[1], p[2]};
  }
  // Out-of-bounds writes are dropped.
  void Set(std::ptrdiff_t x, std::ptrdiff_t y, Rgb color);
  void Blit(const Raster& src, std::size_t x0, std::size_t y0);

  bool operator==(const Raster&) const = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<std::uint8_t> pixels_;
};

// Deterministic encoding: filter type 0 on every row, zlib level 9, no
// ancillary chunks.
Bytes EncodePng(const Raster& image);
// Decodes the subset EncodePng produces (8-bit RGB, non-interlaced, filter
// type 0).
Raster DecodePng(std::span<const std::uint8_t> png);
void WritePng(const std::filesystem::path& path, const Raster& image);

}  // namespace attrib

#endif  // ATTRIB_PNG_H_
