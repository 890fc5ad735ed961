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

#include "attrib/png.h"

#include <zlib.h>

#include <algorithm>

namespace attrib {
namespace {

constexpr std::uint8_t kSignature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

void PutChunk(ByteWriter& w, const char type[4], std::span<const std::uint8_t> data) {
  w.PutU32BE(static_cast<std::uint32_t>(data.size()));
  const auto* type_bytes = reinterpret_cast<const std::uint8_t*>(type);
  w.PutBytes(std::span(type_bytes, 4));
  w.PutBytes(data);
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, type_bytes, 4);
  crc = crc32(crc, data.data(), static_cast<uInt>(data.size()));
  w.PutU32BE(static_cast<std::uint32_t>(crc));
}

}  // namespace

Raster::Raster(std::size_t width, std::size_t height, Rgb fill)
    : width_(width), height_(height), pixels_(width * height * 3) {
  for (std::size_t i = 0; i < width * height; ++i) {
    std::copy(fill.begin(), fill.end(), pixels_.begin() + static_cast<std::ptrdiff_t>(i * 3));
  }
}

void Raster::Set(std::ptrdiff_t x, std::ptrdiff_t y, Rgb color) {
  if (x < 0 || y < 0 || x >= static_cast<std::ptrdiff_t>(width_) ||
      y >= static_cast<std::ptrdiff_t>(height_)) {
    return;
  }
  std::copy(color.begin(), color.end(),
            at(static_cast<std::size_t>(x), static_cast<std::size_t>(y)));
}

void Raster::Blit(const Raster& src, std::size_t x0, std::size_t y0) {
  for (std::size_t y = 0; y < src.height(); ++y) {
    for (std::size_t x = 0; x < src.width(); ++x) {
      Set(static_cast<std::ptrdiff_t>(x0 + x), static_cast<std::ptrdiff_t>(y0 + y),
          src.Get(x, y));
    }
  }
}

Bytes EncodePng(const Raster& image) {
  Require(image.width() > 0 && image.height() > 0, "cannot encode an empty image");
  ByteWriter w;
  w.PutBytes(kSignature);

  ByteWriter ihdr;
  ihdr.PutU32BE(static_cast<std::uint32_t>(image.width()));
  ihdr.PutU32BE(static_cast<std::uint32_t>(image.height()));
  ihdr.PutU8(8);  // bit depth
  ihdr.PutU8(2);  // colour type: truecolour
  ihdr.PutU8(0);  // compression
  ihdr.PutU8(0);  // filter method
  ihdr.PutU8(0);  // no interlace
  PutChunk(w, "IHDR", ihdr.bytes());

  const std::size_t stride = image.width() * 3;
  Bytes raw;
  raw.reserve((stride + 1) * image.height());
  for (std::size_t y = 0; y < image.height(); ++y) {
    raw.push_back(0);
    const std::uint8_t* row = image.at(0, y);
    raw.insert(raw.end(), row, row + stride);
  }
  uLongf packed_size = compressBound(static_cast<uLong>(raw.size()));
  Bytes packed(packed_size);
  if (compress2(packed.data(), &packed_size, raw.data(),
                static_cast<uLong>(raw.size()), 9) != Z_OK) {
    Fail(ErrorKind::kIo, "zlib compression failed");
  }
  packed.resize(packed_size);
  PutChunk(w, "IDAT", packed);
  PutChunk(w, "IEND", {});
  return w.Take();
}

Raster DecodePng(std::span<const std::uint8_t> png) {
  ByteReader r(png);
  auto sig = r.Take(8);
  if (!std::equal(sig.begin(), sig.end(), kSignature)) {
    Fail(ErrorKind::kFormat, "not a PNG file");
  }
  std::size_t width = 0, height = 0;
  Bytes packed;
  for (;;) {
    const std::uint32_t length = r.U32BE();
    const std::string type = r.String(4);
    auto data = r.Take(length);
    r.Take(4);  // CRC
    if (type == "IHDR") {
      ByteReader h(data);
      width = h.U32BE();
      height = h.U32BE();
      if (h.U8() != 8 || h.U8() != 2 || h.U8() != 0 || h.U8() != 0 || h.U8() != 0) {
        Fail(ErrorKind::kFormat, "only 8-bit RGB non-interlaced PNG is supported");
      }
    } else if (type == "IDAT") {
      packed.insert(packed.end(), data.begin(), data.end());
    } else if (type == "IEND") {
      break;
    }
  }
  const std::size_t stride = width * 3;
  uLongf raw_size = static_cast<uLongf>((stride + 1) * height);
  Bytes raw(raw_size);
  if (uncompress(raw.data(), &raw_size, packed.data(),
                 static_cast<uLong>(packed.size())) != Z_OK ||
      raw_size != raw.size()) {
    Fail(ErrorKind::kFormat, "corrupt PNG image data");
  }
  Raster out(width, height);
  for (std::size_t y = 0; y < height; ++y) {
    if (raw[y * (stride + 1)] != 0) Fail(ErrorKind::kFormat, "unsupported PNG filter");
    std::copy_n(raw.begin() + static_cast<std::ptrdiff_t>(y * (stride + 1) + 1), stride,
                out.at(0, y));
  }
  return out;
}

void WritePng(const std::filesystem::path& path, const Raster& image) {
  WriteFile(path, EncodePng(image));
}

}  // namespace attrib
