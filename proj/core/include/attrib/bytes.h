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

#ifndef ATTRIB_BYTES_H_
#define ATTRIB_BYTES_H_

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "attrib/error.h"

namespace attrib {

using Bytes = std::vector<std::uint8_t>;
using Digest = std::array<std::uint8_t, 32>;

Digest Sha256(std::span<const std::uint8_t> data);
std::string ToHex(std::span<const std::uint8_t> data);
inline std::string Sha256Hex(std::span<const std::uint8_t> data) {
  return ToHex(Sha256(data));
}
inline std::string Sha256Hex(std::string_view text) {
  return Sha256Hex(std::span(
      reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

Bytes ReadFile(const std::filesystem::path& path);
void WriteFile(const std::filesystem::path& path,
               std::span<const std::uint8_t> data);
void WriteTextFile(const std::filesystem::path& path, std::string_view text);

// Returns the input unchanged unless it starts with the gzip magic, in which
// case it is inflated.
Bytes MaybeGunzip(Bytes data);

class ByteWriter {
 public:
  void PutU8(std::uint8_t v) { bytes_.push_back(v); }
  void PutU32LE(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void PutU32BE(std::uint32_t v) {
    for (int i = 3; i >= 0; --i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void PutF32LE(float v) { PutU32LE(std::bit_cast<std::uint32_t>(v)); }
  void PutF64LE(double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    PutU32LE(static_cast<std::uint32_t>(bits));
    PutU32LE(static_cast<std::uint32_t>(bits >> 32));
  }
  void PutBytes(std::span<const std::uint8_t> data) {
    bytes_.insert(bytes_.end(), data.begin(), data.end());
  }
  void PutString(std::string_view s) {
    bytes_.insert(bytes_.end(), s.begin(), s.end());
  }

  const Bytes& bytes() const { return bytes_; }
  Bytes Take() { return std::move(bytes_); }

 private:
  Bytes bytes_;
};

// Bounds-checked cursor. Running off the end raises kLength.
class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> data) : data_(data) {}

  std::size_t position() const { return pos_; }
  std::size_t remaining() const { return data_.size() - pos_; }

  std::span<const std::uint8_t> Take(std::size_t n) {
    if (n > remaining()) {
      Fail(ErrorKind::kLength, "truncated: need " + std::to_string(n) +
                                   " bytes at offset " + std::to_string(pos_) +
                                   ", have " + std::to_string(remaining()));
    }
    auto out = data_.subspan(pos_, n);
    pos_ += n;
    return out;
  }
  std::uint8_t U8() { return Take(1)[0]; }
  std::uint32_t U32LE() {
    auto b = Take(4);
    return std::uint32_t{b[0]} | std::uint32_t{b[1]} << 8 |
           std::uint32_t{b[2]} << 16 | std::uint32_t{b[3]} << 24;
  }
  std::uint32_t U32BE() {
    auto b = Take(4);
    return std::uint32_t{b[3]} | std::uint32_t{b[2]} << 8 |
           std::uint32_t{b[1]} << 16 | std::uint32_t{b[0]} << 24;
  }
  float F32LE() { return std::bit_cast<float>(U32LE()); }
  double F64LE() {
    const std::uint64_t lo = U32LE();
    const std::uint64_t hi = U32LE();
    return std::bit_cast<double>(lo | hi << 32);
  }
  std::string String(std::size_t n) {
    auto b = Take(n);
    return std::string(b.begin(), b.end());
  }

 private:
  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

}  // namespace attrib

#endif  // ATTRIB_BYTES_H_
