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

#include "attrib/bytes.h"

#include <openssl/evp.h>
#include <zlib.h>

#include <fstream>
#include <iterator>

namespace attrib {

Digest Sha256(std::span<const std::uint8_t> data) {
  Digest out{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(),
                 nullptr) != 1 ||
      len != out.size()) {
    Fail(ErrorKind::kDigest, "SHA-256 computation failed");
  }
  return out;
}

std::string ToHex(std::span<const std::uint8_t> data) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(data.size() * 2);
  for (std::uint8_t b : data) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xf]);
  }
  return out;
}

Bytes ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorKind::kIo, "cannot open " + path.string());
  Bytes data((std::istreambuf_iterator<char>(in)),
             std::istreambuf_iterator<char>());
  if (in.bad()) Fail(ErrorKind::kIo, "read failed: " + path.string());
  return data;
}

void WriteFile(const std::filesystem::path& path,
               std::span<const std::uint8_t> data) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) Fail(ErrorKind::kIo, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size()));
  if (!out) Fail(ErrorKind::kIo, "write failed: " + path.string());
}

void WriteTextFile(const std::filesystem::path& path, std::string_view text) {
  WriteFile(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()),
                            text.size()));
}

Bytes MaybeGunzip(Bytes data) {
  if (data.size() < 2 || data[0] != 0x1f || data[1] != 0x8b) return data;

  z_stream stream{};
  // 16 + MAX_WBITS selects gzip framing.
  if (inflateInit2(&stream, 16 + MAX_WBITS) != Z_OK) {
    Fail(ErrorKind::kFormat, "zlib initialisation failed");
  }
  Bytes out;
  std::uint8_t chunk[1 << 16];
  stream.next_in = data.data();
  stream.avail_in = static_cast<uInt>(data.size());
  int rc = Z_OK;
  while (rc != Z_STREAM_END) {
    stream.next_out = chunk;
    stream.avail_out = sizeof(chunk);
    rc = inflate(&stream, Z_NO_FLUSH);
    if (rc != Z_OK && rc != Z_STREAM_END) {
      inflateEnd(&stream);
      Fail(rc == Z_BUF_ERROR ? ErrorKind::kLength : ErrorKind::kFormat,
           "corrupt gzip stream");
    }
    out.insert(out.end(), chunk, chunk + (sizeof(chunk) - stream.avail_out));
  }
  inflateEnd(&stream);
  return out;
}

}  // namespace attrib
