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

#include "attrib/data.h"

#include <cmath>

#include "attrib/rng.h"

namespace attrib {
namespace {

const char* SplitPrefix(Split split) {
  return split == Split::kTrain ? "train" : "t10k";
}

std::filesystem::path FindOne(const std::filesystem::path& dir,
                              const std::string& name) {
  for (const auto& candidate : {dir / name, dir / (name + ".gz")}) {
    if (std::filesystem::is_regular_file(candidate)) return candidate;
  }
  Fail(ErrorKind::kIo, "missing MNIST file '" + name + "' (or '" + name +
                           ".gz') in " + dir.string());
}

}  // namespace

ImageSet ParseIdxImages(Bytes raw) {
  raw = MaybeGunzip(std::move(raw));
  ByteReader reader(raw);
  const std::uint32_t magic = reader.U32BE();
  if (magic != kIdxImageMagic) {
    Fail(ErrorKind::kFormat, "bad IDX image magic 0x" +
                                 ToHex(std::span(raw.data(), 4)));
  }
  const std::uint32_t count = reader.U32BE();
  const std::uint32_t rows = reader.U32BE();
  const std::uint32_t cols = reader.U32BE();
  if (rows != kImageRows || cols != kImageCols) {
    Fail(ErrorKind::kShape, "unsupported image shape " + std::to_string(rows) +
                                "x" + std::to_string(cols) + ", need 28x28");
  }
  const std::size_t payload = std::size_t{count} * kImagePixels;
  if (reader.remaining() < payload) {
    Fail(ErrorKind::kLength, "IDX header declares " + std::to_string(count) +
                                 " images but payload holds " +
                                 std::to_string(reader.remaining()) + " bytes");
  }

  ImageSet set;
  set.source_digest = Sha256Hex(raw);
  set.images.reserve(count);
  auto pixels = reader.Take(payload);
  for (std::uint32_t i = 0; i < count; ++i) {
    std::vector<float> values(kImagePixels);
    for (std::size_t p = 0; p < kImagePixels; ++p) {
      values[p] = static_cast<float>(pixels[i * kImagePixels + p] / 255.0);
    }
    set.images.emplace_back(Shape{kImageRows, kImageCols}, std::move(values));
  }
  return set;
}

std::vector<std::uint8_t> ParseIdxLabels(Bytes raw) {
  raw = MaybeGunzip(std::move(raw));
  ByteReader reader(raw);
  const std::uint32_t magic = reader.U32BE();
  if (magic != kIdxLabelMagic) {
    Fail(ErrorKind::kFormat, "bad IDX label magic 0x" +
                                 ToHex(std::span(raw.data(), 4)));
  }
  const std::uint32_t count = reader.U32BE();
  if (reader.remaining() < count) {
    Fail(ErrorKind::kLength, "IDX header declares " + std::to_string(count) +
                                 " labels but payload holds " +
                                 std::to_string(reader.remaining()));
  }
  auto payload = reader.Take(count);
  std::vector<std::uint8_t> labels(payload.begin(), payload.end());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= kNumClasses) {
      Fail(ErrorKind::kData, "label " + std::to_string(labels[i]) +
                                 " at index " + std::to_string(i) +
                                 " is outside 0..9");
    }
  }
  return labels;
}

ImageSet LoadIdxImages(const std::filesystem::path& path) {
  return ParseIdxImages(ReadFile(path));
}

std::vector<std::uint8_t> LoadIdxLabels(const std::filesystem::path& path) {
  return ParseIdxLabels(ReadFile(path));
}

ImageSet PairLabels(ImageSet images, std::vector<std::uint8_t> labels) {
  if (images.images.size() != labels.size()) {
    Fail(ErrorKind::kPairing, std::to_string(images.images.size()) +
                                  " images but " +
                                  std::to_string(labels.size()) + " labels");
  }
  images.labels = std::move(labels);
  return images;
}

Bytes EncodeIdxImages(const ImageSet& set) {
  ByteWriter w;
  w.PutU32BE(kIdxImageMagic);
  w.PutU32BE(static_cast<std::uint32_t>(set.images.size()));
  w.PutU32BE(kImageRows);
  w.PutU32BE(kImageCols);
  for (const Tensor& image : set.images) {
    Require(image.size() == kImagePixels, "image must have 784 pixels");
    for (float p : image.values()) {
      w.PutU8(static_cast<std::uint8_t>(std::lround(p * 255.0)));
    }
  }
  return w.Take();
}

Bytes EncodeIdxLabels(std::span<const std::uint8_t> labels) {
  ByteWriter w;
  w.PutU32BE(kIdxLabelMagic);
  w.PutU32BE(static_cast<std::uint32_t>(labels.size()));
  w.PutBytes(labels);
  return w.Take();
}

MnistFiles FindMnistFiles(const std::filesystem::path& dir, Split split) {
  const std::string prefix = SplitPrefix(split);
  MnistFiles files;
  files.images = FindOne(dir, prefix + "-images-idx3-ubyte");
  files.labels = FindOne(dir, prefix + "-labels-idx1-ubyte");
  return files;
}

ImageSet LoadMnist(const std::filesystem::path& dir, Split split) {
  const MnistFiles files = FindMnistFiles(dir, split);
  ImageSet set = PairLabels(LoadIdxImages(files.images),
                            LoadIdxLabels(files.labels));
  return set;
}

double ZeroPixelFraction(const ImageSet& set) {
  if (set.images.empty()) Fail(ErrorKind::kDomain, "empty image set");
  double total = 0.0;
  for (const Tensor& image : set.images) {
    std::size_t zeros = 0;
    for (float p : image.values()) zeros += (p == 0.0f);
    total += static_cast<double>(zeros) / static_cast<double>(image.size());
  }
  return total / static_cast<double>(set.images.size());
}

ImageSet SampleImages(const ImageSet& set, std::size_t count,
                      std::uint64_t seed, std::vector<std::size_t>* indices) {
  std::vector<std::size_t> picked =
      SampleWithoutReplacement(set.size(), count, seed);
  ImageSet out;
  out.source_digest = set.source_digest;
  for (std::size_t i : picked) {
    out.images.push_back(set.images[i]);
    if (set.labeled()) out.labels.push_back(set.labels[i]);
  }
  if (indices) *indices = std::move(picked);
  return out;
}

}  // namespace attrib
