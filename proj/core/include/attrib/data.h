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

#ifndef ATTRIB_DATA_H_
#define ATTRIB_DATA_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "attrib/bytes.h"
#include "attrib/tensor.h"

namespace attrib {

inline constexpr std::size_t kImageRows = 28;
inline constexpr std::size_t kImageCols = 28;
inline constexpr std::size_t kImagePixels = kImageRows * kImageCols;
inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;
inline constexpr int kNumClasses = 10;

// MNIST images normalised to [0, 1] by b / 255. A pixel is "black" iff it
// is exactly 0.0. Either `labels` is empty (images only) or it has one
// entry per image.
struct ImageSet {
  std::vector<Tensor> images;
  std::vector<std::uint8_t> labels;
  std::string source_digest;  // SHA-256 hex of the raw (decompressed) bytes

  std::size_t size() const { return images.size(); }
  bool labeled() const { return !images.empty() && labels.size() == images.size(); }
};

// Parsers over in-memory IDX payloads. Gzip input is inflated first.
ImageSet ParseIdxImages(Bytes raw);
std::vector<std::uint8_t> ParseIdxLabels(Bytes raw);

ImageSet LoadIdxImages(const std::filesystem::path& path);
std::vector<std::uint8_t> LoadIdxLabels(const std::filesystem::path& path);

// Attaches `labels` to `images`; the counts must agree (kPairing).
ImageSet PairLabels(ImageSet images, std::vector<std::uint8_t> labels);

// Serialises back to uncompressed IDX. Pixels are requantised with
// round(p * 255), which inverts the load path exactly.
Bytes EncodeIdxImages(const ImageSet& set);
Bytes EncodeIdxLabels(std::span<const std::uint8_t> labels);

enum class Split { kTrain, kTest };

struct MnistFiles {
  std::filesystem::path images;
  std::filesystem::path labels;
};

// Locates the split's files in `dir`, accepting both the plain and the
// ".gz" names. Missing files raise kIo naming the expected filename.
MnistFiles FindMnistFiles(const std::filesystem::path& dir, Split split);
ImageSet LoadMnist(const std::filesystem::path& dir, Split split);

// Mean over images of the fraction of pixels that are exactly zero.
double ZeroPixelFraction(const ImageSet& set);

// A seeded sample of `count` images (labels follow when present).
ImageSet SampleImages(const ImageSet& set, std::size_t count,
                      std::uint64_t seed, std::vector<std::size_t>* indices);

}  // namespace attrib

#endif  // ATTRIB_DATA_H_
