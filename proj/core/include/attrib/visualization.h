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

#ifndef ATTRIB_VISUALIZATION_H_
#define ATTRIB_VISUALIZATION_H_

#include <string>
#include <string_view>
#include <vector>

#include "attrib/attribution.h"
#include "attrib/png.h"
#include "json.hpp"

namespace attrib {

enum class RenderMode {
  kSignedChannels,  // positive and negative scores on separate channels
  kAbsolute,        // grayscale |score|
};

enum class Channel { kRed = 0, kGreen = 1, kBlue = 2 };

// Each sign is scaled independently: the largest positive score maps to 255
// on `positive`, the most negative to 255 on `negative`. An all-zero map
// renders black.
struct RenderSpec {
  RenderMode mode = RenderMode::kSignedChannels;
  Channel positive = Channel::kGreen;
  Channel negative = Channel::kRed;
};

const char* RenderModeName(RenderMode mode);

Raster RenderScores(const Tensor& scores, const RenderSpec& spec = {});
inline Raster Render(const AttributionMap& attr, const RenderSpec& spec = {}) {
  return RenderScores(attr.scores, spec);
}

// Grayscale rendering of an input image in [0, 1].
Raster RenderImage(const Tensor& image);

Raster Upscale(const Raster& image, std::size_t factor);

// Three significant digits: 0 -> "0.00", 1.2345 -> "1.23", -0.0123456 ->
// "-0.0123", 1234.5 -> "1230". Magnitudes outside [1e-4, 1e6) use
// exponent notation ("1.23e-05").
std::string FormatSum(double value);

// 5x7 bitmap text; lowercase letters are drawn as capitals and unknown
// characters as blanks. Returns the drawn width in pixels.
std::size_t DrawText(Raster& canvas, std::ptrdiff_t x, std::ptrdiff_t y,
                     std::string_view text, Rgb color, std::size_t scale = 1);
std::size_t TextWidth(std::string_view text, std::size_t scale = 1);

struct GridCell {
  std::string stage;
  AttributionMap attr;
  RenderSpec spec;
};

struct GridRow {
  std::size_t image_id = 0;
  Tensor image;
  std::vector<GridCell> cells;
};

struct Grid {
  Raster raster;
  nlohmann::json annotations;
  std::size_t rows = 0;
  std::size_t columns = 0;  // input image column included
};

// First column is the input image, then one column per cell, each labelled
// with its stage and annotated below with FormatSum(raw_sum). All rows must
// list the same stages (kContract).
Grid ComposeGrid(std::span<const GridRow> rows, std::size_t upscale = 8);

// Over pixels where both |a| and |b| exceed 1e-8, the fraction whose signs
// differ. kDomain if no pixel qualifies.
double SignFlipRate(const AttributionMap& a, const AttributionMap& b);
inline constexpr double kSignFloor = 1e-8;

struct PlotSeries {
  std::string name;
  Rgb color;
  std::vector<double> ys;
};

// Line chart over categorical x positions.
Raster PlotLines(const std::string& title, const std::vector<std::string>& x_labels,
                 const std::vector<PlotSeries>& series, double y_min, double y_max);

}  // namespace attrib

#endif  // ATTRIB_VISUALIZATION_H_
