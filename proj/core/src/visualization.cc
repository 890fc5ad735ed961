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

#include "attrib/visualization.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "attrib/data.h"

namespace attrib {
namespace {

struct Glyph {
  char c;
  const char* rows[7];
};

// clang-format off
constexpr Glyph kFont[] = {
  {'0', {".###.", "#...#", "#..##", "#.#.#", "##..#", "#...#", ".###."}},
  {'1', {"..#..", ".##..", "..#..", "..#..", "..#..", "..#..", ".###."}},
  {'2', {".###.", "#...#", "....#", "...#.", "..#..", ".#...", "#####"}},
  {'3', {"#####", "...#.", "..#..", "...#.", "....#", "#...#", ".###."}},
  {'4', {"...#.", "..##.", ".#.#.", "#..#.", "#####", "...#.", "...#."}},
  {'5', {"#####", "#....", "####.", "....#", "....#", "#...#", ".###."}},
  {'6', {"..##.", ".#...", "#....", "####.", "#...#", "#...#", ".###."}},
  {'7', {"#####", "....#", "...#.", "..#..", ".#...", ".#...", ".#..."}},
  {'8', {".###.", "#...#", "#...#", ".###.", "#...#", "#...#", ".###."}},
  {'9', {".###.", "#...#", "#...#", ".####", "....#", "...#.", ".##.."}},
  {'.', {".....", ".....", ".....", ".....", ".....", ".##..", ".##.."}},
  {',', {".....", ".....", ".....", ".....", ".##..", "..#..", ".#..."}},
  {'-', {".....", ".....", ".....", "#####", ".....", ".....", "....."}},
  {'+', {".....", "..#..", "..#..", "#####", "..#..", "..#..", "....."}},
  {'=', {".....", ".....", "#####", ".....", "#####", ".....", "....."}},
  {':', {".....", ".##..", ".##..", ".....", ".##..", ".##..", "....."}},
  {'/', {".....", "....#", "...#.", "..#..", ".#...", "#....", "....."}},
  {'|', {"..#..", "..#..", "..#..", "..#..", "..#..", "..#..", "..#.."}},
  {'(', {"...#.", "..#..", ".#...", ".#...", ".#...", "..#..", "...#."}},
  {')', {".#...", "..#..", "...#.", "...#.", "...#.", "..#..", ".#..."}},
  {'_', {".....", ".....", ".....", ".....", ".....", ".....", "#####"}},
  {'#', {".#.#.", ".#.#.", "#####", ".#.#.", "#####", ".#.#.", ".#.#."}},
  {'A', {".###.", "#...#", "#...#", "#####", "#...#", "#...#", "#...#"}},
  {'B', {"####.", "#...#", "#...#", "####.", "#...#", "#...#", "####."}},
  {'C', {".###.", "#...#", "#....", "#....", "#....", "#...#", ".###."}},
  {'D', {"###..", "#..#.", "#...#", "#...#", "#...#", "#..#.", "###.."}},
  {'E', {"#####", "#....", "#....", "####.", "#....", "#....", "#####"}},
  {'F', {"#####", "#....", "#....", "####.", "#....", "#....", "#...."}},
  {'G', {".###.", "#...#", "#....", "#.###", "#...#", "#...#", ".####"}},
  {'H', {"#...#", "#...#", "#...#", "#####", "#...#", "#...#", "#...#"}},
  {'I', {".###.", "..#..", "..#..", "..#..", "..#..", "..#..", ".###."}},
  {'J', {"..###", "...#.", "...#.", "...#.", "...#.", "#..#.", ".##.."}},
  {'K', {"#...#", "#..#.", "#.#..", "##...", "#.#..", "#..#.", "#...#"}},
  {'L', {"#....", "#....", "#....", "#....", "#....", "#....", "#####"}},
  {'M', {"#...#", "##.##", "#.#.#", "#.#.#", "#...#", "#...#", "#...#"}},
  {'N', {"#...#", "#...#", "##..#", "#.#.#", "#..##", "#...#", "#...#"}},
  {'O', {".###.", "#...#", "#...#", "#...#", "#...#", "#...#", ".###."}},
  {'P', {"####.", "#...#", "#...#", "####.", "#....", "#....", "#...."}},
  {'Q', {".###.", "#...#", "#...#", "#...#", "#.#.#", "#..#.", ".##.#"}},
  {'R', {"####.", "#...#", "#...#", "####.", "#.#..", "#..#.", "#...#"}},
  {'S', {".####", "#....", "#....", ".###.", "....#", "....#", "####."}},
  {'T', {"#####", "..#..", "..#..", "..#..", "..#..", "..#..", "..#.."}},
  {'U', {"#...#", "#...#", "#...#", "#...#", "#...#", "#...#", ".###."}},
  {'V', {"#...#", "#...#", "#...#", "#...#", "#...#", ".#.#.", "..#.."}},
  {'W', {"#...#", "#...#", "#...#", "#.#.#", "#.#.#", "#.#.#", ".#.#."}},
  {'X', {"#...#", "#...#", ".#.#.", "..#..", ".#.#.", "#...#", "#...#"}},
  {'Y', {"#...#", "#...#", ".#.#.", "..#..", "..#..", "..#..", "..#.."}},
  {'Z', {"#####", "....#", "...#.", "..#..", ".#...", "#....", "#####"}},
};
// clang-format on

const Glyph* FindGlyph(char c) {
  const char upper = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  for (const Glyph& g : kFont) {
    if (g.c == upper) return &g;
  }
  return nullptr;
}

constexpr std::size_t kGlyphAdvance = 6;
constexpr Rgb kWhite = {255, 255, 255};
constexpr Rgb kBackground = {24, 24, 24};

std::uint8_t Quantize(double fraction) {
  return static_cast<std::uint8_t>(std::lround(255.0 * std::clamp(fraction, 0.0, 1.0)));
}

void DrawLine(Raster& canvas, double x0, double y0, double x1, double y1,
              Rgb color, int thickness) {
  const double length = std::max(std::abs(x1 - x0), std::abs(y1 - y0));
  const int steps = std::max(1, static_cast<int>(std::ceil(length)));
  for (int i = 0; i <= steps; ++i) {
    const double t = static_cast<double>(i) / steps;
    const auto x = static_cast<std::ptrdiff_t>(std::lround(x0 + t * (x1 - x0)));
    const auto y = static_cast<std::ptrdiff_t>(std::lround(y0 + t * (y1 - y0)));
    for (int dy = -(thickness / 2); dy <= thickness / 2; ++dy) {
      for (int dx = -(thickness / 2); dx <= thickness / 2; ++dx) {
        canvas.Set(x + dx, y + dy, color);
      }
    }
  }
}

void FillRect(Raster& canvas, std::ptrdiff_t x, std::ptrdiff_t y,
              std::ptrdiff_t w, std::ptrdiff_t h, Rgb color) {
  for (std::ptrdiff_t j = 0; j < h; ++j) {
    for (std::ptrdiff_t i = 0; i < w; ++i) canvas.Set(x + i, y + j, color);
  }
}

}  // namespace

const char* RenderModeName(RenderMode mode) {
  return mode == RenderMode::kSignedChannels ? "signed_channels" : "absolute";
}

Raster RenderScores(const Tensor& scores, const RenderSpec& spec) {
  Require(scores.rank() == 2, "render needs a 2-D attribution map");
  Require(spec.positive != spec.negative,
          "positive and negative channels must differ");
  const std::size_t h = scores.shape()[0], w = scores.shape()[1];
  Raster out(w, h);

  double max_pos = 0.0, max_neg = 0.0, max_abs = 0.0;
  for (float s : scores.values()) {
    max_pos = std::max(max_pos, static_cast<double>(s));
    max_neg = std::max(max_neg, -static_cast<double>(s));
    max_abs = std::max(max_abs, std::abs(static_cast<double>(s)));
  }
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const double s = scores[y * w + x];
      std::uint8_t* px = out.at(x, y);
      if (spec.mode == RenderMode::kAbsolute) {
        if (max_abs > 0.0) {
          const std::uint8_t v = Quantize(std::abs(s) / max_abs);
          px[0] = px[1] = px[2] = v;
        }
      } else if (s > 0.0) {
        px[static_cast<int>(spec.positive)] = Quantize(s / max_pos);
      } else if (s < 0.0) {
        px[static_cast<int>(spec.negative)] = Quantize(-s / max_neg);
      }
    }
  }
  return out;
}

Raster RenderImage(const Tensor& image) {
  Require(image.rank() == 2, "image must be 2-D");
  const std::size_t h = image.shape()[0], w = image.shape()[1];
  Raster out(w, h);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const std::uint8_t v = Quantize(image[y * w + x]);
      out.Set(static_cast<std::ptrdiff_t>(x), static_cast<std::ptrdiff_t>(y), {v, v, v});
    }
  }
  return out;
}

Raster Upscale(const Raster& image, std::size_t factor) {
  Require(factor >= 1, "upscale factor must be >= 1");
  Raster out(image.width() * factor, image.height() * factor);
  for (std::size_t y = 0; y < out.height(); ++y) {
    for (std::size_t x = 0; x < out.width(); ++x) {
      out.Set(static_cast<std::ptrdiff_t>(x), static_cast<std::ptrdiff_t>(y),
              image.Get(x / factor, y / factor));
    }
  }
  return out;
}

std::string FormatSum(double value) {
  if (value == 0.0) return "0.00";
  char sci[32];
  std::snprintf(sci, sizeof(sci), "%.2e", value);
  const char* e = std::strchr(sci, 'e');
  const int exponent = std::atoi(e + 1);
  if (exponent < -4 || exponent >= 6) return sci;
  const double rounded = std::strtod(sci, nullptr);
  char out[48];
  std::snprintf(out, sizeof(out), "%.*f", std::max(0, 2 - exponent), rounded);
  return out;
}

std::size_t TextWidth(std::string_view text, std::size_t scale) {
  return text.empty() ? 0 : (text.size() * kGlyphAdvance - 1) * scale;
}

std::size_t DrawText(Raster& canvas, std::ptrdiff_t x, std::ptrdiff_t y,
                     std::string_view text, Rgb color, std::size_t scale) {
  const auto s = static_cast<std::ptrdiff_t>(scale);
  std::ptrdiff_t cursor = x;
  for (char c : text) {
    if (const Glyph* g = FindGlyph(c)) {
      for (std::ptrdiff_t row = 0; row < 7; ++row) {
        for (std::ptrdiff_t col = 0; col < 5; ++col) {
          if (g->rows[row][col] == '#') {
            FillRect(canvas, cursor + col * s, y + row * s, s, s, color);
          }
        }
      }
    }
    cursor += static_cast<std::ptrdiff_t>(kGlyphAdvance) * s;
  }
  return TextWidth(text, scale);
}

Grid ComposeGrid(std::span<const GridRow> rows, std::size_t upscale) {
  Require(!rows.empty(), "grid needs at least one row");
  for (const GridRow& row : rows) {
    Require(row.cells.size() == rows[0].cells.size(),
            "ragged grid: rows list different numbers of cells");
    for (std::size_t c = 0; c < row.cells.size(); ++c) {
      Require(row.cells[c].stage == rows[0].cells[c].stage,
              "ragged grid: rows list different stages");
    }
  }

  constexpr std::size_t kPad = 8, kText = 2, kHeader = 24, kFooter = 24;
  const std::size_t cell = kImageCols * upscale;
  const std::size_t columns = rows[0].cells.size() + 1;
  const std::size_t width = kPad + columns * (cell + kPad);
  const std::size_t row_height = cell + kFooter + kPad;
  const std::size_t height = kHeader + kPad + rows.size() * row_height;

  Grid grid;
  grid.rows = rows.size();
  grid.columns = columns;
  grid.raster = Raster(width, height, kBackground);
  nlohmann::json header = nlohmann::json::array();
  header.push_back("Image");
  for (const GridCell& c : rows[0].cells) header.push_back(c.stage);

  auto centered = [&](std::size_t col, std::string_view text) {
    const std::size_t x0 = kPad + col * (cell + kPad);
    const std::size_t tw = TextWidth(text, kText);
    return static_cast<std::ptrdiff_t>(x0 + (tw < cell ? (cell - tw) / 2 : 0));
  };
  for (std::size_t col = 0; col < columns; ++col) {
    const std::string name = header[col].get<std::string>();
    DrawText(grid.raster, centered(col, name), 6, name, kWhite, kText);
  }

  nlohmann::json cells = nlohmann::json::array();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const GridRow& row = rows[r];
    const std::size_t y0 = kHeader + kPad + r * row_height;
    grid.raster.Blit(Upscale(RenderImage(row.image), upscale), kPad, y0);
    const std::string id = "#" + std::to_string(row.image_id);
    DrawText(grid.raster, centered(0, id), static_cast<std::ptrdiff_t>(y0 + cell + 6), id,
             kWhite, kText);
    for (std::size_t c = 0; c < row.cells.size(); ++c) {
      const GridCell& gc = row.cells[c];
      const std::size_t x0 = kPad + (c + 1) * (cell + kPad);
      grid.raster.Blit(Upscale(Render(gc.attr, gc.spec), upscale), x0, y0);
      const std::string label = FormatSum(gc.attr.raw_sum);
      DrawText(grid.raster, centered(c + 1, label),
               static_cast<std::ptrdiff_t>(y0 + cell + 6), label, kWhite, kText);
      cells.push_back({{"row", r},
                       {"column", c + 1},
                       {"stage", gc.stage},
                       {"image_id", row.image_id},
                       {"mode", RenderModeName(gc.spec.mode)},
                       {"raw_sum", gc.attr.raw_sum},
                       {"logit_delta", gc.attr.logit_delta},
                       {"annotation", label}});
    }
  }
  grid.annotations = {{"columns", header},
                      {"rows", rows.size()},
                      {"cell_pixels", cell},
                      {"cells", cells}};
  return grid;
}

double SignFlipRate(const AttributionMap& a, const AttributionMap& b) {
  RequireSameShape(a.scores, b.scores, "sign flip rate");
  std::size_t considered = 0, flipped = 0;
  for (std::size_t i = 0; i < a.scores.size(); ++i) {
    const float sa = a.scores[i], sb = b.scores[i];
    if (std::abs(sa) > kSignFloor && std::abs(sb) > kSignFloor) {
      ++considered;
      flipped += (sa > 0) != (sb > 0);
    }
  }
  if (considered == 0) {
    Fail(ErrorKind::kDomain, "no pixel has |score| > 1e-8 in both maps");
  }
  return static_cast<double>(flipped) / static_cast<double>(considered);
}

Raster PlotLines(const std::string& title, const std::vector<std::string>& x_labels,
                 const std::vector<PlotSeries>& series, double y_min, double y_max) {
  Require(y_max > y_min, "plot range must be non-empty");
  Require(!x_labels.empty(), "plot needs at least one x position");
  constexpr std::size_t kWidth = 720, kHeight = 440;
  constexpr double kLeft = 60, kRight = 200, kTop = 40, kBottom = 50;
  constexpr Rgb kAxis = {0, 0, 0}, kGridLine = {225, 225, 225};
  Raster canvas(kWidth, kHeight, {255, 255, 255});

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  const std::size_t n = x_labels.size();
  auto px = [&](std::size_t i) {
    return n == 1 ? kLeft + plot_w / 2 : kLeft + plot_w * static_cast<double>(i) / (n - 1);
  };
  auto py = [&](double y) {
    return kTop + plot_h * (1.0 - (std::clamp(y, y_min, y_max) - y_min) / (y_max - y_min));
  };

  // Horizontal grid lines every 0.2.
  for (double y = std::ceil(y_min * 5) / 5; y <= y_max + 1e-9; y += 0.2) {
    DrawLine(canvas, kLeft, py(y), kLeft + plot_w, py(y), kGridLine, 1);
    char label[16];
    std::snprintf(label, sizeof(label), "%.1f", std::abs(y) < 1e-9 ? 0.0 : y);
    DrawText(canvas, static_cast<std::ptrdiff_t>(kLeft - 8 - TextWidth(label)),
             static_cast<std::ptrdiff_t>(py(y) - 3), label, kAxis);
  }
  DrawLine(canvas, kLeft, kTop, kLeft, kTop + plot_h, kAxis, 1);
  DrawLine(canvas, kLeft, kTop + plot_h, kLeft + plot_w, kTop + plot_h, kAxis, 1);
  for (std::size_t i = 0; i < n; ++i) {
    DrawLine(canvas, px(i), kTop + plot_h, px(i), kTop + plot_h + 4, kAxis, 1);
    DrawText(canvas, static_cast<std::ptrdiff_t>(px(i) - TextWidth(x_labels[i]) / 2.0),
             static_cast<std::ptrdiff_t>(kTop + plot_h + 10), x_labels[i], kAxis);
  }
  DrawText(canvas, static_cast<std::ptrdiff_t>(kLeft), 14, title, kAxis, 2);

  for (std::size_t s = 0; s < series.size(); ++s) {
    const PlotSeries& ps = series[s];
    Require(ps.ys.size() == n, "series '" + ps.name + "' has the wrong length");
    for (std::size_t i = 0; i + 1 < n; ++i) {
      DrawLine(canvas, px(i), py(ps.ys[i]), px(i + 1), py(ps.ys[i + 1]), ps.color, 3);
    }
    for (std::size_t i = 0; i < n; ++i) {
      FillRect(canvas, static_cast<std::ptrdiff_t>(px(i)) - 3,
               static_cast<std::ptrdiff_t>(py(ps.ys[i])) - 3, 7, 7, ps.color);
    }
    const auto ly = static_cast<std::ptrdiff_t>(kTop + 10 + 18 * s);
    const auto lx = static_cast<std::ptrdiff_t>(kWidth - kRight + 16);
    FillRect(canvas, lx, ly, 14, 7, ps.color);
    DrawText(canvas, lx + 20, ly, ps.name, kAxis);
  }
  return canvas;
}

}  // namespace attrib
