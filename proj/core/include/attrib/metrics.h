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

#ifndef ATTRIB_METRICS_H_
#define ATTRIB_METRICS_H_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "attrib/attribution.h"
#include "attrib/data.h"
#include "attrib/network.h"
#include "attrib/randomization.h"
#include "json.hpp"

namespace attrib {

// 1-based fractional ranks: tied values share the mean of the ranks they
// span.
std::vector<double> AverageRanks(std::span<const double> values);

// Pearson correlation of the average-rank vectors. When either rank vector
// is constant the result is 1.0 if the two rank vectors are identical and
// 0.0 otherwise. Requires equal lengths >= 2.
double Spearman(std::span<const double> a, std::span<const double> b);

// Spearman of |a| and |b| restricted to indices where x != 0. Needs at least
// two such indices (kDomain).
double SpearmanNonzero(std::span<const double> a, std::span<const double> b,
                       std::span<const double> x);

enum class Variant { kUnnormalized, kAbsolute, kAbsoluteNonzero };
inline constexpr std::array<Variant, 3> kVariants = {
    Variant::kUnnormalized, Variant::kAbsolute, Variant::kAbsoluteNonzero};
const char* VariantName(Variant v);

// Correlation between two attribution maps of the same input `x`.
double Correlate(Variant variant, const Tensor& a, const Tensor& b,
                 const Tensor& x);

std::vector<double> ToDouble(const Tensor& t);

struct SampleStats {
  double mean = 0.0;
  double stddev = 0.0;  // sample (n - 1) standard deviation; 0 when n < 2
};
SampleStats Summarize(std::span<const double> values);

struct SaturationPoint {
  std::size_t k = 0;
  double mean = 0.0;
  double stddev = 0.0;
};

// For each k: two vectors of length n, uniform on (0, 1] except on a shared
// random k-subset where both are exactly zero; mean Spearman over trials.
std::vector<SaturationPoint> ZeroSaturationCurve(
    std::size_t n, std::span<const std::size_t> k_grid, int trials,
    std::uint64_t seed, int threads = 1);

// {0, n/16, 2n/16, ..., n}: 17 points for n = 784.
std::vector<std::size_t> DefaultSaturationGrid(std::size_t n = kImagePixels);

struct FloorResult {
  double mean = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::vector<double> samples;  // image-major, trial-minor
};

inline constexpr double kZ995 = 2.5758293035489004;

// SpearmanNonzero(x * r1, x * r2, x).
double FloorCorrelation(const Tensor& x, std::span<const double> r1,
                        std::span<const double> r2);

// Per image and trial, r1 and r2 are independent standard-normal vectors.
// The CI is the normal approximation mean +/- z_0.995 * s / sqrt(n).
FloorResult RandomIgFloor(const ImageSet& images, int trials,
                          std::uint64_t seed, int threads = 1);

struct SweepOptions {
  int steps = kDefaultSteps;
  std::uint64_t master_seed = 0;
  int threads = 1;
  std::vector<Stage> stages{kStageOrder.begin(), kStageOrder.end()};
};

struct SweepReport {
  std::vector<std::string> stages;
  std::uint64_t master_seed = 0;
  int steps = 0;
  std::vector<std::size_t> image_ids;
  std::vector<int> labels;
  // [variant][stage]
  std::array<std::vector<SampleStats>, 3> stats;
  // [variant][stage][image]
  std::array<std::vector<std::vector<double>>, 3> values;
  // [stage][image]
  std::vector<std::vector<AttributionMap>> maps;

  std::size_t n_images() const { return image_ids.size(); }
  // Mean |raw_sum| over images at a stage.
  double MeanAbsRawSum(std::size_t stage) const;
};

// For each image (label = target), compares the trained model's IG against
// each stage model's IG under all three variants. Baseline is black.
SweepReport RunSweep(const ModelCheckpoint& trained, const ImageSet& images,
                     std::span<const std::size_t> image_ids,
                     const SweepOptions& options);

// stage,variant,mean,stddev,n
std::string SweepCsv(const SweepReport& report);
nlohmann::json SweepJson(const SweepReport& report);
// k,mean,stddev
std::string SaturationCsv(std::span<const SaturationPoint> curve);

}  // namespace attrib

#endif  // ATTRIB_METRICS_H_
