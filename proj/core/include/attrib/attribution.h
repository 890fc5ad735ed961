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

#ifndef ATTRIB_ATTRIBUTION_H_
#define ATTRIB_ATTRIBUTION_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>

#include "attrib/bytes.h"
#include "attrib/network.h"
#include "attrib/tensor.h"
#include "json.hpp"

namespace attrib {

// A scalar function F_target(x) with an exact gradient. Integrated
// Gradients only sees models through this interface.
class DifferentiableScorer {
 public:
  virtual ~DifferentiableScorer() = default;

  virtual Shape input_shape() const = 0;

  // `points` holds `count` inputs back to back. Writes F_target of each into
  // `values` and its gradient into `gradients` (same layout as `points`).
  virtual void Evaluate(std::span<const double> points, std::size_t count,
                        int target, std::span<double> values,
                        std::span<double> gradients) const = 0;

  // Points per Evaluate call that IntegratedGradients aims for.
  virtual std::size_t preferred_batch() const { return 64; }
};

// F = pre-softmax logit of the target class.
class NetworkScorer final : public DifferentiableScorer {
 public:
  explicit NetworkScorer(const ModelCheckpoint& model) : net_(model) {}

  Shape input_shape() const override { return {kImageRows, kImageCols}; }
  void Evaluate(std::span<const double> points, std::size_t count, int target,
                std::span<double> values,
                std::span<double> gradients) const override;

 private:
  Network<float> net_;
};

enum class Quadrature {
  kMidpoint,     // alpha_j = (j - 0.5) / steps
  kLeftRiemann,  // alpha_j = (j - 1) / steps
};

inline constexpr int kDefaultSteps = 300;

struct AttributionMap {
  Tensor scores;    // signed, in units of F
  Tensor baseline;
  int target = 0;
  int steps = 0;
  double raw_sum = 0.0;      // RawSum(scores)
  double logit_delta = 0.0;  // F(x) - F(baseline)
};

// scores_i = (x_i - b_i) * mean_j dF(b + alpha_j (x - b)) / dx_i. Pixels with
// x_i == b_i get exactly +0.0.
AttributionMap IntegratedGradients(const DifferentiableScorer& scorer,
                                   const Tensor& x, const Tensor& baseline,
                                   int target, int steps = kDefaultSteps,
                                   Quadrature rule = Quadrature::kMidpoint);

AttributionMap IntegratedGradients(const ModelCheckpoint& model,
                                   const Tensor& x, const Tensor& baseline,
                                   int target, int steps = kDefaultSteps);

// |raw_sum - logit_delta|
double CompletenessGap(const AttributionMap& attr);

// 28x28 zeros.
Tensor BlackBaseline();

// Sum in index order, accumulated in double.
double RawSum(const Tensor& scores);

// Single-file container: "IGAT", u32 version, u32 metadata length, UTF-8
// JSON metadata (target, steps, raw_sum, logit_delta and any `extra` keys),
// u32 rank + u32 dims, f32 scores, f32 baseline, trailing SHA-256 over all
// preceding bytes.
inline constexpr std::uint32_t kAttributionVersion = 1;
Bytes EncodeAttribution(const AttributionMap& attr,
                        const nlohmann::json& extra = nlohmann::json::object());
AttributionMap DecodeAttribution(std::span<const std::uint8_t> bytes,
                                 nlohmann::json* metadata = nullptr);

// "attr_<image_id>_<stage>.igattr"
std::string AttributionFilename(std::size_t image_id, const std::string& stage);

}  // namespace attrib

#endif  // ATTRIB_ATTRIBUTION_H_
