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

#include "attrib/attribution.h"

#include <algorithm>
#include <cmath>

namespace attrib {

void NetworkScorer::Evaluate(std::span<const double> points, std::size_t count,
                             int target, std::span<double> values,
                             std::span<double> gradients) const {
  Require(target >= 0 && target < kNumClasses, "target class must be in 0..9");
  Require(points.size() == count * kImagePixels &&
              gradients.size() == points.size() && values.size() == count,
          "NetworkScorer::Evaluate buffer sizes disagree");
  using Matrix = Network<float>::Matrix;
  Matrix inputs(static_cast<Eigen::Index>(count),
                static_cast<Eigen::Index>(kImagePixels));
  std::transform(points.begin(), points.end(), inputs.data(),
                 [](double v) { return static_cast<float>(v); });
  Network<float>::Workspace ws;
  const Matrix& logits = net_.Forward(inputs, ws);
  Matrix dlogits = Matrix::Zero(static_cast<Eigen::Index>(count), kNumClasses);
  dlogits.col(target).setOnes();
  const Matrix grad = net_.InputGradient(ws, dlogits);
  for (std::size_t k = 0; k < count; ++k) {
    values[k] = logits(static_cast<Eigen::Index>(k), target);
  }
  std::copy(grad.data(), grad.data() + grad.size(), gradients.begin());
}

AttributionMap IntegratedGradients(const DifferentiableScorer& scorer,
                                   const Tensor& x, const Tensor& baseline,
                                   int target, int steps, Quadrature rule) {
  RequireSameShape(x, baseline, "input vs baseline");
  if (x.shape() != scorer.input_shape()) {
    Fail(ErrorKind::kShape, "input shape " + ShapeToString(x.shape()) +
                                " does not match the model's " +
                                ShapeToString(scorer.input_shape()));
  }
  Require(steps >= 1, "steps must be >= 1");

  const std::size_t n = x.size();
  std::vector<double> diff(n);
  for (std::size_t i = 0; i < n; ++i) {
    diff[i] = static_cast<double>(x[i]) - static_cast<double>(baseline[i]);
  }

  const std::size_t total = static_cast<std::size_t>(steps);
  const std::size_t batch = std::max<std::size_t>(1, scorer.preferred_batch());
  const double offset = rule == Quadrature::kMidpoint ? 0.5 : 0.0;
  std::vector<double> points(std::min(batch, total) * n);
  std::vector<double> grads(points.size());
  std::vector<double> values(std::min(batch, total));
  std::vector<double> sum(n, 0.0);

  for (std::size_t start = 0; start < total; start += batch) {
    const std::size_t count = std::min(batch, total - start);
    for (std::size_t k = 0; k < count; ++k) {
      const double alpha =
          (static_cast<double>(start + k) + offset) / static_cast<double>(total);
      for (std::size_t i = 0; i < n; ++i) {
        points[k * n + i] = static_cast<double>(baseline[i]) + alpha * diff[i];
      }
    }
    scorer.Evaluate(std::span(points).first(count * n), count, target,
                    std::span(values).first(count),
                    std::span(grads).first(count * n));
    for (std::size_t k = 0; k < count; ++k) {
      for (std::size_t i = 0; i < n; ++i) {
        const double g = grads[k * n + i];
        if (!std::isfinite(g)) {
          Fail(ErrorKind::kNumeric, "non-finite gradient at step " +
                                        std::to_string(start + k + 1) +
                                        ", coordinate " + std::to_string(i));
        }
        sum[i] += g;
      }
    }
  }

  AttributionMap attr;
  attr.scores = Tensor(x.shape());
  for (std::size_t i = 0; i < n; ++i) {
    attr.scores[i] = diff[i] == 0.0
                         ? 0.0f
                         : static_cast<float>(diff[i] * (sum[i] / static_cast<double>(total)));
  }
  attr.baseline = baseline;
  attr.target = target;
  attr.steps = steps;
  attr.raw_sum = RawSum(attr.scores);

  std::vector<double> ends(2 * n);
  std::copy(x.values().begin(), x.values().end(), ends.begin());
  std::copy(baseline.values().begin(), baseline.values().end(),
            ends.begin() + static_cast<std::ptrdiff_t>(n));
  std::vector<double> end_values(2), end_grads(2 * n);
  scorer.Evaluate(ends, 2, target, end_values, end_grads);
  attr.logit_delta = end_values[0] - end_values[1];
  return attr;
}

AttributionMap IntegratedGradients(const ModelCheckpoint& model,
                                   const Tensor& x, const Tensor& baseline,
                                   int target, int steps) {
  return IntegratedGradients(NetworkScorer(model), x, baseline, target, steps);
}

double CompletenessGap(const AttributionMap& attr) {
  return std::abs(attr.raw_sum - attr.logit_delta);
}

Tensor BlackBaseline() { return Tensor({kImageRows, kImageCols}); }

double RawSum(const Tensor& scores) {
  double total = 0.0;
  for (float v : scores.values()) total += v;
  return total;
}

namespace {
constexpr char kAttributionMagic[4] = {'I', 'G', 'A', 'T'};
}  // namespace

Bytes EncodeAttribution(const AttributionMap& attr, const nlohmann::json& extra) {
  Require(attr.scores.shape() == attr.baseline.shape(),
          "attribution scores and baseline differ in shape");
  nlohmann::json meta = extra;
  meta["target"] = attr.target;
  meta["steps"] = attr.steps;
  meta["raw_sum"] = attr.raw_sum;
  meta["logit_delta"] = attr.logit_delta;
  const std::string text = meta.dump();

  ByteWriter w;
  w.PutString(std::string_view(kAttributionMagic, 4));
  w.PutU32LE(kAttributionVersion);
  w.PutU32LE(static_cast<std::uint32_t>(text.size()));
  w.PutString(text);
  w.PutU32LE(static_cast<std::uint32_t>(attr.scores.rank()));
  for (std::size_t d : attr.scores.shape()) w.PutU32LE(static_cast<std::uint32_t>(d));
  for (float v : attr.scores.values()) w.PutF32LE(v);
  for (float v : attr.baseline.values()) w.PutF32LE(v);
  const Digest digest = Sha256(w.bytes());
  w.PutBytes(digest);
  return w.Take();
}

AttributionMap DecodeAttribution(std::span<const std::uint8_t> bytes,
                                 nlohmann::json* metadata) {
  ByteReader r(bytes);
  if (r.String(4) != std::string_view(kAttributionMagic, 4)) {
    Fail(ErrorKind::kFormat, "not an attribution file (magic mismatch)");
  }
  const std::uint32_t version = r.U32LE();
  if (version != kAttributionVersion) {
    Fail(ErrorKind::kVersion, "attribution version " + std::to_string(version) +
                                  " is not supported");
  }
  if (bytes.size() < 32) Fail(ErrorKind::kLength, "attribution file truncated");
  const auto body = bytes.first(bytes.size() - 32);
  const Digest actual = Sha256(body);
  if (!std::equal(actual.begin(), actual.end(), bytes.end() - 32)) {
    Fail(ErrorKind::kDigest, "attribution content digest mismatch");
  }
  ByteReader b(body);
  b.Take(8);
  const std::string text = b.String(b.U32LE());
  nlohmann::json meta = nlohmann::json::parse(text, nullptr, false);
  if (meta.is_discarded() || !meta.is_object()) {
    Fail(ErrorKind::kFormat, "attribution metadata is not a JSON object");
  }
  const std::uint32_t rank = b.U32LE();
  if (rank > 8) Fail(ErrorKind::kFormat, "implausible attribution rank");
  Shape shape(rank);
  for (auto& d : shape) d = b.U32LE();
  const std::size_t n = ShapeSize(shape);
  std::vector<float> scores(n), base(n);
  for (float& v : scores) v = b.F32LE();
  for (float& v : base) v = b.F32LE();
  if (b.remaining() != 0) Fail(ErrorKind::kFormat, "trailing attribution bytes");

  AttributionMap attr;
  attr.scores = Tensor(shape, std::move(scores));
  attr.baseline = Tensor(shape, std::move(base));
  try {
    attr.target = meta.at("target").get<int>();
    attr.steps = meta.at("steps").get<int>();
    attr.raw_sum = meta.at("raw_sum").get<double>();
    attr.logit_delta = meta.at("logit_delta").get<double>();
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorKind::kFormat, std::string("attribution metadata: ") + e.what());
  }
  if (metadata) *metadata = std::move(meta);
  return attr;
}

std::string AttributionFilename(std::size_t image_id, const std::string& stage) {
  return "attr_" + std::to_string(image_id) + "_" + stage + ".igattr";
}

}  // namespace attrib
