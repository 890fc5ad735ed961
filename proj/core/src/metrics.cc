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

#include "attrib/metrics.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "attrib/parallel.h"
#include "attrib/rng.h"

namespace attrib {
namespace {

double Pearson(std::span<const double> a, std::span<const double> b) {
  const double n = static_cast<double>(a.size());
  const double mean_a = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mean_b = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double cov = 0.0, var_a = 0.0, var_b = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - mean_a;
    const double db = b[i] - mean_b;
    cov += da * db;
    var_a += da * da;
    var_b += db * db;
  }
  return std::clamp(cov / std::sqrt(var_a * var_b), -1.0, 1.0);
}

bool IsConstant(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [&](double x) { return x == v[0]; });
}

std::string FormatDouble(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::vector<double> AverageRanks(std::span<const double> values) {
  const std::size_t n = values.size();
  for (double v : values) {
    Require(!std::isnan(v), "cannot rank NaN");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return values[i] < values[j];
  });
  std::vector<double> ranks(n);
  for (std::size_t start = 0; start < n;) {
    std::size_t end = start + 1;
    while (end < n && values[order[end]] == values[order[start]]) ++end;
    // Ranks start+1 .. end share their mean.
    const double rank = (static_cast<double>(start + 1) + static_cast<double>(end)) / 2.0;
    for (std::size_t k = start; k < end; ++k) ranks[order[k]] = rank;
    start = end;
  }
  return ranks;
}

double Spearman(std::span<const double> a, std::span<const double> b) {
  Require(a.size() == b.size(), "spearman: length mismatch (" +
                                    std::to_string(a.size()) + " vs " +
                                    std::to_string(b.size()) + ")");
  Require(a.size() >= 2, "spearman needs at least two values");
  const std::vector<double> ra = AverageRanks(a);
  const std::vector<double> rb = AverageRanks(b);
  if (IsConstant(ra) || IsConstant(rb)) return ra == rb ? 1.0 : 0.0;
  return Pearson(ra, rb);
}

double SpearmanNonzero(std::span<const double> a, std::span<const double> b,
                       std::span<const double> x) {
  Require(a.size() == b.size() && a.size() == x.size(),
          "spearman_nonzero: length mismatch");
  std::vector<double> ka, kb;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] != 0.0) {
      ka.push_back(std::abs(a[i]));
      kb.push_back(std::abs(b[i]));
    }
  }
  if (ka.size() < 2) {
    Fail(ErrorKind::kDomain, "spearman_nonzero needs at least two nonzero "
                             "reference entries, found " +
                                 std::to_string(ka.size()));
  }
  return Spearman(ka, kb);
}

const char* VariantName(Variant v) {
  switch (v) {
    case Variant::kUnnormalized: return "unnormalized";
    case Variant::kAbsolute: return "absolute";
    case Variant::kAbsoluteNonzero: return "absolute_nonzero";
  }
  return "unknown";
}

std::vector<double> ToDouble(const Tensor& t) {
  return std::vector<double>(t.values().begin(), t.values().end());
}

double Correlate(Variant variant, const Tensor& a, const Tensor& b,
                 const Tensor& x) {
  RequireSameShape(a, b, "correlate");
  RequireSameShape(a, x, "correlate");
  std::vector<double> da = ToDouble(a), db = ToDouble(b);
  switch (variant) {
    case Variant::kUnnormalized:
      return Spearman(da, db);
    case Variant::kAbsolute:
      for (double& v : da) v = std::abs(v);
      for (double& v : db) v = std::abs(v);
      return Spearman(da, db);
    case Variant::kAbsoluteNonzero:
      return SpearmanNonzero(da, db, ToDouble(x));
  }
  return 0.0;
}

SampleStats Summarize(std::span<const double> values) {
  SampleStats s;
  if (values.empty()) return s;
  const double n = static_cast<double>(values.size());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(ss / (n - 1.0));
  }
  return s;
}

std::vector<SaturationPoint> ZeroSaturationCurve(
    std::size_t n, std::span<const std::size_t> k_grid, int trials,
    std::uint64_t seed, int threads) {
  Require(trials >= 1, "trials must be >= 1");
  Require(n >= 2, "vector length must be >= 2");
  for (std::size_t k : k_grid) {
    Require(k <= n, "k = " + std::to_string(k) + " exceeds n = " + std::to_string(n));
  }
  std::vector<SaturationPoint> curve(k_grid.size());
  ParallelFor(k_grid.size(), threads, [&](std::size_t g) {
    const std::size_t k = k_grid[g];
    std::vector<double> corr(static_cast<std::size_t>(trials));
    std::vector<double> a(n), b(n);
    for (int t = 0; t < trials; ++t) {
      const std::uint64_t trial_seed = DeriveSeed(DeriveSeed(seed, k), static_cast<std::uint64_t>(t));
      Rng rng(trial_seed);
      for (std::size_t i = 0; i < n; ++i) {
        a[i] = rng.UniformPositive();
        b[i] = rng.UniformPositive();
      }
      for (std::size_t i : SampleWithoutReplacement(n, k, DeriveSeed(trial_seed, "zeros"))) {
        a[i] = 0.0;
        b[i] = 0.0;
      }
      corr[static_cast<std::size_t>(t)] = Spearman(a, b);
    }
    const SampleStats s = Summarize(corr);
    curve[g] = {k, s.mean, s.stddev};
  });
  return curve;
}

std::vector<std::size_t> DefaultSaturationGrid(std::size_t n) {
  std::vector<std::size_t> grid;
  for (std::size_t i = 0; i <= 16; ++i) grid.push_back(n * i / 16);
  return grid;
}

double FloorCorrelation(const Tensor& x, std::span<const double> r1,
                        std::span<const double> r2) {
  Require(r1.size() == x.size() && r2.size() == x.size(),
          "random vectors must match the image size");
  std::vector<double> v1(x.size()), v2(x.size()), xd = ToDouble(x);
  for (std::size_t i = 0; i < x.size(); ++i) {
    v1[i] = xd[i] * r1[i];
    v2[i] = xd[i] * r2[i];
  }
  return SpearmanNonzero(v1, v2, xd);
}

FloorResult RandomIgFloor(const ImageSet& images, int trials,
                          std::uint64_t seed, int threads) {
  if (images.images.empty()) Fail(ErrorKind::kDomain, "empty image sample");
  Require(trials >= 1, "trials must be >= 1");
  const auto t_count = static_cast<std::size_t>(trials);
  FloorResult result;
  result.samples.resize(images.size() * t_count);
  ParallelFor(images.size(), threads, [&](std::size_t i) {
    const Tensor& x = images.images[i];
    std::vector<double> r1(x.size()), r2(x.size());
    for (std::size_t t = 0; t < t_count; ++t) {
      Rng rng(DeriveSeed(DeriveSeed(seed, i), t));
      for (double& v : r1) v = rng.Normal();
      for (double& v : r2) v = rng.Normal();
      result.samples[i * t_count + t] = FloorCorrelation(x, r1, r2);
    }
  });
  const SampleStats s = Summarize(result.samples);
  const double half =
      kZ995 * s.stddev / std::sqrt(static_cast<double>(result.samples.size()));
  result.mean = s.mean;
  result.ci_low = s.mean - half;
  result.ci_high = s.mean + half;
  return result;
}

double SweepReport::MeanAbsRawSum(std::size_t stage) const {
  double total = 0.0;
  for (const AttributionMap& m : maps.at(stage)) total += std::abs(m.raw_sum);
  return maps[stage].empty() ? 0.0 : total / static_cast<double>(maps[stage].size());
}

SweepReport RunSweep(const ModelCheckpoint& trained, const ImageSet& images,
                     std::span<const std::size_t> image_ids,
                     const SweepOptions& options) {
  Require(images.labeled(), "sweep images must be labeled");
  Require(image_ids.size() == images.size(),
          "one image id is needed per sweep image");
  Require(!options.stages.empty(), "sweep needs at least one stage");

  const std::vector<StageModel> all = SweepStages(trained, options.master_seed);
  std::vector<const StageModel*> chosen;
  for (Stage s : options.stages) chosen.push_back(&all[static_cast<std::size_t>(s)]);
  std::vector<NetworkScorer> scorers;
  scorers.reserve(chosen.size());
  for (const StageModel* sm : chosen) scorers.emplace_back(sm->model);
  const NetworkScorer original(trained);

  const std::size_t n_stages = chosen.size();
  const std::size_t n_images = images.size();
  SweepReport report;
  report.master_seed = options.master_seed;
  report.steps = options.steps;
  report.image_ids.assign(image_ids.begin(), image_ids.end());
  for (std::uint8_t l : images.labels) report.labels.push_back(l);
  for (const StageModel* sm : chosen) report.stages.emplace_back(StageName(sm->stage.stage));
  report.maps.assign(n_stages, std::vector<AttributionMap>(n_images));
  for (auto& v : report.values) {
    v.assign(n_stages, std::vector<double>(n_images, 0.0));
  }

  const Tensor baseline = BlackBaseline();
  ParallelFor(n_images, options.threads, [&](std::size_t i) {
    const Tensor& x = images.images[i];
    const int label = images.labels[i];
    std::string context = "image " + std::to_string(image_ids[i]) + ", stage Original";
    try {
      const AttributionMap reference =
          IntegratedGradients(original, x, baseline, label, options.steps);
      for (std::size_t s = 0; s < n_stages; ++s) {
        context = "image " + std::to_string(image_ids[i]) + ", stage " + report.stages[s];
        AttributionMap attr =
            chosen[s]->stage.stage == Stage::kOriginal
                ? reference
                : IntegratedGradients(scorers[s], x, baseline, label, options.steps);
        for (Variant v : kVariants) {
          report.values[static_cast<std::size_t>(v)][s][i] =
              Correlate(v, reference.scores, attr.scores, x);
        }
        report.maps[s][i] = std::move(attr);
      }
    } catch (const Error& e) {
      throw Error(e.kind(), context + ": " + e.detail());
    }
  });

  for (Variant v : kVariants) {
    const auto vi = static_cast<std::size_t>(v);
    for (std::size_t s = 0; s < n_stages; ++s) {
      report.stats[vi].push_back(Summarize(report.values[vi][s]));
    }
  }
  return report;
}

std::string SweepCsv(const SweepReport& report) {
  std::string out = "stage,variant,mean,stddev,n\n";
  for (std::size_t s = 0; s < report.stages.size(); ++s) {
    for (Variant v : kVariants) {
      const SampleStats& st = report.stats[static_cast<std::size_t>(v)][s];
      out += report.stages[s] + "," + VariantName(v) + "," + FormatDouble(st.mean) +
             "," + FormatDouble(st.stddev) + "," +
             std::to_string(report.n_images()) + "\n";
    }
  }
  return out;
}

nlohmann::json SweepJson(const SweepReport& report) {
  nlohmann::json j;
  j["stages"] = report.stages;
  j["master_seed"] = report.master_seed;
  j["steps"] = report.steps;
  j["n_images"] = report.n_images();
  j["image_ids"] = report.image_ids;
  j["labels"] = report.labels;
  nlohmann::json variants = nlohmann::json::object();
  for (Variant v : kVariants) {
    const auto vi = static_cast<std::size_t>(v);
    nlohmann::json per_stage = nlohmann::json::array();
    for (std::size_t s = 0; s < report.stages.size(); ++s) {
      per_stage.push_back({{"stage", report.stages[s]},
                           {"mean", report.stats[vi][s].mean},
                           {"stddev", report.stats[vi][s].stddev},
                           {"per_image", report.values[vi][s]}});
    }
    variants[VariantName(v)] = per_stage;
  }
  j["variants"] = variants;
  nlohmann::json attributions = nlohmann::json::array();
  for (std::size_t s = 0; s < report.stages.size(); ++s) {
    nlohmann::json raw = nlohmann::json::array(), delta = nlohmann::json::array(),
                   gap = nlohmann::json::array();
    for (const AttributionMap& m : report.maps[s]) {
      raw.push_back(m.raw_sum);
      delta.push_back(m.logit_delta);
      gap.push_back(CompletenessGap(m));
    }
    attributions.push_back({{"stage", report.stages[s]},
                            {"mean_abs_raw_sum", report.MeanAbsRawSum(s)},
                            {"raw_sum", raw},
                            {"logit_delta", delta},
                            {"completeness_gap", gap}});
  }
  j["attributions"] = attributions;
  return j;
}

std::string SaturationCsv(std::span<const SaturationPoint> curve) {
  std::string out = "k,mean,stddev\n";
  for (const SaturationPoint& p : curve) {
    out += std::to_string(p.k) + "," + FormatDouble(p.mean) + "," +
           FormatDouble(p.stddev) + "\n";
  }
  return out;
}

}  // namespace attrib
