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

#include "attrib/randomization.h"

#include <algorithm>

#include "attrib/rng.h"

namespace attrib {
namespace {

constexpr std::array<const char*, 5> kStageNames = {"Original", "Output",
                                                    "Dense1", "Conv2", "Conv1"};
// Top-down layer order; stage k randomises the first k entries.
constexpr std::array<LayerId, kNumLayers> kTopDown = {
    LayerId::kOutput, LayerId::kDense1, LayerId::kConv2, LayerId::kConv1};

void Reinitialize(Tensor& t, Rng& rng) {
  for (float& v : t.values()) {
    v = static_cast<float>(
        rng.TruncatedNormal(0.0, kReinitStddev, kTruncationSigmas));
  }
}

}  // namespace

const char* StageName(Stage stage) {
  return kStageNames[static_cast<std::size_t>(stage)];
}

std::optional<Stage> ParseStageName(std::string_view name) {
  for (Stage s : kStageOrder) {
    if (name == StageName(s)) return s;
  }
  return std::nullopt;
}

std::vector<std::string> RandomizedLayers(Stage stage) {
  std::vector<std::string> layers;
  for (std::size_t i = 0; i < static_cast<std::size_t>(stage); ++i) {
    layers.emplace_back(LayerName(kTopDown[i]));
  }
  return layers;
}

SweepStage MakeStage(Stage stage, std::uint64_t seed) {
  return SweepStage{stage, RandomizedLayers(stage), seed};
}

void ValidateStage(const SweepStage& stage) {
  for (const std::string& name : stage.randomized_layers) {
    if (!ParseLayerName(name)) {
      Fail(ErrorKind::kContract, "unknown layer '" + name + "'");
    }
  }
  if (stage.randomized_layers != RandomizedLayers(stage.stage)) {
    Fail(ErrorKind::kContract,
         std::string("randomized layers do not form the top-down prefix for "
                     "stage ") +
             StageName(stage.stage));
  }
}

ModelCheckpoint CascadingRandomize(const ModelCheckpoint& model,
                                   const SweepStage& stage) {
  ValidateCheckpoint(model);
  ValidateStage(stage);
  ModelCheckpoint out = model;
  for (const std::string& name : stage.randomized_layers) {
    LayerParams& p = out.layer(*ParseLayerName(name));
    Rng rng(DeriveSeed(stage.seed, "reinit/" + name));
    Reinitialize(p.weight, rng);
    Reinitialize(p.bias, rng);
  }
  return out;
}

std::vector<StageModel> SweepStages(const ModelCheckpoint& model,
                                    std::uint64_t master_seed) {
  std::vector<StageModel> stages;
  const std::uint64_t cascade_seed = DeriveSeed(master_seed, "cascade");
  for (Stage s : kStageOrder) {
    SweepStage stage = MakeStage(s, cascade_seed);
    stages.push_back({stage, CascadingRandomize(model, stage)});
  }
  return stages;
}

std::string StageCheckpointFilename(Stage stage) {
  return std::string("stage_") + StageName(stage) + ".igck";
}

}  // namespace attrib
