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

#ifndef ATTRIB_RANDOMIZATION_H_
#define ATTRIB_RANDOMIZATION_H_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "attrib/network.h"

namespace attrib {

// Cascading randomisation stages. Each stage re-initialises one more layer,
// starting from the top of the network.
enum class Stage { kOriginal, kOutput, kDense1, kConv2, kConv1 };
inline constexpr std::array<Stage, 5> kStageOrder = {
    Stage::kOriginal, Stage::kOutput, Stage::kDense1, Stage::kConv2,
    Stage::kConv1};

const char* StageName(Stage stage);
std::optional<Stage> ParseStageName(std::string_view name);

// Layers randomised by `stage`, top-down (Output first).
std::vector<std::string> RandomizedLayers(Stage stage);

// Re-initialisation distribution: N(0, 0.01^2) truncated to +/- 2 sigma.
inline constexpr double kReinitStddev = 0.01;
inline constexpr double kTruncationSigmas = 2.0;

struct SweepStage {
  Stage stage = Stage::kOriginal;
  std::vector<std::string> randomized_layers;
  // Parent of the per-layer streams: layer L draws from
  // DeriveSeed(seed, "reinit/" + L), so a layer gets the same values in every
  // stage that randomises it.
  std::uint64_t seed = 0;
};

SweepStage MakeStage(Stage stage, std::uint64_t seed);

// Rejects unknown layer names and sets that are not the top-down prefix
// belonging to `stage.stage` (kContract).
void ValidateStage(const SweepStage& stage);

// Every weight and bias of the stage's layers replaced by fresh draws; other
// layers copied bit-for-bit.
ModelCheckpoint CascadingRandomize(const ModelCheckpoint& model,
                                   const SweepStage& stage);

struct StageModel {
  SweepStage stage;
  ModelCheckpoint model;
};

// All five stages in order, each derived from `model` itself.
std::vector<StageModel> SweepStages(const ModelCheckpoint& model,
                                    std::uint64_t master_seed);

// "stage_<name>.igck"
std::string StageCheckpointFilename(Stage stage);

}  // namespace attrib

#endif  // ATTRIB_RANDOMIZATION_H_
