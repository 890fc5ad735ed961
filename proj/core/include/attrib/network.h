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

#ifndef ATTRIB_NETWORK_H_
#define ATTRIB_NETWORK_H_

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "attrib/bytes.h"
#include "attrib/data.h"
#include "attrib/tensor.h"

namespace attrib {

// Layers in bottom-up order.
enum class LayerId { kConv1 = 0, kConv2 = 1, kDense1 = 2, kOutput = 3 };
inline constexpr std::size_t kNumLayers = 4;
inline constexpr std::array<LayerId, kNumLayers> kLayerOrder = {
    LayerId::kConv1, LayerId::kConv2, LayerId::kDense1, LayerId::kOutput};

const char* LayerName(LayerId id);
std::optional<LayerId> ParseLayerName(std::string_view name);

inline constexpr std::size_t kKernel = 5;
inline constexpr std::size_t kPad = 2;

// Channel widths of the conv-pool-conv-pool-dense-dense topology. The
// canonical widths are the only ones the tooling ships; narrower variants
// exist so that exhaustive numerical checks stay cheap.
struct Architecture {
  std::size_t conv1_channels = 32;
  std::size_t conv2_channels = 64;
  std::size_t dense_units = 1024;

  std::size_t flat_features() const { return 7 * 7 * conv2_channels; }
  Shape WeightShape(LayerId id) const;
  Shape BiasShape(LayerId id) const;
  bool operator==(const Architecture&) const = default;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct LayerParams {
  std::string name;
  Tensor weight;
  Tensor bias;
  bool operator==(const LayerParams&) const = default;
};

// Conv weights are [ky, kx, in, out]; dense weights are [in, out]. Dense1
// consumes the pooled Conv2 map flattened in (row, col, channel) order.
struct ModelCheckpoint {
  std::vector<LayerParams> layers;
  std::uint32_t arch_version = kCheckpointVersion;
  std::uint64_t seed_provenance = 0;

  LayerParams& layer(LayerId id) { return layers.at(static_cast<std::size_t>(id)); }
  const LayerParams& layer(LayerId id) const {
    return layers.at(static_cast<std::size_t>(id));
  }
  // Infers the widths from the tensor shapes; throws unless they are
  // consistent with the topology.
  Architecture architecture() const;

  bool operator==(const ModelCheckpoint&) const = default;
};

// Layer order, names, shapes. Throws kContract / kShape.
void ValidateCheckpoint(const ModelCheckpoint& model);

// He-uniform weights, zero biases.
ModelCheckpoint InitializeModel(std::uint64_t seed,
                                const Architecture& arch = Architecture{});

// Container: "IGCK", u32 version, u32 layer count, then per layer the
// name (u32 length + UTF-8), weight shape (u32 rank + u32 dims), bias shape
// (u32 rank + u32 dims), weight and bias as little-endian f32. Then the u64
// seed provenance and a trailing SHA-256 over every preceding byte.
Bytes EncodeCheckpoint(const ModelCheckpoint& model);
ModelCheckpoint DecodeCheckpoint(std::span<const std::uint8_t> bytes);
void SaveCheckpoint(const ModelCheckpoint& model,
                    const std::filesystem::path& path);
ModelCheckpoint LoadCheckpoint(const std::filesystem::path& path);

template <typename Scalar>
class Network {
 public:
  using Matrix =
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

  // Intermediate state of one batched forward pass, retained for backward.
  struct Workspace {
    std::size_t batch = 0;
    Matrix input;   // B x 784
    Matrix col1;    // (B*784) x 25
    Matrix act1;    // (B*784) x c1, post-ReLU
    Matrix pool1;   // (B*196) x c1
    std::vector<std::int32_t> arg1;
    Matrix col2;    // (B*196) x (25*c1)
    Matrix act2;    // (B*196) x c2
    Matrix pool2;   // (B*49) x c2, i.e. B x flat_features in memory
    std::vector<std::int32_t> arg2;
    Matrix act3;    // B x dense
    Matrix logits;  // B x 10
  };

  struct Gradients {
    std::array<Matrix, kNumLayers> weights;
    std::array<RowVector, kNumLayers> biases;
  };

  explicit Network(const ModelCheckpoint& model);

  const Architecture& architecture() const { return arch_; }

  // `inputs` is B x 784, one image per row. Fills `ws` and returns a view of
  // the B x 10 logits stored in it.
  const Matrix& Forward(const Matrix& inputs, Workspace& ws) const;

  // d(sum_b dlogits[b] . logits[b]) / d input, B x 784.
  Matrix InputGradient(const Workspace& ws, const Matrix& dlogits) const;

  // Same objective, with respect to every parameter.
  Gradients ParameterGradient(const Workspace& ws, const Matrix& dlogits) const;

  Matrix& weights(LayerId id) { return weights_[static_cast<std::size_t>(id)]; }
  const Matrix& weights(LayerId id) const {
    return weights_[static_cast<std::size_t>(id)];
  }
  RowVector& bias(LayerId id) { return biases_[static_cast<std::size_t>(id)]; }
  const RowVector& bias(LayerId id) const {
    return biases_[static_cast<std::size_t>(id)];
  }

  // Rounds parameters to f32.
  ModelCheckpoint ToCheckpoint(std::uint64_t seed_provenance) const;

 private:
  void Backward(const Workspace& ws, const Matrix& dlogits, Gradients* params,
                Matrix* input) const;

  Architecture arch_;
  std::array<Matrix, kNumLayers> weights_;
  std::array<RowVector, kNumLayers> biases_;
};

extern template class Network<float>;
extern template class Network<double>;

// Convenience single-image entry points over a checkpoint.
Tensor Forward(const ModelCheckpoint& model, const Tensor& x);
Tensor InputGradient(const ModelCheckpoint& model, const Tensor& x, int label);

// Packs images into a B x 784 row-major matrix.
template <typename Scalar>
typename Network<Scalar>::Matrix PackImages(std::span<const Tensor> images);

struct TrainConfig {
  std::uint64_t seed = 1;
  int epochs = 5;
  double learning_rate = 0.01;
  double momentum = 0.9;
  std::size_t batch_size = 64;
  // Record the running mean loss every this many batches.
  std::size_t log_every = 100;
};

struct TrainReport {
  std::vector<double> loss_curve;   // running means, in order
  std::vector<double> epoch_loss;   // mean loss per epoch
  std::size_t batches = 0;
};

// Softmax cross-entropy, mini-batch SGD with momentum. Deterministic given
// config.seed. Throws kTraining if the loss goes non-finite.
ModelCheckpoint Train(const ImageSet& data, const TrainConfig& config,
                      TrainReport* report = nullptr,
                      const Architecture& arch = Architecture{});

// Fraction of images whose argmax logit equals the label.
double Accuracy(const ModelCheckpoint& model, const ImageSet& data,
                std::size_t batch_size = 256);

}  // namespace attrib

#endif  // ATTRIB_NETWORK_H_
