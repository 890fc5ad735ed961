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

#include "attrib/network.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "attrib/rng.h"

namespace attrib {
namespace {

constexpr std::array<const char*, kNumLayers> kLayerNames = {
    "Conv1", "Conv2", "Dense1", "Output"};
constexpr char kCheckpointMagic[4] = {'I', 'G', 'C', 'K'};

// A single non-finite entry makes the sum non-finite.
template <typename Matrix>
void CheckFinite(const Matrix& m, const char* where) {
  if (!std::isfinite(m.sum())) {
    Fail(ErrorKind::kNumeric, std::string("non-finite value in ") + where);
  }
}

// Same-padded 5x5 patches of an NHWC batch; row (b, y, x), column
// (ky, kx, c).
template <typename Matrix>
void Im2Col(const typename Matrix::Scalar* in, std::size_t batch,
            std::size_t height, std::size_t width, std::size_t channels,
            Matrix& col) {
  using S = typename Matrix::Scalar;
  col.setZero(static_cast<Eigen::Index>(batch * height * width),
              static_cast<Eigen::Index>(kKernel * kKernel * channels));
  const auto h = static_cast<std::ptrdiff_t>(height);
  const auto w = static_cast<std::ptrdiff_t>(width);
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::ptrdiff_t oy = 0; oy < h; ++oy) {
      for (std::ptrdiff_t ox = 0; ox < w; ++ox) {
        S* dst = col.data() + ((b * height + oy) * width + ox) * col.cols();
        for (std::size_t ky = 0; ky < kKernel; ++ky) {
          const std::ptrdiff_t iy = oy + static_cast<std::ptrdiff_t>(ky) - kPad;
          if (iy < 0 || iy >= h) continue;
          for (std::size_t kx = 0; kx < kKernel; ++kx) {
            const std::ptrdiff_t ix = ox + static_cast<std::ptrdiff_t>(kx) - kPad;
            if (ix < 0 || ix >= w) continue;
            const S* src = in + ((b * height + iy) * width + ix) * channels;
            std::copy(src, src + channels, dst + (ky * kKernel + kx) * channels);
          }
        }
      }
    }
  }
}

// Adjoint of Im2Col.
template <typename Matrix>
Matrix Col2Im(const Matrix& col, std::size_t batch, std::size_t height,
              std::size_t width, std::size_t channels) {
  using S = typename Matrix::Scalar;
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(batch * height * width),
                            static_cast<Eigen::Index>(channels));
  const auto h = static_cast<std::ptrdiff_t>(height);
  const auto w = static_cast<std::ptrdiff_t>(width);
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::ptrdiff_t oy = 0; oy < h; ++oy) {
      for (std::ptrdiff_t ox = 0; ox < w; ++ox) {
        const S* src = col.data() + ((b * height + oy) * width + ox) * col.cols();
        for (std::size_t ky = 0; ky < kKernel; ++ky) {
          const std::ptrdiff_t iy = oy + static_cast<std::ptrdiff_t>(ky) - kPad;
          if (iy < 0 || iy >= h) continue;
          for (std::size_t kx = 0; kx < kKernel; ++kx) {
            const std::ptrdiff_t ix = ox + static_cast<std::ptrdiff_t>(kx) - kPad;
            if (ix < 0 || ix >= w) continue;
            S* dst = out.data() + ((b * height + iy) * width + ix) * channels;
            const S* patch = src + (ky * kKernel + kx) * channels;
            for (std::size_t c = 0; c < channels; ++c) dst[c] += patch[c];
          }
        }
      }
    }
  }
  return out;
}

// 2x2 stride-2 max pool. Ties go to the lowest flat input index.
template <typename Matrix>
void MaxPool(const Matrix& in, std::size_t batch, std::size_t height,
             std::size_t width, Matrix& out, std::vector<std::int32_t>& arg) {
  const std::size_t channels = static_cast<std::size_t>(in.cols());
  const std::size_t oh = height / 2, ow = width / 2;
  out.resize(static_cast<Eigen::Index>(batch * oh * ow), in.cols());
  arg.resize(batch * oh * ow * channels);
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t oy = 0; oy < oh; ++oy) {
      for (std::size_t ox = 0; ox < ow; ++ox) {
        const std::size_t orow = (b * oh + oy) * ow + ox;
        const std::size_t base = (b * height + 2 * oy) * width + 2 * ox;
        const std::size_t rows[4] = {base, base + 1, base + width,
                                     base + width + 1};
        for (std::size_t c = 0; c < channels; ++c) {
          std::size_t best = rows[0];
          auto best_value = in(static_cast<Eigen::Index>(best), c);
          for (int k = 1; k < 4; ++k) {
            const auto v = in(static_cast<Eigen::Index>(rows[k]), c);
            if (v > best_value) {
              best_value = v;
              best = rows[k];
            }
          }
          out(static_cast<Eigen::Index>(orow), c) = best_value;
          arg[orow * channels + c] = static_cast<std::int32_t>(best);
        }
      }
    }
  }
}

template <typename Matrix>
Matrix Unpool(const Matrix& grad, const std::vector<std::int32_t>& arg,
              std::size_t in_rows) {
  const std::size_t channels = static_cast<std::size_t>(grad.cols());
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(in_rows), grad.cols());
  for (Eigen::Index r = 0; r < grad.rows(); ++r) {
    for (std::size_t c = 0; c < channels; ++c) {
      out(arg[static_cast<std::size_t>(r) * channels + c], c) += grad(r, c);
    }
  }
  return out;
}

// Preactivation -> ReLU in place, after a finiteness check.
template <typename Matrix>
void BiasRelu(Matrix& m, const typename Network<typename Matrix::Scalar>::RowVector& bias,
              const char* where) {
  m.rowwise() += bias;
  CheckFinite(m, where);
  m = m.cwiseMax(typename Matrix::Scalar{0});
}

// Zeroes gradient entries whose unit was inactive. ReLU'(0) is taken as 0.
template <typename Matrix>
void MaskInactive(Matrix& grad, const Matrix& act) {
  grad = (act.array() > 0).select(grad, typename Matrix::Scalar{0});
}

template <typename RowVector, typename Matrix>
RowVector ColumnSums(const Matrix& m) {
  return m.template cast<double>().colwise().sum().template cast<typename Matrix::Scalar>();
}

}  // namespace

const char* LayerName(LayerId id) {
  return kLayerNames[static_cast<std::size_t>(id)];
}

std::optional<LayerId> ParseLayerName(std::string_view name) {
  for (LayerId id : kLayerOrder) {
    if (name == LayerName(id)) return id;
  }
  return std::nullopt;
}

Shape Architecture::WeightShape(LayerId id) const {
  switch (id) {
    case LayerId::kConv1: return {kKernel, kKernel, 1, conv1_channels};
    case LayerId::kConv2: return {kKernel, kKernel, conv1_channels, conv2_channels};
    case LayerId::kDense1: return {flat_features(), dense_units};
    case LayerId::kOutput: return {dense_units, static_cast<std::size_t>(kNumClasses)};
  }
  return {};
}

Shape Architecture::BiasShape(LayerId id) const {
  return {WeightShape(id).back()};
}

Architecture ModelCheckpoint::architecture() const {
  if (layers.size() != kNumLayers) {
    Fail(ErrorKind::kContract, "checkpoint needs 4 layers, has " +
                                   std::to_string(layers.size()));
  }
  Architecture arch;
  const Shape& conv1 = layer(LayerId::kConv1).weight.shape();
  const Shape& conv2 = layer(LayerId::kConv2).weight.shape();
  const Shape& dense = layer(LayerId::kDense1).weight.shape();
  if (conv1.size() != 4 || conv2.size() != 4 || dense.size() != 2) {
    Fail(ErrorKind::kShape, "checkpoint weight ranks do not match the topology");
  }
  arch.conv1_channels = conv1[3];
  arch.conv2_channels = conv2[3];
  arch.dense_units = dense[1];
  return arch;
}

void ValidateCheckpoint(const ModelCheckpoint& model) {
  const Architecture arch = model.architecture();
  for (LayerId id : kLayerOrder) {
    const LayerParams& p = model.layer(id);
    if (p.name != LayerName(id)) {
      Fail(ErrorKind::kContract, "layer " +
                                     std::to_string(static_cast<int>(id)) +
                                     " is named '" + p.name + "', expected '" +
                                     LayerName(id) + "'");
    }
    if (p.weight.shape() != arch.WeightShape(id) ||
        p.bias.shape() != arch.BiasShape(id)) {
      Fail(ErrorKind::kShape, p.name + " has weight " +
                                  ShapeToString(p.weight.shape()) + " / bias " +
                                  ShapeToString(p.bias.shape()) + ", expected " +
                                  ShapeToString(arch.WeightShape(id)) + " / " +
                                  ShapeToString(arch.BiasShape(id)));
    }
  }
}

ModelCheckpoint InitializeModel(std::uint64_t seed, const Architecture& arch) {
  ModelCheckpoint model;
  model.seed_provenance = seed;
  for (LayerId id : kLayerOrder) {
    LayerParams p;
    p.name = LayerName(id);
    const Shape wshape = arch.WeightShape(id);
    const std::size_t fan_in = ShapeSize(wshape) / wshape.back();
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in));
    std::vector<float> w(ShapeSize(wshape));
    Rng rng(DeriveSeed(seed, std::string("init/") + p.name));
    for (float& v : w) v = static_cast<float>(rng.Uniform(-limit, limit));
    p.weight = Tensor(wshape, std::move(w));
    p.bias = Tensor(arch.BiasShape(id));
    model.layers.push_back(std::move(p));
  }
  return model;
}

Bytes EncodeCheckpoint(const ModelCheckpoint& model) {
  ValidateCheckpoint(model);
  ByteWriter w;
  w.PutString(std::string_view(kCheckpointMagic, 4));
  w.PutU32LE(model.arch_version);
  w.PutU32LE(static_cast<std::uint32_t>(model.layers.size()));
  auto put_shape = [&w](const Shape& shape) {
    w.PutU32LE(static_cast<std::uint32_t>(shape.size()));
    for (std::size_t d : shape) w.PutU32LE(static_cast<std::uint32_t>(d));
  };
  for (const LayerParams& p : model.layers) {
    w.PutU32LE(static_cast<std::uint32_t>(p.name.size()));
    w.PutString(p.name);
    put_shape(p.weight.shape());
    put_shape(p.bias.shape());
    for (float v : p.weight.values()) w.PutF32LE(v);
    for (float v : p.bias.values()) w.PutF32LE(v);
  }
  w.PutU32LE(static_cast<std::uint32_t>(model.seed_provenance));
  w.PutU32LE(static_cast<std::uint32_t>(model.seed_provenance >> 32));
  const Digest digest = Sha256(w.bytes());
  w.PutBytes(digest);
  return w.Take();
}

ModelCheckpoint DecodeCheckpoint(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  if (r.String(4) != std::string_view(kCheckpointMagic, 4)) {
    Fail(ErrorKind::kFormat, "not a checkpoint (magic mismatch)");
  }
  ModelCheckpoint model;
  model.arch_version = r.U32LE();
  if (model.arch_version != kCheckpointVersion) {
    Fail(ErrorKind::kVersion, "checkpoint version " +
                                  std::to_string(model.arch_version) +
                                  " is not supported (expected " +
                                  std::to_string(kCheckpointVersion) + ")");
  }
  if (bytes.size() < 32) Fail(ErrorKind::kLength, "checkpoint truncated");
  const auto body = bytes.first(bytes.size() - 32);
  const Digest actual = Sha256(body);
  if (!std::equal(actual.begin(), actual.end(), bytes.end() - 32)) {
    Fail(ErrorKind::kDigest, "checkpoint content digest mismatch");
  }

  ByteReader body_reader(body);
  body_reader.Take(8);
  const std::uint32_t count = body_reader.U32LE();
  if (count != kNumLayers) {
    Fail(ErrorKind::kFormat, "checkpoint declares " + std::to_string(count) +
                                 " layers");
  }
  auto read_shape = [&body_reader]() {
    const std::uint32_t rank = body_reader.U32LE();
    if (rank > 8) Fail(ErrorKind::kFormat, "implausible tensor rank");
    Shape shape(rank);
    for (auto& d : shape) d = body_reader.U32LE();
    return shape;
  };
  auto read_values = [&body_reader](const Shape& shape) {
    const std::size_t n = ShapeSize(shape);
    auto raw = body_reader.Take(n * 4);
    ByteReader vr(raw);
    std::vector<float> v(n);
    for (float& f : v) f = vr.F32LE();
    return Tensor(shape, std::move(v));
  };
  for (std::uint32_t i = 0; i < count; ++i) {
    LayerParams p;
    p.name = body_reader.String(body_reader.U32LE());
    const Shape wshape = read_shape();
    const Shape bshape = read_shape();
    p.weight = read_values(wshape);
    p.bias = read_values(bshape);
    model.layers.push_back(std::move(p));
  }
  const std::uint64_t lo = body_reader.U32LE();
  const std::uint64_t hi = body_reader.U32LE();
  model.seed_provenance = lo | hi << 32;
  if (body_reader.remaining() != 0) {
    Fail(ErrorKind::kFormat, "trailing bytes in checkpoint");
  }
  ValidateCheckpoint(model);
  return model;
}

void SaveCheckpoint(const ModelCheckpoint& model,
                    const std::filesystem::path& path) {
  WriteFile(path, EncodeCheckpoint(model));
}

ModelCheckpoint LoadCheckpoint(const std::filesystem::path& path) {
  return DecodeCheckpoint(ReadFile(path));
}

template <typename Scalar>
Network<Scalar>::Network(const ModelCheckpoint& model) {
  ValidateCheckpoint(model);
  arch_ = model.architecture();
  for (LayerId id : kLayerOrder) {
    const auto i = static_cast<std::size_t>(id);
    const LayerParams& p = model.layer(id);
    const auto cols = static_cast<Eigen::Index>(p.weight.shape().back());
    const auto rows = static_cast<Eigen::Index>(p.weight.size()) / cols;
    using FloatMatrix =
        Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    weights_[i] = Eigen::Map<const FloatMatrix>(p.weight.data(), rows, cols)
                      .template cast<Scalar>();
    biases_[i] = Eigen::Map<const Eigen::RowVectorXf>(p.bias.data(), cols)
                     .template cast<Scalar>();
  }
}

template <typename Scalar>
const typename Network<Scalar>::Matrix& Network<Scalar>::Forward(
    const Matrix& inputs, Workspace& ws) const {
  Require(inputs.cols() == static_cast<Eigen::Index>(kImagePixels),
          "network input must have 784 columns");
  CheckFinite(inputs, "input");
  const auto batch = static_cast<std::size_t>(inputs.rows());
  ws.batch = batch;
  ws.input = inputs;

  Im2Col(ws.input.data(), batch, kImageRows, kImageCols, 1, ws.col1);
  ws.act1.noalias() = ws.col1 * weights_[0];
  BiasRelu<Matrix>(ws.act1, biases_[0], "Conv1");
  MaxPool(ws.act1, batch, 28, 28, ws.pool1, ws.arg1);

  Im2Col(ws.pool1.data(), batch, 14, 14, arch_.conv1_channels, ws.col2);
  ws.act2.noalias() = ws.col2 * weights_[1];
  BiasRelu<Matrix>(ws.act2, biases_[1], "Conv2");
  MaxPool(ws.act2, batch, 14, 14, ws.pool2, ws.arg2);

  const Eigen::Map<const Matrix> flat(ws.pool2.data(),
                                      static_cast<Eigen::Index>(batch),
                                      static_cast<Eigen::Index>(arch_.flat_features()));
  ws.act3.noalias() = flat * weights_[2];
  BiasRelu<Matrix>(ws.act3, biases_[2], "Dense1");

  ws.logits.noalias() = ws.act3 * weights_[3];
  ws.logits.rowwise() += biases_[3];
  CheckFinite(ws.logits, "Output");
  return ws.logits;
}

template <typename Scalar>
void Network<Scalar>::Backward(const Workspace& ws, const Matrix& dlogits,
                               Gradients* params, Matrix* input) const {
  const std::size_t batch = ws.batch;
  Require(dlogits.rows() == static_cast<Eigen::Index>(batch) &&
              dlogits.cols() == kNumClasses,
          "dlogits must be B x 10");
  CheckFinite(dlogits, "Output gradient");

  Matrix d3 = dlogits * weights_[3].transpose();
  MaskInactive(d3, ws.act3);
  CheckFinite(d3, "Dense1 gradient");

  Matrix dflat = d3 * weights_[2].transpose();
  const Eigen::Map<const Matrix> dpool2(dflat.data(),
                                        static_cast<Eigen::Index>(batch * 49),
                                        static_cast<Eigen::Index>(arch_.conv2_channels));
  Matrix d2 = Unpool(Matrix(dpool2), ws.arg2, batch * 196);
  MaskInactive(d2, ws.act2);
  CheckFinite(d2, "Conv2 gradient");

  Matrix dcol2 = d2 * weights_[1].transpose();
  Matrix d1 = Unpool(Col2Im(dcol2, batch, 14, 14, arch_.conv1_channels),
                     ws.arg1, batch * 784);
  MaskInactive(d1, ws.act1);
  CheckFinite(d1, "Conv1 gradient");

  if (params) {
    const Eigen::Map<const Matrix> flat(ws.pool2.data(),
                                        static_cast<Eigen::Index>(batch),
                                        static_cast<Eigen::Index>(arch_.flat_features()));
    params->weights[3].noalias() = ws.act3.transpose() * dlogits;
    params->biases[3] = ColumnSums<RowVector>(dlogits);
    params->weights[2].noalias() = flat.transpose() * d3;
    params->biases[2] = ColumnSums<RowVector>(d3);
    params->weights[1].noalias() = ws.col2.transpose() * d2;
    params->biases[1] = ColumnSums<RowVector>(d2);
    params->weights[0].noalias() = ws.col1.transpose() * d1;
    params->biases[0] = ColumnSums<RowVector>(d1);
  }
  if (input) {
    Matrix dcol1 = d1 * weights_[0].transpose();
    Matrix dx = Col2Im(dcol1, batch, 28, 28, 1);
    *input = Eigen::Map<const Matrix>(dx.data(), static_cast<Eigen::Index>(batch),
                                      static_cast<Eigen::Index>(kImagePixels));
    CheckFinite(*input, "input gradient");
  }
}

template <typename Scalar>
typename Network<Scalar>::Matrix Network<Scalar>::InputGradient(
    const Workspace& ws, const Matrix& dlogits) const {
  Matrix out;
  Backward(ws, dlogits, nullptr, &out);
  return out;
}

template <typename Scalar>
typename Network<Scalar>::Gradients Network<Scalar>::ParameterGradient(
    const Workspace& ws, const Matrix& dlogits) const {
  Gradients grads;
  Backward(ws, dlogits, &grads, nullptr);
  return grads;
}

template <typename Scalar>
ModelCheckpoint Network<Scalar>::ToCheckpoint(std::uint64_t seed_provenance) const {
  ModelCheckpoint model;
  model.seed_provenance = seed_provenance;
  for (LayerId id : kLayerOrder) {
    const auto i = static_cast<std::size_t>(id);
    LayerParams p;
    p.name = LayerName(id);
    const Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> w =
        weights_[i].template cast<float>();
    const Eigen::RowVectorXf b = biases_[i].template cast<float>();
    p.weight = Tensor(arch_.WeightShape(id),
                      std::vector<float>(w.data(), w.data() + w.size()));
    p.bias = Tensor(arch_.BiasShape(id),
                    std::vector<float>(b.data(), b.data() + b.size()));
    model.layers.push_back(std::move(p));
  }
  return model;
}

template class Network<float>;
template class Network<double>;

template <typename Scalar>
typename Network<Scalar>::Matrix PackImages(std::span<const Tensor> images) {
  typename Network<Scalar>::Matrix m(static_cast<Eigen::Index>(images.size()),
                                     static_cast<Eigen::Index>(kImagePixels));
  for (std::size_t i = 0; i < images.size(); ++i) {
    if (images[i].size() != kImagePixels) {
      Fail(ErrorKind::kShape, "network input must be 28x28, got " +
                                  ShapeToString(images[i].shape()));
    }
    for (std::size_t p = 0; p < kImagePixels; ++p) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(p)) = images[i][p];
    }
  }
  return m;
}

template Network<float>::Matrix PackImages<float>(std::span<const Tensor>);
template Network<double>::Matrix PackImages<double>(std::span<const Tensor>);

Tensor Forward(const ModelCheckpoint& model, const Tensor& x) {
  const Network<float> net(model);
  Network<float>::Workspace ws;
  const auto& logits = net.Forward(PackImages<float>(std::span(&x, 1)), ws);
  return Tensor({static_cast<std::size_t>(kNumClasses)},
                std::vector<float>(logits.data(), logits.data() + kNumClasses));
}

Tensor InputGradient(const ModelCheckpoint& model, const Tensor& x, int label) {
  Require(label >= 0 && label < kNumClasses, "class must be in 0..9");
  const Network<float> net(model);
  Network<float>::Workspace ws;
  net.Forward(PackImages<float>(std::span(&x, 1)), ws);
  Network<float>::Matrix dlogits = Network<float>::Matrix::Zero(1, kNumClasses);
  dlogits(0, label) = 1.0f;
  const auto grad = net.InputGradient(ws, dlogits);
  return Tensor({kImageRows, kImageCols},
                std::vector<float>(grad.data(), grad.data() + kImagePixels));
}

ModelCheckpoint Train(const ImageSet& data, const TrainConfig& config,
                      TrainReport* report, const Architecture& arch) {
  if (data.images.empty()) Fail(ErrorKind::kDomain, "empty training set");
  Require(data.labeled(), "training data must be labeled");
  Require(config.batch_size > 0 && config.epochs >= 0,
          "batch size must be positive and epochs non-negative");

  using Matrix = Network<float>::Matrix;
  Network<float> net(InitializeModel(config.seed, arch));
  std::array<Matrix, kNumLayers> vel_w;
  std::array<Network<float>::RowVector, kNumLayers> vel_b;
  for (LayerId id : kLayerOrder) {
    const auto i = static_cast<std::size_t>(id);
    vel_w[i] = Matrix::Zero(net.weights(id).rows(), net.weights(id).cols());
    vel_b[i] = Network<float>::RowVector::Zero(net.bias(id).cols());
  }
  const auto lr = static_cast<float>(config.learning_rate);
  const auto mu = static_cast<float>(config.momentum);

  TrainReport local;
  TrainReport& rep = report ? *report : local;
  rep = TrainReport{};

  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng shuffle(DeriveSeed(config.seed, "shuffle"));
  Network<float>::Workspace ws;
  std::vector<Tensor> batch_images;
  double window_loss = 0.0;
  std::size_t window_batches = 0;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle.Shuffle(order);
    double epoch_loss = 0.0;
    std::size_t epoch_batches = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t b = std::min(config.batch_size, order.size() - start);
      batch_images.clear();
      for (std::size_t k = 0; k < b; ++k) {
        batch_images.push_back(data.images[order[start + k]]);
      }
      const Matrix& logits = net.Forward(PackImages<float>(batch_images), ws);

      Matrix dlogits(static_cast<Eigen::Index>(b), kNumClasses);
      double loss = 0.0;
      for (std::size_t k = 0; k < b; ++k) {
        const auto row = static_cast<Eigen::Index>(k);
        const int label = data.labels[order[start + k]];
        const double peak = logits.row(row).maxCoeff();
        double denom = 0.0;
        for (int c = 0; c < kNumClasses; ++c) denom += std::exp(logits(row, c) - peak);
        loss += -(logits(row, label) - peak - std::log(denom));
        for (int c = 0; c < kNumClasses; ++c) {
          const double p = std::exp(logits(row, c) - peak) / denom;
          dlogits(row, c) = static_cast<float>((p - (c == label)) / b);
        }
      }
      loss /= static_cast<double>(b);
      if (!std::isfinite(loss)) {
        Fail(ErrorKind::kTraining, "loss became non-finite at epoch " +
                                       std::to_string(epoch) + ", batch " +
                                       std::to_string(rep.batches));
      }

      auto grads = net.ParameterGradient(ws, dlogits);
      for (LayerId id : kLayerOrder) {
        const auto i = static_cast<std::size_t>(id);
        vel_w[i] = mu * vel_w[i] - lr * grads.weights[i];
        vel_b[i] = mu * vel_b[i] - lr * grads.biases[i];
        net.weights(id) += vel_w[i];
        net.bias(id) += vel_b[i];
      }

      ++rep.batches;
      epoch_loss += loss;
      ++epoch_batches;
      window_loss += loss;
      if (++window_batches == config.log_every) {
        rep.loss_curve.push_back(window_loss / static_cast<double>(window_batches));
        window_loss = 0.0;
        window_batches = 0;
      }
    }
    rep.epoch_loss.push_back(epoch_loss / static_cast<double>(epoch_batches));
  }
  if (window_batches > 0) {
    rep.loss_curve.push_back(window_loss / static_cast<double>(window_batches));
  }
  return net.ToCheckpoint(config.seed);
}

double Accuracy(const ModelCheckpoint& model, const ImageSet& data,
                std::size_t batch_size) {
  if (data.images.empty()) Fail(ErrorKind::kDomain, "empty evaluation set");
  Require(data.labeled(), "evaluation data must be labeled");
  const Network<float> net(model);
  Network<float>::Workspace ws;
  std::size_t correct = 0;
  for (std::size_t start = 0; start < data.size(); start += batch_size) {
    const std::size_t b = std::min(batch_size, data.size() - start);
    const auto& logits = net.Forward(
        PackImages<float>(std::span(data.images).subspan(start, b)), ws);
    for (std::size_t k = 0; k < b; ++k) {
      Eigen::Index best = 0;
      logits.row(static_cast<Eigen::Index>(k)).maxCoeff(&best);
      correct += (best == data.labels[start + k]);
    }
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

}  // namespace attrib
