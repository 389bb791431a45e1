// Copyright 2026 The TabForge Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// The tablature network. A 728-bit input (128 MIDI bits followed by four
// 150-bit history frames) goes through
//
//   dense 728->512, SELU
//   dense 512->448, SELU
//   dense 448->384, SELU            (latent)
//   dense 384->384, SELU, reshaped to 64 channels x 1 x 6
//   deconv 64->32, kernel 3x2, stride 1x2, SELU    -> 32 x 3 x 12
//   deconv 32->1,  kernel 2x4, stride 2x2, sigmoid -> 1 x 6 x 26
//   crop the last column                           -> 6 x 25
//
// The output is a per-cell score in (0, 1) over the fretboard.
#ifndef TABFORGE_NN_NETWORK_H_
#define TABFORGE_NN_NETWORK_H_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tabforge/fretboard.h"
#include "tabforge/nn/layers.h"
#include "tabforge/random.h"

namespace tabforge::nn {

struct NetworkSpec {
  static constexpr int kHistory = 4;
  static constexpr int kInput = kMidiBits + kHistory * kFrameBits;  // 728
  static constexpr int kHidden1 = 512;
  static constexpr int kHidden2 = 448;
  static constexpr int kLatent = 384;
  static constexpr int kGridChannels = 64;
  static constexpr int kGridH = 1;
  static constexpr int kGridW = 6;
  static constexpr int kOutH = kStrings;          // 6
  static constexpr int kOutW = kFretColumns + 1;  // 26 before the crop
  static constexpr int kOutput = kFrameBits;      // 150

  static constexpr DeconvGeometry deconv1() {
    return {kGridChannels, kGridH, kGridW, 32, 3, 2, 1, 2};
  }
  static constexpr DeconvGeometry deconv2() { return {32, 3, 12, 1, 2, 4, 2, 2}; }
};

// Parameter tensors in storage order.
enum Param : int {
  kDense1W, kDense1B,
  kDense2W, kDense2B,
  kDense3W, kDense3B,
  kProjectW, kProjectB,
  kDeconv1W, kDeconv1B,
  kDeconv2W, kDeconv2B,
  kParamCount
};

struct ParamInfo {
  std::string_view name;
  std::vector<std::size_t> shape;
};

const std::vector<ParamInfo>& parameter_layout();

inline constexpr int kWeightsFormatVersion = 1;

template <typename T>
struct ModelWeights {
  int format_version = kWeightsFormatVersion;
  std::array<Tensor<T>, kParamCount> params;

  Tensor<T>& operator[](int i) { return params[static_cast<std::size_t>(i)]; }
  const Tensor<T>& operator[](int i) const {
    return params[static_cast<std::size_t>(i)];
  }

  // All tensors with layout shapes, zero-filled.
  static ModelWeights zeros() {
    ModelWeights w;
    const auto& layout = parameter_layout();
    for (int i = 0; i < kParamCount; ++i) w[i] = Tensor<T>(layout[i].shape);
    return w;
  }
  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& t : params) n += t.size();
    return n;
  }
  void set_zero() {
    for (auto& t : params) t.fill(T(0));
  }
  template <typename U>
  ModelWeights<U> cast() const {
    ModelWeights<U> out;
    out.format_version = format_version;
    for (int i = 0; i < kParamCount; ++i) {
      out[i].shape = params[i].shape;
      out[i].data.assign(params[i].data.begin(), params[i].data.end());
    }
    return out;
  }

  bool operator==(const ModelWeights&) const = default;
};

// Throws WeightsError(kShape) naming the first tensor whose shape differs
// from the layout.
template <typename T>
void validate_shapes(const ModelWeights<T>& w);

// LeCun-normal weights (std = 1/sqrt(fan_in)), zero biases.
template <typename T>
ModelWeights<T> init_weights(std::uint64_t seed);

// Activations of one batch, kept for the backward pass.
template <typename T>
struct ForwardCache {
  Matrix<T> input;   // B x 728
  Matrix<T> z1, a1;  // B x 512
  Matrix<T> z2, a2;  // B x 448
  Matrix<T> z3, a3;  // B x 384
  Matrix<T> z4, a4;  // B x 384 == 64 x 1 x 6
  Matrix<T> z5, a5;  // B x 1152 == 32 x 3 x 12
  Matrix<T> z6, a6;  // B x 156 == 1 x 6 x 26
  Matrix<T> output;  // B x 150
};

// Runs the network on a batch (one 728-wide row per example) and returns
// the cropped 150-wide outputs. Throws NumericError naming the layer if an
// activation becomes non-finite.
template <typename T>
Matrix<T> forward_batch(const ModelWeights<T>& weights, const Matrix<T>& input,
                        ForwardCache<T>* cache = nullptr);

// Single example. Input must hold 728 values in {0, 1}.
ProbabilisticTablature forward(const ModelWeights<float>& weights,
                               std::span<const std::uint8_t> input);
ProbabilisticTablature forward(const ModelWeights<double>& weights,
                               std::span<const std::uint8_t> input);

// One named stage of a forward pass, for inspection.
template <typename T>
struct Activation {
  std::string name;
  std::vector<std::size_t> shape;
  std::vector<T> values;
};

// Every stage of a single-example forward pass, input to cropped output.
template <typename T>
std::vector<Activation<T>> forward_trace(const ModelWeights<T>& weights,
                                         std::span<const std::uint8_t> input);

// Mean squared error over all outputs of the batch, and its gradient with
// respect to `output` (written to doutput).
template <typename T>
T mse_loss(const Matrix<T>& output, const Matrix<T>& target, Matrix<T>& doutput);

// Accumulates parameter gradients of the batch into `grads` (which must be
// shaped like the weights) given dLoss/dOutput.
template <typename T>
void backward_batch(const ModelWeights<T>& weights, const ForwardCache<T>& cache,
                    const Matrix<T>& doutput, ModelWeights<T>& grads);

// Forward + MSE + backward for one batch. `grads` is overwritten.
template <typename T>
T loss_and_gradients(const ModelWeights<T>& weights, const Matrix<T>& input,
                     const Matrix<T>& target, ModelWeights<T>& grads);

// Single-example convenience over binary vectors (728 in, 150 target).
template <typename T>
T backward(const ModelWeights<T>& weights, std::span<const std::uint8_t> input,
           std::span<const std::uint8_t> target, ModelWeights<T>& grads);

// --- Optimizer --------------------------------------------------------------

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

template <typename T>
struct AdamState {
  std::int64_t step = 0;
  ModelWeights<T> m;
  ModelWeights<T> v;

  static AdamState zeros() { return {0, ModelWeights<T>::zeros(), ModelWeights<T>::zeros()}; }
  bool operator==(const AdamState&) const = default;
};

// Bias-corrected Adam update of every parameter.
template <typename T>
void adam_step(ModelWeights<T>& weights, const ModelWeights<T>& grads,
               AdamState<T>& state, const AdamConfig& cfg);

// --- Weight files -------------------------------------------------------------

std::vector<std::uint8_t> encode_weights(const ModelWeights<float>& weights);
ModelWeights<float> decode_weights(std::span<const std::uint8_t> bytes);
void save_weights(const ModelWeights<float>& weights, const std::string& path);
ModelWeights<float> load_weights(const std::string& path);

// Helpers for building network inputs.
template <typename T>
Matrix<T> to_matrix(std::span<const std::uint8_t> bits, std::size_t width);

}  // namespace tabforge::nn

#endif  // TABFORGE_NN_NETWORK_H_
