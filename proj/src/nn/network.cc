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
#include "tabforge/nn/network.h"

#include <algorithm>
#include <cmath>

#include "tabforge/error.h"

namespace tabforge::nn {

const std::vector<ParamInfo>& parameter_layout() {
  using S = NetworkSpec;
  static const std::vector<ParamInfo> layout = [] {
    auto dims = [](auto... d) {
      return std::vector<std::size_t>{static_cast<std::size_t>(d)...};
    };
    return std::vector<ParamInfo>{
        {"dense1.weight", dims(S::kHidden1, S::kInput)},
        {"dense1.bias", dims(S::kHidden1)},
        {"dense2.weight", dims(S::kHidden2, S::kHidden1)},
        {"dense2.bias", dims(S::kHidden2)},
        {"dense3.weight", dims(S::kLatent, S::kHidden2)},
        {"dense3.bias", dims(S::kLatent)},
        {"project.weight", dims(S::kLatent, S::kLatent)},
        {"project.bias", dims(S::kLatent)},
        {"deconv1.weight", S::deconv1().kernel_shape()},
        {"deconv1.bias", dims(S::deconv1().out_channels)},
        {"deconv2.weight", S::deconv2().kernel_shape()},
        {"deconv2.bias", dims(S::deconv2().out_channels)},
    };
  }();
  return layout;
}

template <typename T>
void validate_shapes(const ModelWeights<T>& w) {
  const auto& layout = parameter_layout();
  for (int i = 0; i < kParamCount; ++i) {
    if (w[i].shape != layout[i].shape ||
        w[i].data.size() != Tensor<T>::element_count(layout[i].shape)) {
      throw WeightsError(WeightsError::Kind::kShape,
                         "tensor '" + std::string(layout[i].name) +
                             "' has the wrong shape");
    }
  }
}

namespace {

std::size_t fan_in(int param) {
  const auto& shape = parameter_layout()[param].shape;
  if (param == kDeconv1W || param == kDeconv2W) {
    const auto g = param == kDeconv1W ? NetworkSpec::deconv1() : NetworkSpec::deconv2();
    return std::max<std::size_t>(
        1, static_cast<std::size_t>(g.in_channels) * g.kernel_h * g.kernel_w /
               (g.stride_h * g.stride_w));
  }
  return shape[1];
}

template <typename T>
void check_finite(const Matrix<T>& m, const char* layer) {
  if (!m.allFinite()) {
    throw NumericError(std::string("non-finite activation in layer ") + layer);
  }
}

template <typename T>
std::span<const T> row_span(const Matrix<T>& m, Eigen::Index r) {
  return {m.data() + r * m.cols(), static_cast<std::size_t>(m.cols())};
}

template <typename T>
std::span<T> row_span(Matrix<T>& m, Eigen::Index r) {
  return {m.data() + r * m.cols(), static_cast<std::size_t>(m.cols())};
}

template <typename T>
std::span<const T> span_of(const Tensor<T>& t) {
  return {t.data.data(), t.data.size()};
}

template <typename T>
std::span<T> span_of(Tensor<T>& t) {
  return {t.data.data(), t.data.size()};
}

}  // namespace

template <typename T>
ModelWeights<T> init_weights(std::uint64_t seed) {
  ModelWeights<T> w = ModelWeights<T>::zeros();
  Rng rng = make_rng(seed, Stream::kInit);
  for (int i = 0; i < kParamCount; ++i) {
    if (parameter_layout()[i].shape.size() == 1) continue;  // biases stay 0
    const double stddev = 1.0 / std::sqrt(static_cast<double>(fan_in(i)));
    for (auto& v : w[i].data) v = static_cast<T>(stddev * normal01(rng));
  }
  return w;
}

template <typename T>
Matrix<T> to_matrix(std::span<const std::uint8_t> bits, std::size_t width) {
  if (bits.size() != width) {
    throw ContractViolation("expected " + std::to_string(width) +
                            " input values, got " + std::to_string(bits.size()));
  }
  Matrix<T> m(1, static_cast<Eigen::Index>(width));
  for (std::size_t i = 0; i < width; ++i) {
    if (bits[i] > 1) throw ContractViolation("input values must be 0 or 1");
    m(0, static_cast<Eigen::Index>(i)) = static_cast<T>(bits[i]);
  }
  return m;
}

template <typename T>
Matrix<T> forward_batch(const ModelWeights<T>& weights, const Matrix<T>& input,
                        ForwardCache<T>* cache) {
  using S = NetworkSpec;
  if (input.cols() != S::kInput) {
    throw ContractViolation("network input must be 728 wide, got " +
                            std::to_string(input.cols()));
  }
  ForwardCache<T> local;
  ForwardCache<T>& c = cache != nullptr ? *cache : local;
  const Eigen::Index batch = input.rows();

  c.input = input;
  dense_forward(c.input, weights[kDense1W], weights[kDense1B], c.z1);
  selu_forward(c.z1, c.a1);
  check_finite(c.a1, "dense1");
  dense_forward(c.a1, weights[kDense2W], weights[kDense2B], c.z2);
  selu_forward(c.z2, c.a2);
  check_finite(c.a2, "dense2");
  dense_forward(c.a2, weights[kDense3W], weights[kDense3B], c.z3);
  selu_forward(c.z3, c.a3);
  check_finite(c.a3, "dense3");
  dense_forward(c.a3, weights[kProjectW], weights[kProjectB], c.z4);
  selu_forward(c.z4, c.a4);
  check_finite(c.a4, "project");

  const DeconvGeometry g1 = S::deconv1();
  const DeconvGeometry g2 = S::deconv2();
  c.z5.resize(batch, static_cast<Eigen::Index>(g1.output_size()));
  for (Eigen::Index b = 0; b < batch; ++b) {
    deconv2d_forward<T>(g1, row_span(c.a4, b), span_of(weights[kDeconv1W]),
                        span_of(weights[kDeconv1B]), row_span(c.z5, b));
  }
  selu_forward(c.z5, c.a5);
  check_finite(c.a5, "deconv1");

  c.z6.resize(batch, static_cast<Eigen::Index>(g2.output_size()));
  for (Eigen::Index b = 0; b < batch; ++b) {
    deconv2d_forward<T>(g2, row_span(c.a5, b), span_of(weights[kDeconv2W]),
                        span_of(weights[kDeconv2B]), row_span(c.z6, b));
  }
  sigmoid_forward(c.z6, c.a6);
  check_finite(c.a6, "deconv2");

  c.output.resize(batch, S::kOutput);
  for (Eigen::Index b = 0; b < batch; ++b) {
    for (int s = 0; s < S::kOutH; ++s) {
      for (int f = 0; f < kFretColumns; ++f) {
        c.output(b, s * kFretColumns + f) = c.a6(b, s * S::kOutW + f);
      }
    }
  }
  return c.output;
}

namespace {

template <typename T>
ProbabilisticTablature forward_single(const ModelWeights<T>& weights,
                                      std::span<const std::uint8_t> input) {
  const Matrix<T> out =
      forward_batch(weights, to_matrix<T>(input, NetworkSpec::kInput));
  ProbabilisticTablature p;
  for (int i = 0; i < kFrameBits; ++i) p.values[i] = static_cast<double>(out(0, i));
  return p;
}

}  // namespace

ProbabilisticTablature forward(const ModelWeights<float>& weights,
                               std::span<const std::uint8_t> input) {
  return forward_single(weights, input);
}

ProbabilisticTablature forward(const ModelWeights<double>& weights,
                               std::span<const std::uint8_t> input) {
  return forward_single(weights, input);
}

template <typename T>
std::vector<Activation<T>> forward_trace(const ModelWeights<T>& weights,
                                         std::span<const std::uint8_t> input) {
  ForwardCache<T> c;
  forward_batch(weights, to_matrix<T>(input, NetworkSpec::kInput), &c);
  auto stage = [](std::string name, std::vector<std::size_t> shape,
                  const Matrix<T>& m) {
    return Activation<T>{std::move(name), std::move(shape),
                         std::vector<T>(m.data(), m.data() + m.size())};
  };
  const auto g1 = NetworkSpec::deconv1();
  const auto g2 = NetworkSpec::deconv2();
  auto u = [](int v) { return static_cast<std::size_t>(v); };
  return {
      stage("input", {u(NetworkSpec::kInput)}, c.input),
      stage("dense1", {u(NetworkSpec::kHidden1)}, c.a1),
      stage("dense2", {u(NetworkSpec::kHidden2)}, c.a2),
      stage("dense3", {u(NetworkSpec::kLatent)}, c.a3),
      stage("project", {u(NetworkSpec::kLatent)}, c.a4),
      stage("reshape", {u(g1.in_channels), u(g1.in_h), u(g1.in_w)}, c.a4),
      stage("deconv1", {u(g1.out_channels), u(g1.out_h()), u(g1.out_w())}, c.a5),
      stage("deconv2", {u(g2.out_channels), u(g2.out_h()), u(g2.out_w())}, c.a6),
      stage("crop", {u(kStrings), u(kFretColumns)}, c.output),
  };
}

template <typename T>
T mse_loss(const Matrix<T>& output, const Matrix<T>& target, Matrix<T>& doutput) {
  if (output.rows() != target.rows() || output.cols() != target.cols()) {
    throw ContractViolation("loss: output and target shapes differ");
  }
  const T count = static_cast<T>(output.size());
  doutput = output - target;
  const T loss = doutput.squaredNorm() / count;
  doutput *= T(2) / count;
  return loss;
}

template <typename T>
void backward_batch(const ModelWeights<T>& weights, const ForwardCache<T>& c,
                    const Matrix<T>& doutput, ModelWeights<T>& grads) {
  using S = NetworkSpec;
  const Eigen::Index batch = c.input.rows();
  const DeconvGeometry g1 = S::deconv1();
  const DeconvGeometry g2 = S::deconv2();

  // Undo the crop: the dropped column gets zero gradient.
  Matrix<T> da6 = Matrix<T>::Zero(batch, static_cast<Eigen::Index>(g2.output_size()));
  for (Eigen::Index b = 0; b < batch; ++b) {
    for (int s = 0; s < S::kOutH; ++s) {
      for (int f = 0; f < kFretColumns; ++f) {
        da6(b, s * S::kOutW + f) = doutput(b, s * kFretColumns + f);
      }
    }
  }
  Matrix<T> dz6;
  sigmoid_backward(c.a6, da6, dz6);

  Matrix<T> da5(batch, static_cast<Eigen::Index>(g2.input_size()));
  for (Eigen::Index b = 0; b < batch; ++b) {
    deconv2d_backward<T>(g2, row_span(c.a5, b), span_of(weights[kDeconv2W]),
                         row_span(dz6, b), row_span(da5, b),
                         span_of(grads[kDeconv2W]), span_of(grads[kDeconv2B]));
  }
  Matrix<T> dz5;
  selu_backward(c.z5, da5, dz5);

  Matrix<T> da4(batch, static_cast<Eigen::Index>(g1.input_size()));
  for (Eigen::Index b = 0; b < batch; ++b) {
    deconv2d_backward<T>(g1, row_span(c.a4, b), span_of(weights[kDeconv1W]),
                         row_span(dz5, b), row_span(da4, b),
                         span_of(grads[kDeconv1W]), span_of(grads[kDeconv1B]));
  }

  Matrix<T> dz, da;
  selu_backward(c.z4, da4, dz);
  dense_backward(c.a3, weights[kProjectW], dz, &da, grads[kProjectW], grads[kProjectB]);
  selu_backward(c.z3, da, dz);
  dense_backward(c.a2, weights[kDense3W], dz, &da, grads[kDense3W], grads[kDense3B]);
  selu_backward(c.z2, da, dz);
  dense_backward(c.a1, weights[kDense2W], dz, &da, grads[kDense2W], grads[kDense2B]);
  selu_backward(c.z1, da, dz);
  dense_backward<T>(c.input, weights[kDense1W], dz, nullptr, grads[kDense1W],
                    grads[kDense1B]);
}

template <typename T>
T loss_and_gradients(const ModelWeights<T>& weights, const Matrix<T>& input,
                     const Matrix<T>& target, ModelWeights<T>& grads) {
  ForwardCache<T> cache;
  const Matrix<T> output = forward_batch(weights, input, &cache);
  Matrix<T> doutput;
  const T loss = mse_loss(output, target, doutput);
  if (!std::isfinite(loss)) throw NumericError("non-finite loss");
  if (grads[0].shape.empty()) grads = ModelWeights<T>::zeros();
  grads.set_zero();
  backward_batch(weights, cache, doutput, grads);
  return loss;
}

template <typename T>
T backward(const ModelWeights<T>& weights, std::span<const std::uint8_t> input,
           std::span<const std::uint8_t> target, ModelWeights<T>& grads) {
  return loss_and_gradients(weights, to_matrix<T>(input, NetworkSpec::kInput),
                            to_matrix<T>(target, NetworkSpec::kOutput), grads);
}

template <typename T>
void adam_step(ModelWeights<T>& weights, const ModelWeights<T>& grads,
               AdamState<T>& state, const AdamConfig& cfg) {
  if (state.m[0].shape.empty()) {
    state.m = ModelWeights<T>::zeros();
    state.v = ModelWeights<T>::zeros();
  }
  ++state.step;
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  const T b1 = static_cast<T>(cfg.beta1);
  const T b2 = static_cast<T>(cfg.beta2);
  const T step_size = static_cast<T>(cfg.learning_rate / c1);
  const T inv_c2 = static_cast<T>(1.0 / c2);
  const T eps = static_cast<T>(cfg.epsilon);
  for (int i = 0; i < kParamCount; ++i) {
    auto& w = weights[i].data;
    const auto& g = grads[i].data;
    auto& m = state.m[i].data;
    auto& v = state.v[i].data;
    if (g.size() != w.size() || m.size() != w.size()) {
      throw ContractViolation("adam: gradient/state shapes do not match weights");
    }
    for (std::size_t k = 0; k < w.size(); ++k) {
      m[k] = b1 * m[k] + (T(1) - b1) * g[k];
      v[k] = b2 * v[k] + (T(1) - b2) * g[k] * g[k];
      w[k] -= step_size * m[k] / (std::sqrt(v[k] * inv_c2) + eps);
    }
  }
}

#define TABFORGE_INSTANTIATE(T)                                                \
  template void validate_shapes(const ModelWeights<T>&);                       \
  template ModelWeights<T> init_weights<T>(std::uint64_t);                     \
  template Matrix<T> to_matrix<T>(std::span<const std::uint8_t>, std::size_t); \
  template Matrix<T> forward_batch(const ModelWeights<T>&, const Matrix<T>&,   \
                                   ForwardCache<T>*);                          \
  template std::vector<Activation<T>> forward_trace(                           \
      const ModelWeights<T>&, std::span<const std::uint8_t>);                  \
  template T mse_loss(const Matrix<T>&, const Matrix<T>&, Matrix<T>&);         \
  template void backward_batch(const ModelWeights<T>&, const ForwardCache<T>&, \
                               const Matrix<T>&, ModelWeights<T>&);            \
  template T loss_and_gradients(const ModelWeights<T>&, const Matrix<T>&,      \
                                const Matrix<T>&, ModelWeights<T>&);           \
  template T backward(const ModelWeights<T>&, std::span<const std::uint8_t>,   \
                      std::span<const std::uint8_t>, ModelWeights<T>&);        \
  template void adam_step(ModelWeights<T>&, const ModelWeights<T>&,            \
                          AdamState<T>&, const AdamConfig&);

TABFORGE_INSTANTIATE(float)
TABFORGE_INSTANTIATE(double)

#undef TABFORGE_INSTANTIATE

}  // namespace tabforge::nn
