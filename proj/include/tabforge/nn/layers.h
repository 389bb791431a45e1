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
// Layer kernels with hand-written backward passes. All kernels are templated
// on the scalar type: the network trains in float, gradient checks run in
// double.
//
// Batched activations are row-major matrices, one example per row. Backward
// functions ACCUMULATE into parameter gradients so that a batch can be
// processed in pieces; input gradients are overwritten.
#ifndef TABFORGE_NN_LAYERS_H_
#define TABFORGE_NN_LAYERS_H_

#include <Eigen/Core>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "tabforge/error.h"

namespace tabforge::nn {

template <typename T>
using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MatrixMap = Eigen::Map<Matrix<T>>;
template <typename T>
using ConstMatrixMap = Eigen::Map<const Matrix<T>>;
template <typename T>
using RowVectorMap = Eigen::Map<Eigen::Matrix<T, 1, Eigen::Dynamic>>;
template <typename T>
using ConstRowVectorMap = Eigen::Map<const Eigen::Matrix<T, 1, Eigen::Dynamic>>;

// Dense row-major tensor.
template <typename T>
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<T> data;

  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> dims)
      : shape(std::move(dims)), data(element_count(shape), T(0)) {}

  static std::size_t element_count(const std::vector<std::size_t>& dims) {
    return std::accumulate(dims.begin(), dims.end(), std::size_t{1},
                           std::multiplies<>());
  }
  std::size_t size() const { return data.size(); }
  std::size_t dim(std::size_t i) const { return shape.at(i); }
  bool all_finite() const {
    for (T v : data) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }
  void fill(T v) { std::fill(data.begin(), data.end(), v); }

  bool operator==(const Tensor&) const = default;
};

// --- Activations ----------------------------------------------------------

inline constexpr double kSeluAlpha = 1.6732632423543772848170429916717;
inline constexpr double kSeluLambda = 1.0507009873554804934193349852946;

template <typename T>
T selu(T x) {
  return x > T(0) ? T(kSeluLambda) * x
                  : T(kSeluLambda * kSeluAlpha) * (std::exp(x) - T(1));
}

// d selu / dx, taken from the right at 0.
template <typename T>
T selu_derivative(T x) {
  return x > T(0) ? T(kSeluLambda) : T(kSeluLambda * kSeluAlpha) * std::exp(x);
}

template <typename T>
T sigmoid(T x) {
  if (x >= T(0)) return T(1) / (T(1) + std::exp(-x));
  const T e = std::exp(x);
  return e / (T(1) + e);
}

// d sigmoid / dx expressed through the output y = sigmoid(x).
template <typename T>
T sigmoid_derivative_from_output(T y) {
  return y * (T(1) - y);
}

template <typename T>
void selu_forward(const Matrix<T>& z, Matrix<T>& a) {
  a = z.unaryExpr([](T v) { return selu(v); });
}

// dz = da * selu'(z)
template <typename T>
void selu_backward(const Matrix<T>& z, const Matrix<T>& da, Matrix<T>& dz) {
  dz = da.cwiseProduct(z.unaryExpr([](T v) { return selu_derivative(v); }));
}

template <typename T>
void sigmoid_forward(const Matrix<T>& z, Matrix<T>& a) {
  a = z.unaryExpr([](T v) { return sigmoid(v); });
}

template <typename T>
void sigmoid_backward(const Matrix<T>& y, const Matrix<T>& dy, Matrix<T>& dz) {
  dz = dy.cwiseProduct(
      y.unaryExpr([](T v) { return sigmoid_derivative_from_output(v); }));
}

// --- Dense ----------------------------------------------------------------

// y = x * W^T + b, W shaped (out, in).
template <typename T>
void dense_forward(const Matrix<T>& x, const Tensor<T>& weight,
                   const Tensor<T>& bias, Matrix<T>& y) {
  const auto out = static_cast<Eigen::Index>(weight.dim(0));
  const auto in = static_cast<Eigen::Index>(weight.dim(1));
  if (x.cols() != in || bias.size() != weight.dim(0)) {
    throw ContractViolation("dense: input width " + std::to_string(x.cols()) +
                            " does not match weight shape");
  }
  ConstMatrixMap<T> w(weight.data.data(), out, in);
  ConstRowVectorMap<T> b(bias.data.data(), out);
  y.noalias() = x * w.transpose();
  y.rowwise() += b;
}

// dx is skipped when null (first layer).
template <typename T>
void dense_backward(const Matrix<T>& x, const Tensor<T>& weight,
                    const Matrix<T>& dy, Matrix<T>* dx, Tensor<T>& dweight,
                    Tensor<T>& dbias) {
  const auto out = static_cast<Eigen::Index>(weight.dim(0));
  const auto in = static_cast<Eigen::Index>(weight.dim(1));
  MatrixMap<T> dw(dweight.data.data(), out, in);
  RowVectorMap<T> db(dbias.data.data(), out);
  dw.noalias() += dy.transpose() * x;
  db += dy.colwise().sum();
  if (dx != nullptr) {
    ConstMatrixMap<T> w(weight.data.data(), out, in);
    dx->noalias() = dy * w;
  }
}

// --- Transposed convolution -------------------------------------------------

// Geometry of a no-padding 2D transposed convolution. Kernels are laid out
// (in_channels, out_channels, kernel_h, kernel_w); feature maps are
// (channels, height, width), row-major.
struct DeconvGeometry {
  int in_channels = 1;
  int in_h = 1;
  int in_w = 1;
  int out_channels = 1;
  int kernel_h = 1;
  int kernel_w = 1;
  int stride_h = 1;
  int stride_w = 1;

  int out_h() const { return (in_h - 1) * stride_h + kernel_h; }
  int out_w() const { return (in_w - 1) * stride_w + kernel_w; }
  std::size_t input_size() const {
    return static_cast<std::size_t>(in_channels) * in_h * in_w;
  }
  std::size_t output_size() const {
    return static_cast<std::size_t>(out_channels) * out_h() * out_w();
  }
  std::vector<std::size_t> kernel_shape() const {
    return {static_cast<std::size_t>(in_channels),
            static_cast<std::size_t>(out_channels),
            static_cast<std::size_t>(kernel_h),
            static_cast<std::size_t>(kernel_w)};
  }
  std::size_t kernel_size() const { return Tensor<float>::element_count(kernel_shape()); }
};

namespace detail {

template <typename T>
void check_deconv_sizes(const DeconvGeometry& g, std::size_t input,
                        std::size_t kernel, std::size_t output) {
  if (input != g.input_size() || kernel != g.kernel_size() ||
      output != g.output_size()) {
    throw ContractViolation("deconv2d: buffer sizes do not match geometry");
  }
}

}  // namespace detail

// Scatter-accumulate: every input pixel adds input * kernel into the output
// window anchored at (ih * stride_h, iw * stride_w); then per-channel bias.
template <typename T>
void deconv2d_forward(const DeconvGeometry& g, std::span<const T> input,
                      std::span<const T> kernel, std::span<const T> bias,
                      std::span<T> output) {
  detail::check_deconv_sizes<T>(g, input.size(), kernel.size(), output.size());
  if (bias.size() != static_cast<std::size_t>(g.out_channels)) {
    throw ContractViolation("deconv2d: bias size does not match out_channels");
  }
  const int oh = g.out_h();
  const int ow = g.out_w();
  for (int co = 0; co < g.out_channels; ++co) {
    std::fill_n(output.begin() + static_cast<std::ptrdiff_t>(co) * oh * ow,
                oh * ow, bias[co]);
  }
  for (int ci = 0; ci < g.in_channels; ++ci) {
    for (int ih = 0; ih < g.in_h; ++ih) {
      for (int iw = 0; iw < g.in_w; ++iw) {
        const T v = input[(static_cast<std::size_t>(ci) * g.in_h + ih) * g.in_w + iw];
        if (v == T(0)) continue;
        for (int co = 0; co < g.out_channels; ++co) {
          const T* k = kernel.data() +
                       ((static_cast<std::size_t>(ci) * g.out_channels + co) *
                        g.kernel_h * g.kernel_w);
          T* o = output.data() + static_cast<std::size_t>(co) * oh * ow;
          for (int kh = 0; kh < g.kernel_h; ++kh) {
            T* row = o + (ih * g.stride_h + kh) * ow + iw * g.stride_w;
            for (int kw = 0; kw < g.kernel_w; ++kw) {
              row[kw] += v * k[kh * g.kernel_w + kw];
            }
          }
        }
      }
    }
  }
}

// The strided convolution that is the adjoint of deconv2d_forward (bias
// excluded): maps an output-shaped map back to input shape. This is also the
// input gradient of the transposed convolution.
template <typename T>
void conv2d_strided(const DeconvGeometry& g, std::span<const T> output_like,
                    std::span<const T> kernel, std::span<T> input_like) {
  detail::check_deconv_sizes<T>(g, input_like.size(), kernel.size(),
                                output_like.size());
  const int oh = g.out_h();
  const int ow = g.out_w();
  for (int ci = 0; ci < g.in_channels; ++ci) {
    for (int ih = 0; ih < g.in_h; ++ih) {
      for (int iw = 0; iw < g.in_w; ++iw) {
        T acc = T(0);
        for (int co = 0; co < g.out_channels; ++co) {
          const T* k = kernel.data() +
                       ((static_cast<std::size_t>(ci) * g.out_channels + co) *
                        g.kernel_h * g.kernel_w);
          const T* y = output_like.data() + static_cast<std::size_t>(co) * oh * ow;
          for (int kh = 0; kh < g.kernel_h; ++kh) {
            const T* row = y + (ih * g.stride_h + kh) * ow + iw * g.stride_w;
            for (int kw = 0; kw < g.kernel_w; ++kw) {
              acc += row[kw] * k[kh * g.kernel_w + kw];
            }
          }
        }
        input_like[(static_cast<std::size_t>(ci) * g.in_h + ih) * g.in_w + iw] = acc;
      }
    }
  }
}

// Accumulates kernel/bias gradients; overwrites dinput unless it is empty.
template <typename T>
void deconv2d_backward(const DeconvGeometry& g, std::span<const T> input,
                       std::span<const T> kernel, std::span<const T> doutput,
                       std::span<T> dinput, std::span<T> dkernel,
                       std::span<T> dbias) {
  detail::check_deconv_sizes<T>(g, input.size(), kernel.size(), doutput.size());
  const int oh = g.out_h();
  const int ow = g.out_w();
  for (int co = 0; co < g.out_channels; ++co) {
    const T* d = doutput.data() + static_cast<std::size_t>(co) * oh * ow;
    T acc = T(0);
    for (int i = 0; i < oh * ow; ++i) acc += d[i];
    dbias[co] += acc;
  }
  for (int ci = 0; ci < g.in_channels; ++ci) {
    for (int ih = 0; ih < g.in_h; ++ih) {
      for (int iw = 0; iw < g.in_w; ++iw) {
        const T v = input[(static_cast<std::size_t>(ci) * g.in_h + ih) * g.in_w + iw];
        if (v == T(0)) continue;
        for (int co = 0; co < g.out_channels; ++co) {
          T* dk = dkernel.data() +
                  ((static_cast<std::size_t>(ci) * g.out_channels + co) *
                   g.kernel_h * g.kernel_w);
          const T* d = doutput.data() + static_cast<std::size_t>(co) * oh * ow;
          for (int kh = 0; kh < g.kernel_h; ++kh) {
            const T* row = d + (ih * g.stride_h + kh) * ow + iw * g.stride_w;
            for (int kw = 0; kw < g.kernel_w; ++kw) {
              dk[kh * g.kernel_w + kw] += v * row[kw];
            }
          }
        }
      }
    }
  }
  if (!dinput.empty()) conv2d_strided<T>(g, doutput, kernel, dinput);
}

}  // namespace tabforge::nn

#endif  // TABFORGE_NN_LAYERS_H_
