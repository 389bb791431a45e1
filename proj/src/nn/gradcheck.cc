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
#include "tabforge/nn/gradcheck.h"

#include <algorithm>
#include <cmath>
#include <functional>

#include "tabforge/nn/layers.h"
#include "tabforge/nn/network.h"
#include "tabforge/random.h"

namespace tabforge::nn {

double relative_error(double analytic, double numeric) {
  const double scale = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
  return std::abs(analytic - numeric) / scale;
}

namespace {

using Mat = Matrix<double>;

double uniform(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

int uniform_int(Rng& rng, int lo, int hi) {
  return lo + static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(hi - lo + 1)));
}

Mat random_matrix(Rng& rng, int rows, int cols, double lo = -1.0, double hi = 1.0) {
  Mat m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = uniform(rng, lo, hi);
  return m;
}

Tensor<double> random_tensor(Rng& rng, std::vector<std::size_t> shape) {
  Tensor<double> t(std::move(shape));
  for (auto& v : t.data) v = uniform(rng, -1.0, 1.0);
  return t;
}

class Accumulator {
 public:
  explicit Accumulator(std::string layer) { result_.layer = std::move(layer); }

  // Compares analytic[i] with the central difference of `loss` in value[i].
  void check(double* values, const double* analytic, std::size_t n,
             const std::function<double()>& loss, double eps) {
    for (std::size_t i = 0; i < n; ++i) check_one(values[i], analytic[i], loss, eps);
  }
  void check_one(double& value, double analytic,
                 const std::function<double()>& loss, double eps) {
    const double saved = value;
    value = saved + eps;
    const double plus = loss();
    value = saved - eps;
    const double minus = loss();
    value = saved;
    const double numeric = (plus - minus) / (2.0 * eps);
    result_.max_relative_error =
        std::max(result_.max_relative_error, relative_error(analytic, numeric));
    ++result_.values_checked;
  }
  void instance_done() { ++result_.instances; }
  GradcheckResult finish(double tolerance) {
    result_.passed = result_.values_checked > 0 &&
                     result_.max_relative_error <= tolerance;
    return result_;
  }

 private:
  GradcheckResult result_;
};

double weighted_sum(const Mat& y, const Mat& r) { return y.cwiseProduct(r).sum(); }

GradcheckResult check_dense(const GradcheckOptions& o, Rng& rng) {
  Accumulator acc("dense");
  for (int n = 0; n < o.instances; ++n) {
    const int batch = uniform_int(rng, 1, 3);
    const int in = uniform_int(rng, 2, 6);
    const int out = uniform_int(rng, 2, 6);
    Mat x = random_matrix(rng, batch, in);
    auto w = random_tensor(rng, {static_cast<std::size_t>(out), static_cast<std::size_t>(in)});
    auto b = random_tensor(rng, {static_cast<std::size_t>(out)});
    const Mat r = random_matrix(rng, batch, out);

    auto loss = [&] {
      Mat y;
      dense_forward(x, w, b, y);
      return weighted_sum(y, r);
    };
    Tensor<double> dw(w.shape), db(b.shape);
    Mat dx;
    dense_backward(x, w, r, &dx, dw, db);
    acc.check(x.data(), dx.data(), static_cast<std::size_t>(x.size()), loss, o.epsilon);
    acc.check(w.data.data(), dw.data.data(), w.size(), loss, o.epsilon);
    acc.check(b.data.data(), db.data.data(), b.size(), loss, o.epsilon);
    acc.instance_done();
  }
  return acc.finish(o.tolerance);
}

// Inputs are kept away from the activation's kink at 0 for SELU.
GradcheckResult check_activation(const GradcheckOptions& o, Rng& rng, bool use_selu) {
  Accumulator acc(use_selu ? "selu" : "sigmoid");
  for (int n = 0; n < o.instances; ++n) {
    Mat z(1, 16);
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      double v;
      do {
        v = use_selu ? uniform(rng, -3.0, 3.0) : uniform(rng, -6.0, 6.0);
      } while (use_selu && std::abs(v) < 1e-2);
      z.data()[i] = v;
    }
    const Mat r = random_matrix(rng, 1, 16);
    auto loss = [&] {
      Mat y;
      if (use_selu) {
        selu_forward(z, y);
      } else {
        sigmoid_forward(z, y);
      }
      return weighted_sum(y, r);
    };
    Mat dz;
    if (use_selu) {
      selu_backward(z, r, dz);
    } else {
      Mat y;
      sigmoid_forward(z, y);
      sigmoid_backward(y, r, dz);
    }
    acc.check(z.data(), dz.data(), static_cast<std::size_t>(z.size()), loss, o.epsilon);
    acc.instance_done();
  }
  return acc.finish(o.tolerance);
}

GradcheckResult check_deconv(const GradcheckOptions& o, Rng& rng, const char* name,
                             int kernel_h, int kernel_w, int stride_h, int stride_w) {
  Accumulator acc(name);
  for (int n = 0; n < o.instances; ++n) {
    DeconvGeometry g;
    g.in_channels = uniform_int(rng, 1, 3);
    g.out_channels = uniform_int(rng, 1, 3);
    g.in_h = uniform_int(rng, 1, 3);
    g.in_w = uniform_int(rng, 1, 4);
    g.kernel_h = kernel_h;
    g.kernel_w = kernel_w;
    g.stride_h = stride_h;
    g.stride_w = stride_w;

    auto input = random_tensor(rng, {g.input_size()});
    auto kernel = random_tensor(rng, g.kernel_shape());
    auto bias = random_tensor(rng, {static_cast<std::size_t>(g.out_channels)});
    const auto r = random_tensor(rng, {g.output_size()});

    auto loss = [&] {
      std::vector<double> y(g.output_size());
      deconv2d_forward<double>(g, input.data, kernel.data, bias.data, y);
      double s = 0.0;
      for (std::size_t i = 0; i < y.size(); ++i) s += y[i] * r.data[i];
      return s;
    };
    std::vector<double> dinput(g.input_size());
    Tensor<double> dkernel(kernel.shape), dbias(bias.shape);
    deconv2d_backward<double>(g, input.data, kernel.data, r.data, dinput,
                              dkernel.data, dbias.data);
    acc.check(input.data.data(), dinput.data(), input.size(), loss, o.epsilon);
    acc.check(kernel.data.data(), dkernel.data.data(), kernel.size(), loss, o.epsilon);
    acc.check(bias.data.data(), dbias.data.data(), bias.size(), loss, o.epsilon);
    acc.instance_done();
  }
  return acc.finish(o.tolerance);
}

GradcheckResult check_network(const GradcheckOptions& o, Rng& rng) {
  Accumulator acc("network");
  for (int n = 0; n < o.network_instances; ++n) {
    auto weights = init_weights<double>(rng());
    for (int i = 0; i < kParamCount; ++i) {
      if (weights[i].shape.size() == 1) {
        for (auto& v : weights[i].data) v = uniform(rng, -0.1, 0.1);
      }
    }
    Mat input = Mat::Zero(1, NetworkSpec::kInput);
    Mat target = Mat::Zero(1, NetworkSpec::kOutput);
    for (Eigen::Index i = 0; i < input.size(); ++i) input.data()[i] = uniform01(rng) < 0.05 ? 1.0 : 0.0;
    for (int k = 0; k < 4; ++k) {
      target(0, static_cast<Eigen::Index>(uniform_index(rng, NetworkSpec::kOutput))) = 1.0;
    }

    ModelWeights<double> grads;
    loss_and_gradients(weights, input, target, grads);
    auto loss = [&] {
      Mat doutput;
      return mse_loss(forward_batch(weights, input), target, doutput);
    };
    for (int p = 0; p < kParamCount; ++p) {
      for (int k = 0; k < o.network_samples_per_tensor; ++k) {
        const auto idx = uniform_index(rng, weights[p].size());
        acc.check_one(weights[p].data[idx], grads[p].data[idx], loss, o.epsilon);
      }
    }
    acc.instance_done();
  }
  return acc.finish(o.tolerance);
}

}  // namespace

std::vector<GradcheckResult> run_gradient_suite(const GradcheckOptions& opts) {
  Rng rng = make_rng(opts.seed, Stream::kInit, 0x67726164);
  std::vector<GradcheckResult> results;
  results.push_back(check_dense(opts, rng));
  results.push_back(check_activation(opts, rng, /*use_selu=*/true));
  results.push_back(check_activation(opts, rng, /*use_selu=*/false));
  results.push_back(check_deconv(opts, rng, "deconv1", 3, 2, 1, 2));
  results.push_back(check_deconv(opts, rng, "deconv2", 2, 4, 2, 2));
  results.push_back(check_network(opts, rng));
  return results;
}

}  // namespace tabforge::nn
