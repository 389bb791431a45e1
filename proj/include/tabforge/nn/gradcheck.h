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
// Central finite-difference checks of every backward pass, in double
// precision. Each layer is checked on random small instances against the
// scalar L = sum(r * layer_output) for a random weighting r, so the check
// covers the full Jacobian rather than one projection of it.
#ifndef TABFORGE_NN_GRADCHECK_H_
#define TABFORGE_NN_GRADCHECK_H_

#include <cstdint>
#include <string>
#include <vector>

namespace tabforge::nn {

struct GradcheckOptions {
  int instances = 20;
  double epsilon = 1e-5;
  double tolerance = 1e-4;
  std::uint64_t seed = 42;
  // Random entries per tensor for the whole-network spot check.
  int network_samples_per_tensor = 8;
  int network_instances = 2;
};

struct GradcheckResult {
  std::string layer;
  int instances = 0;
  std::size_t values_checked = 0;
  double max_relative_error = 0.0;
  bool passed = false;
};

// |a - n| / max(|a|, |n|, 1e-6). The floor keeps exact zeros (e.g. weights
// attached to an inactive input bit) from dividing by zero.
double relative_error(double analytic, double numeric);

// Checks dense, selu, sigmoid, deconv1 (kernel 3x2, stride 1x2), deconv2
// (kernel 2x4, stride 2x2) and a spot check of the assembled network.
std::vector<GradcheckResult> run_gradient_suite(const GradcheckOptions& opts = {});

}  // namespace tabforge::nn

#endif  // TABFORGE_NN_GRADCHECK_H_
