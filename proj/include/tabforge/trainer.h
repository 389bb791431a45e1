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
#ifndef TABFORGE_TRAINER_H_
#define TABFORGE_TRAINER_H_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "tabforge/dataset.h"
#include "tabforge/nn/network.h"

namespace tabforge {

struct TrainConfig {
  int epochs = 1;
  int batch_size = 128;
  double learning_rate = 1e-3;
  std::uint64_t seed = 42;
  bool shuffle = true;

  void validate() const;
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double train_accuracy = 0.0;
  double val_accuracy = 0.0;
};

struct TrainLog {
  std::vector<EpochRecord> records;
  int best_epoch = 0;  // argmin of val_loss, 1-based
  std::int64_t optimizer_steps = 0;

  // "epoch,train_loss,val_loss,train_acc,val_acc" plus one row per epoch.
  std::string to_csv() const;
};

struct TrainResult {
  nn::ModelWeights<float> weights;  // snapshot at best_epoch
  TrainLog log;
};

struct Evaluation {
  double loss = 0.0;      // mean over examples of the per-example MSE
  double accuracy = 0.0;  // mean cosine accuracy over examples
};

// (p . b) / (|p| |b|). Throws ContractViolation when b has no active bit;
// returns 0 when p is all zero.
double cosine_accuracy(std::span<const double> p, std::span<const std::uint8_t> b);
double cosine_accuracy(const ProbabilisticTablature& p, const FlatFrame& b);

Evaluation evaluate(const nn::ModelWeights<float>& weights,
                    std::span<const TrainingExample> examples);

// Mini-batch Adam on the MSE loss. Validation runs after every epoch and the
// weights of the epoch with the lowest validation loss are returned. Throws
// NumericError naming the epoch and batch if training diverges.
TrainResult train(nn::ModelWeights<float> weights,
                  std::span<const TrainingExample> train_examples,
                  std::span<const TrainingExample> val_examples,
                  const TrainConfig& cfg,
                  const std::function<void(const EpochRecord&)>& on_epoch = {});

}  // namespace tabforge

#endif  // TABFORGE_TRAINER_H_
