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
#include "tabforge/trainer.h"

#include <cmath>
#include <cstdio>
#include <numeric>

#include "tabforge/error.h"
#include "tabforge/random.h"

namespace tabforge {

namespace {

constexpr int kEvalBatch = 256;

using FMatrix = nn::Matrix<float>;

void fill_batch(std::span<const TrainingExample> examples,
                std::span<const std::size_t> indices, FMatrix& input,
                FMatrix& target) {
  const auto rows = static_cast<Eigen::Index>(indices.size());
  input.resize(rows, nn::NetworkSpec::kInput);
  target.resize(rows, nn::NetworkSpec::kOutput);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const TrainingExample& ex = examples[indices[static_cast<std::size_t>(r)]];
    if (ex.input.size() != static_cast<std::size_t>(nn::NetworkSpec::kInput)) {
      throw ContractViolation("training example input must be 728 bits, got " +
                              std::to_string(ex.input.size()));
    }
    for (int i = 0; i < nn::NetworkSpec::kInput; ++i) input(r, i) = ex.input[i];
    for (int i = 0; i < nn::NetworkSpec::kOutput; ++i) target(r, i) = ex.target[i];
  }
}

// Per-example loss and accuracy summed over the rows of a batch.
void accumulate_metrics(const FMatrix& output, const FMatrix& target,
                        double& loss_sum, double& accuracy_sum) {
  std::array<double, kFrameBits> p{};
  FlatFrame b{};
  for (Eigen::Index r = 0; r < output.rows(); ++r) {
    double se = 0.0;
    for (int i = 0; i < kFrameBits; ++i) {
      const double d = static_cast<double>(output(r, i)) - target(r, i);
      se += d * d;
      p[i] = output(r, i);
      b[i] = static_cast<std::uint8_t>(target(r, i));
    }
    loss_sum += se / kFrameBits;
    accuracy_sum += cosine_accuracy(p, b);
  }
}

}  // namespace

void TrainConfig::validate() const {
  if (epochs < 1) throw ContractViolation("epochs must be >= 1");
  if (batch_size < 1) throw ContractViolation("batch size must be >= 1");
  if (!(learning_rate > 0.0)) throw ContractViolation("learning rate must be > 0");
}

std::string TrainLog::to_csv() const {
  std::string out = "epoch,train_loss,val_loss,train_acc,val_acc\n";
  char line[160];
  for (const auto& r : records) {
    std::snprintf(line, sizeof(line), "%d,%.9g,%.9g,%.9g,%.9g\n", r.epoch,
                  r.train_loss, r.val_loss, r.train_accuracy, r.val_accuracy);
    out += line;
  }
  return out;
}

double cosine_accuracy(std::span<const double> p, std::span<const std::uint8_t> b) {
  if (p.size() != b.size()) throw ContractViolation("cosine accuracy: size mismatch");
  double dot = 0.0, pp = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    dot += p[i] * b[i];
    pp += p[i] * p[i];
    bb += static_cast<double>(b[i]) * b[i];
  }
  if (bb == 0.0) throw ContractViolation("cosine accuracy: target has no active bit");
  if (pp == 0.0) return 0.0;
  return dot / (std::sqrt(pp) * std::sqrt(bb));
}

double cosine_accuracy(const ProbabilisticTablature& p, const FlatFrame& b) {
  return cosine_accuracy(std::span<const double>(p.values), std::span<const std::uint8_t>(b));
}

Evaluation evaluate(const nn::ModelWeights<float>& weights,
                    std::span<const TrainingExample> examples) {
  if (examples.empty()) throw ContractViolation("evaluate: no examples");
  std::vector<std::size_t> idx(examples.size());
  std::iota(idx.begin(), idx.end(), 0);
  double loss_sum = 0.0, acc_sum = 0.0;
  FMatrix input, target;
  for (std::size_t start = 0; start < idx.size(); start += kEvalBatch) {
    const std::size_t n = std::min<std::size_t>(kEvalBatch, idx.size() - start);
    fill_batch(examples, std::span(idx).subspan(start, n), input, target);
    accumulate_metrics(nn::forward_batch(weights, input), target, loss_sum, acc_sum);
  }
  const double n = static_cast<double>(examples.size());
  return {loss_sum / n, acc_sum / n};
}

TrainResult train(nn::ModelWeights<float> weights,
                  std::span<const TrainingExample> train_examples,
                  std::span<const TrainingExample> val_examples,
                  const TrainConfig& cfg,
                  const std::function<void(const EpochRecord&)>& on_epoch) {
  cfg.validate();
  if (train_examples.empty() || val_examples.empty()) {
    throw ContractViolation("training and validation sets must be non-empty");
  }
  nn::validate_shapes(weights);

  TrainResult result;
  nn::AdamState<float> adam = nn::AdamState<float>::zeros();
  nn::AdamConfig adam_cfg;
  adam_cfg.learning_rate = cfg.learning_rate;
  nn::ModelWeights<float> grads = nn::ModelWeights<float>::zeros();

  std::vector<std::size_t> order(train_examples.size());
  std::iota(order.begin(), order.end(), 0);
  double best_val = std::numeric_limits<double>::infinity();
  FMatrix input, target, doutput;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    if (cfg.shuffle) {
      Rng rng = make_rng(cfg.seed, Stream::kShuffle, static_cast<std::uint64_t>(epoch));
      shuffle(order.begin(), order.end(), rng);
    }
    double loss_sum = 0.0, acc_sum = 0.0;
    int batch_no = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size, ++batch_no) {
      const std::size_t n =
          std::min<std::size_t>(static_cast<std::size_t>(cfg.batch_size), order.size() - start);
      fill_batch(train_examples, std::span(order).subspan(start, n), input, target);
      try {
        nn::ForwardCache<float> cache;
        const FMatrix output = nn::forward_batch(weights, input, &cache);
        const float loss = nn::mse_loss(output, target, doutput);
        if (!std::isfinite(loss)) throw NumericError("non-finite loss");
        accumulate_metrics(output, target, loss_sum, acc_sum);
        grads.set_zero();
        nn::backward_batch(weights, cache, doutput, grads);
        nn::adam_step(weights, grads, adam, adam_cfg);
        ++result.log.optimizer_steps;
      } catch (const NumericError& e) {
        throw NumericError("training diverged at epoch " + std::to_string(epoch) +
                           ", batch " + std::to_string(batch_no + 1) + ": " + e.what());
      }
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / static_cast<double>(order.size());
    rec.train_accuracy = acc_sum / static_cast<double>(order.size());
    Evaluation val;
    try {
      val = evaluate(weights, val_examples);
    } catch (const NumericError& e) {
      throw NumericError("validation diverged at epoch " + std::to_string(epoch) +
                         ": " + e.what());
    }
    rec.val_loss = val.loss;
    rec.val_accuracy = val.accuracy;
    if (!std::isfinite(rec.train_loss) || !std::isfinite(rec.val_loss)) {
      throw NumericError("non-finite loss at epoch " + std::to_string(epoch));
    }
    result.log.records.push_back(rec);
    if (rec.val_loss < best_val) {
      best_val = rec.val_loss;
      result.log.best_epoch = epoch;
      result.weights = weights;
    }
    if (on_epoch) on_epoch(rec);
  }
  return result;
}

}  // namespace tabforge
