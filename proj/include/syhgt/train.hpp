// Copyright 2026 The SyHGT Authors.
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

// AdamW, the training loop and evaluation.

#ifndef SYHGT_TRAIN_HPP_
#define SYHGT_TRAIN_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "syhgt/embedding.hpp"
#include "syhgt/gradcheck.hpp"
#include "syhgt/metrics.hpp"
#include "syhgt/model.hpp"
#include "syhgt/pipeline.hpp"

namespace syhgt {

struct AdamWConfig {
  double lr = 2e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.01;
};

struct AdamWState {
  AdamWConfig config;
  std::vector<Matrix> m;
  std::vector<Matrix> v;
  std::size_t step = 0;
};

AdamWState init_adamw(const AdamWConfig& config,
                      std::span<const Matrix* const> params);

// p -= lr * (m_hat / (sqrt(v_hat) + eps)) + lr * weight_decay * p, with
// bias-corrected moments. Throws ShapeError when shapes disagree.
void adamw_step(std::span<Matrix* const> params, std::span<const Matrix> grads,
                AdamWState& state);

struct RunConfig {
  ModelConfig model;
  std::size_t batch = 32;
  std::size_t epochs = 7;
  double lr = 2e-5;
  double weight_decay = 0.01;
  std::uint64_t seed = 0;
};

struct TrainReport {
  std::vector<double> epoch_loss;  // mean example loss per epoch
  std::vector<double> step_loss;   // mean batch loss per step
  std::size_t steps = 0;
  std::size_t examples_used = 0;
};

// Batch loss is the mean of the example losses. Batches follow a seeded
// permutation per epoch and gradients are summed in batch order, so a run is
// a pure function of its inputs. Throws ConfigError when no example is
// trainable.
Model train(const PreparedDataset& dataset, const EmbeddingProvider& embeddings,
            const RunConfig& config, TrainReport* report = nullptr);

struct Evaluation {
  EvalResult result;
  std::vector<std::pair<std::string, std::string>> predictions;
  // log(null score) - log(best span score).
  std::vector<std::pair<std::string, double>> margins;
  double mean_loss = 0.0;  // over trainable examples
};

// Throws ConfigError for an empty dataset.
Evaluation evaluate(const PreparedDataset& dataset, const Model& model,
                    const EmbeddingProvider& embeddings);

nlohmann::ordered_json predictions_json(const Evaluation& eval);

// Gradient check of the whole per-example loss (label table, HGT stack, span
// head) on a fixed 12-vertex constituency example with all three vertex
// kinds: d = 8, 2 heads, 2 layers, stub embeddings.
GradCheckReport pipeline_grad_check(std::uint64_t seed, double eps = 1e-6);

// The example used by pipeline_grad_check, built through the full pipeline.
PreparedDataset gradcheck_fixture();

}  // namespace syhgt

#endif  // SYHGT_TRAIN_HPP_
