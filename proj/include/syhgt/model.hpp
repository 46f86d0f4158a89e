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

// The full QA model: label table, HGT stack and span head, plus the
// per-example forward pass.

#ifndef SYHGT_MODEL_HPP_
#define SYHGT_MODEL_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "syhgt/autodiff.hpp"
#include "syhgt/checkpoint.hpp"
#include "syhgt/graph.hpp"
#include "syhgt/hgt.hpp"
#include "syhgt/pipeline.hpp"
#include "syhgt/span_head.hpp"

namespace syhgt {

struct ModelConfig {
  GraphKind graph_kind = GraphKind::Dependency;
  std::size_t dim = 32;
  std::size_t heads = 4;
  std::size_t layers = 2;
  std::size_t max_span_len = 30;
  double null_threshold = 1.0;
  // "stub" or the path of an embedding file.
  std::string embeddings = "stub";
  std::uint64_t embedding_seed = 0;
};

struct Model {
  ModelConfig config;
  EdgeTypeRegistry edge_types;
  LabelVocabulary labels;
  Matrix label_table;  // labels.size() x dim
  HgtStack stack;
  SpanHeadParams head;
};

struct ModelVars {
  Var label_table;
  std::vector<HgtLayerVars> layers;
  SpanHeadVars head;
};

// Parameter order shared by checkpoints, the optimizer and gradient checks.
template <class F>
void visit_model(const Model& m, F&& f) {
  f(std::string("labels"), m.label_table);
  visit_stack(m.stack, f);
  visit_span_head(m.head, f);
}
template <class F>
void visit_model(Model& m, F&& f) {
  f(std::string("labels"), m.label_table);
  visit_stack(m.stack, f);
  visit_span_head(m.head, f);
}
template <class F>
void visit_model_vars(ModelVars& v, F&& f) {
  f(std::string("labels"), v.label_table);
  for (std::size_t l = 0; l < v.layers.size(); ++l) {
    visit_layer(v.layers[l], "layer" + std::to_string(l) + ".", f);
  }
  visit_span_head(v.head, f);
}

// Throws ConfigError when heads does not divide dim.
Model init_model(const ModelConfig& config, EdgeTypeRegistry edge_types,
                 LabelVocabulary labels, std::uint64_t seed);

ModelVars bind_model(Tape& tape, const Model& model, bool requires_grad);
// Variables in visit_model order, one per parameter.
ModelVars bind_model(Tape& tape, const Model& model, std::span<const Var> leaves);

std::vector<const Matrix*> model_parameters(const Model& model);
std::vector<Matrix*> model_parameters(Model& model);

Checkpoint model_to_checkpoint(const Model& model);
// Throws FormatError when tensors are missing or misshapen.
Model model_from_checkpoint(const Checkpoint& ckpt);

// Start/end logits for one example.
SpanLogitsVars forward_logits(const ModelVars& vars, const CompiledGraph& graph,
                              Var embeddings, std::size_t passage_begin,
                              std::size_t passage_end);

struct ExamplePrediction {
  SpanPrediction span;
  std::string answer_text;
  double loss = 0.0;  // only meaningful for trainable examples
};

ExamplePrediction predict(const Model& model, const PreparedExample& example,
                          const CompiledGraph& graph, const Matrix& embeddings);

}  // namespace syhgt

#endif  // SYHGT_MODEL_HPP_
