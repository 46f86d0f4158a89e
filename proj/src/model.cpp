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

#include "syhgt/model.hpp"

#include "syhgt/error.hpp"

namespace syhgt {

Model init_model(const ModelConfig& config, EdgeTypeRegistry edge_types,
                 LabelVocabulary labels, std::uint64_t seed) {
  if (config.heads == 0 || config.dim % config.heads != 0) {
    throw ConfigError("dim " + std::to_string(config.dim) +
                      " is not divisible by heads " + std::to_string(config.heads));
  }
  Rng rng(seed);
  Model m;
  m.config = config;
  m.edge_types = std::move(edge_types);
  m.labels = std::move(labels);
  m.label_table = xavier_uniform(m.labels.size(), config.dim, rng);
  m.stack = init_hgt_stack(config.dim, config.heads, config.layers,
                           m.edge_types.size(), rng);
  m.head = init_span_head(config.dim, rng);
  return m;
}

ModelVars bind_model(Tape& tape, const Model& model, bool requires_grad) {
  ModelVars v;
  v.label_table = tape.leaf(model.label_table, requires_grad);
  for (const auto& l : model.stack.layers) {
    v.layers.push_back(bind_layer(tape, l, requires_grad));
  }
  v.head = {tape.leaf(model.head.start, requires_grad),
            tape.leaf(model.head.end, requires_grad)};
  return v;
}

ModelVars bind_model(Tape& tape, const Model& model, std::span<const Var> leaves) {
  // Same structure, then every slot replaced by the caller's leaf.
  ModelVars v;
  v.layers.resize(model.stack.layers.size());
  for (std::size_t l = 0; l < v.layers.size(); ++l) {
    const auto& src = model.stack.layers[l];
    auto& dst = v.layers[l];
    dst.heads = src.heads;
    dst.edge_types.resize(src.edge_types.size());
    for (std::size_t r = 0; r < src.edge_types.size(); ++r) {
      dst.edge_types[r].attention.resize(src.edge_types[r].attention.size());
      dst.edge_types[r].message.resize(src.edge_types[r].message.size());
    }
  }
  std::size_t next = 0;
  visit_model_vars(v, [&](const std::string& name, Var& slot) {
    if (next >= leaves.size()) {
      throw ContractError("too few leaves to bind parameter " + name);
    }
    slot = leaves[next++];
  });
  if (next != leaves.size()) throw ContractError("too many leaves for the model");
  (void)tape;
  return v;
}

std::vector<const Matrix*> model_parameters(const Model& model) {
  std::vector<const Matrix*> out;
  visit_model(model, [&](const std::string&, const Matrix& m) { out.push_back(&m); });
  return out;
}

std::vector<Matrix*> model_parameters(Model& model) {
  std::vector<Matrix*> out;
  visit_model(model, [&](const std::string&, Matrix& m) { out.push_back(&m); });
  return out;
}

Checkpoint model_to_checkpoint(const Model& model) {
  Checkpoint ckpt;
  const auto& c = model.config;
  ckpt.meta["config"] = {{"graph_kind", to_string(c.graph_kind)},
                         {"dim", c.dim},
                         {"heads", c.heads},
                         {"layers", c.layers},
                         {"max_span_len", c.max_span_len},
                         {"null_threshold", c.null_threshold},
                         {"embeddings", c.embeddings},
                         {"embedding_seed", c.embedding_seed}};
  ckpt.meta["edge_types"] = model.edge_types.keys();
  ckpt.meta["labels"] = model.labels.labels();
  ckpt.meta["vertex_kinds"] = {"token", "lexeme", "constituent"};
  visit_model(model, [&](const std::string& name, const Matrix& m) {
    ckpt.tensors.emplace_back(name, m);
  });
  return ckpt;
}

Model model_from_checkpoint(const Checkpoint& ckpt) {
  ModelConfig c;
  EdgeTypeRegistry edge_types;
  LabelVocabulary labels;
  try {
    const auto& j = ckpt.meta.at("config");
    c.graph_kind = graph_kind_from_string(j.at("graph_kind").get<std::string>());
    c.dim = j.at("dim").get<std::size_t>();
    c.heads = j.at("heads").get<std::size_t>();
    c.layers = j.at("layers").get<std::size_t>();
    c.max_span_len = j.at("max_span_len").get<std::size_t>();
    c.null_threshold = j.at("null_threshold").get<double>();
    c.embeddings = j.at("embeddings").get<std::string>();
    c.embedding_seed = j.at("embedding_seed").get<std::uint64_t>();
    edge_types = EdgeTypeRegistry::from_keys(
        ckpt.meta.at("edge_types").get<std::vector<std::string>>());
    auto label_list = ckpt.meta.at("labels").get<std::vector<std::string>>();
    labels = LabelVocabulary::from_labels(label_list);
    if (labels.labels() != label_list) {
      throw FormatError("checkpoint label list is not in canonical order");
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("checkpoint metadata: ") + e.what());
  } catch (const ConfigError& e) {
    throw FormatError(std::string("checkpoint metadata: ") + e.what());
  }

  Model m;
  try {
    m = init_model(c, std::move(edge_types), std::move(labels), 0);
  } catch (const ConfigError& e) {
    throw FormatError(std::string("checkpoint config: ") + e.what());
  }
  std::size_t count = 0;
  visit_model(m, [&](const std::string& name, Matrix& slot) {
    const Matrix& stored = ckpt.tensor(name);
    if (!stored.same_shape(slot)) {
      throw FormatError("checkpoint tensor " + name + " is " + stored.shape() +
                        ", expected " + slot.shape());
    }
    slot = stored;
    ++count;
  });
  if (count != ckpt.tensors.size()) {
    throw FormatError("checkpoint holds " + std::to_string(ckpt.tensors.size()) +
                      " tensors, model has " + std::to_string(count));
  }
  return m;
}

SpanLogitsVars forward_logits(const ModelVars& vars, const CompiledGraph& graph,
                              Var embeddings, std::size_t passage_begin,
                              std::size_t passage_end) {
  const std::size_t n = embeddings.rows();
  const Var h0 = init_vertex_states(graph, embeddings, vars.label_table);
  const Var h = hgt_stack(graph, h0, vars.layers);
  // Token vertices come first, in sequence order.
  const Var tokens = slice_rows(h, 0, n);
  return span_logits(tokens, vars.head, span_mask(n, passage_begin, passage_end));
}

ExamplePrediction predict(const Model& model, const PreparedExample& example,
                          const CompiledGraph& graph, const Matrix& embeddings) {
  Tape tape;
  const ModelVars vars = bind_model(tape, model, false);
  const auto logits = forward_logits(vars, graph, tape.constant(embeddings),
                                     example.passage_begin, example.passage_end);
  const Matrix ps = row_softmax(logits.start.value());
  const Matrix pe = row_softmax(logits.end.value());
  ExamplePrediction out;
  out.span = decode_span(ps.data(), pe.data(), example.passage_begin,
                         example.passage_end, model.config.max_span_len,
                         model.config.null_threshold);
  if (example.trainable) {
    out.loss = span_loss(SpanLogits{logits.start.value(), logits.end.value()},
                         example.target);
    out.answer_text =
        extract_answer_text(out.span.best_span, example.sequence, example.passage);
  }
  out.span.answer_text = out.answer_text;
  return out;
}

}  // namespace syhgt
