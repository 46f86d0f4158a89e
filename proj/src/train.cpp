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

#include "syhgt/train.hpp"

#include <spdlog/spdlog.h>

#include <cmath>
#include <numeric>

#include "syhgt/error.hpp"

namespace syhgt {

AdamWState init_adamw(const AdamWConfig& config,
                      std::span<const Matrix* const> params) {
  AdamWState s;
  s.config = config;
  for (const Matrix* p : params) {
    s.m.emplace_back(p->rows(), p->cols());
    s.v.emplace_back(p->rows(), p->cols());
  }
  return s;
}

void adamw_step(std::span<Matrix* const> params, std::span<const Matrix> grads,
                AdamWState& state) {
  if (params.size() != grads.size() || params.size() != state.m.size()) {
    throw ShapeError("adamw: " + std::to_string(params.size()) + " parameters, " +
                     std::to_string(grads.size()) + " gradients, " +
                     std::to_string(state.m.size()) + " moment slots");
  }
  const AdamWConfig& c = state.config;
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double bias1 = 1.0 - std::pow(c.beta1, t);
  const double bias2 = 1.0 - std::pow(c.beta2, t);
  for (std::size_t k = 0; k < params.size(); ++k) {
    Matrix& p = *params[k];
    const Matrix& g = grads[k];
    Matrix& m = state.m[k];
    Matrix& v = state.v[k];
    if (!p.same_shape(g) || !p.same_shape(m)) {
      throw ShapeError("adamw: parameter " + p.shape() + ", gradient " + g.shape() +
                       ", moment " + m.shape());
    }
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * g[i];
      v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * g[i] * g[i];
      const double m_hat = m[i] / bias1;
      const double v_hat = v[i] / bias2;
      p[i] -= c.lr * (m_hat / (std::sqrt(v_hat) + c.eps)) + c.lr * c.weight_decay * p[i];
    }
  }
}

namespace {

struct Prepared {
  CompiledGraph graph;
  Matrix embeddings;
};

Prepared prepare(const PreparedExample& ex, const Model& model,
                 const EmbeddingProvider& embeddings) {
  Prepared p{compile_graph(ex.graph, model.edge_types, model.labels),
             embeddings.embed(ex.id, ex.sequence)};
  if (p.embeddings.cols() != model.config.dim) {
    throw ConfigError("embeddings for " + ex.id + " have width " +
                      std::to_string(p.embeddings.cols()) + ", model dim is " +
                      std::to_string(model.config.dim));
  }
  return p;
}

}  // namespace

Model train(const PreparedDataset& dataset, const EmbeddingProvider& embeddings,
            const RunConfig& config, TrainReport* report) {
  if (config.batch == 0) throw ConfigError("batch size must be at least 1");
  if (dataset.kind != config.model.graph_kind) {
    throw ConfigError("dataset holds " + std::string(to_string(dataset.kind)) +
                      " graphs but the run asks for " +
                      std::string(to_string(config.model.graph_kind)));
  }
  std::vector<std::size_t> usable;
  for (std::size_t i = 0; i < dataset.examples.size(); ++i) {
    if (dataset.examples[i].trainable) usable.push_back(i);
  }
  if (usable.empty()) throw ConfigError("no trainable examples in the dataset");

  std::vector<HeteroGraph> graphs;
  for (const auto& ex : dataset.examples) graphs.push_back(ex.graph);
  Model model = init_model(config.model, EdgeTypeRegistry::from_graphs(graphs),
                           LabelVocabulary::from_graphs(graphs), config.seed);

  std::vector<Prepared> prepared;
  for (std::size_t i : usable) {
    prepared.push_back(prepare(dataset.examples[i], model, embeddings));
  }

  const std::vector<Matrix*> params = model_parameters(model);
  AdamWState opt = init_adamw({config.lr, 0.9, 0.999, 1e-8, config.weight_decay},
                              std::vector<const Matrix*>(params.begin(), params.end()));
  TrainReport local;
  TrainReport& rep = report ? *report : local;
  rep = TrainReport{};
  rep.examples_used = usable.size();

  std::vector<std::size_t> order(usable.size());
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    Rng rng(mix_seed({config.seed, 0x5348554646ULL, epoch}));
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[rng.below(i)]);
    }

    double epoch_sum = 0.0;
    for (std::size_t b = 0; b < order.size(); b += config.batch) {
      const std::size_t e = std::min(order.size(), b + config.batch);
      const double inv = 1.0 / static_cast<double>(e - b);
      std::vector<Matrix> grads;
      for (const Matrix* p : params) grads.emplace_back(p->rows(), p->cols());
      double batch_loss = 0.0;
      for (std::size_t k = b; k < e; ++k) {
        const std::size_t idx = order[k];
        const PreparedExample& ex = dataset.examples[usable[idx]];
        const Prepared& pre = prepared[idx];
        Tape tape;
        ModelVars vars = bind_model(tape, model, true);
        const auto logits = forward_logits(vars, pre.graph, tape.constant(pre.embeddings),
                                           ex.passage_begin, ex.passage_end);
        const Var loss = span_loss(logits, ex.target);
        tape.backward(loss);
        const double value = loss.value()[0];
        batch_loss += value;
        epoch_sum += value;
        std::size_t slot = 0;
        visit_model_vars(vars, [&](const std::string&, Var& v) {
          const Matrix& g = tape.grad(v);
          Matrix& acc = grads[slot++];
          for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += g[i] * inv;
        });
      }
      adamw_step(params, grads, opt);
      rep.step_loss.push_back(batch_loss * inv);
      ++rep.steps;
      spdlog::debug("step {} loss {:.6f}", rep.steps, batch_loss * inv);
    }
    rep.epoch_loss.push_back(epoch_sum / static_cast<double>(order.size()));
    spdlog::info("epoch {} mean loss {:.6f}", epoch + 1, rep.epoch_loss.back());
  }
  return model;
}

Evaluation evaluate(const PreparedDataset& dataset, const Model& model,
                    const EmbeddingProvider& embeddings) {
  if (dataset.examples.empty()) throw ConfigError("evaluation set is empty");
  Evaluation out;
  std::vector<EvalItem> items;
  double loss_sum = 0.0;
  std::size_t loss_count = 0;
  for (const auto& ex : dataset.examples) {
    const Prepared pre = prepare(ex, model, embeddings);
    const ExamplePrediction pred = predict(model, ex, pre.graph, pre.embeddings);
    if (ex.trainable) {
      loss_sum += pred.loss;
      ++loss_count;
    }
    const double floor = 1e-300;
    const double margin = std::log(std::max(pred.span.null_score, floor)) -
                          std::log(std::max(pred.span.best_score, floor));
    out.predictions.emplace_back(ex.id, pred.answer_text);
    out.margins.emplace_back(ex.id, margin);
    items.push_back({ex.id, ex.is_impossible ? std::vector<std::string>{}
                                             : ex.gold_answers,
                     pred.answer_text});
  }
  out.result = evaluate_items(items);
  out.mean_loss = loss_count ? loss_sum / static_cast<double>(loss_count) : 0.0;
  return out;
}

nlohmann::ordered_json predictions_json(const Evaluation& eval) {
  nlohmann::ordered_json answers = nlohmann::ordered_json::object();
  nlohmann::ordered_json margins = nlohmann::ordered_json::object();
  for (const auto& [id, text] : eval.predictions) answers[id] = text;
  for (const auto& [id, m] : eval.margins) margins[id] = m;
  return {{"predictions", answers}, {"null_margins", margins}};
}

PreparedDataset gradcheck_fixture() {
  const std::string vocab_text =
      "[PAD]\n[UNK]\n[CLS]\n[SEP]\nsteam\n##boats\n?\nships\n";
  const std::string squad_json = R"({"version": "v2.0", "data": [{"title": "t",
    "paragraphs": [{"context": "ships", "qas": [{"id": "q1",
    "question": "steamboats ?", "is_impossible": false,
    "answers": [{"text": "ships", "answer_start": 0}]}]}]}]})";
  const std::string trees = "(NNS ships)\n(NP (NNS steamboats) (. ?))\n";
  const Vocab vocab = Vocab::parse(vocab_text);
  return build_dataset(read_squad(squad_json), read_bracketed(trees), vocab,
                       BuildOptions{});
}

GradCheckReport pipeline_grad_check(std::uint64_t seed, double eps) {
  const PreparedDataset data = gradcheck_fixture();
  const PreparedExample& ex = data.examples.front();
  ModelConfig cfg;
  cfg.graph_kind = GraphKind::Constituency;
  cfg.dim = 8;
  cfg.heads = 2;
  cfg.layers = 2;
  cfg.embedding_seed = seed;
  std::vector<HeteroGraph> graphs{ex.graph};
  Model model = init_model(cfg, EdgeTypeRegistry::from_graphs(graphs),
                           LabelVocabulary::from_graphs(graphs), seed);
  // Move the edge-type priors away from 1 so their gradients are exercised.
  Rng rng(mix_seed({seed, 17}));
  for (auto& layer : model.stack.layers) {
    for (auto& et : layer.edge_types) {
      for (double& x : et.log_prior.data()) x = rng.uniform(-0.5, 0.5);
    }
  }
  const CompiledGraph graph = compile_graph(ex.graph, model.edge_types, model.labels);
  const Matrix emb = StubProvider(cfg.dim, seed).embed(ex.id, ex.sequence);

  std::vector<NamedMatrix> params;
  visit_model(model, [&](const std::string& name, const Matrix& m) {
    params.push_back({name, &m});
  });
  auto build = [&](Tape& tape, std::span<const Var> leaves) {
    const ModelVars vars = bind_model(tape, model, leaves);
    const auto logits = forward_logits(vars, graph, tape.constant(emb),
                                       ex.passage_begin, ex.passage_end);
    return span_loss(logits, ex.target);
  };
  return check_gradients(params, build, eps);
}

}  // namespace syhgt
