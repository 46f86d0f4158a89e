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

#include "syhgt/hgt.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>

#include "syhgt/error.hpp"

namespace syhgt {

HgtLayerParams init_hgt_layer(std::size_t dim, std::size_t heads,
                              std::size_t num_edge_types, Rng& rng) {
  if (heads == 0 || dim == 0 || dim % heads != 0) {
    throw ConfigError("dim " + std::to_string(dim) +
                      " is not divisible into " + std::to_string(heads) +
                      " heads");
  }
  const std::size_t dk = dim / heads;
  HgtLayerParams layer;
  layer.heads = heads;
  for (auto& k : layer.kinds) {
    k.query = xavier_uniform(dim, dim, rng);
    k.key = xavier_uniform(dim, dim, rng);
    k.message = xavier_uniform(dim, dim, rng);
    k.output = xavier_uniform(dim, dim, rng);
  }
  layer.edge_types.resize(num_edge_types);
  for (auto& e : layer.edge_types) {
    for (std::size_t h = 0; h < heads; ++h) {
      e.attention.push_back(xavier_uniform(dk, dk, rng));
    }
    for (std::size_t h = 0; h < heads; ++h) {
      e.message.push_back(xavier_uniform(dk, dk, rng));
    }
    e.log_prior = Matrix(1, heads, 0.0);
  }
  return layer;
}

HgtStack init_hgt_stack(std::size_t dim, std::size_t heads, std::size_t layers,
                        std::size_t num_edge_types, Rng& rng) {
  HgtStack stack;
  stack.dim = dim;
  stack.heads = heads;
  for (std::size_t l = 0; l < layers; ++l) {
    stack.layers.push_back(init_hgt_layer(dim, heads, num_edge_types, rng));
  }
  if (layers == 0 && (heads == 0 || dim % heads != 0)) {
    throw ConfigError("dim must be divisible by heads");
  }
  return stack;
}

HgtLayerVars bind_layer(Tape& tape, const HgtLayerParams& params,
                        bool requires_grad) {
  HgtLayerVars vars;
  vars.heads = params.heads;
  for (std::size_t c = 0; c < kNumVertexKinds; ++c) {
    const auto& k = params.kinds[c];
    vars.kinds[c] = {tape.leaf(k.query, requires_grad),
                     tape.leaf(k.key, requires_grad),
                     tape.leaf(k.message, requires_grad),
                     tape.leaf(k.output, requires_grad)};
  }
  for (const auto& e : params.edge_types) {
    EdgeTypeParams<Var> ev;
    for (const auto& m : e.attention) ev.attention.push_back(tape.leaf(m, requires_grad));
    for (const auto& m : e.message) ev.message.push_back(tape.leaf(m, requires_grad));
    ev.log_prior = tape.leaf(e.log_prior, requires_grad);
    vars.edge_types.push_back(std::move(ev));
  }
  return vars;
}

LabelVocabulary LabelVocabulary::from_labels(
    const std::vector<std::string>& labels) {
  std::vector<std::string> sorted = labels;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::erase(sorted, std::string(kUnknown));
  LabelVocabulary v;
  v.labels_.insert(v.labels_.end(), sorted.begin(), sorted.end());
  return v;
}

LabelVocabulary LabelVocabulary::from_graphs(
    std::span<const HeteroGraph> graphs) {
  std::vector<std::string> labels;
  for (const auto& g : graphs) {
    for (const auto& v : g.vertices()) {
      if (v.kind == VertexKind::Constituent) labels.push_back(v.label);
    }
  }
  return from_labels(labels);
}

std::size_t LabelVocabulary::index_of(const std::string& label) const {
  // labels_[1..] is sorted.
  auto it = std::lower_bound(labels_.begin() + 1, labels_.end(), label);
  if (it == labels_.end() || *it != label) return 0;
  return static_cast<std::size_t>(it - labels_.begin());
}

CompiledGraph compile_graph(const HeteroGraph& graph,
                            const EdgeTypeRegistry& edge_types,
                            const LabelVocabulary& labels) {
  CompiledGraph g;
  g.num_vertices = graph.num_vertices();
  g.num_edge_types = edge_types.size();
  g.src_by_type.resize(g.num_edge_types);
  g.dst_by_type.resize(g.num_edge_types);
  std::vector<std::vector<std::size_t>> edge_ids(g.num_edge_types);
  std::vector<bool> has_in(g.num_vertices, false);
  std::vector<std::vector<std::size_t>> morph_sources(g.num_vertices);

  for (std::size_t e = 0; e < graph.num_edges(); ++e) {
    const Edge& edge = graph.edges()[e];
    const std::size_t r = edge_types.index_of(edge.kind);
    g.src_by_type[r].push_back(edge.src);
    g.dst_by_type[r].push_back(edge.dst);
    edge_ids[r].push_back(e);
    has_in[edge.dst] = true;
    if (edge.kind.category == EdgeCategory::Morphology &&
        edge.kind.direction == EdgeDirection::Forward) {
      morph_sources[edge.dst].push_back(edge.src);
    }
  }
  for (std::size_t r = 0; r < g.num_edge_types; ++r) {
    g.flat_dst.insert(g.flat_dst.end(), g.dst_by_type[r].begin(),
                      g.dst_by_type[r].end());
    g.flat_to_edge.insert(g.flat_to_edge.end(), edge_ids[r].begin(),
                          edge_ids[r].end());
  }

  for (const Vertex& v : graph.vertices()) {
    const auto c = static_cast<std::size_t>(v.kind);
    g.kinds.push_back(v.kind);
    g.by_kind[c].push_back(v.id);
    if (has_in[v.id]) g.targets_by_kind[c].push_back(v.id);
    switch (v.kind) {
      case VertexKind::Token:
        if (!v.seq_pos) {
          throw ContractError("token vertex " + std::to_string(v.id) +
                              " has no sequence position");
        }
        g.token_vertices.push_back(v.id);
        g.token_positions.push_back(*v.seq_pos);
        break;
      case VertexKind::Lexeme: {
        std::vector<std::size_t> positions;
        for (std::size_t src : morph_sources[v.id]) {
          const auto& sv = graph.vertices()[src];
          if (sv.kind != VertexKind::Token || !sv.seq_pos) {
            throw ContractError("morphology edge from a non-token vertex");
          }
          positions.push_back(*sv.seq_pos);
        }
        if (positions.empty()) {
          throw ContractError("lexeme vertex " + std::to_string(v.id) +
                              " has no subwords");
        }
        g.lexeme_vertices.push_back(v.id);
        g.lexeme_positions.push_back(std::move(positions));
        break;
      }
      case VertexKind::Constituent: {
        const std::size_t row = labels.index_of(v.label);
        if (row == 0) {
          spdlog::debug("constituent label '{}' unseen; using the unknown row",
                        v.label);
        }
        g.constituent_vertices.push_back(v.id);
        g.constituent_rows.push_back(row);
        break;
      }
    }
  }
  return g;
}

Var init_vertex_states(const CompiledGraph& graph, Var token_embeddings,
                       Var label_table) {
  const std::size_t n = graph.num_vertices;
  std::vector<Var> parts;
  if (!graph.token_vertices.empty()) {
    parts.push_back(scatter_rows(
        gather_rows(token_embeddings, graph.token_positions),
        graph.token_vertices, n));
  }
  if (!graph.lexeme_vertices.empty()) {
    parts.push_back(
        scatter_rows(group_mean(token_embeddings, graph.lexeme_positions),
                     graph.lexeme_vertices, n));
  }
  if (!graph.constituent_vertices.empty()) {
    if (label_table.cols() != token_embeddings.cols()) {
      throw ShapeError("label table " + label_table.value().shape() +
                       " does not match embeddings " +
                       token_embeddings.value().shape());
    }
    parts.push_back(
        scatter_rows(gather_rows(label_table, graph.constituent_rows),
                     graph.constituent_vertices, n));
  }
  if (parts.empty()) {
    return token_embeddings.tape().constant(
        Matrix(0, token_embeddings.cols()));
  }
  Var h = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) h = add(h, parts[i]);
  return h;
}

Matrix init_vertex_states(const CompiledGraph& graph,
                          const Matrix& token_embeddings,
                          const Matrix& label_table) {
  Tape tape;
  return init_vertex_states(graph, tape.constant(token_embeddings),
                            tape.constant(label_table))
      .value();
}

namespace {

// h * W[c] for the rows of each kind, reassembled into an N x d matrix.
Var project_by_kind(const CompiledGraph& graph, Var h,
                    const HgtLayerVars& params,
                    Var KindProjections<Var>::*which) {
  std::vector<Var> parts;
  for (std::size_t c = 0; c < kNumVertexKinds; ++c) {
    const auto& rows = graph.by_kind[c];
    if (rows.empty()) continue;
    parts.push_back(scatter_rows(
        matmul(gather_rows(h, rows), params.kinds[c].*which), rows,
        graph.num_vertices));
  }
  Var out = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) out = add(out, parts[i]);
  return out;
}

}  // namespace

Var hgt_layer(const CompiledGraph& graph, Var h, const HgtLayerVars& params,
              std::vector<Var>* attention_per_head) {
  if (h.rows() != graph.num_vertices) {
    throw ShapeError("layer input has " + std::to_string(h.rows()) +
                     " rows for a graph of " +
                     std::to_string(graph.num_vertices) + " vertices");
  }
  if (params.edge_types.size() != graph.num_edge_types) {
    throw ShapeError("layer has " + std::to_string(params.edge_types.size()) +
                     " edge types, graph was compiled for " +
                     std::to_string(graph.num_edge_types));
  }
  if (graph.num_edges() == 0) return h;

  const std::size_t dim = h.cols();
  const std::size_t heads = params.heads;
  const std::size_t dk = dim / heads;
  const double inv_sqrt_dk = 1.0 / std::sqrt(static_cast<double>(dk));

  const Var q = project_by_kind(graph, h, params, &KindProjections<Var>::query);
  const Var k = project_by_kind(graph, h, params, &KindProjections<Var>::key);
  const Var m = project_by_kind(graph, h, params, &KindProjections<Var>::message);

  std::vector<Var> head_outputs;
  for (std::size_t head = 0; head < heads; ++head) {
    const Var qh = slice_cols(q, head * dk, dk);
    const Var kh = slice_cols(k, head * dk, dk);
    const Var mh = slice_cols(m, head * dk, dk);
    std::vector<Var> scores;
    std::vector<Var> messages;
    for (std::size_t r = 0; r < graph.num_edge_types; ++r) {
      const auto& src = graph.src_by_type[r];
      if (src.empty()) continue;
      const auto& dst = graph.dst_by_type[r];
      const auto& et = params.edge_types[r];
      const Var keyed = matmul(gather_rows(kh, src), et.attention[head]);
      const Var dot = row_sum(hadamard(keyed, gather_rows(qh, dst)));
      const Var prior = exp(slice_cols(et.log_prior, head, 1));
      scores.push_back(scale_by(scale(dot, inv_sqrt_dk), prior));
      messages.push_back(matmul(gather_rows(mh, src), et.message[head]));
    }
    const Var attention =
        segment_softmax(concat_rows(scores), graph.flat_dst, graph.num_vertices);
    if (attention_per_head) attention_per_head->push_back(attention);
    const Var weighted = scale_rows(concat_rows(messages), attention);
    head_outputs.push_back(
        scatter_rows(weighted, graph.flat_dst, graph.num_vertices));
  }
  const Var aggregated =
      head_outputs.size() == 1 ? head_outputs.front() : concat_cols(head_outputs);

  Var out = h;
  for (std::size_t c = 0; c < kNumVertexKinds; ++c) {
    const auto& targets = graph.targets_by_kind[c];
    if (targets.empty()) continue;
    const Var update = relu(
        matmul(gather_rows(aggregated, targets), params.kinds[c].output));
    out = scatter_add_into(out, update, targets);
  }
  return out;
}

Matrix hgt_layer_forward(const CompiledGraph& graph, const Matrix& h,
                         const HgtLayerParams& params, LayerTrace* trace) {
  Tape tape;
  const HgtLayerVars vars = bind_layer(tape, params, false);
  std::vector<Var> attention;
  const Var out = hgt_layer(graph, tape.constant(h), vars,
                            trace ? &attention : nullptr);
  if (trace) {
    trace->attention = Matrix(graph.num_edges(), params.heads);
    for (std::size_t head = 0; head < attention.size(); ++head) {
      const Matrix& a = attention[head].value();
      for (std::size_t f = 0; f < graph.num_edges(); ++f) {
        trace->attention(graph.flat_to_edge[f], head) = a[f];
      }
    }
  }
  return out.value();
}

Var hgt_stack(const CompiledGraph& graph, Var h0,
              const std::vector<HgtLayerVars>& layers) {
  Var h = h0;
  for (const auto& layer : layers) h = hgt_layer(graph, h, layer);
  return h;
}

Matrix hgt_stack_forward(const CompiledGraph& graph, const Matrix& h0,
                         const HgtStack& stack) {
  Tape tape;
  std::vector<HgtLayerVars> layers;
  for (const auto& l : stack.layers) layers.push_back(bind_layer(tape, l, false));
  return hgt_stack(graph, tape.constant(h0), layers).value();
}

GradCheckReport grad_check(const CompiledGraph& graph, const Matrix& h0,
                           const HgtStack& stack,
                           const std::function<Var(Var)>& loss_fn, double eps) {
  if (graph.num_vertices > 20) {
    throw ContractError("grad_check is meant for graphs of at most 20 vertices");
  }
  if (eps < 1e-7 || eps > 1e-5) {
    throw ContractError("grad_check step must lie in [1e-7, 1e-5]");
  }
  std::vector<NamedMatrix> params;
  visit_stack(stack, [&](const std::string& name, const Matrix& m) {
    params.push_back({name, &m});
  });
  auto build = [&](Tape& tape, std::span<const Var> leaves) {
    // Rebuild the layer structure around the supplied leaves, in visit order.
    std::vector<HgtLayerVars> layers;
    std::size_t next = 0;
    for (const auto& l : stack.layers) {
      HgtLayerVars vars = bind_layer(tape, l, false);
      visit_layer(vars, "", [&](const std::string&, Var& v) { v = leaves[next++]; });
      layers.push_back(std::move(vars));
    }
    return loss_fn(hgt_stack(graph, tape.constant(h0), layers));
  };
  return check_gradients(params, build, eps);
}

}  // namespace syhgt
