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

// Heterogeneous graph transformer layers.
//
// Row-vector convention: a vertex state is a 1 x d row and projections are
// applied on the right (h * W). Each d x d vertex-kind projection is split
// column-wise into `heads` slices of width d / heads; edge-type matrices are
// per head, (d/heads) x (d/heads).
//
// For an edge s -> t of type r, in head k:
//   score  = mu[r,k] * (K_s W^A[r,k]) . Q_t / sqrt(d/heads)
//   A      = softmax of the scores over all in-edges of t (all types)
//   msg    = (h_s W^M[c_s])_k W^M[r,k]
//   agg_t  = concat_k sum_s A * msg
//   h'_t   = relu(agg_t W^C[c_t]) + h_t      (h'_t = h_t without in-edges)
// with mu = exp(log_prior), which keeps the prior positive.

#ifndef SYHGT_HGT_HPP_
#define SYHGT_HGT_HPP_

#include <array>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "syhgt/autodiff.hpp"
#include "syhgt/gradcheck.hpp"
#include "syhgt/graph.hpp"
#include "syhgt/tensor.hpp"

namespace syhgt {

template <class T>
struct KindProjections {
  T query;
  T key;
  T message;
  T output;
};

template <class T>
struct EdgeTypeParams {
  std::vector<T> attention;  // one per head
  std::vector<T> message;    // one per head
  T log_prior;               // 1 x heads
};

template <class T>
struct HgtLayer {
  std::size_t heads = 1;
  std::array<KindProjections<T>, kNumVertexKinds> kinds;
  std::vector<EdgeTypeParams<T>> edge_types;  // indexed by EdgeTypeRegistry
};

using HgtLayerParams = HgtLayer<Matrix>;
using HgtLayerVars = HgtLayer<Var>;

struct HgtStack {
  std::size_t dim = 0;
  std::size_t heads = 1;
  std::vector<HgtLayerParams> layers;
};

// Calls f(name, x) for every parameter of `layer`, in a fixed order. Works
// for HgtLayer<Matrix> and HgtLayer<Var>, const or not.
template <class Layer, class F>
void visit_layer(Layer& layer, const std::string& prefix, F&& f) {
  static constexpr std::array<const char*, kNumVertexKinds> kKind{
      "token", "lexeme", "constituent"};
  for (std::size_t c = 0; c < kNumVertexKinds; ++c) {
    auto& k = layer.kinds[c];
    const std::string p = prefix + kKind[c] + ".";
    f(p + "query", k.query);
    f(p + "key", k.key);
    f(p + "message", k.message);
    f(p + "output", k.output);
  }
  for (std::size_t r = 0; r < layer.edge_types.size(); ++r) {
    auto& e = layer.edge_types[r];
    const std::string p = prefix + "edge" + std::to_string(r) + ".";
    for (std::size_t h = 0; h < e.attention.size(); ++h) {
      f(p + "attention" + std::to_string(h), e.attention[h]);
    }
    for (std::size_t h = 0; h < e.message.size(); ++h) {
      f(p + "message" + std::to_string(h), e.message[h]);
    }
    f(p + "log_prior", e.log_prior);
  }
}

template <class Stack, class F>
void visit_stack(Stack& stack, F&& f) {
  for (std::size_t l = 0; l < stack.layers.size(); ++l) {
    visit_layer(stack.layers[l], "layer" + std::to_string(l) + ".", f);
  }
}

// Xavier-uniform projections, log_prior = 0 (mu = 1). Throws ConfigError if
// heads does not divide dim.
HgtLayerParams init_hgt_layer(std::size_t dim, std::size_t heads,
                              std::size_t num_edge_types, Rng& rng);
HgtStack init_hgt_stack(std::size_t dim, std::size_t heads, std::size_t layers,
                        std::size_t num_edge_types, Rng& rng);

// Leaves on `tape` mirroring `params`.
HgtLayerVars bind_layer(Tape& tape, const HgtLayerParams& params,
                        bool requires_grad);

// Constituent and POS labels with learned initial states. Row 0 is the
// shared unknown-label row.
class LabelVocabulary {
 public:
  static constexpr std::string_view kUnknown = "<unk>";

  LabelVocabulary() : labels_{std::string(kUnknown)} {}
  static LabelVocabulary from_graphs(std::span<const HeteroGraph> graphs);
  static LabelVocabulary from_labels(const std::vector<std::string>& labels);

  // 0 for labels not in the vocabulary.
  std::size_t index_of(const std::string& label) const;
  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }

 private:
  std::vector<std::string> labels_;
};

// A HeteroGraph resolved against the edge-type registry and label vocabulary,
// with the index lists the layer needs.
struct CompiledGraph {
  std::size_t num_vertices = 0;
  std::vector<VertexKind> kinds;
  std::array<std::vector<std::size_t>, kNumVertexKinds> by_kind;
  // Per kind, the vertices that have at least one in-edge.
  std::array<std::vector<std::size_t>, kNumVertexKinds> targets_by_kind;

  std::size_t num_edge_types = 0;
  // Edges grouped by type; flat order concatenates the groups by type id.
  std::vector<std::vector<std::size_t>> src_by_type;
  std::vector<std::vector<std::size_t>> dst_by_type;
  std::vector<std::size_t> flat_dst;
  std::vector<std::size_t> flat_to_edge;  // flat position -> graph edge index

  // Initial-state sources.
  std::vector<std::size_t> token_vertices;
  std::vector<std::size_t> token_positions;
  std::vector<std::size_t> lexeme_vertices;
  std::vector<std::vector<std::size_t>> lexeme_positions;
  std::vector<std::size_t> constituent_vertices;
  std::vector<std::size_t> constituent_rows;

  std::size_t num_edges() const { return flat_dst.size(); }
};

CompiledGraph compile_graph(const HeteroGraph& graph,
                            const EdgeTypeRegistry& edge_types,
                            const LabelVocabulary& labels);

// Token rows copied from `token_embeddings` by sequence position, lexeme rows
// the mean of their subwords' rows, constituent rows looked up in
// `label_table` (one row per LabelVocabulary entry).
Var init_vertex_states(const CompiledGraph& graph, Var token_embeddings,
                       Var label_table);
Matrix init_vertex_states(const CompiledGraph& graph,
                          const Matrix& token_embeddings,
                          const Matrix& label_table);

// Per-head attention weights of one layer, one row per graph edge (in the
// graph's edge order), one column per head.
struct LayerTrace {
  Matrix attention;
};

Var hgt_layer(const CompiledGraph& graph, Var h, const HgtLayerVars& params,
              std::vector<Var>* attention_per_head = nullptr);
Matrix hgt_layer_forward(const CompiledGraph& graph, const Matrix& h,
                         const HgtLayerParams& params,
                         LayerTrace* trace = nullptr);

Var hgt_stack(const CompiledGraph& graph, Var h0,
              const std::vector<HgtLayerVars>& layers);
Matrix hgt_stack_forward(const CompiledGraph& graph, const Matrix& h0,
                         const HgtStack& stack);

// Finite-difference check of every stack parameter (including log_prior)
// for loss_fn(hgt_stack(h0)). Requires N <= 20 and eps in [1e-7, 1e-5].
GradCheckReport grad_check(const CompiledGraph& graph, const Matrix& h0,
                           const HgtStack& stack,
                           const std::function<Var(Var)>& loss_fn, double eps);

}  // namespace syhgt

#endif  // SYHGT_HGT_HPP_
